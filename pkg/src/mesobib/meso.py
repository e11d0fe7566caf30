"""Inter-cluster connection classification and cluster-level networks.

Every pair of clusters joined by at least one co-author edge gets a
connection record. The separator size of a connection is the minimum
number of author nodes whose removal deletes every bridge edge; on the
bipartite bridge graph this equals the maximum matching (Koenig duality).
Connections severable by removing at most two authors are *transfer*
links (career migrations, one-off services); everything else is a
dedicated *collaboration* link. Patterns refine the geometry: a single
cut author gives 1-1 or 1-m, a two-author cut gives the doubled 2x form,
and wider bridges split into m-m with (A) or without (B) a direct edge
between the two principal investigators.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass

from .cluster import ClusterInfo, Clustering
from .graph import CoauthorNetwork

LINK_TRANSFER = "transfer"
LINK_COLLABORATION = "collaboration"
PATTERNS = ("one_one", "one_many", "two_by", "mm_A", "mm_B")


@dataclass(frozen=True)
class InterClusterConnection:
    cluster_pair: tuple[int, int]  # (a, b) with a < b
    bridge_edges: tuple[tuple[str, str, int], ...]  # (author in a, author in b, weight)
    separator_size: int
    link_type: str
    pattern: str
    total_weight: int


def bridge_edges(net: CoauthorNetwork, clustering: Clustering) -> dict[tuple[int, int], list[tuple[str, str, int]]]:
    """Bucket every inter-cluster edge under its unordered cluster pair.

    Edge endpoints are stored in pair order: first author belongs to the
    lower cluster id. Nodes without an assignment are ignored.
    """
    assignment = clustering.assignment
    buckets: dict[tuple[int, int], list[tuple[str, str, int]]] = {}
    for a, b, w in net.edges():
        ca = assignment.get(a)
        cb = assignment.get(b)
        if ca is None or cb is None or ca == cb:
            continue
        if ca < cb:
            buckets.setdefault((ca, cb), []).append((a, b, w))
        else:
            buckets.setdefault((cb, ca), []).append((b, a, w))
    for edges in buckets.values():
        edges.sort()
    return buckets


def separator_size(bridge) -> int:
    """Minimum number of authors whose removal deletes every bridge edge.

    Computed exactly as the maximum matching of the bipartite bridge graph
    (Koenig's theorem); only the topology matters, weights do not.
    """
    bridge = list(bridge)
    if not bridge:
        raise ValueError("empty bridge")
    adj: dict[str, list[str]] = {}
    for a, b, _ in bridge:
        adj.setdefault(a, []).append(b)
    for nbrs in adj.values():
        nbrs.sort()
    match_right: dict[str, str] = {}

    def augment(a: str, visited: set[str]) -> bool:
        for b in adj[a]:
            if b in visited:
                continue
            visited.add(b)
            if b not in match_right or augment(match_right[b], visited):
                match_right[b] = a
                return True
        return False

    size = 0
    for a in sorted(adj):
        if augment(a, set()):
            size += 1
    return size


def principal_investigator(info: ClusterInfo) -> str:
    """The cluster's most productive member.

    Ties fall back to the highest within-cluster strength, then the
    smallest key.
    """
    sub = info.subgraph
    return sorted(
        info.members,
        key=lambda k: (-sub.paper_count.get(k, 0), -sub.strength(k), k),
    )[0]


def classify_connection(bridge, info_a: ClusterInfo, info_b: ClusterInfo) -> InterClusterConnection:
    """Type and pattern of one inter-cluster connection."""
    bridge = sorted(bridge)
    sep = separator_size(bridge)
    link_type = LINK_TRANSFER if sep <= 2 else LINK_COLLABORATION
    if sep == 1:
        pattern = "one_one" if len(bridge) == 1 else "one_many"
    elif sep == 2:
        pattern = "two_by"
    else:
        pi_a = principal_investigator(info_a)
        pi_b = principal_investigator(info_b)
        pi_linked = any(a == pi_a and b == pi_b for a, b, _ in bridge)
        pattern = "mm_A" if pi_linked else "mm_B"
    pair = (info_a.cluster_id, info_b.cluster_id)
    if pair[0] > pair[1]:
        pair = (pair[1], pair[0])
    return InterClusterConnection(
        cluster_pair=pair,
        bridge_edges=tuple(bridge),
        separator_size=sep,
        link_type=link_type,
        pattern=pattern,
        total_weight=sum(w for _, _, w in bridge),
    )


def classify_all(net: CoauthorNetwork, clustering: Clustering, infos) -> list[InterClusterConnection]:
    """Classify every inter-cluster connection of a clustered network."""
    by_id = {info.cluster_id: info for info in infos}
    out = []
    for (ca, cb), bridge in sorted(bridge_edges(net, clustering).items()):
        out.append(classify_connection(bridge, by_id[ca], by_id[cb]))
    return out


@dataclass(frozen=True)
class ClusterNetworkStats:
    participating_clusters: int
    edge_count: int
    participating_fraction: float | None  # of all clusters, when known
    link_type_fraction: float | None  # of all classified connections
    degree_mean: float
    degree_median: float
    degree_max: int
    component_count: int
    has_giant: bool  # largest component holds a majority of participants


@dataclass(frozen=True)
class ClusterLevelNetwork:
    kind: str
    nodes: tuple[int, ...]
    edges: tuple[InterClusterConnection, ...]
    stats: ClusterNetworkStats


def build_cluster_network(connections, kind: str, total_clusters: int | None = None) -> ClusterLevelNetwork:
    """Cluster-level network of one link type, with its degree statistics."""
    if kind not in (LINK_TRANSFER, LINK_COLLABORATION):
        raise ValueError(f"unknown link type {kind!r}")
    connections = list(connections)
    kept = tuple(c for c in connections if c.link_type == kind)
    nodes = tuple(sorted({cid for c in kept for cid in c.cluster_pair}))
    degree = {cid: 0 for cid in nodes}
    adj: dict[int, list[int]] = {cid: [] for cid in nodes}
    for c in kept:
        a, b = c.cluster_pair
        degree[a] += 1
        degree[b] += 1
        adj[a].append(b)
        adj[b].append(a)
    # component sweep over the (small) cluster graph
    seen: set[int] = set()
    comp_sizes = []
    for start in nodes:
        if start in seen:
            continue
        size = 0
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            size += 1
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        comp_sizes.append(size)
    degrees = sorted(degree.values())
    n = len(degrees)
    if n:
        mid = n // 2
        median = float(degrees[mid]) if n % 2 else (degrees[mid - 1] + degrees[mid]) / 2.0
    else:
        median = 0.0
    stats = ClusterNetworkStats(
        participating_clusters=n,
        edge_count=len(kept),
        participating_fraction=(n / total_clusters if total_clusters else None),
        link_type_fraction=(len(kept) / len(connections) if connections else None),
        degree_mean=(sum(degrees) / n if n else 0.0),
        degree_median=median,
        degree_max=(degrees[-1] if n else 0),
        component_count=len(comp_sizes),
        has_giant=bool(comp_sizes and max(comp_sizes) * 2 > n),
    )
    return ClusterLevelNetwork(kind=kind, nodes=nodes, edges=kept, stats=stats)


def cluster_network_as_graph(cln: ClusterLevelNetwork) -> CoauthorNetwork:
    """Cluster-level network as a plain graph (ids as labels) for NET export."""
    net = CoauthorNetwork()
    for cid in cln.nodes:
        net.add_node(f"C{cid}")
    for c in cln.edges:
        a, b = c.cluster_pair
        net.add_edge(f"C{a}", f"C{b}", c.total_weight)
    return net


def extract_neighborhood(
    net: CoauthorNetwork, clustering: Clustering, seed_cluster_id: int
) -> tuple[CoauthorNetwork, dict[str, int]]:
    """Author-level subnetwork of a seed cluster and its linked neighbours.

    Returns the induced subgraph together with a node -> cluster id
    annotation for visualization export.
    """
    clusters = clustering.clusters()
    if seed_cluster_id not in clusters:
        raise ValueError(f"unknown cluster id {seed_cluster_id}")
    linked = {seed_cluster_id}
    for (ca, cb) in bridge_edges(net, clustering):
        if ca == seed_cluster_id:
            linked.add(cb)
        elif cb == seed_cluster_id:
            linked.add(ca)
    keys = [k for cid in sorted(linked) for k in clusters[cid]]
    sub = net.subgraph(keys)
    return sub, {k: clustering.assignment[k] for k in keys}


_SHADES = ("gray90", "gray75", "gray60", "gray45", "gray30", "white")


def neighborhood_dot(sub: CoauthorNetwork, annotation: dict[str, int]) -> str:
    """DOT rendering of a neighborhood; each cluster gets a distinct shade."""
    cluster_ids = sorted(set(annotation.values()))
    shade = {cid: _SHADES[i % len(_SHADES)] for i, cid in enumerate(cluster_ids)}
    lines = ["graph neighborhood {", "  node [style=filled];"]
    for key in sub.nodes():
        cid = annotation[key]
        lines.append(f'  "{key}" [fillcolor={shade[cid]}, cluster={cid}];')
    for a, b, w in sub.edges():
        lines.append(f'  "{a}" -- "{b}" [weight={w}, penwidth={w}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cluster_network_dot(cln: ClusterLevelNetwork, attributes: dict[int, dict] | None = None) -> str:
    """DOT rendering of a cluster-level network.

    ``attributes`` may carry per-cluster ``size``, ``hubness`` and ``geo``
    entries; the geographic label picks shape and fill per the display
    legend in :mod:`mesobib.geo`.
    """
    from .geo import display_style

    attributes = attributes or {}
    lines = [f"graph {cln.kind} {{", "  node [style=filled];"]
    for cid in cln.nodes:
        attrs = attributes.get(cid, {})
        shape, color = display_style(str(attrs.get("geo", "unknown")))
        extra = ""
        if "size" in attrs:
            extra += f", size={attrs['size']}"
        if "hubness" in attrs:
            extra += f', hubness="{attrs["hubness"]}"'
        lines.append(f'  "C{cid}" [shape={shape}, fillcolor="{color}"{extra}];')
    for c in cln.edges:
        a, b = c.cluster_pair
        lines.append(f'  "C{a}" -- "C{b}" [weight={c.total_weight}, label="{c.pattern}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


CONNECTION_COLUMNS = ("cluster_a", "cluster_b", "separator", "link_type", "pattern", "weight")


def write_connections(connections) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONNECTION_COLUMNS)
    for c in sorted(connections, key=lambda c: c.cluster_pair):
        writer.writerow(
            [c.cluster_pair[0], c.cluster_pair[1], c.separator_size, c.link_type, c.pattern, c.total_weight]
        )
    return buf.getvalue()


def read_connections(text: str) -> list[InterClusterConnection]:
    """Connections back from CSV; bridge edges are not part of the format."""
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        out.append(
            InterClusterConnection(
                cluster_pair=(int(row["cluster_a"]), int(row["cluster_b"])),
                bridge_edges=(),
                separator_size=int(row["separator"]),
                link_type=row["link_type"],
                pattern=row["pattern"],
                total_weight=int(row["weight"]),
            )
        )
    return out
