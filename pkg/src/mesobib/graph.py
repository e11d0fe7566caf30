"""Weighted co-author network construction and reduction.

Nodes are author keys; an undirected edge carries the number of records on
which both endpoints are co-authors. The reduction step removes one-paper
authors; downstream analysis runs on the giant component of the reduced
network.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .ingest import Corpus


@dataclass
class CoauthorNetwork:
    """Undirected integer-weighted graph over author keys.

    ``adj`` maps each node to ``{neighbor: weight}`` (stored symmetrically,
    no self-loops). ``paper_count`` and ``provenance`` (author -> record
    ids) are populated by :func:`build_network`; networks read back from
    files carry empty provenance.
    """

    adj: dict[str, dict[str, int]] = field(default_factory=dict)
    paper_count: dict[str, int] = field(default_factory=dict)
    provenance: dict[str, frozenset[str]] = field(default_factory=dict)

    def nodes(self) -> list[str]:
        return sorted(self.adj)

    @property
    def node_count(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj.values()) // 2

    def degree(self, key: str) -> int:
        return len(self.adj[key])

    def strength(self, key: str) -> int:
        """Sum of incident edge weights (number of co-author events)."""
        return sum(self.adj[key].values())

    def weight(self, a: str, b: str) -> int:
        return self.adj.get(a, {}).get(b, 0)

    def edges(self) -> list[tuple[str, str, int]]:
        """Edges as (a, b, weight) with a < b, sorted."""
        out = []
        for a, nbrs in self.adj.items():
            for b, w in nbrs.items():
                if a < b:
                    out.append((a, b, w))
        out.sort()
        return out

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges())

    def add_node(self, key: str) -> None:
        self.adj.setdefault(key, {})

    def add_edge(self, a: str, b: str, weight: int = 1) -> None:
        if a == b:
            raise ValueError(f"self-loop on {a!r}")
        self.add_node(a)
        self.add_node(b)
        self.adj[a][b] = self.adj[a].get(b, 0) + weight
        self.adj[b][a] = self.adj[b].get(a, 0) + weight

    def subgraph(self, keys) -> "CoauthorNetwork":
        """Induced subnetwork on ``keys``; metadata restricted to it."""
        keep = set(keys)
        adj = {a: {b: w for b, w in nbrs.items() if b in keep} for a, nbrs in self.adj.items() if a in keep}
        return CoauthorNetwork(
            adj=adj,
            paper_count={k: v for k, v in self.paper_count.items() if k in keep},
            provenance={k: v for k, v in self.provenance.items() if k in keep},
        )

    def structurally_equal(self, other: "CoauthorNetwork") -> bool:
        return self.adj == other.adj


def build_network(corpus: Corpus) -> CoauthorNetwork:
    """Fold a corpus into the weighted co-author network.

    Every unordered author pair on a record gains +1 edge weight; isolated
    single-author records only add the node.
    """
    net = CoauthorNetwork()
    counts: dict[str, int] = {}
    prov: dict[str, set[str]] = {}
    for rec in corpus.records:
        for key in rec.authors:
            net.add_node(key)
            counts[key] = counts.get(key, 0) + 1
            prov.setdefault(key, set()).add(rec.record_id)
        for a, b in combinations(rec.authors, 2):
            net.add_edge(a, b, 1)
    net.paper_count = counts
    net.provenance = {k: frozenset(v) for k, v in prov.items()}
    return net


def reduce_single_paper_authors(net: CoauthorNetwork) -> CoauthorNetwork:
    """Drop every author with exactly one paper, in a single pass.

    The rule is applied once, not iterated to a fixpoint: a multi-paper
    author whose co-authors all disappear keeps an isolated node and simply
    falls outside the giant component.
    """
    keep = [k for k in net.adj if net.paper_count.get(k, 0) != 1]
    return net.subgraph(keep)


def connected_components(net: CoauthorNetwork) -> list[list[str]]:
    """Components as sorted node lists, largest first (ties by first key)."""
    seen: set[str] = set()
    comps: list[list[str]] = []
    for start in sorted(net.adj):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nbr in net.adj[node]:
                if nbr not in seen:
                    seen.add(nbr)
                    comp.append(nbr)
                    queue.append(nbr)
        comp.sort()
        comps.append(comp)
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def giant_component(net: CoauthorNetwork) -> tuple[CoauthorNetwork, float]:
    """Largest connected component and its node fraction.

    Ties between equal-sized components go to the one holding the
    lexicographically smallest key. Raises ValueError on an empty network.
    """
    if not net.adj:
        raise ValueError("empty network")
    comps = connected_components(net)
    giant = comps[0]
    return net.subgraph(giant), len(giant) / net.node_count


def slice_spans(first_year: int, last_year: int, slice_count: int) -> list[tuple[int, int]]:
    """Partition [first_year, last_year] into consecutive year ranges.

    Ranges are as equal as possible; earlier slices take the extra year
    when the span is not divisible.
    """
    if slice_count < 1:
        raise ValueError("slice_count must be >= 1")
    years = last_year - first_year + 1
    if years < slice_count:
        raise ValueError(f"time span of {years} year(s) is shorter than {slice_count} slices")
    base, extra = divmod(years, slice_count)
    spans = []
    start = first_year
    for i in range(slice_count):
        length = base + (1 if i < extra else 0)
        spans.append((start, start + length - 1))
        start += length
    return spans


@dataclass(frozen=True)
class GrowthPoint:
    slice_end: int
    author_count: int
    giant_fraction: float


def growth_curve(corpus: Corpus, slice_count: int) -> list[GrowthPoint]:
    """Cumulative growth of the reduced network per time slice.

    For each slice boundary the reduced network is rebuilt from all records
    up to and including that slice; the point carries the cumulative author
    count and the giant-component fraction (0.0 while the network is empty).
    """
    if corpus.time_span is None:
        raise ValueError("empty corpus")
    spans = slice_spans(corpus.time_span[0], corpus.time_span[1], slice_count)
    points = []
    for _, end in spans:
        upto = Corpus(
            records=tuple(r for r in corpus.records if r.year <= end),
            time_span=corpus.time_span,
        )
        reduced = reduce_single_paper_authors(build_network(upto))
        if reduced.node_count == 0:
            points.append(GrowthPoint(end, 0, 0.0))
        else:
            _, fraction = giant_component(reduced)
            points.append(GrowthPoint(end, reduced.node_count, fraction))
    return points
