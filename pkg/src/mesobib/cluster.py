"""Community detection by description-length minimization.

The objective is the two-level codelength of a random walk on the weighted
network (the map equation of Rosvall & Bergstrom): the expected number of
bits per step needed to name the walker's position using one codebook per
module plus an index codebook for switches between modules. Partitions
that trap the walk inside densely connected author groups compress well.

The search is restart-based and fully deterministic for a fixed
``(seed, trials)``: each trial greedily merges modules while the merge
lowers the codelength, then refines by single-node reassignment to a local
optimum; the best trial wins. Disconnected networks are handled one
component at a time. ``load_clustering`` injects partitions produced
elsewhere (Pajek CLU) under the same dense-id convention.
"""

from __future__ import annotations

import heapq
import math
import random
from collections import deque
from dataclasses import dataclass

from . import cohort
from .graph import CoauthorNetwork, connected_components
from .ingest import Corpus
from .pajek import import_clu

_EPS = 1e-12


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


@dataclass(frozen=True)
class Clustering:
    """Total assignment of nodes to dense cluster ids (1-based).

    Ids are ordered by descending cluster size, ties by smallest member
    key. ``quality`` is the codelength in bits per walk step; ``seed`` is
    -1 for clusterings loaded from file.
    """

    assignment: dict[str, int]
    quality: float
    seed: int

    def clusters(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for key, cid in self.assignment.items():
            out.setdefault(cid, []).append(key)
        for members in out.values():
            members.sort()
        return dict(sorted(out.items()))


@dataclass
class ClusterInfo:
    """Per-cluster aggregates over the author network and its corpus."""

    cluster_id: int
    members: tuple[str, ...]
    size: int
    publications: int
    internal_edge_count: int
    size_category: str
    subgraph: CoauthorNetwork


@dataclass(frozen=True)
class ClusterSummary:
    cluster_count: int
    mean_size: float
    median_size: float
    percentiles: dict[str, float]  # min, p10, p25, median, p75, p90, max


def map_codelength(net: CoauthorNetwork, assignment: dict[str, int]) -> float:
    """Two-level codelength (bits/step) of ``assignment`` on ``net``.

    Nodes missing from the assignment are ignored, so a clustering of the
    giant component can be scored against the full network.
    """
    nodes = [k for k in net.adj if k in assignment]
    w2 = sum(net.strength(k) for k in nodes)
    if w2 == 0:
        return 0.0
    visit: dict[int, int] = {}
    cut: dict[int, int] = {}
    node_term = 0.0
    for k in nodes:
        cid = assignment[k]
        strength = net.strength(k)
        node_term += _plogp(strength / w2)
        visit[cid] = visit.get(cid, 0) + strength
        ext = sum(w for nbr, w in net.adj[k].items() if assignment.get(nbr) != cid)
        cut[cid] = cut.get(cid, 0) + ext
    q = sum(cut.values())
    return (
        _plogp(q / w2)
        - 2.0 * sum(_plogp(x / w2) for x in cut.values())
        + sum(_plogp((cut[c] + visit[c]) / w2) for c in visit)
        - node_term
    )


class _Engine:
    """Mutable partition state over an integer-indexed connected graph.

    Cut and visit weights are kept as raw integers (normalized only inside
    the plogp calls), so the state stays exact across any move sequence.
    """

    def __init__(self, labels: list[str], net: CoauthorNetwork):
        self.labels = labels
        index = {k: i for i, k in enumerate(labels)}
        self.nbrs: list[list[tuple[int, int]]] = [
            sorted((index[b], w) for b, w in net.adj[a].items()) for a in labels
        ]
        self.k = [sum(w for _, w in row) for row in self.nbrs]
        self.w2 = sum(self.k)
        n = len(labels)
        self.node_term = sum(_plogp(k / self.w2) for k in self.k)
        # singleton start: every edge is a cut edge
        self.module = list(range(n))
        self.members: list[list[int]] = [[v] for v in range(n)]
        self.visit = list(self.k)
        self.cut = list(self.k)
        self.mod_adj: list[dict[int, int]] = [dict(row) for row in self.nbrs]
        self.q = sum(self.cut)
        self.alive = [True] * n
        self.m = n

    def _pl(self, raw: int) -> float:
        return _plogp(raw / self.w2)

    # -- objective ---------------------------------------------------------

    def codelength(self) -> float:
        mod_term = 0.0
        cut_term = 0.0
        for i in range(len(self.members)):
            if self.alive[i]:
                cut_term += self._pl(self.cut[i])
                mod_term += self._pl(self.cut[i] + self.visit[i])
        return self._pl(self.q) - 2.0 * cut_term + mod_term - self.node_term

    def merge_delta(self, a: int, b: int) -> float:
        wab = self.mod_adj[a].get(b, 0)
        qa, qb = self.cut[a], self.cut[b]
        qc = qa + qb - 2 * wab
        return (
            self._pl(self.q - 2 * wab)
            - self._pl(self.q)
            - 2.0 * (self._pl(qc) - self._pl(qa) - self._pl(qb))
            + self._pl(qc + self.visit[a] + self.visit[b])
            - self._pl(qa + self.visit[a])
            - self._pl(qb + self.visit[b])
        )

    # -- merge phase -------------------------------------------------------

    def merge(self, a: int, b: int) -> int:
        """Merge module b into a (the larger keeps its id); returns survivor."""
        if len(self.members[a]) < len(self.members[b]):
            a, b = b, a
        wab = self.mod_adj[a].pop(b, 0)
        self.mod_adj[b].pop(a, None)
        self.q -= 2 * wab
        self.cut[a] = self.cut[a] + self.cut[b] - 2 * wab
        self.visit[a] += self.visit[b]
        for v in self.members[b]:
            self.module[v] = a
        self.members[a].extend(self.members[b])
        self.members[b] = []
        for t, w in self.mod_adj[b].items():
            self.mod_adj[t].pop(b, None)
            self.mod_adj[a][t] = self.mod_adj[a].get(t, 0) + w
            self.mod_adj[t][a] = self.mod_adj[a][t]
        self.mod_adj[b] = {}
        self.alive[b] = False
        self.m -= 1
        return a

    def greedy_merge(self, rng: random.Random) -> None:
        stamp = [0] * len(self.members)
        heap: list[tuple[float, float, int, int, int, int]] = []

        def push(a: int, b: int) -> None:
            if a > b:
                a, b = b, a
            heapq.heappush(heap, (self.merge_delta(a, b), rng.random(), a, b, stamp[a], stamp[b]))

        for a in range(len(self.members)):
            for b in self.mod_adj[a]:
                if a < b:
                    push(a, b)
        while heap:
            delta, _, a, b, sa, sb = heapq.heappop(heap)
            if not (self.alive[a] and self.alive[b]) or stamp[a] != sa or stamp[b] != sb:
                continue
            exact = self.merge_delta(a, b)
            # q drifts between pushes; re-rank when the stored key went stale
            if heap and exact > heap[0][0] + 1e-15:
                heapq.heappush(heap, (exact, rng.random(), a, b, stamp[a], stamp[b]))
                continue
            if exact >= -_EPS:
                break
            keep = self.merge(a, b)
            stamp[keep] += 1
            for t in self.mod_adj[keep]:
                push(keep, t)

    # -- refinement phase --------------------------------------------------

    def _links_to_modules(self, v: int) -> dict[int, int]:
        out: dict[int, int] = {}
        for u, w in self.nbrs[v]:
            t = self.module[u]
            out[t] = out.get(t, 0) + w
        return out

    def _would_disconnect(self, v: int, s: int) -> bool:
        rest = [u for u in self.members[s] if u != v]
        if len(rest) <= 1:
            return False
        keep = set(rest)
        seen = {rest[0]}
        queue = deque([rest[0]])
        while queue:
            u = queue.popleft()
            for x, _ in self.nbrs[u]:
                if x in keep and x not in seen:
                    seen.add(x)
                    queue.append(x)
        return len(seen) != len(rest)

    def move_delta(self, v: int, d: int, links: dict[int, int]) -> float:
        """Codelength change for moving v into module d (-1: fresh module)."""
        s = self.module[v]
        kv = self.k[v]
        a_s = links.get(s, 0)
        qs_new = self.cut[s] - kv + 2 * a_s
        if d == -1:
            a_d = 0
            qd_old = 0
            vd_old = 0
        else:
            a_d = links.get(d, 0)
            qd_old = self.cut[d]
            vd_old = self.visit[d]
        qd_new = qd_old + kv - 2 * a_d
        return (
            self._pl(self.q + 2 * (a_s - a_d))
            - self._pl(self.q)
            - 2.0 * (self._pl(qs_new) + self._pl(qd_new) - self._pl(self.cut[s]) - self._pl(qd_old))
            + self._pl(qs_new + self.visit[s] - kv)
            + self._pl(qd_new + vd_old + kv)
            - self._pl(self.cut[s] + self.visit[s])
            - self._pl(qd_old + vd_old)
        )

    def move(self, v: int, d: int, links: dict[int, int]) -> None:
        s = self.module[v]
        kv = self.k[v]
        a_s = links.get(s, 0)
        a_d = links.get(d, 0)
        self.cut[s] += -kv + 2 * a_s
        self.cut[d] += kv - 2 * a_d
        self.q += 2 * (a_s - a_d)
        self.visit[s] -= kv
        self.visit[d] += kv
        self.members[s].remove(v)
        self.members[d].append(v)
        self.module[v] = d
        for t, w in links.items():
            if t != s:  # edge bundle v-t stops being cross for s
                left = self.mod_adj[s].get(t, 0) - w
                if left > 0:
                    self.mod_adj[s][t] = left
                    self.mod_adj[t][s] = left
                else:
                    self.mod_adj[s].pop(t, None)
                    self.mod_adj[t].pop(s, None)
            if t != d:  # edge bundle v-t is now cross for d
                self.mod_adj[d][t] = self.mod_adj[d].get(t, 0) + w
                self.mod_adj[t][d] = self.mod_adj[d][t]
        if not self.members[s]:
            for t in list(self.mod_adj[s]):
                self.mod_adj[t].pop(s, None)
            self.mod_adj[s] = {}
            self.alive[s] = False
            self.m -= 1

    def refine(self, rng: random.Random, max_passes: int = 100) -> None:
        order = list(range(len(self.labels)))
        for _ in range(max_passes):
            rng.shuffle(order)
            moved = False
            for v in order:
                s = self.module[v]
                links = self._links_to_modules(v)
                targets = sorted(t for t in links if t != s)
                if len(self.members[s]) > 1:
                    targets.append(-1)  # allow splitting off into a fresh module
                if not targets:
                    continue
                best_d, best_delta = s, -_EPS
                for d in targets:
                    delta = self.move_delta(v, d, links)
                    if delta < best_delta:
                        best_d, best_delta = d, delta
                # the (costlier) connectivity guard only matters for moves
                # that would otherwise be applied
                if best_d != s and not self._would_disconnect(v, s):
                    if best_d == -1:
                        best_d = self._new_module()
                    self.move(v, best_d, links)
                    moved = True
            if not moved:
                break

    def _new_module(self) -> int:
        self.members.append([])
        self.visit.append(0)
        self.cut.append(0)
        self.mod_adj.append({})
        self.alive.append(True)
        self.m += 1
        return len(self.members) - 1

    def assignment(self) -> dict[str, int]:
        return {self.labels[v]: self.module[v] for v in range(len(self.labels))}


def _detect_component(labels: list[str], net: CoauthorNetwork, seed: int, trials: int):
    """Best assignment over seeded restarts for one connected component."""
    best: dict[str, int] | None = None
    best_quality = math.inf
    for trial in range(trials):
        rng = random.Random((seed * 1_000_003 + trial) & 0xFFFFFFFF)
        engine = _Engine(labels, net)
        engine.greedy_merge(rng)
        engine.refine(rng)
        quality = engine.codelength()
        if quality < best_quality - _EPS:
            best_quality = quality
            best = engine.assignment()
    assert best is not None
    return best


def relabel_dense(assignment: dict[str, int]) -> dict[str, int]:
    """Renumber cluster ids 1..K by descending size, ties by smallest key."""
    groups: dict[int, list[str]] = {}
    for key, cid in assignment.items():
        groups.setdefault(cid, []).append(key)
    ordered = sorted(groups.values(), key=lambda members: (-len(members), min(members)))
    out: dict[str, int] = {}
    for new_id, members in enumerate(ordered, start=1):
        for key in members:
            out[key] = new_id
    return out


def detect_communities(net: CoauthorNetwork, seed: int, trials: int = 10) -> Clustering:
    """Partition ``net`` by codelength minimization.

    Single-node networks yield the trivial one-cluster partition;
    disconnected networks are clustered one component at a time. Raises
    ValueError on an empty network or ``trials < 1``.
    """
    if not net.adj:
        raise ValueError("empty network")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    assignment: dict[str, int] = {}
    offset = 0
    for comp in connected_components(net):
        if len(comp) == 1:
            assignment[comp[0]] = offset + 1
            offset += 1
            continue
        sub = net.subgraph(comp)
        local = _detect_component(comp, sub, seed, trials)
        ids = sorted(set(local.values()))
        remap = {old: offset + i + 1 for i, old in enumerate(ids)}
        for key, cid in local.items():
            assignment[key] = remap[cid]
        offset += len(ids)
    assignment = relabel_dense(assignment)
    clustering = Clustering(assignment=assignment, quality=map_codelength(net, assignment), seed=seed)
    _assert_clusters_connected(net, clustering)
    return clustering


def _assert_clusters_connected(net: CoauthorNetwork, clustering: Clustering) -> None:
    for cid, members in clustering.clusters().items():
        sub = net.subgraph(members)
        if len(connected_components(sub)) != 1:
            raise RuntimeError(f"cluster {cid} is not connected; search invariant violated")


def load_clustering(text: str, net: CoauthorNetwork) -> Clustering:
    """Read a CLU file positionally against ``net``'s vertex order.

    Ids are re-labeled to the dense convention; CLU entries of 0 mark
    unassigned vertices and are dropped. Raises on a count mismatch.
    """
    raw = import_clu(text, net)
    assignment = relabel_dense(raw)
    return Clustering(assignment=assignment, quality=map_codelength(net, assignment), seed=-1)


def cluster_aggregates(
    net: CoauthorNetwork, clustering: Clustering, corpus: Corpus
) -> tuple[list[ClusterInfo], ClusterSummary]:
    """Per-cluster sizes, publication counts and subgraphs, plus the
    field-level size summary (mean, median, percentiles)."""
    import numpy as np

    author_records = corpus.author_records()
    infos: list[ClusterInfo] = []
    for cid, members in clustering.clusters().items():
        records: set[str] = set()
        for key in members:
            records |= author_records.get(key, set())
        sub = net.subgraph(members)
        infos.append(
            ClusterInfo(
                cluster_id=cid,
                members=tuple(members),
                size=len(members),
                publications=len(records),
                internal_edge_count=sub.edge_count,
                size_category=cohort.size_category(len(members)),
                subgraph=sub,
            )
        )
    sizes = np.array([info.size for info in infos], dtype=float)
    if len(sizes):
        percentiles = {
            "min": float(sizes.min()),
            "p10": float(np.percentile(sizes, 10)),
            "p25": float(np.percentile(sizes, 25)),
            "median": float(np.percentile(sizes, 50)),
            "p75": float(np.percentile(sizes, 75)),
            "p90": float(np.percentile(sizes, 90)),
            "max": float(sizes.max()),
        }
        summary = ClusterSummary(len(infos), float(sizes.mean()), float(np.percentile(sizes, 50)), percentiles)
    else:
        summary = ClusterSummary(0, 0.0, 0.0, {})
    return infos, summary


def normalized_mutual_information(a: dict[str, int], b: dict[str, int]) -> float:
    """NMI between two partitions of the same key set (2I/(Ha+Hb))."""
    keys = sorted(a)
    if sorted(b) != keys:
        raise ValueError("partitions cover different key sets")
    n = len(keys)
    if n == 0:
        raise ValueError("empty partitions")
    joint: dict[tuple[int, int], int] = {}
    ca: dict[int, int] = {}
    cb: dict[int, int] = {}
    for k in keys:
        pair = (a[k], b[k])
        joint[pair] = joint.get(pair, 0) + 1
        ca[pair[0]] = ca.get(pair[0], 0) + 1
        cb[pair[1]] = cb.get(pair[1], 0) + 1
    ha = -sum(_plogp(c / n) for c in ca.values())
    hb = -sum(_plogp(c / n) for c in cb.values())
    if ha == 0.0 and hb == 0.0:
        return 1.0
    info = 0.0
    for (ia, ib), c in joint.items():
        info += (c / n) * math.log2(c * n / (ca[ia] * cb[ib]))
    return 2.0 * info / (ha + hb) if (ha + hb) > 0 else 0.0
