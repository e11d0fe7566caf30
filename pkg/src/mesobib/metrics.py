"""Cluster-level centralization and node-role classification.

Centralization follows Freeman's graph-level indices: for each centrality
the index is the summed gap between the most central node and all others,
divided by the theoretical maximum of that sum (attained by the star), so
a star scores exactly 1.0 and any vertex-transitive graph 0.0.

Node roles follow the Guimera-Amaral scheme. Every node gets a
within-module degree z-score and a participation coefficient

    P_i = 1 - sum_s (k_s^i / k^i)^2

over all clusters s including the node's own. The squared share is
essential: the raw shares always sum to 1, which would make P identically
zero. Nodes with z >= 2.5 are hubs; (z, P) maps onto seven roles R1-R7.

All degrees here are unweighted (edge multiplicities ignored); weighted
variants can be had by passing ``weighted=True`` where offered, but they
are outside the verified contract.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass

from .cluster import Clustering
from .graph import CoauthorNetwork, connected_components

HUB_Z_THRESHOLD = 2.5


class Role(enum.Enum):
    R1 = "R1"  # ultra-peripheral
    R2 = "R2"  # peripheral
    R3 = "R3"  # satellite connector
    R4 = "R4"  # kinless
    R5 = "R5"  # provincial hub
    R6 = "R6"  # connector hub
    R7 = "R7"  # global hub

    @property
    def label(self) -> str:
        return _ROLE_LABELS[self]


_ROLE_LABELS = {
    Role.R1: "ultra-peripheral",
    Role.R2: "peripheral",
    Role.R3: "satellite connector",
    Role.R4: "kinless",
    Role.R5: "provincial hub",
    Role.R6: "connector hub",
    Role.R7: "global hub",
}

ALL_ROLES = tuple(Role)


class Hubness(enum.Enum):
    NO_HUB = "no-hub"
    SINGLE_HUB = "single-hub"
    MULTI_HUB = "multi-hub"


@dataclass(frozen=True)
class CentralizationIndices:
    degree: float
    closeness: float
    betweenness: float
    largest_component_only: bool = False  # set when the input was disconnected


@dataclass(frozen=True)
class NodeRoleProfile:
    key: str
    cluster_id: int
    internal_degree: int
    degree: int
    z: float
    participation: float
    role: Role
    isolated: bool = False  # degree-0 node, P fixed to 0 by convention


def betweenness_values(net: CoauthorNetwork) -> dict[str, float]:
    """Exact betweenness per node (Brandes accumulation, unweighted).

    Counts each unordered source-target pair once.
    """
    nodes = net.nodes()
    bc = {v: 0.0 for v in nodes}
    for source in nodes:
        stack: list[str] = []
        preds: dict[str, list[str]] = {v: [] for v in nodes}
        sigma = {v: 0.0 for v in nodes}
        dist = {v: -1 for v in nodes}
        sigma[source] = 1.0
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in net.adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {v: 0.0 for v in nodes}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += (sigma[v] / sigma[w]) * (1.0 + delta[w])
            if w != source:
                bc[w] += delta[w]
    # each pair was visited from both endpoints
    return {v: x / 2.0 for v, x in bc.items()}


def _closeness_values(net: CoauthorNetwork) -> dict[str, float]:
    n = net.node_count
    out = {}
    for source in net.adj:
        dist = {source: 0}
        queue = deque([source])
        total = 0
        while queue:
            v = queue.popleft()
            for w in net.adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    total += dist[w]
                    queue.append(w)
        out[source] = (n - 1) / total
    return out


def centralization(subgraph: CoauthorNetwork) -> CentralizationIndices:
    """Freeman centralization indices of a cluster subgraph (n >= 3).

    A disconnected input is scored on its largest component with the
    ``largest_component_only`` flag set; if fewer than 3 nodes remain the
    computation is refused.
    """
    if subgraph.node_count < 3:
        raise ValueError("centralization undefined for fewer than 3 nodes")
    flagged = False
    comps = connected_components(subgraph)
    if len(comps) > 1:
        subgraph = subgraph.subgraph(comps[0])
        flagged = True
        if subgraph.node_count < 3:
            raise ValueError("centralization undefined for fewer than 3 nodes")
    n = subgraph.node_count
    degree = {v: subgraph.degree(v) / (n - 1) for v in subgraph.adj}
    closeness = _closeness_values(subgraph)
    pair_norm = (n - 1) * (n - 2) / 2.0
    betweenness = {v: b / pair_norm for v, b in betweenness_values(subgraph).items()}

    def index(values: dict[str, float], denominator: float) -> float:
        best = max(values.values())
        return sum(best - x for x in values.values()) / denominator

    return CentralizationIndices(
        degree=index(degree, n - 2),
        closeness=index(closeness, (n - 1) * (n - 2) / (2 * n - 3)),
        betweenness=index(betweenness, n - 1),
        largest_component_only=flagged,
    )


def _internal_degree(key: str, net: CoauthorNetwork, assignment: dict[str, int], weighted: bool) -> int:
    cid = assignment[key]
    return sum(
        (w if weighted else 1) for nbr, w in net.adj[key].items() if assignment.get(nbr) == cid
    )


def participation_coefficient(
    key: str, net: CoauthorNetwork, clustering: Clustering, weighted: bool = False
) -> float:
    """P_i = 1 - sum_s (k_s/k)^2 with unweighted degrees; 0 for isolates.

    ``weighted`` switches to strength shares (edge multiplicities count);
    that variant sits outside the verified contract.
    """
    assignment = clustering.assignment
    shares: dict[int, int] = {}
    for nbr, w in net.adj[key].items():
        cid = assignment[nbr]
        shares[cid] = shares.get(cid, 0) + (w if weighted else 1)
    k = sum(shares.values())
    if k == 0:
        return 0.0
    return 1.0 - sum((c / k) ** 2 for c in shares.values())


def within_module_z(key: str, net: CoauthorNetwork, clustering: Clustering, weighted: bool = False) -> float:
    """Internal degree standardized over the node's own cluster.

    Uses the population standard deviation; z = 0 when every member has
    the same internal degree. ``weighted`` uses internal strength instead
    of internal degree (outside the verified contract).
    """
    assignment = clustering.assignment
    cid = assignment[key]
    members = [m for m, c in assignment.items() if c == cid]
    degrees = {m: _internal_degree(m, net, assignment, weighted) for m in members}
    return _z_from_degrees(degrees[key], list(degrees.values()))


def _z_from_degrees(k_in: int, cluster_degrees: list[int]) -> float:
    n = len(cluster_degrees)
    mean = sum(cluster_degrees) / n
    var = sum((d - mean) ** 2 for d in cluster_degrees) / n
    if var <= 0.0:
        return 0.0
    return (k_in - mean) / math.sqrt(var)


def assign_role(z: float, participation: float) -> Role:
    """Role from the (z, P) plane; boundaries inclusive as documented."""
    if not 0.0 <= participation <= 1.0:
        raise ValueError(f"participation coefficient {participation} outside [0, 1]")
    if z < HUB_Z_THRESHOLD:
        if participation <= 0.05:
            return Role.R1
        if participation <= 0.62:
            return Role.R2
        if participation <= 0.8:
            return Role.R3
        return Role.R4
    if participation <= 0.30:
        return Role.R5
    if participation <= 0.75:
        return Role.R6
    return Role.R7


def role_profiles(
    net: CoauthorNetwork, clustering: Clustering, weighted: bool = False
) -> dict[str, NodeRoleProfile]:
    """z, P and role for every assigned node, in one pass over the edges."""
    assignment = clustering.assignment
    internal: dict[str, int] = {}
    shares: dict[str, dict[int, int]] = {}
    for key, cid in assignment.items():
        internal[key] = 0
        shares[key] = {}
        for nbr, w in net.adj[key].items():
            nbr_cid = assignment.get(nbr)
            if nbr_cid is None:
                continue
            step = w if weighted else 1
            shares[key][nbr_cid] = shares[key].get(nbr_cid, 0) + step
            if nbr_cid == cid:
                internal[key] += step

    by_cluster: dict[int, list[str]] = {}
    for key, cid in assignment.items():
        by_cluster.setdefault(cid, []).append(key)

    profiles: dict[str, NodeRoleProfile] = {}
    for cid, members in by_cluster.items():
        degrees = [internal[m] for m in members]
        for key in members:
            k = sum(shares[key].values())
            if k == 0:
                p = 0.0
            else:
                p = 1.0 - sum((c / k) ** 2 for c in shares[key].values())
            z = _z_from_degrees(internal[key], degrees)
            profiles[key] = NodeRoleProfile(
                key=key,
                cluster_id=cid,
                internal_degree=internal[key],
                degree=k,
                z=z,
                participation=p,
                role=assign_role(z, p),
                isolated=(k == 0),
            )
    return profiles


@dataclass(frozen=True)
class RoleDistribution:
    counts: dict[Role, int]
    fractions: dict[Role, float]
    total: int


def role_distribution(net: CoauthorNetwork, clustering: Clustering) -> RoleDistribution:
    profiles = role_profiles(net, clustering)
    counts = {role: 0 for role in ALL_ROLES}
    for profile in profiles.values():
        counts[profile.role] += 1
    total = len(profiles)
    fractions = {role: (counts[role] / total if total else 0.0) for role in ALL_ROLES}
    return RoleDistribution(counts=counts, fractions=fractions, total=total)


def cluster_hubness(member_profiles) -> tuple[Hubness, int]:
    """Hubness class and hub count from the member role profiles."""
    hub_count = sum(1 for p in member_profiles if p.z >= HUB_Z_THRESHOLD)
    if hub_count == 0:
        return Hubness.NO_HUB, 0
    if hub_count == 1:
        return Hubness.SINGLE_HUB, 1
    return Hubness.MULTI_HUB, hub_count
