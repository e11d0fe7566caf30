import random

import pytest

from conftest import clique_net, make_corpus
from mesobib.cluster import (
    _Engine,
    Clustering,
    cluster_aggregates,
    detect_communities,
    load_clustering,
    map_codelength,
    normalized_mutual_information,
    relabel_dense,
)
from mesobib.graph import build_network
from mesobib.pajek import PajekFormatError, export_net, import_net


def all_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1 :]
        yield [[first]] + part


def test_two_cliques_objective_optimum_by_exhaustion(two_cliques):
    # brute force over every partition of the 10 nodes
    nodes = sorted(two_cliques.adj)
    best_value, best_blocks = min(
        (
            map_codelength(two_cliques, {k: i for i, block in enumerate(part) for k in block}),
            sorted(sorted(block) for block in part),
        )
        for part in all_partitions(nodes)
    )
    assert best_blocks == [[f"A{i}" for i in range(5)], [f"B{i}" for i in range(5)]]
    detected = detect_communities(two_cliques, seed=1, trials=3)
    assert detected.quality == pytest.approx(best_value, abs=1e-12)


def test_two_cliques_detected_exactly(two_cliques):
    clustering = detect_communities(two_cliques, seed=42, trials=5)
    blocks = [members for members in clustering.clusters().values()]
    assert sorted(map(sorted, blocks)) == [[f"A{i}" for i in range(5)], [f"B{i}" for i in range(5)]]


def test_single_clique_is_one_cluster():
    net = clique_net([f"A{i}" for i in range(6)])
    clustering = detect_communities(net, seed=0, trials=3)
    assert len(clustering.clusters()) == 1


def test_disconnected_triangles_run_per_component():
    net = clique_net(["A1", "A2", "A3"], ["B1", "B2", "B3"])
    clustering = detect_communities(net, seed=0, trials=2)
    assert len(clustering.clusters()) == 2


def test_single_node_trivial_partition():
    from mesobib.graph import CoauthorNetwork

    net = CoauthorNetwork()
    net.add_node("A")
    clustering = detect_communities(net, seed=0)
    assert clustering.assignment == {"A": 1}


def test_empty_network_errors():
    from mesobib.graph import CoauthorNetwork

    with pytest.raises(ValueError, match="empty"):
        detect_communities(CoauthorNetwork(), seed=0)
    with pytest.raises(ValueError, match="trials"):
        detect_communities(clique_net(["A", "B", "C"]), seed=0, trials=0)


def test_determinism_for_fixed_seed(two_cliques):
    a = detect_communities(two_cliques, seed=7, trials=4)
    b = detect_communities(two_cliques, seed=7, trials=4)
    assert a.assignment == b.assignment
    assert a.quality == b.quality


def test_quality_beats_trivial_partitions(two_cliques):
    clustering = detect_communities(two_cliques, seed=3, trials=3)
    nodes = sorted(two_cliques.adj)
    singleton = {k: i for i, k in enumerate(nodes)}
    all_in_one = {k: 1 for k in nodes}
    assert clustering.quality <= map_codelength(two_cliques, singleton)
    assert clustering.quality <= map_codelength(two_cliques, all_in_one)


def test_refinement_never_worsens_objective(two_cliques):
    nodes = sorted(two_cliques.adj)
    engine = _Engine(nodes, two_cliques)
    rng = random.Random(0)
    engine.greedy_merge(rng)
    after_merge = engine.codelength()
    engine.refine(rng)
    assert engine.codelength() <= after_merge + 1e-12


def test_relabel_dense_convention():
    assert relabel_dense({"a": 7, "b": 7, "c": 9}) == {"a": 1, "b": 1, "c": 2}
    # equal sizes: the cluster holding the smallest key comes first
    assert relabel_dense({"z": 1, "y": 1, "a": 2, "b": 2}) == {"a": 1, "b": 1, "y": 2, "z": 2}


def test_clusters_ordered_by_descending_size():
    net = clique_net([f"A{i}" for i in range(6)], [f"B{i}" for i in range(4)], bridges=[("A0", "B0")])
    clustering = detect_communities(net, seed=1, trials=3)
    sizes = [len(m) for m in clustering.clusters().values()]
    assert sizes == sorted(sizes, reverse=True)
    assert list(clustering.clusters()) == list(range(1, len(sizes) + 1))


def test_load_clustering_positional():
    net = clique_net(["A", "B"], ["C"])
    text = "*Vertices 3\n1\n1\n2\n"
    clustering = load_clustering(text, net)
    assert clustering.assignment == {"A": 1, "B": 1, "C": 2}
    assert clustering.seed == -1


def test_load_clustering_relabels_dense():
    net = clique_net(["A", "B"], ["C"])
    clustering = load_clustering("*Vertices 3\n7\n7\n9\n", net)
    assert clustering.assignment == {"A": 1, "B": 1, "C": 2}


def test_load_clustering_count_mismatch():
    net = clique_net(["A", "B"], ["C"])
    with pytest.raises(PajekFormatError):
        load_clustering("*Vertices 2\n1\n1\n", net)


def test_cluster_aggregates_publications_union():
    corpus = make_corpus([["A", "B"], ["A", "B"], ["A", "C"], ["C", "D"]])
    net = build_network(corpus)
    clustering = Clustering(assignment={"A": 1, "B": 1, "C": 2, "D": 2}, quality=0.0, seed=0)
    infos, summary = cluster_aggregates(net, clustering, corpus)
    by_id = {info.cluster_id: info for info in infos}
    # cluster {A,B}: records p1, p2 plus A's appearance on p3
    assert by_id[1].publications == 3
    assert by_id[2].publications == 2
    assert summary.cluster_count == 2
    assert summary.mean_size == 2.0


def test_cluster_aggregates_summary_stats():
    corpus = make_corpus([["A", "B", "C"], ["D", "E", "F", "G", "H"]])
    net = build_network(corpus)
    assignment = {k: (1 if k in "ABC" else 2) for k in net.adj}
    infos, summary = cluster_aggregates(net, Clustering(assignment, 0.0, 0), corpus)
    assert summary.median_size == 4.0
    assert summary.mean_size == 4.0
    assert summary.percentiles["min"] == 3.0
    assert summary.percentiles["max"] == 5.0


def test_nmi_identity_and_refinement():
    a = {"x": 1, "y": 1, "z": 2}
    assert normalized_mutual_information(a, a) == pytest.approx(1.0)
    b = {"x": 5, "y": 5, "z": 9}  # same partition, different labels
    assert normalized_mutual_information(a, b) == pytest.approx(1.0)
    c = {"x": 1, "y": 2, "z": 2}
    assert normalized_mutual_information(a, c) < 1.0


def test_nmi_requires_same_keys():
    with pytest.raises(ValueError):
        normalized_mutual_information({"x": 1}, {"y": 1})


def planted_net(groups=10, size=12, seed=0):
    """Dense 12-author groups chained by single bridge edges."""
    rng = random.Random(seed)
    blocks = [[f"G{g:02d}N{i:02d}" for i in range(size)] for g in range(groups)]
    net = clique_net(*blocks)
    # thin the cliques to ~70% density but keep them connected
    for block in blocks:
        for i, a in enumerate(block):
            for b in block[i + 1 :]:
                if rng.random() > 0.7 and net.degree(a) > 3 and net.degree(b) > 3:
                    del net.adj[a][b]
                    del net.adj[b][a]
    for g in range(1, groups):
        net.add_edge(blocks[g - 1][0], blocks[g][1], 1)
    truth = {k: g for g, block in enumerate(blocks) for k in block}
    return net, truth


def test_planted_partition_recovery_quick():
    net, truth = planted_net(seed=2)
    clustering = detect_communities(net, seed=11, trials=2)
    nmi = normalized_mutual_information(clustering.assignment, truth)
    assert nmi >= 0.95


def test_detect_matches_net_file_round_trip(two_cliques):
    # clustering a re-imported network gives the identical partition
    back = import_net(export_net(two_cliques))
    a = detect_communities(two_cliques, seed=5, trials=2)
    b = detect_communities(back, seed=5, trials=2)
    assert a.assignment == b.assignment
