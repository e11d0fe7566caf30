import random
from itertools import combinations

import pytest

from conftest import clique_net, make_corpus, random_network
from mesobib.graph import (
    build_network,
    connected_components,
    giant_component,
    growth_curve,
    reduce_single_paper_authors,
    slice_spans,
)


def test_build_network_weights_and_counts():
    corpus = make_corpus([["A", "B", "C"], ["A", "B"]])
    net = build_network(corpus)
    assert net.weight("A", "B") == 2
    assert net.weight("A", "C") == 1
    assert net.weight("B", "C") == 1
    assert net.paper_count == {"A": 2, "B": 2, "C": 1}
    assert net.provenance["C"] == frozenset({"p1"})


def test_build_network_single_pair():
    net = build_network(make_corpus([["A", "B"]]))
    assert net.edges() == [("A", "B", 1)]


def test_build_network_disjoint_components():
    net = build_network(make_corpus([["A", "B"], ["C", "D"]]))
    assert len(connected_components(net)) == 2


def test_edge_weight_sum_matches_pair_count():
    rng = random.Random(5)
    papers = []
    for _ in range(40):
        k = rng.randint(2, 6)
        papers.append(rng.sample([f"A{i:02d}" for i in range(25)], k))
    net = build_network(make_corpus(papers))
    expected = sum(len(list(combinations(p, 2))) for p in papers)
    assert net.total_weight() == expected


def test_reduce_removes_single_paper_authors():
    corpus = make_corpus([["A", "B", "C"], ["A", "B"]])
    reduced = reduce_single_paper_authors(build_network(corpus))
    assert sorted(reduced.adj) == ["A", "B"]
    assert reduced.weight("A", "B") == 2


def test_reduce_can_empty_the_network():
    reduced = reduce_single_paper_authors(build_network(make_corpus([["A", "B"]])))
    assert reduced.node_count == 0


def test_reduce_is_single_pass_not_fixpoint():
    # X has two papers; both co-authors publish once. After one pass X
    # stays as an isolated node instead of being swept away.
    corpus = make_corpus([["X", "Y"], ["X", "Z"]])
    reduced = reduce_single_paper_authors(build_network(corpus))
    assert sorted(reduced.adj) == ["X"]
    assert reduced.degree("X") == 0


def test_giant_component_fraction():
    net = clique_net([f"A{i}" for i in range(5)], [f"B{i}" for i in range(3)])
    giant, fraction = giant_component(net)
    assert giant.node_count == 5
    assert fraction == pytest.approx(0.625)


def test_giant_component_identity_on_connected():
    net = clique_net([f"A{i}" for i in range(4)])
    giant, fraction = giant_component(net)
    assert fraction == 1.0
    assert giant.structurally_equal(net)


def test_giant_component_idempotent():
    net = clique_net([f"A{i}" for i in range(5)], [f"B{i}" for i in range(3)])
    giant, _ = giant_component(net)
    again, fraction = giant_component(giant)
    assert again.structurally_equal(giant)
    assert fraction == 1.0


def test_giant_component_tie_breaks_on_smallest_key():
    net = clique_net(["B1", "B2"], ["A1", "A2"])
    giant, _ = giant_component(net)
    assert sorted(giant.adj) == ["A1", "A2"]


def test_giant_component_empty_errors():
    from mesobib.graph import CoauthorNetwork

    with pytest.raises(ValueError, match="empty network"):
        giant_component(CoauthorNetwork())


def test_slice_spans_even():
    assert slice_spans(1991, 2008, 3) == [(1991, 1996), (1997, 2002), (2003, 2008)]


def test_slice_spans_uneven_earlier_slices_take_extra():
    assert slice_spans(1987, 2008, 3) == [(1987, 1994), (1995, 2001), (2002, 2008)]


def test_slice_spans_single():
    assert slice_spans(1990, 1999, 1) == [(1990, 1999)]


def test_slice_spans_too_short():
    with pytest.raises(ValueError):
        slice_spans(2000, 2001, 3)


def test_growth_curve_single_slice_equals_whole_corpus():
    corpus = make_corpus([["A", "B"], ["A", "B"], ["B", "C"], ["B", "C"]], years=[1991, 1995, 2000, 2005])
    points = growth_curve(corpus, 1)
    assert len(points) == 1
    reduced = reduce_single_paper_authors(build_network(corpus))
    assert points[0].author_count == reduced.node_count
    _, fraction = giant_component(reduced)
    assert points[0].giant_fraction == fraction


def test_growth_curve_monotone_author_counts():
    rng = random.Random(9)
    papers, years = [], []
    for i in range(60):
        papers.append(rng.sample([f"A{i:02d}" for i in range(20)], rng.randint(2, 4)))
        years.append(rng.randint(1991, 2008))
    corpus = make_corpus(papers, years=years)
    points = growth_curve(corpus, 3)
    counts = [p.author_count for p in points]
    assert counts == sorted(counts)
    assert points[-1].slice_end == 2008


def test_subgraph_restricts_metadata():
    corpus = make_corpus([["A", "B", "C"], ["A", "B"]])
    net = build_network(corpus)
    sub = net.subgraph(["A", "B"])
    assert sorted(sub.paper_count) == ["A", "B"]
    assert sub.weight("A", "B") == 2


def test_structural_equality_ignores_metadata():
    net1 = build_network(make_corpus([["A", "B"], ["A", "B"]]))
    net2 = random_network(random.Random(0), 0, 0)
    net2.add_edge("A", "B", 2)
    assert net1.structurally_equal(net2)
