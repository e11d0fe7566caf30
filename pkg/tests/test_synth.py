import pytest

from mesobib.cluster import cluster_aggregates, detect_communities, normalized_mutual_information
from mesobib.graph import build_network, connected_components, reduce_single_paper_authors
from mesobib.ingest import filter_corpus, parse_tabular, write_tabular
from mesobib.meso import LINK_COLLABORATION, LINK_TRANSFER, classify_all
from mesobib.synth import (
    CollaborationSpec,
    GroundTruth,
    GroupSpec,
    MigrationSpec,
    PlantedSpec,
    build_spec,
    generate,
    parse_spec_file,
)


def test_generation_deterministic_per_seed():
    spec = build_spec(groups=5, group_size=8, migrations=3, seed=12)
    corpus_a, truth_a = generate(spec)
    corpus_b, truth_b = generate(spec)
    assert corpus_a == corpus_b
    assert truth_a.to_json() == truth_b.to_json()
    other, _ = generate(build_spec(groups=5, group_size=8, migrations=3, seed=13))
    assert other != corpus_a


def test_validation_errors():
    g = (GroupSpec("A", 8), GroupSpec("B", 8))
    with pytest.raises(ValueError, match="missing group"):
        generate(PlantedSpec(groups=g, migrations=(MigrationSpec("A", "Z"),)))
    with pytest.raises(ValueError, match="itself"):
        generate(PlantedSpec(groups=g, migrations=(MigrationSpec("A", "A"),)))
    with pytest.raises(ValueError, match="share the group pair"):
        generate(
            PlantedSpec(
                groups=g,
                migrations=(MigrationSpec("A", "B"),),
                collaborations=(CollaborationSpec("B", "A"),),
            )
        )
    with pytest.raises(ValueError, match="too small"):
        generate(PlantedSpec(groups=(GroupSpec("A", 3), GroupSpec("B", 8)), collaborations=(CollaborationSpec("A", "B", pi_edge=False),)))
    with pytest.raises(ValueError, match="side_authors"):
        generate(PlantedSpec(groups=g, collaborations=(CollaborationSpec("A", "B", side_authors=2),)))
    with pytest.raises(ValueError, match="size must be"):
        generate(PlantedSpec(groups=(GroupSpec("A", 2),)))


def test_filters_are_noops_on_generated_corpora():
    corpus, _ = generate(build_spec(groups=4, group_size=9, migrations=2, seed=4))
    result = filter_corpus(corpus.records)
    assert len(result.corpus.records) == len(corpus.records)


def test_reduction_keeps_every_planted_author():
    corpus, truth = generate(build_spec(groups=6, group_size=10, migrations=3, seed=9))
    reduced = reduce_single_paper_authors(build_network(corpus))
    assert set(reduced.adj) == set(truth.membership)


def test_isolated_groups_form_components_and_cluster_exactly():
    corpus, truth = generate(build_spec(groups=10, group_size=8, seed=1))
    net = reduce_single_paper_authors(build_network(corpus))
    comps = connected_components(net)
    assert len(comps) == 10
    clustering = detect_communities(net, seed=2, trials=2)
    group_ids = {g: i for i, g in enumerate(sorted(set(truth.membership.values())), 1)}
    planted = {k: group_ids[truth.membership[k]] for k in clustering.assignment}
    assert normalized_mutual_information(clustering.assignment, planted) == pytest.approx(1.0)


def test_migration_classified_transfer_end_to_end():
    spec = PlantedSpec(
        groups=(GroupSpec("ALPHA", 10), GroupSpec("BETA", 10)),
        migrations=(MigrationSpec("ALPHA", "BETA", target_coauthors=2),),
        seed=5,
    )
    corpus, truth = generate(spec)
    net = reduce_single_paper_authors(build_network(corpus))
    clustering = detect_communities(net, seed=1, trials=3)
    infos, _ = cluster_aggregates(net, clustering, corpus)
    connections = classify_all(net, clustering, infos)
    assert len(connections) == 1
    assert connections[0].link_type == LINK_TRANSFER
    assert connections[0].pattern in ("one_one", "one_many")
    # the migrant is the single cut author
    assert connections[0].separator_size == 1


def test_collaboration_with_pi_edge_is_mm_A():
    spec = PlantedSpec(
        groups=(GroupSpec("ALPHA", 10), GroupSpec("BETA", 10)),
        collaborations=(CollaborationSpec("ALPHA", "BETA", pi_edge=True),),
        seed=6,
    )
    corpus, truth = generate(spec)
    net = reduce_single_paper_authors(build_network(corpus))
    clustering = detect_communities(net, seed=1, trials=3)
    infos, _ = cluster_aggregates(net, clustering, corpus)
    connections = classify_all(net, clustering, infos)
    assert len(connections) == 1
    assert (connections[0].link_type, connections[0].pattern) == (LINK_COLLABORATION, "mm_A")


def test_collaboration_without_pi_edge_is_mm_B():
    spec = PlantedSpec(
        groups=(GroupSpec("ALPHA", 10), GroupSpec("BETA", 10)),
        collaborations=(CollaborationSpec("ALPHA", "BETA", pi_edge=False),),
        seed=6,
    )
    corpus, _ = generate(spec)
    net = reduce_single_paper_authors(build_network(corpus))
    clustering = detect_communities(net, seed=1, trials=3)
    infos, _ = cluster_aggregates(net, clustering, corpus)
    connections = classify_all(net, clustering, infos)
    assert (connections[0].link_type, connections[0].pattern) == (LINK_COLLABORATION, "mm_B")


def test_group_activity_windows_drive_cohorts():
    from mesobib.cohort import age_cohort, author_years, cluster_activity
    from mesobib.graph import slice_spans

    spec = PlantedSpec(
        groups=(
            GroupSpec("OLD", 8, active=(1991, 2001)),
            GroupSpec("NEWER", 8, active=(2003, 2008)),
        ),
        years=(1991, 2008),
        seed=2,
    )
    corpus, truth = generate(spec)
    spans = slice_spans(1991, 2008, 3)
    years = author_years(corpus)
    old_members = [k for k, g in truth.membership.items() if g == "OLD"]
    new_members = [k for k, g in truth.membership.items() if g == "NEWER"]
    assert age_cohort(cluster_activity(old_members, years, spans))[0].value == "extinct"
    assert age_cohort(cluster_activity(new_members, years, spans))[0].value == "new"


def test_countries_assigned_per_group():
    corpus, truth = generate(
        PlantedSpec(groups=(GroupSpec("ALPHA", 6, country="GERMANY"), GroupSpec("BETA", 6, country="CHINA")), seed=0)
    )
    for rec in corpus.records:
        groups = {truth.membership[k] for k in rec.authors}
        if groups == {"ALPHA"}:
            assert set(rec.countries) == {"GERMANY"}


def test_corpus_round_trips_through_tabular_format():
    corpus, _ = generate(build_spec(groups=3, group_size=8, seed=8))
    text = write_tabular(corpus.records)
    back = parse_tabular(text)
    assert back.records == corpus.records
    assert write_tabular(back.records) == text


def test_ground_truth_json_round_trip():
    _, truth = generate(build_spec(groups=3, group_size=8, migrations=1, seed=8))
    back = GroundTruth.from_json(truth.to_json())
    assert back.membership == truth.membership
    assert back.events == truth.events
    assert back.pis == truth.pis


def test_parse_spec_file():
    text = """
    # synthetic field
    groups = 4
    group_size = 9
    structure = mixed
    migrations = 2
    collaborations_with_pi_edge = 1
    years = 1987-2008
    seed = 3
    """
    spec = parse_spec_file(text)
    assert len(spec.groups) == 4
    assert spec.years == (1987, 2008)
    assert len(spec.migrations) == 2
    assert len(spec.collaborations) == 1
    assert parse_spec_file(text, seed_override=11).seed == 11


def test_parse_spec_file_rejects_unknown_keys():
    with pytest.raises(ValueError, match="key"):
        parse_spec_file("bogus = 3\n")


def test_build_spec_rejects_too_many_events():
    with pytest.raises(ValueError, match="distinct group pairs"):
        build_spec(groups=3, migrations=5)
