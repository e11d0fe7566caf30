"""Pipeline stages over on-disk artifacts.

Each stage reads the artifacts of earlier stages and writes its own with
an atomic write-temp-then-rename, so a crash never leaves a half-written
file. ``run_pipeline`` chains ingest -> build -> cluster -> metrics ->
classify -> report; every stage can also be invoked on its own through
the CLI.
"""

from __future__ import annotations

import csv
import io
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import cluster as cluster_mod
from . import cohort, geo, meso, metrics, synth
from .graph import (
    CoauthorNetwork,
    build_network,
    giant_component,
    growth_curve,
    reduce_single_paper_authors,
    slice_spans,
)
from .ingest import (
    Corpus,
    corpus_stats,
    filter_corpus,
    load_country_aliases,
    parse_field_tagged,
    parse_tabular,
    write_tabular,
)
from .pajek import export_clu, export_net, import_clu, import_net

log = logging.getLogger(__name__)

FAILURE_MARKER = "pipeline.failed"


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def read_corpus(path: str | Path) -> Corpus:
    result = parse_tabular(Path(path).read_text(encoding="utf-8"))
    records = result.records
    span = (min(r.year for r in records), max(r.year for r in records)) if records else None
    return Corpus(records=records, time_span=span)


def attach_corpus_metadata(net: CoauthorNetwork, corpus: Corpus) -> None:
    """Fill paper counts/provenance on a network read back from a NET file."""
    author_records = corpus.author_records()
    net.paper_count = {k: len(author_records.get(k, ())) for k in net.adj}
    net.provenance = {k: frozenset(author_records.get(k, ())) for k in net.adj}


# ---------------------------------------------------------------------------
# stages


def stage_ingest(in_path: str, fmt: str, out_path: str, aliases_path: str | None = None) -> dict:
    text = Path(in_path).read_text(encoding="utf-8")
    if fmt == "wos":
        aliases = load_country_aliases(aliases_path) if aliases_path else None
        parsed = parse_field_tagged(text, aliases)
    elif fmt == "tabular":
        parsed = parse_tabular(text)
    else:
        raise ValueError(f"unknown input format {fmt!r}")
    result = filter_corpus(parsed.records)
    atomic_write(out_path, write_tabular(result.corpus.records))
    stats = corpus_stats(result.corpus)
    info = {
        "parsed": len(parsed.records),
        "parse_warnings": len(parsed.warnings),
        "dropped_author_rule": result.dropped_author_rule,
        "dropped_reference_rule": result.dropped_reference_rule,
        "kept": stats.record_count,
        "authors": stats.author_count,
        "mean_authors": stats.mean_authors,
        "median_authors": stats.median_authors,
    }
    log.info(
        "ingest: %d parsed (%d warnings), %d dropped (authors), %d dropped (references), %d kept",
        info["parsed"],
        info["parse_warnings"],
        info["dropped_author_rule"],
        info["dropped_reference_rule"],
        info["kept"],
    )
    log.info(
        "ingest: %d authors, %.1f authors per paper (median %.1f)",
        stats.author_count,
        stats.mean_authors,
        stats.median_authors,
    )
    return info


def stage_build(corpus_path: str, out_path: str, reduced: bool = True) -> dict:
    corpus = read_corpus(corpus_path)
    if not corpus.records:
        raise ValueError("empty corpus")
    net = build_network(corpus)
    full_nodes = net.node_count
    if reduced:
        net = reduce_single_paper_authors(net)
    atomic_write(out_path, export_net(net))
    log.info("build: %d authors (%d before reduction), %d edges", net.node_count, full_nodes, net.edge_count)
    return {"authors": net.node_count, "authors_unreduced": full_nodes, "edges": net.edge_count}


def stage_cluster(net_path: str, out_path: str, seed: int, trials: int) -> dict:
    net = import_net(Path(net_path).read_text(encoding="utf-8"))
    giant, fraction = giant_component(net)
    clustering = cluster_mod.detect_communities(giant, seed=seed, trials=trials)
    atomic_write(out_path, export_clu(net, clustering.assignment))
    log.info(
        "cluster: giant %d/%d nodes (%.1f%%), %d clusters, codelength %.4f bits",
        giant.node_count,
        net.node_count,
        100 * fraction,
        len(clustering.clusters()),
        clustering.quality,
    )
    return {"clusters": len(clustering.clusters()), "quality": clustering.quality, "giant_fraction": fraction}


@dataclass
class Analysis:
    """Shared in-memory state for the metrics/classify/report stages."""

    corpus: Corpus
    net: CoauthorNetwork  # reduced network
    giant: CoauthorNetwork
    giant_fraction: float
    clustering: cluster_mod.Clustering
    infos: list
    summary: cluster_mod.ClusterSummary
    profiles: dict
    spans: list[tuple[int, int]]
    hubness: dict[int, tuple[metrics.Hubness, int]] = field(default_factory=dict)
    ages: dict[int, tuple[cohort.AgeCohort, bool]] = field(default_factory=dict)
    geo_labels: dict[int, str] = field(default_factory=dict)


def load_analysis(
    net_path: str,
    clu_path: str,
    corpus_path: str,
    continents_path: str | None = None,
) -> Analysis:
    corpus = read_corpus(corpus_path)
    net = import_net(Path(net_path).read_text(encoding="utf-8"))
    attach_corpus_metadata(net, corpus)
    giant, fraction = giant_component(net)
    assignment = import_clu(Path(clu_path).read_text(encoding="utf-8"), net)
    clustering = cluster_mod.Clustering(
        assignment=cluster_mod.relabel_dense(assignment),
        quality=cluster_mod.map_codelength(net, assignment),
        seed=-1,
    )
    infos, summary = cluster_mod.cluster_aggregates(net, clustering, corpus)
    profiles = metrics.role_profiles(net, clustering)
    if corpus.time_span is None:
        raise ValueError("empty corpus")
    # age cohorts are defined over exactly three slices, independent of
    # the growth-curve slice count
    spans = slice_spans(corpus.time_span[0], corpus.time_span[1], 3)
    analysis = Analysis(
        corpus=corpus,
        net=net,
        giant=giant,
        giant_fraction=fraction,
        clustering=clustering,
        infos=infos,
        summary=summary,
        profiles=profiles,
        spans=spans,
    )
    years = cohort.author_years(corpus)
    table = geo.CountryTable.load(continents_path)
    for info in infos:
        member_profiles = [profiles[m] for m in info.members]
        analysis.hubness[info.cluster_id] = metrics.cluster_hubness(member_profiles)
        activity = cohort.cluster_activity(info.members, years, spans)
        analysis.ages[info.cluster_id] = cohort.age_cohort(activity)
        counts = geo.cluster_country_counts(info, corpus)
        analysis.geo_labels[info.cluster_id] = str(geo.continent_affiliation(counts, table))
    return analysis


NODE_COLUMNS = ("key", "cluster", "k_in", "k", "z", "P", "role")
CLUSTER_COLUMNS = (
    "id",
    "size",
    "publications",
    "size_category",
    "internal_edges",
    "centralization_degree",
    "centralization_closeness",
    "centralization_betweenness",
    "hubness",
    "hub_count",
    "age_cohort",
    "age_gap",
    "geo",
)


def write_nodes_csv(analysis: Analysis) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(NODE_COLUMNS)
    for key in sorted(analysis.profiles):
        p = analysis.profiles[key]
        writer.writerow(
            [key, p.cluster_id, p.internal_degree, p.degree, f"{p.z:.6f}", f"{p.participation:.6f}", p.role.value]
        )
    return buf.getvalue()


def write_clusters_csv(analysis: Analysis) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CLUSTER_COLUMNS)
    for info in analysis.infos:
        if info.size >= 3:
            c = metrics.centralization(info.subgraph)
            if c.largest_component_only:
                log.warning("cluster %d is disconnected; centralization from its largest component", info.cluster_id)
            central = [f"{c.degree:.6f}", f"{c.closeness:.6f}", f"{c.betweenness:.6f}"]
        else:
            central = ["", "", ""]
        hubness, hub_count = analysis.hubness[info.cluster_id]
        age, gap = analysis.ages[info.cluster_id]
        writer.writerow(
            [
                info.cluster_id,
                info.size,
                info.publications,
                info.size_category,
                info.internal_edge_count,
                *central,
                hubness.value,
                hub_count,
                age.value,
                int(gap),
                analysis.geo_labels[info.cluster_id],
            ]
        )
    return buf.getvalue()


def stage_metrics(
    net_path: str,
    clu_path: str,
    corpus_path: str,
    out_dir: str,
    continents_path: str | None = None,
) -> Analysis:
    analysis = load_analysis(net_path, clu_path, corpus_path, continents_path)
    atomic_write(Path(out_dir) / "nodes.csv", write_nodes_csv(analysis))
    atomic_write(Path(out_dir) / "clusters.csv", write_clusters_csv(analysis))
    log.info("metrics: %d nodes profiled, %d clusters", len(analysis.profiles), len(analysis.infos))
    return analysis


def stage_classify(
    net_path: str,
    clu_path: str,
    corpus_path: str,
    out_dir: str,
    continents_path: str | None = None,
    analysis: Analysis | None = None,
) -> list:
    if analysis is None:
        analysis = load_analysis(net_path, clu_path, corpus_path, continents_path)
    connections = meso.classify_all(analysis.net, analysis.clustering, analysis.infos)
    out = Path(out_dir)
    atomic_write(out / "connections.csv", meso.write_connections(connections))
    attributes = {
        info.cluster_id: {
            "size": info.size,
            "hubness": analysis.hubness[info.cluster_id][0].value,
            "geo": analysis.geo_labels[info.cluster_id],
        }
        for info in analysis.infos
    }
    for kind in (meso.LINK_TRANSFER, meso.LINK_COLLABORATION):
        cln = meso.build_cluster_network(connections, kind, total_clusters=len(analysis.infos))
        atomic_write(out / f"{kind}.net", export_net(meso.cluster_network_as_graph(cln)))
        atomic_write(out / f"{kind}.dot", meso.cluster_network_dot(cln, attributes))
    log.info(
        "classify: %d connections (%d transfer, %d collaboration)",
        len(connections),
        sum(1 for c in connections if c.link_type == meso.LINK_TRANSFER),
        sum(1 for c in connections if c.link_type == meso.LINK_COLLABORATION),
    )
    return connections


def _cluster_rows(analysis: Analysis, connections) -> list[cohort.ClusterRow]:
    collaborating = set()
    in_transfer = set()
    for c in connections:
        target = collaborating if c.link_type == meso.LINK_COLLABORATION else in_transfer
        target.update(c.cluster_pair)
    rows = []
    for info in analysis.infos:
        hubness, _ = analysis.hubness[info.cluster_id]
        age, gap = analysis.ages[info.cluster_id]
        rows.append(
            cohort.ClusterRow(
                cluster_id=info.cluster_id,
                size=info.size,
                publications=info.publications,
                size_category=info.size_category,
                hubness=hubness.value,
                age=age.value,
                age_gap=gap,
                geo=analysis.geo_labels[info.cluster_id],
                collaborating=info.cluster_id in collaborating,
                in_transfer=info.cluster_id in in_transfer,
            )
        )
    return rows


def stage_report(
    net_path: str,
    clu_path: str,
    corpus_path: str,
    connections_path: str,
    out_dir: str,
    field_name: str = "field",
    continents_path: str | None = None,
    slices: int = 3,
    figures: bool = True,
    analysis: Analysis | None = None,
) -> cohort.FieldReport:
    if analysis is None:
        analysis = load_analysis(net_path, clu_path, corpus_path, continents_path)
    connections = meso.read_connections(Path(connections_path).read_text(encoding="utf-8"))
    rows = _cluster_rows(analysis, connections)
    stats = corpus_stats(analysis.corpus)
    distribution = metrics.role_distribution(analysis.net, analysis.clustering)
    transfer = sum(1 for c in connections if c.link_type == meso.LINK_TRANSFER)
    collaboration = len(connections) - transfer
    fd = cohort.FieldData(
        name=field_name,
        rows=tuple(rows),
        transfer_links=transfer,
        collaboration_links=collaboration,
        role_fractions={role.value: distribution.fractions[role] for role in metrics.ALL_ROLES},
        scalar_stats={
            "record_count": float(stats.record_count),
            "author_count": float(stats.author_count),
            "mean_authors_per_paper": stats.mean_authors,
            "median_authors_per_paper": stats.median_authors,
            "reduced_author_count": float(analysis.net.node_count),
            "giant_author_count": float(analysis.giant.node_count),
            "giant_fraction": analysis.giant_fraction,
            "codelength_bits": analysis.clustering.quality,
        },
    )
    report = cohort.field_report([fd])
    out = Path(out_dir)
    atomic_write(out / "field_report.csv", report.to_csv())
    atomic_write(out / "field_report.txt", report.to_text())
    growth = growth_curve(analysis.corpus, slices)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["slice_end", "authors", "giant_fraction"])
    for point in growth:
        writer.writerow([point.slice_end, point.author_count, f"{point.giant_fraction:.6f}"])
    atomic_write(out / "growth.csv", buf.getvalue())
    atomic_write(out / "crosstabs.csv", _crosstabs_csv(report))
    if figures:
        from . import figures as figures_mod

        figures_mod.render_report_figures(out / "figures", report, growth, rows, field_name)
    log.info("report: %d rows, %d tables -> %s", len(report.rows), len(report.tables), out)
    return report


def _crosstabs_csv(report: cohort.FieldReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["table", "row", "col", "count"])
    for name, (table, _) in report.tables.items():
        for row_label, row in zip(table.row_labels, table.counts):
            for col_label, count in zip(table.col_labels, row):
                writer.writerow([name, row_label, col_label, count])
    return buf.getvalue()


def stage_synth(spec_path: str, out_path: str, seed: int | None = None) -> None:
    spec = synth.parse_spec_file(Path(spec_path).read_text(encoding="utf-8"), seed_override=seed)
    corpus, truth = synth.generate(spec)
    atomic_write(out_path, write_tabular(corpus.records))
    truth_path = Path(out_path).with_suffix(".truth.json")
    atomic_write(truth_path, truth.to_json())
    log.info("synth: %d records, %d authors, truth -> %s", len(corpus.records), len(truth.membership), truth_path)


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class PipelineConfig:
    input_path: str
    input_format: str = "tabular"  # tabular | wos
    out_dir: str = "out"
    seed: int = 42
    trials: int = 10
    slices: int = 3
    clu_path: str | None = None  # preloaded clustering; skips the cluster stage
    continents_path: str | None = None
    aliases_path: str | None = None
    field_name: str = "field"
    figures: bool = True
    resume: bool = False

    @classmethod
    def from_file(cls, path: str) -> "PipelineConfig":
        """Flat key=value config file; keys match the dataclass fields."""
        values: dict[str, str] = {}
        for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{line_no}: expected '<key> = <value>'")
            values[key.strip()] = value.strip()
        known = set(cls.__dataclass_fields__)
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict = {}
        for key, value in values.items():
            if key in ("seed", "trials", "slices"):
                kwargs[key] = int(value)
            elif key in ("figures", "resume"):
                kwargs[key] = value.lower() in ("1", "true", "yes")
            else:
                kwargs[key] = value
        return cls(**kwargs)


class StageFailure(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute all stages; on failure, leave a marker file and raise.

    With ``resume`` set, stages whose outputs already exist are skipped.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / FAILURE_MARKER
    if marker.exists():
        marker.unlink()
    corpus_path = out / "corpus.csv"
    net_path = out / "net.net"
    clu_path = out / "net.clu"

    def fresh(*paths) -> bool:
        return not (config.resume and all(Path(p).exists() for p in paths))

    results: dict = {}
    stage = "ingest"
    try:
        if fresh(corpus_path):
            results["ingest"] = stage_ingest(
                config.input_path, config.input_format, str(corpus_path), config.aliases_path
            )
        stage = "build"
        if fresh(net_path):
            results["build"] = stage_build(str(corpus_path), str(net_path), reduced=True)
        stage = "cluster"
        if config.clu_path:
            if fresh(clu_path):
                atomic_write(clu_path, Path(config.clu_path).read_text(encoding="utf-8"))
                log.info("cluster: using preloaded clustering from %s", config.clu_path)
        elif fresh(clu_path):
            results["cluster"] = stage_cluster(str(net_path), str(clu_path), config.seed, config.trials)
        stage = "metrics"
        analysis = None
        if fresh(out / "nodes.csv", out / "clusters.csv"):
            analysis = stage_metrics(
                str(net_path), str(clu_path), str(corpus_path), str(out), config.continents_path
            )
        stage = "classify"
        if fresh(out / "connections.csv", out / "transfer.net", out / "collaboration.net"):
            stage_classify(
                str(net_path), str(clu_path), str(corpus_path), str(out), config.continents_path, analysis
            )
        stage = "report"
        if fresh(out / "report" / "field_report.csv"):
            stage_report(
                str(net_path),
                str(clu_path),
                str(corpus_path),
                str(out / "connections.csv"),
                str(out / "report"),
                field_name=config.field_name,
                continents_path=config.continents_path,
                slices=config.slices,
                figures=config.figures,
                analysis=analysis,
            )
    except Exception as exc:
        atomic_write(marker, f"stage: {stage}\nerror: {exc}\n")
        raise StageFailure(stage, exc) from exc
    return results
