"""Command-line interface.

Subcommands mirror the pipeline stages (ingest, build, cluster, metrics,
classify, report, synth) plus ``run``, which executes the whole chain
into one artifact directory. ``run`` also accepts ``--config`` with a
flat key=value file; flags given on the command line win. Environment
variables are never consulted.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from . import pipeline

log = logging.getLogger("mesobib")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mesobib", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and filter publication records")
    p.add_argument("--in", dest="in_path", required=True, help="input file")
    p.add_argument("--format", choices=("wos", "tabular"), required=True)
    p.add_argument("--out", required=True, help="output corpus CSV")
    p.add_argument("--aliases", help="country alias table (variant = canonical)")

    p = sub.add_parser("build", help="build the co-author network")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output Pajek NET file")
    p.add_argument("--reduced", action="store_true", help="drop single-paper authors")

    p = sub.add_parser("cluster", help="cluster the giant component")
    p.add_argument("--net", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--out", required=True, help="output Pajek CLU file")

    p = sub.add_parser("metrics", help="per-node roles and per-cluster metrics")
    p.add_argument("--net", required=True)
    p.add_argument("--clu", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output directory (nodes.csv, clusters.csv)")
    p.add_argument("--continents", help="country = continent table")

    p = sub.add_parser("classify", help="classify inter-cluster connections")
    p.add_argument("--net", required=True)
    p.add_argument("--clu", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output directory (connections.csv, *.net, *.dot)")
    p.add_argument("--continents")

    p = sub.add_parser("report", help="field-level comparative report")
    p.add_argument("--analysis", required=True, help="directory holding the pipeline artifacts")
    p.add_argument("--out", required=True, help="report output directory")
    p.add_argument("--field", default="field", help="field name used in the report rows")
    p.add_argument("--continents")
    p.add_argument("--slices", type=int, default=3)
    p.add_argument("--no-figures", dest="figures", action="store_false", help="skip PNG rendering")

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    p.add_argument("--spec", required=True, help="flat key=value planted spec")
    p.add_argument("--seed", type=int, help="override the spec seed")
    p.add_argument("--out", required=True, help="output corpus CSV (+ .truth.json)")

    p = sub.add_parser("run", help="execute the full pipeline")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--in", dest="input_path", help="input file")
    p.add_argument("--format", dest="input_format", choices=("wos", "tabular"))
    p.add_argument("--out", dest="out_dir", help="artifact directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--slices", type=int)
    p.add_argument("--clu", dest="clu_path", help="preloaded CLU file; skips clustering")
    p.add_argument("--continents", dest="continents_path")
    p.add_argument("--aliases", dest="aliases_path")
    p.add_argument("--field", dest="field_name")
    p.add_argument("--no-figures", dest="figures", action="store_false", default=None)
    p.add_argument("--resume", action="store_true", default=None, help="skip stages with existing outputs")
    return parser


def _run_config(args: argparse.Namespace) -> pipeline.PipelineConfig:
    if args.config:
        config = pipeline.PipelineConfig.from_file(args.config)
    else:
        if not args.input_path or not args.out_dir:
            raise SystemExit("run: --in and --out are required (or provide --config)")
        config = pipeline.PipelineConfig(input_path=args.input_path, out_dir=args.out_dir)
    overrides = {
        name: getattr(args, name)
        for name in (
            "input_path",
            "input_format",
            "out_dir",
            "seed",
            "trials",
            "slices",
            "clu_path",
            "continents_path",
            "aliases_path",
            "field_name",
            "figures",
            "resume",
        )
        if getattr(args, name, None) is not None
    }
    return dataclasses.replace(config, **overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "ingest":
            pipeline.stage_ingest(args.in_path, args.format, args.out, args.aliases)
        elif args.command == "build":
            pipeline.stage_build(args.corpus, args.out, reduced=args.reduced)
        elif args.command == "cluster":
            pipeline.stage_cluster(args.net, args.out, args.seed, args.trials)
        elif args.command == "metrics":
            pipeline.stage_metrics(args.net, args.clu, args.corpus, args.out, args.continents)
        elif args.command == "classify":
            pipeline.stage_classify(args.net, args.clu, args.corpus, args.out, args.continents)
        elif args.command == "report":
            analysis_dir = args.analysis
            pipeline.stage_report(
                f"{analysis_dir}/net.net",
                f"{analysis_dir}/net.clu",
                f"{analysis_dir}/corpus.csv",
                f"{analysis_dir}/connections.csv",
                args.out,
                field_name=args.field,
                continents_path=args.continents,
                slices=args.slices,
                figures=args.figures,
            )
        elif args.command == "synth":
            pipeline.stage_synth(args.spec, args.out, args.seed)
        elif args.command == "run":
            pipeline.run_pipeline(_run_config(args))
    except pipeline.StageFailure as exc:
        log.error("%s", exc)
        return 1
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
