"""Operator command line.

Subcommands: ingest, pipeline-run, schedule, serve, query, export,
embed-build, embed-bench, stats. Every subcommand is a thin wrapper over
the library modules; stdout carries the data (deterministic for
deterministic inputs), diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import threading
from pathlib import Path

from .api.app import create_app
from .embedding.benchmark import benchmark_pca, cost_table_csv
from .embedding.models import DEFAULT_MODEL
from .embedding.tiers import EmbeddingCache
from .export import export_nodes, export_relationships
from .graph.schema import EDGE_TYPES, NODE_LABELS, key_string
from .graph.store import GraphStore
from .ingest import parsers
from .pipeline.config import PipelineConfig, load_config
from .pipeline.runner import EmbeddingService, run_full
from .pipeline.scheduler import PipelineScheduler
from .pipeline.state import PipelineState
from .query.executor import NodeCell, execute
from .query.parser import parse_query

logger = logging.getLogger(__name__)

INGEST_PARSERS = {
    "nvd": parsers.parse_nvd_feed,
    "cwe": parsers.parse_cwe_catalog,
    "cvedetails": parsers.parse_cvedetails_export,
    "exploitdb": parsers.parse_exploitdb_index,
}


def _load_config(args) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    if getattr(args, "store_path", None):
        config.store_path = args.store_path
    return config


def _open_store(config: PipelineConfig) -> GraphStore:
    return GraphStore.open(config.store_path)


def _cache(config: PipelineConfig) -> EmbeddingCache:
    return EmbeddingCache(config.embedding_cache_dir,
                          alpha=config.embedding.alpha,
                          beta=config.embedding.beta)


def _embedder(config: PipelineConfig) -> EmbeddingService:
    return EmbeddingService(_cache(config), config.embedding.models)


def cmd_ingest(args) -> int:
    parse = INGEST_PARSERS[args.source]
    result = parse(Path(args.input).read_bytes())
    print(f"parsed={len(result.records)} rejected={len(result.rejects)}")
    for reject in result.rejects:
        print(f"reject entry {reject.index}: {reject.reason}")
    return 0


def cmd_pipeline_run(args) -> int:
    config = _load_config(args)
    store = _open_store(config)
    state = PipelineState.load(config.state_path)
    reports = run_full(config, state, store, _embedder(config))
    for report in reports:
        print(report.line())
    return 0


def cmd_schedule(args) -> int:
    config = _load_config(args)
    if args.interval:
        from .pipeline.config import parse_interval
        config.interval_s = parse_interval(args.interval)
    store = _open_store(config)
    state = PipelineState.load(config.state_path)
    embedder = _embedder(config)

    def runner():
        for report in run_full(config, state, store, embedder):
            logger.info("%s", report.line())

    logger.info("scheduling pipeline every %ds", config.interval_s)
    PipelineScheduler(runner, config.interval_s).run_forever()
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    config = _load_config(args)
    if args.port:
        config.api.port = args.port
    store = _open_store(config)
    static_dir = Path(args.ui) if args.ui else None
    app = create_app(store, _cache(config), config.api, static_dir=static_dir)

    if args.with_scheduler:
        state = PipelineState.load(config.state_path)
        embedder = _embedder(config)
        scheduler = PipelineScheduler(
            lambda: run_full(config, state, store, embedder), config.interval_s)
        threading.Thread(target=scheduler.run_forever, daemon=True).start()
        logger.info("scheduler thread started (every %ds)", config.interval_s)

    uvicorn.run(app, host=config.api.host, port=config.api.port, log_level="warning")
    return 0


def _render_cell(cell) -> str:
    if cell is None:
        return ""
    if isinstance(cell, NodeCell):
        return f"{cell.label}:{key_string(cell.label, cell.key)}"
    return str(cell)


def cmd_query(args) -> int:
    config = _load_config(args)
    store = _open_store(config)
    table = execute(parse_query(args.query), store)
    if args.format == "json":
        print(json.dumps(table.to_dict(), indent=2))
    else:
        for row in table.rows:
            print("\t".join(_render_cell(cell) for cell in row))
    return 0


def cmd_export(args) -> int:
    config = _load_config(args)
    store = _open_store(config)
    props = [p.strip() for p in (args.props or "").split(",") if p.strip()]
    if args.node_type:
        body = export_nodes(store, args.node_type, props, args.format)
    else:
        body = export_relationships(store, args.rel_type, props, args.format)
    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
        logger.info("wrote %s", args.out)
    else:
        sys.stdout.write(body)
    return 0


def cmd_embed_build(args) -> int:
    config = _load_config(args)
    store = _open_store(config)
    cache = _cache(config)
    tiers = cache.build_from_store(store, args.year, args.model)
    if tiers is None:
        print(f"year {args.year}: no vulnerabilities, nothing built")
    else:
        print(f"year {args.year} model {args.model}: n={tiers.n} dim={tiers.dim} "
              f"alpha={tiers.alpha_dim} beta={tiers.beta_dim}")
    return 0


def cmd_embed_bench(args) -> int:
    dims = [int(d) for d in args.dims.split(",") if d.strip()]
    rows = benchmark_pca(dims, n_rows=args.rows)
    sys.stdout.write(cost_table_csv(rows))
    return 0


def cmd_stats(args) -> int:
    config = _load_config(args)
    store = _open_store(config)
    counts = store.counts()
    years: dict[int, int] = {}
    for node in store.scan("Vulnerability"):
        year = int(node.props["cveID"].split("-")[1])
        years[year] = years.get(year, 0) + 1
    if args.format == "json":
        print(json.dumps({
            "entities": {label: counts[label] for label in NODE_LABELS},
            "relationships": {etype: counts[etype] for etype in EDGE_TYPES},
            "cves_by_year": {str(y): years[y] for y in sorted(years)},
        }, indent=2))
        return 0
    print("entity\tcount")
    for label in NODE_LABELS:
        print(f"{label}\t{counts[label]}")
    print("relationship\tcount")
    for etype in EDGE_TYPES:
        print(f"{etype}\t{counts[etype]}")
    print("year\tcount")
    for year in sorted(years):
        print(f"{year}\t{years[year]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vulngraph",
        description="Vulnerability graph platform: pipeline, queries, API, embeddings.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--store-path", help="override the store directory")

    p = sub.add_parser("ingest", help="parse one source file and report counts")
    p.add_argument("--source", required=True, choices=sorted(INGEST_PARSERS))
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("pipeline-run", help="run the full pipeline once")
    common(p)
    p.set_defaults(func=cmd_pipeline_run)

    p = sub.add_parser("schedule", help="run the pipeline on a fixed interval")
    common(p)
    p.add_argument("--interval", help="e.g. 2h, 30m (default from config)")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("serve", help="serve the HTTP API")
    common(p)
    p.add_argument("--port", type=int)
    p.add_argument("--ui", help="static directory to mount at /ui")
    p.add_argument("--with-scheduler", action="store_true",
                   help="also run the pipeline scheduler in-process")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("query", help="run a read-only query")
    common(p)
    p.add_argument("query")
    p.add_argument("--format", choices=["tsv", "json"], default="tsv")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("export", help="export nodes or relationships")
    common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--node-type")
    group.add_argument("--rel-type")
    p.add_argument("--props", default="", help="comma-separated property names")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("embed-build", help="(re)build embedding tiers for a year")
    common(p)
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--model", default=DEFAULT_MODEL)
    p.set_defaults(func=cmd_embed_build)

    p = sub.add_parser("embed-bench", help="PCA cost table across dimensions")
    p.add_argument("--dims", default="16,32,64,128,256,512,768")
    p.add_argument("--rows", type=int, default=2000)
    p.set_defaults(func=cmd_embed_bench)

    p = sub.add_parser("stats", help="entity/relationship counts and CVEs per year")
    common(p)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
