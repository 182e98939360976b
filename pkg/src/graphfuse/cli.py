"""Command-line entry point.

Subcommands: ingest, frequent-values, connect, stats, export, import.
Exit codes: 0 success, 2 configuration error, 3 dataset error, 4 service
error.  Flags override the config file; GRAPHFUSE_* environment variables
sit between the two.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .config import BuildConfig, ConfigError, load_config, load_null_codes_file
from .ingest import DatasetError
from .model import DataModel
from .pipeline import LAST_REPORT_META, DatasetSpec, run_build
from .search import FOUND, find_connection
from .storage import FormatError, SqliteStore, export_graph, import_graph
from .values import frequent_values

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATASET = 3
EXIT_SERVICE = 4

_MODEL_ALIASES = {
    "relational": DataModel.RELATIONAL,
    "csv": DataModel.RELATIONAL,
    "rdf": DataModel.RDF,
    "ntriples": DataModel.RDF,
    "json": DataModel.JSON,
    "xml": DataModel.XML,
    "html": DataModel.HTML,
    "text": DataModel.TEXT,
    "table2d": DataModel.TABLE2D,
    "pdf": DataModel.PDF_DERIVED,
}


def parse_dataset_spec(raw: str) -> DatasetSpec:
    parts = raw.split(":", 1)
    if len(parts) != 2 or parts[0].lower() not in _MODEL_ALIASES:
        known = ", ".join(sorted(_MODEL_ALIASES))
        raise ConfigError(
            f"bad dataset spec {raw!r}; expected model:path[:prov] with model in {known}"
        )
    model = _MODEL_ALIASES[parts[0].lower()]
    rest = parts[1]
    prov = None
    # an optional provenance URI may follow the path after another colon
    if ":" in rest:
        candidate_path, candidate_prov = rest.split(":", 1)
        if "://" in candidate_prov or candidate_prov.startswith("urn:"):
            rest, prov = candidate_path, candidate_prov
    return DatasetSpec(model, rest, prov)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphfuse",
        description="Integrate heterogeneous datasets into one persistent graph.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_store(p):
        p.add_argument("--store", default="./graph", help="graph store directory")

    ingest = sub.add_parser("ingest", help="build or extend a graph from datasets")
    add_store(ingest)
    ingest.add_argument("datasets", nargs="+", help="model:path[:prov] specs")
    ingest.add_argument("--config", help="key=value configuration file")
    ingest.add_argument("--policy", help="per-instance|per-path|per-dataset|per-graph")
    ingest.add_argument("--null-codes-file", help="file with one null code per line")
    ingest.add_argument(
        "--no-null-detection", action="store_true", help="factorize null codes too"
    )
    ingest.add_argument("--extractor", help="off | gazetteer:<path> | service URL")
    ingest.add_argument("--ned", help="off | disambiguation service URL")
    ingest.add_argument("--matching", help="off | entity | full")
    ingest.add_argument("--buffer-size", help="write buffer capacity")
    ingest.add_argument("--cache-size", help="label cache capacity")
    ingest.add_argument("--lang", help="language tag for the services")
    ingest.add_argument("--pdf-service", help="pdf extraction service base URL")
    ingest.add_argument("--csv-no-header", action="store_true")
    ingest.add_argument("--out", help="write the machine-readable report here")

    freq = sub.add_parser("frequent-values", help="most frequent leaf values")
    add_store(freq)
    freq.add_argument("-k", type=int, default=20)

    connect = sub.add_parser("connect", help="shortest connection between two labels")
    add_store(connect)
    connect.add_argument("label_a")
    connect.add_argument("label_b")
    connect.add_argument("--max-hops", type=int, default=10)
    connect.add_argument("--out", help="write the path as JSON here")

    stats = sub.add_parser("stats", help="graph counters and the last build report")
    add_store(stats)
    stats.add_argument("--out", help="write counters as JSON here")

    export = sub.add_parser("export", help="dump the graph as line-delimited JSON")
    add_store(export)
    export.add_argument("output")

    imp = sub.add_parser("import", help="load a previously exported graph")
    add_store(imp)
    imp.add_argument("input")
    return parser


def _config_from_args(args) -> BuildConfig:
    overrides = {
        "policy": args.policy,
        "extractor": args.extractor,
        "ned": args.ned,
        "matching": args.matching,
        "buffer_size": args.buffer_size,
        "cache_size": args.cache_size,
        "lang": args.lang,
        "pdf_service": args.pdf_service,
    }
    if args.null_codes_file:
        overrides["null_codes"] = load_null_codes_file(args.null_codes_file)
    if args.no_null_detection:
        overrides["null_detection"] = False
    if args.csv_no_header:
        overrides["csv_has_header"] = False
    return load_config(args.config, overrides)


def _open_store(args) -> SqliteStore:
    return SqliteStore(args.store)


def cmd_ingest(args) -> int:
    config = _config_from_args(args)
    specs = [parse_dataset_spec(raw) for raw in args.datasets]
    store = SqliteStore(
        args.store, buffer_size=config.buffer_size, cache_size=config.cache_size
    )
    try:
        report = run_build(store, specs, config)
    finally:
        store.close()
    print(report.table())
    for entry in report.datasets:
        status = entry.get("error", "ok")
        print(f"  {entry['model']}:{entry['source']}: {status}")
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
    if report.service_errors:
        return EXIT_SERVICE
    if report.dataset_errors:
        return EXIT_DATASET
    return EXIT_OK


def cmd_frequent_values(args) -> int:
    store = _open_store(args)
    try:
        ranked = frequent_values(store, args.k)
    finally:
        store.close()
    width = max([len(repr(label)) for label, _ in ranked], default=5)
    for label, count in ranked:
        print(f"{repr(label).ljust(width)}  {count}")
    return EXIT_OK


def cmd_connect(args) -> int:
    store = _open_store(args)
    try:
        result = find_connection(store, args.label_a, args.label_b, args.max_hops)
    finally:
        store.close()
    if result.status == FOUND:
        if not result.path:
            print(f"'{args.label_a}' and '{args.label_b}': {result.message or 'same node'}")
        for step in result.path:
            print(
                f"  ({step.source}) {step.source_label!r} "
                f"-[{step.label or 'ε'} @{step.confidence:.2f}]-> "
                f"({step.target}) {step.target_label!r}"
            )
        print(f"path found: {result.hops} hop(s)")
    else:
        print(result.message)
    if args.out:
        Path(args.out).write_text(
            json.dumps(result.to_dict(), ensure_ascii=False, indent=2),
            encoding="utf-8",
        )
    return EXIT_OK


def cmd_stats(args) -> int:
    store = _open_store(args)
    try:
        stats = store.stats()
        last = store.get_meta(LAST_REPORT_META)
    finally:
        store.close()
    counters = {
        "nodes": stats.nodes,
        "edges": stats.edges,
        "similar": stats.similar,
        "datasets": stats.datasets,
        "by_kind": dict(sorted(stats.by_kind.items())),
    }
    print(json.dumps(counters, ensure_ascii=False, indent=2))
    if last:
        print("last build report:")
        print(last)
    if args.out:
        Path(args.out).write_text(
            json.dumps(counters, ensure_ascii=False, indent=2), encoding="utf-8"
        )
    return EXIT_OK


def cmd_export(args) -> int:
    store = _open_store(args)
    try:
        lines = export_graph(store, args.output)
    finally:
        store.close()
    print(f"exported {lines} record(s) to {args.output}")
    return EXIT_OK


def cmd_import(args) -> int:
    store = _open_store(args)
    try:
        if store.stats().nodes:
            raise DatasetError(f"store {args.store} is not empty")
        import_graph(args.input, store)
        stats = store.stats()
    finally:
        store.close()
    print(f"imported {stats.nodes} nodes, {stats.edges} edges, {stats.similar} similar")
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "frequent-values": cmd_frequent_values,
    "connect": cmd_connect,
    "stats": cmd_stats,
    "export": cmd_export,
    "import": cmd_import,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FormatError as exc:
        print(f"import error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except (DatasetError, OSError) as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET


if __name__ == "__main__":
    sys.exit(main())
