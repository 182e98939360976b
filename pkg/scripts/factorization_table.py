#!/usr/bin/env python3
"""Factorization impact experiment.

Builds the same synthetic hierarchical corpus under every node-creation
policy, with and without null-code detection, and prints a table of |E|, |N|,
storage time and total time per configuration.  Edge counts stay constant
across policies; node counts shrink with stronger factorization and grow
again when null codes stop fusing.

Usage: python scripts/factorization_table.py [--leaves 50000]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from graphfuse import DataModel, FactorizationPolicy, GraphBuilder, MemoryStore
from graphfuse.ingest import ingest_json
from graphfuse.values import NullCodeSet

NULL_CODE = "Données non publiées"


def synthetic_documents(total_leaves: int, datasets: int = 10):
    per_dataset = total_leaves // datasets
    for d in range(datasets):
        shared = [f"shared-{i}" for i in range(per_dataset // 5)]
        repeated = [f"rep-{d}-{i // 2}" for i in range(per_dataset // 5)]
        nulls = [NULL_CODE] * (per_dataset // 10)
        rest = per_dataset - len(shared) - len(repeated) - len(nulls)
        unique = [f"leaf-{d}-{i}" for i in range(rest)]
        yield {
            "shared": shared,
            "left": repeated,
            "right": repeated,
            "nulls": nulls,
            "fill": unique,
        }


def run(policy: FactorizationPolicy, detection: bool, leaves: int):
    store = MemoryStore(buffer_size=100_000)
    builder = GraphBuilder(
        store,
        policy=policy,
        null_codes=NullCodeSet({NULL_CODE, "N/A"}),
        null_detection=detection,
    )
    t0 = time.perf_counter()
    t_store = 0.0
    for document in synthetic_documents(leaves):
        ds = builder.register_dataset(DataModel.JSON)
        ingest_json(builder, document, ds)
    flush_start = time.perf_counter()
    store.flush()
    t_store = time.perf_counter() - flush_start
    total = time.perf_counter() - t0
    stats = store.stats()
    return stats.edges, stats.nodes, t_store, total


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--leaves", type=int, default=50_000)
    args = parser.parse_args()

    configurations = [
        ("per-instance", FactorizationPolicy.PER_INSTANCE, False),
        ("per-path", FactorizationPolicy.PER_PATH, False),
        ("per-path + null codes", FactorizationPolicy.PER_PATH, True),
        ("per-dataset", FactorizationPolicy.PER_DATASET, False),
        ("per-graph", FactorizationPolicy.PER_GRAPH, False),
        ("per-graph + null codes", FactorizationPolicy.PER_GRAPH, True),
    ]
    print(f"{'policy':<24} {'|E|':>10} {'|N|':>10} {'T_DB(s)':>9} {'T(s)':>7}")
    for name, policy, detection in configurations:
        edges, nodes, t_db, total = run(policy, detection, args.leaves)
        print(f"{name:<24} {edges:>10} {nodes:>10} {t_db:>9.2f} {total:>7.2f}")


if __name__ == "__main__":
    main()
