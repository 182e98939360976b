#!/usr/bin/env python3
"""RDF loading scalability experiment.

Loads synthetic triples into a persistent store in fixed-size slices and
reports the cumulative loading time after each slice, plus a least-squares
linearity fit over the curve.

Usage: python scripts/rdf_scaling.py [--triples 1000000] [--slices 10] [--store DIR]
"""

import argparse
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from graphfuse import DataModel, GraphBuilder, SqliteStore
from graphfuse.ingest import ingest_ntriples


def triple_lines(start, count):
    for n in range(start, start + count):
        subject = f"<http://kb.example.org/s{n}>"
        predicate = f"<http://kb.example.org/p{n % 17}>"
        obj = (
            f"<http://kb.example.org/o{n}>"
            if n % 3
            else f'"object literal {n}"'
        )
        yield f"{subject} {predicate} {obj} ."


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--triples", type=int, default=1_000_000)
    parser.add_argument("--slices", type=int, default=10)
    parser.add_argument("--store", default=None)
    args = parser.parse_args()

    directory = args.store or tempfile.mkdtemp(prefix="rdf-scaling-")
    store = SqliteStore(directory, buffer_size=100_000, cache_size=2_000_000)
    builder = GraphBuilder(store)
    ds = builder.register_dataset(DataModel.RDF)

    per_slice = args.triples // args.slices
    started = time.perf_counter()
    points = []
    print(f"{'triples':>10} {'nodes':>10} {'cumulative(s)':>14}")
    for i in range(args.slices):
        ingest_ntriples(builder, triple_lines(i * per_slice, per_slice), ds)
        store.flush()
        elapsed = time.perf_counter() - started
        loaded = (i + 1) * per_slice
        points.append((loaded, elapsed))
        print(f"{loaded:>10} {store.stats().nodes:>10} {elapsed:>14.1f}")

    n = len(points)
    sum_x = sum(x for x, _ in points)
    sum_y = sum(y for _, y in points)
    sum_xx = sum(x * x for x, _ in points)
    sum_xy = sum(x * y for x, y in points)
    slope = (n * sum_xy - sum_x * sum_y) / (n * sum_xx - sum_x * sum_x)
    intercept = (sum_y - slope * sum_x) / n
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in points)
    mean_y = sum_y / n
    ss_tot = sum((y - mean_y) ** 2 for _, y in points)
    print(f"linear fit: {slope * 1e6:.2f} s per million triples, "
          f"R^2 = {1 - ss_res / ss_tot:.4f}")
    store.close()


if __name__ == "__main__":
    main()
