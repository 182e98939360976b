"""Relational and CSV ingestion.

One table node per relation, one empty-labeled tuple node per row, one value
node per non-null attribute value with an edge labeled by the attribute name.
Foreign keys add tuple-to-tuple edges for every matching row pair; null
values never join.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..build import GraphBuilder
from ..model import EPSILON, Dataset, NodeId, NodeKind, escape_reserved
from ..values import LabelPath
from . import DatasetError, IngestReport


@dataclass
class ForeignKey:
    column: str
    target_table: str
    target_column: str


@dataclass
class RelationalInput:
    table_name: str
    columns: List[str]
    rows: List[Sequence[Optional[str]]]
    foreign_keys: List[ForeignKey] = field(default_factory=list)


class _TableIndex:
    def __init__(self, node: NodeId, columns: List[str]):
        self.node = node
        self.columns = columns
        self.tuples: List[NodeId] = []
        # column -> value -> tuple nodes carrying that value
        self.by_value: Dict[str, Dict[str, List[NodeId]]] = {c: {} for c in columns}


class RelationalCatalog:
    """Per-dataset registry of ingested tables, used to resolve foreign keys
    in either ingestion order."""

    def __init__(self):
        self.tables: Dict[str, _TableIndex] = {}
        self.pending: List[Tuple[str, ForeignKey]] = []


def ingest_relational(
    builder: GraphBuilder,
    table: RelationalInput,
    ds: Dataset,
    catalog: Optional[RelationalCatalog] = None,
) -> IngestReport:
    report = IngestReport(dataset=ds.id)
    if catalog is None:
        catalog = RelationalCatalog()
    if table.table_name in catalog.tables:
        raise DatasetError(f"table {table.table_name!r} ingested twice")

    arity = len(table.columns)
    table_node = builder.fresh_node(table.table_name, NodeKind.TABLE, ds.id)
    report.nodes += 1
    index = _TableIndex(table_node, table.columns)
    catalog.tables[table.table_name] = index
    base_path = LabelPath(ds.id, (table.table_name,))

    for row_number, row in enumerate(table.rows, start=1):
        if len(row) != arity:
            report.skipped += 1
            report.errors.append(
                f"row {row_number}: expected {arity} values, got {len(row)}"
            )
            continue
        tuple_node = builder.fresh_node(EPSILON, NodeKind.TUPLE, ds.id)
        report.nodes += 1
        index.tuples.append(tuple_node)
        builder.add_edge(table_node, tuple_node, EPSILON, ds.id, 1.0)
        report.edges += 1
        for column, value in zip(table.columns, row):
            if value is None:
                continue
            value = str(value)
            node, created = builder.value_node(value, ds, base_path.child(column))
            report.created_node(created)
            builder.add_edge(tuple_node, node, escape_reserved(column), ds.id, 1.0)
            report.edges += 1
            index.by_value.setdefault(column, {}).setdefault(value, []).append(tuple_node)

    # resolve this table's foreign keys, and earlier tables' keys aiming here
    for fk in table.foreign_keys:
        if fk.target_table in catalog.tables:
            report.edges += _join(builder, ds, index, fk, catalog.tables[fk.target_table])
        else:
            catalog.pending.append((table.table_name, fk))
    still_pending = []
    for source_name, fk in catalog.pending:
        if fk.target_table == table.table_name and source_name in catalog.tables:
            report.edges += _join(builder, ds, catalog.tables[source_name], fk, index)
        else:
            still_pending.append((source_name, fk))
    catalog.pending = still_pending
    return report


def _join(
    builder: GraphBuilder,
    ds: Dataset,
    source: _TableIndex,
    fk: ForeignKey,
    target: _TableIndex,
) -> int:
    if fk.column not in source.by_value or fk.target_column not in target.by_value:
        raise DatasetError(
            f"foreign key {fk.column} -> {fk.target_table}.{fk.target_column}: "
            "unknown column"
        )
    edges = 0
    target_values = target.by_value[fk.target_column]
    for value, source_tuples in source.by_value[fk.column].items():
        for target_tuple in target_values.get(value, ()):
            for source_tuple in source_tuples:
                builder.add_edge(source_tuple, target_tuple, EPSILON, ds.id, 1.0)
                edges += 1
    return edges


def read_csv(
    path,
    table_name: Optional[str] = None,
    has_header: bool = True,
    delimiter: str = ",",
) -> RelationalInput:
    """Load a CSV file as one relation; a missing header row gets synthetic
    attribute names col1..colm.  Empty cells stay empty-string values (they
    are null codes, not SQL nulls)."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle, delimiter=delimiter))
    if not rows:
        raise DatasetError(f"{path}: empty CSV file")
    if has_header:
        columns, data = list(rows[0]), rows[1:]
    else:
        width = max(len(r) for r in rows)
        columns = [f"col{i}" for i in range(1, width + 1)]
        data = rows
    return RelationalInput(
        table_name=table_name or path.name,
        columns=columns,
        rows=[list(r) for r in data],
    )
