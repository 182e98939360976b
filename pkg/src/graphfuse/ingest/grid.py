"""Bidimensional (spreadsheet-style) table ingestion.

Unlike relational tables, 2d tables have headers on both axes, possibly
nested through merged cells.  Each non-empty header cell becomes a header
cell node, each non-empty data cell a value node; nested headers link to
their ancestor through cl:parentHeaderCell, and every data cell links to its
nearest column and row headers (cl:closestXHeaderCell, cl:closestYHeaderCell).
Every cell node also carries a generated URI identity, mirroring the linked
open data encoding of such tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
from urllib.parse import quote

from ..build import GraphBuilder
from ..model import (
    CELL_URI_EDGE,
    CLOSEST_X_HEADER_EDGE,
    CLOSEST_Y_HEADER_EDGE,
    EPSILON,
    PARENT_HEADER_EDGE,
    Dataset,
    NodeId,
    NodeKind,
)
from ..values import LabelPath
from . import DatasetError, IngestReport

Span = Tuple[int, int, int, int]  # row0, col0, row1, col1 inclusive


@dataclass
class Grid2d:
    cells: List[List[Optional[str]]]
    header_rows: int = 0
    header_cols: int = 0
    merges: List[Span] = field(default_factory=list)
    name: str = "grid"

    @property
    def n_rows(self) -> int:
        return len(self.cells)

    @property
    def n_cols(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def validate(self) -> "Grid2d":
        widths = {len(row) for row in self.cells}
        if len(widths) > 1:
            raise DatasetError(f"grid {self.name!r}: ragged rows {sorted(widths)}")
        if self.header_rows > self.n_rows or self.header_cols > self.n_cols:
            raise DatasetError(
                f"grid {self.name!r}: header counts ({self.header_rows}, "
                f"{self.header_cols}) exceed grid bounds "
                f"({self.n_rows}, {self.n_cols})"
            )
        if self.header_rows < 0 or self.header_cols < 0:
            raise DatasetError(f"grid {self.name!r}: negative header counts")
        covered = set()
        for span in self.merges:
            r0, c0, r1, c1 = span
            if not (0 <= r0 <= r1 < self.n_rows and 0 <= c0 <= c1 < self.n_cols):
                raise DatasetError(f"grid {self.name!r}: merge {span} out of bounds")
            for r in range(r0, r1 + 1):
                for c in range(c0, c1 + 1):
                    if (r, c) in covered:
                        raise DatasetError(
                            f"grid {self.name!r}: overlapping merges at ({r}, {c})"
                        )
                    covered.add((r, c))
        return self


def ingest_2dtable(builder: GraphBuilder, grid: Grid2d, ds: Dataset) -> IngestReport:
    grid.validate()
    report = IngestReport(dataset=ds.id)

    anchor_of: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for r0, c0, r1, c1 in grid.merges:
        for r in range(r0, r1 + 1):
            for c in range(c0, c1 + 1):
                anchor_of[(r, c)] = (r0, c0)

    def anchor(r: int, c: int) -> Tuple[int, int]:
        return anchor_of.get((r, c), (r, c))

    def content(cell: Tuple[int, int]) -> Optional[str]:
        value = grid.cells[cell[0]][cell[1]]
        if value is None or not value.strip():
            return None
        return value.strip()

    def is_header(cell: Tuple[int, int]) -> bool:
        return cell[0] < grid.header_rows or cell[1] < grid.header_cols

    table_node = builder.fresh_node(grid.name, NodeKind.TABLE, ds.id)
    report.nodes += 1
    path = LabelPath(ds.id, (grid.name,))

    nodes: Dict[Tuple[int, int], NodeId] = {}
    for r in range(grid.n_rows):
        for c in range(grid.n_cols):
            cell = anchor(r, c)
            if cell in nodes or content(cell) is None:
                continue
            label = content(cell)
            if is_header(cell):
                node = builder.fresh_node(label, NodeKind.HEADER_CELL, ds.id)
                report.nodes += 1
            else:
                node, created = builder.value_node(label, ds, path)
                report.created_node(created)
            nodes[cell] = node
            builder.add_edge(table_node, node, EPSILON, ds.id, 1.0)
            report.edges += 1
            uri = f"cell://{ds.id}/{quote(grid.name, safe='')}/{cell[0]}-{cell[1]}"
            uri_node, created = builder.uri_node(uri, ds.id)
            report.created_node(created)
            builder.add_edge(node, uri_node, CELL_URI_EDGE, ds.id, 1.0)
            report.edges += 1

    # nested headers: each header cell points at its ancestor header cell
    linked = set()
    for (r, c), node in nodes.items():
        if not is_header((r, c)):
            continue
        parents = []
        if 0 < r < grid.header_rows:
            # a merged cell may span several columns, hence several parents
            span_cols = sorted({cc for (_, cc), _ in _span_cells(anchor_of, (r, c))}) or [c]
            for cc in span_cols:
                parents.append(anchor(r - 1, cc))
        if 0 < c < grid.header_cols:
            span_rows = sorted({rr for (rr, _), _ in _span_cells(anchor_of, (r, c))}) or [r]
            for rr in span_rows:
                parents.append(anchor(rr, c - 1))
        for parent in parents:
            target = nodes.get(parent)
            if target is None or parent == (r, c) or (node, target) in linked:
                continue
            linked.add((node, target))
            builder.add_edge(node, target, PARENT_HEADER_EDGE, ds.id, 1.0)
            report.edges += 1

    # data cells: edges to the nearest column (X) and row (Y) headers
    for (r, c), node in nodes.items():
        if is_header((r, c)):
            continue
        x_header = _nearest(nodes, content, anchor, "up", r, c, grid.header_rows)
        if x_header is not None:
            builder.add_edge(node, x_header, CLOSEST_X_HEADER_EDGE, ds.id, 1.0)
            report.edges += 1
        y_header = _nearest(nodes, content, anchor, "left", r, c, grid.header_cols)
        if y_header is not None:
            builder.add_edge(node, y_header, CLOSEST_Y_HEADER_EDGE, ds.id, 1.0)
            report.edges += 1
    return report


def _span_cells(anchor_of, cell):
    """All grid positions whose anchor is the given cell (its merged span)."""
    return [(pos, a) for pos, a in anchor_of.items() if a == cell]


def _nearest(nodes, content, anchor, direction: str, r: int, c: int, band: int):
    """Closest non-empty header node walking up (column header) or left (row
    header) from the edge of the header band."""
    steps = range(band - 1, -1, -1)
    for step in steps:
        cell = anchor(step, c) if direction == "up" else anchor(r, step)
        if content(cell) is not None and cell in nodes:
            return nodes[cell]
    return None
