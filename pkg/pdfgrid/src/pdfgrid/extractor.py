"""Layout analysis: ruled-table detection and line-grouped text.

Tables are found from the ruling lines: segments cluster into regions, the
distinct vertical and horizontal rule positions of a region form the cell
boundaries, and each text run is assigned to the cell containing its anchor
point.  Header rows and columns are inferred from type signatures: a leading
row (column) whose cells' numeric-versus-textual signature disagrees with the
body majority of their columns (rows) is a header.

Everything that is not inside a table region becomes text: runs group into
visual lines, and consecutive lines merge into one unit until a line ends a
sentence, so coherent units are not split.  Table content is excluded from
the text cell by cell through its position.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .pdfread import NoContentError, Segment, TextRun, read_pdf

_COORD_TOL = 1.0  # rule positions closer than this merge into one boundary
_REGION_PAD = 3.0
_SENTENCE_END = re.compile(r"[.!?][)\"'»\]]*$")
_NUMERIC_CELL = re.compile(r"^[+-]?[0-9][0-9 .,]*%?$")


@dataclass
class ExtractedTable:
    cells: List[List[str]]
    header_rows: int
    header_cols: int
    page_number: int
    bbox: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    @property
    def n_rows(self) -> int:
        return len(self.cells)

    @property
    def n_cols(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def to_dict(self) -> dict:
        return {
            "cells": self.cells,
            "headerRows": self.header_rows,
            "headerCols": self.header_cols,
            "pageNumber": self.page_number,
        }


@dataclass
class ExtractedText:
    lines: List[Tuple[int, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"lines": [[number, content] for number, content in self.lines]}


@dataclass
class ExtractionResult:
    text: ExtractedText
    tables: List[ExtractedTable]

    def to_dict(self, source_uri: str = "") -> dict:
        return {
            "text": self.text.to_dict(),
            "tables": [t.to_dict() for t in self.tables],
            "sourceUri": source_uri,
        }


# -- table regions -----------------------------------------------------------


def _cluster_positions(values: Sequence[float]) -> List[float]:
    """Merge coordinates closer than the tolerance into one boundary."""
    out: List[List[float]] = []
    for value in sorted(values):
        if out and value - out[-1][-1] <= _COORD_TOL:
            out[-1].append(value)
        else:
            out.append([value])
    return [sum(group) / len(group) for group in out]


def _segment_regions(segments: List[Segment]) -> List[List[Segment]]:
    """Group segments whose padded bounding boxes touch (union-find)."""
    ruled = [s for s in segments if s.horizontal or s.vertical]
    boxes = [
        (
            min(s.x0, s.x1) - _REGION_PAD,
            min(s.y0, s.y1) - _REGION_PAD,
            max(s.x0, s.x1) + _REGION_PAD,
            max(s.y0, s.y1) + _REGION_PAD,
        )
        for s in ruled
    ]
    parent = list(range(len(ruled)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(ruled)):
        for j in range(i + 1, len(ruled)):
            a, b = boxes[i], boxes[j]
            if a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]:
                parent[find(j)] = find(i)
    grouped: Dict[int, List[Segment]] = {}
    for i, segment in enumerate(ruled):
        grouped.setdefault(find(i), []).append(segment)
    return list(grouped.values())


def _grid_from_region(region: List[Segment], runs: List[TextRun], page_number: int):
    xs = _cluster_positions(
        [s.x0 for s in region if s.vertical]
    )
    ys = _cluster_positions(
        [s.y0 for s in region if s.horizontal]
    )
    if len(xs) < 2 or len(ys) < 2:
        return None
    ys_desc = sorted(ys, reverse=True)
    n_rows, n_cols = len(ys) - 1, len(xs) - 1
    buckets: List[List[List[TextRun]]] = [
        [[] for _ in range(n_cols)] for _ in range(n_rows)
    ]
    x_min, x_max = xs[0], xs[-1]
    y_min, y_max = ys_desc[-1], ys_desc[0]
    for run in runs:
        if not (x_min <= run.x <= x_max and y_min <= run.y <= y_max):
            continue
        col = _slot(xs, run.x)
        row = _slot_desc(ys_desc, run.y)
        if col is None or row is None:
            continue
        buckets[row][col].append(run)
    cells = []
    for row in buckets:
        line = []
        for bucket in row:
            bucket.sort(key=lambda r: (-r.y, r.x))
            line.append(" ".join(r.text for r in bucket).strip())
        cells.append(line)
    table = ExtractedTable(cells, 0, 0, page_number, (x_min, y_min, x_max, y_max))
    table.header_rows, table.header_cols = infer_headers(cells)
    return table


def _slot(boundaries: List[float], value: float) -> Optional[int]:
    for i in range(len(boundaries) - 1):
        if boundaries[i] <= value <= boundaries[i + 1]:
            return i
    return None


def _slot_desc(boundaries_desc: List[float], value: float) -> Optional[int]:
    for i in range(len(boundaries_desc) - 1):
        if boundaries_desc[i] >= value >= boundaries_desc[i + 1]:
            return i
    return None


# -- header inference -----------------------------------------------------------


def _cell_type(content: str) -> Optional[str]:
    text = content.strip()
    if not text:
        return None
    return "numeric" if _NUMERIC_CELL.match(text) else "textual"


def _majority(types: List[Optional[str]]) -> Optional[str]:
    counts: Dict[str, int] = {}
    for t in types:
        if t is not None:
            counts[t] = counts.get(t, 0) + 1
    if not counts:
        return None
    return max(sorted(counts), key=lambda t: counts[t])


def infer_headers(cells: List[List[str]]) -> Tuple[int, int]:
    """Leading rows/columns whose type signature differs from the body
    majority of their columns/rows.

    Only numeric-majority body columns carry a signal: a textual cell over a
    numeric column marks a header, a numeric cell over a numeric column marks
    data.  Textual-over-textual is uninformative, so an all-text table gets
    no headers.
    """
    n_rows = len(cells)
    n_cols = len(cells[0]) if cells else 0

    def leading_band(lines: List[List[Optional[str]]]) -> int:
        band = 0
        while band < len(lines) - 1:
            body = lines[band + 1 :]
            marks_header = marks_data = 0
            for index, cell in enumerate(lines[band]):
                if cell is None:
                    continue
                majority = _majority([row[index] for row in body])
                if majority != "numeric":
                    continue
                if cell == "numeric":
                    marks_data += 1
                else:
                    marks_header += 1
            if marks_header > marks_data:
                band += 1
            else:
                break
        return band

    typed = [[_cell_type(c) for c in row] for row in cells]
    header_rows = leading_band(typed)
    transposed = [[typed[r][c] for r in range(n_rows)] for c in range(n_cols)]
    header_cols = leading_band(transposed)
    return header_rows, header_cols


# -- text grouping ----------------------------------------------------------------


def _visual_lines(runs: List[TextRun]) -> List[str]:
    lines: List[List[TextRun]] = []
    for run in sorted(runs, key=lambda r: (-r.y, r.x)):
        tolerance = max(2.0, run.size * 0.6)
        if lines and abs(lines[-1][0].y - run.y) <= tolerance:
            lines[-1].append(run)
        else:
            lines.append([run])
    rendered = []
    for group in lines:
        group.sort(key=lambda r: r.x)
        rendered.append(" ".join(r.text for r in group).strip())
    return [line for line in rendered if line]


def _group_sentences(lines: List[str]) -> List[str]:
    units: List[str] = []
    current = ""
    for line in lines:
        current = f"{current} {line}".strip() if current else line
        if _SENTENCE_END.search(line):
            units.append(current)
            current = ""
    if current:
        units.append(current)
    return units


# -- entry point ---------------------------------------------------------------------


def extract(data: bytes) -> ExtractionResult:
    """Parse the PDF bytes and return line-grouped text plus every detected
    ruled table, ordered by (page, position)."""
    pages = read_pdf(data)
    if not pages:
        raise NoContentError("document has no pages")
    tables: List[ExtractedTable] = []
    text_lines: List[str] = []
    for page in pages:
        page_tables = []
        for region in _segment_regions(page.segments):
            table = _grid_from_region(region, page.runs, page.number)
            if table is not None and any(any(row) for row in table.cells):
                page_tables.append(table)
        page_tables.sort(key=lambda t: (-t.bbox[3], t.bbox[0]))
        tables.extend(page_tables)

        def in_table(run: TextRun) -> bool:
            return any(
                t.bbox[0] - _REGION_PAD <= run.x <= t.bbox[2] + _REGION_PAD
                and t.bbox[1] - _REGION_PAD <= run.y <= t.bbox[3] + _REGION_PAD
                for t in page_tables
            )

        free_runs = [r for r in page.runs if not in_table(r)]
        text_lines.extend(_group_sentences(_visual_lines(free_runs)))
    text = ExtractedText(list(enumerate(text_lines, start=1)))
    return ExtractionResult(text, tables)
