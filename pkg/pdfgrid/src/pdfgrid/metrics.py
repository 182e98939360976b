"""Table-extraction quality metrics.

Three precision/recall/F1 measures, micro-averaged over documents:

* recognition (REC) over the tokens recognized as table content;
* structure (STR) over cell adjacency relations, each non-empty cell paired
  with its nearest non-empty right and downward neighbors;
* interpretation (INT) over the header cells associated with each data cell,
  in a strict variant (the whole header set must match) and a partial one
  (per header-cell pairs).

Ground truth is a JSON document with per-document token lists, adjacency
triples and header assignments; the extracted side is derived from the
table grids the extraction service returns.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

HORIZONTAL = "H"
VERTICAL = "V"


class MetricsError(Exception):
    """The ground truth or extraction payload does not follow the schema."""


@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float

    @property
    def f1(self) -> float:
        if self.precision + self.recall == 0:
            return 0.0
        return 2 * self.precision * self.recall / (self.precision + self.recall)

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def _scores(true_positives: int, extracted: int, expected: int) -> Scores:
    precision = true_positives / extracted if extracted else 0.0
    recall = true_positives / expected if expected else 0.0
    return Scores(precision, recall)


def derive_artifacts(tables: Sequence[dict]) -> dict:
    """Tokens, adjacency triples and header assignments of extracted grids.

    Every table dict needs cells, headerRows, headerCols (the /extract reply
    shape).  Adjacency pairs skip empty cells and connect nearest non-empty
    neighbors; header assignments list, for each non-empty data cell, all
    non-empty header cells in its row and column bands.
    """
    tokens: List[str] = []
    adjacency: List[Tuple[str, str, str]] = []
    headers: List[dict] = []
    for table in tables:
        try:
            cells = table["cells"]
            header_rows = int(table.get("headerRows", 0))
            header_cols = int(table.get("headerCols", 0))
        except (TypeError, KeyError, ValueError) as exc:
            raise MetricsError(f"bad table record: {exc}") from exc
        n_rows = len(cells)
        n_cols = len(cells[0]) if n_rows else 0
        if any(len(row) != n_cols for row in cells):
            raise MetricsError("ragged cell matrix")

        def content(r: int, c: int) -> str:
            value = cells[r][c]
            return value.strip() if isinstance(value, str) else ""

        for r in range(n_rows):
            for c in range(n_cols):
                text = content(r, c)
                if not text:
                    continue
                tokens.extend(text.split())
                for cc in range(c + 1, n_cols):
                    if content(r, cc):
                        adjacency.append((text, content(r, cc), HORIZONTAL))
                        break
                for rr in range(r + 1, n_rows):
                    if content(rr, c):
                        adjacency.append((text, content(rr, c), VERTICAL))
                        break
        for r in range(header_rows, n_rows):
            for c in range(header_cols, n_cols):
                text = content(r, c)
                if not text:
                    continue
                assigned = [
                    content(hr, c) for hr in range(header_rows) if content(hr, c)
                ] + [
                    content(r, hc) for hc in range(header_cols) if content(r, hc)
                ]
                headers.append({"cell": text, "headers": assigned})
    return {"tokens": tokens, "adjacency": adjacency, "headers": headers}


def _check_document(doc: dict, origin: str) -> None:
    for key in ("tokens", "adjacency", "headers"):
        if key not in doc:
            raise MetricsError(f"{origin}: missing {key!r}")
    if not all(isinstance(t, str) for t in doc["tokens"]):
        raise MetricsError(f"{origin}: tokens must be strings")
    for triple in doc["adjacency"]:
        if len(triple) != 3 or triple[2] not in (HORIZONTAL, VERTICAL):
            raise MetricsError(f"{origin}: bad adjacency triple {triple!r}")
    for entry in doc["headers"]:
        if "cell" not in entry or "headers" not in entry:
            raise MetricsError(f"{origin}: bad header assignment {entry!r}")


def evaluate(ground_truth: dict, extracted: dict) -> Dict[str, dict]:
    """Micro-averaged REC / STR / INT over aligned document lists.

    ``ground_truth``: {"documents": [{"id", "tokens", "adjacency",
    "headers"}]}; ``extracted``: {"documents": [{"id", "tables": [...]}]}
    or already-derived artifact documents with the ground-truth keys.
    """
    try:
        gt_docs = {d["id"]: d for d in ground_truth["documents"]}
        ex_docs = {d["id"]: d for d in extracted["documents"]}
    except (TypeError, KeyError) as exc:
        raise MetricsError(f"missing documents list: {exc}") from exc
    if set(gt_docs) != set(ex_docs):
        raise MetricsError(
            f"document ids differ: {sorted(set(gt_docs) ^ set(ex_docs))}"
        )

    token_tp = token_ex = token_gt = 0
    adj_tp = adj_ex = adj_gt = 0
    strict_tp = cells_ex = cells_gt = 0
    pair_tp = pair_ex = pair_gt = 0

    for doc_id in sorted(gt_docs):
        gt = gt_docs[doc_id]
        _check_document(gt, f"ground truth {doc_id!r}")
        ex = ex_docs[doc_id]
        if "tables" in ex:
            ex = derive_artifacts(ex["tables"])
        else:
            _check_document(ex, f"extraction {doc_id!r}")

        gt_tokens = Counter(gt["tokens"])
        ex_tokens = Counter(ex["tokens"])
        token_tp += sum((gt_tokens & ex_tokens).values())
        token_ex += sum(ex_tokens.values())
        token_gt += sum(gt_tokens.values())

        gt_adj = Counter(tuple(t) for t in gt["adjacency"])
        ex_adj = Counter(tuple(t) for t in ex["adjacency"])
        adj_tp += sum((gt_adj & ex_adj).values())
        adj_ex += sum(ex_adj.values())
        adj_gt += sum(gt_adj.values())

        gt_cells = Counter(
            (e["cell"], frozenset(e["headers"])) for e in gt["headers"]
        )
        ex_cells = Counter(
            (e["cell"], frozenset(e["headers"])) for e in ex["headers"]
        )
        strict_tp += sum((gt_cells & ex_cells).values())
        cells_ex += sum(ex_cells.values())
        cells_gt += sum(gt_cells.values())

        gt_pairs = Counter(
            (e["cell"], h) for e in gt["headers"] for h in e["headers"]
        )
        ex_pairs = Counter(
            (e["cell"], h) for e in ex["headers"] for h in e["headers"]
        )
        pair_tp += sum((gt_pairs & ex_pairs).values())
        pair_ex += sum(ex_pairs.values())
        pair_gt += sum(gt_pairs.values())

    return {
        "REC": _scores(token_tp, token_ex, token_gt).to_dict(),
        "STR": _scores(adj_tp, adj_ex, adj_gt).to_dict(),
        "INT_strict": _scores(strict_tp, cells_ex, cells_gt).to_dict(),
        "INT_partial": _scores(pair_tp, pair_ex, pair_gt).to_dict(),
    }
