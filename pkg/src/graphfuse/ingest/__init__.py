"""Ingesters mapping each supported data model to graph nodes and edges.

All structure and content of a dataset is preserved: every edge an ingester
creates has confidence 1.0, and every leaf value in the input appears as a
node label.  Each ingester fills an :class:`IngestReport` with the exact
counts of nodes and edges it created.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List


class DatasetError(Exception):
    """A dataset could not be ingested (parse failure, bad input shape)."""


class ServiceError(DatasetError):
    """A required companion service failed; ``retryable`` hints whether the
    same call may succeed later (e.g. the service was unreachable)."""

    def __init__(self, message: str, retryable: bool = False):
        super().__init__(message)
        self.retryable = retryable


@dataclass
class IngestReport:
    dataset: int = -1
    nodes: int = 0
    edges: int = 0
    reused: int = 0
    skipped: int = 0
    derived_datasets: int = 0
    errors: List[str] = field(default_factory=list)

    def created_node(self, created: bool) -> None:
        if created:
            self.nodes += 1
        else:
            self.reused += 1

    def merge(self, other: "IngestReport") -> None:
        self.nodes += other.nodes
        self.edges += other.edges
        self.reused += other.reused
        self.skipped += other.skipped
        self.derived_datasets += other.derived_datasets
        self.errors.extend(other.errors)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "nodes": self.nodes,
            "edges": self.edges,
            "reused": self.reused,
            "skipped": self.skipped,
            "derived_datasets": self.derived_datasets,
            "errors": list(self.errors),
        }


from .relational import RelationalInput, ingest_relational, read_csv  # noqa: E402
from .rdf import Term, ingest_ntriples, ingest_rdf, parse_ntriples  # noqa: E402
from .jsondoc import ingest_json  # noqa: E402
from .xmldoc import ingest_xml  # noqa: E402
from .htmldoc import ingest_html  # noqa: E402
from .textdoc import ingest_text, split_sentences  # noqa: E402
from .grid import Grid2d, ingest_2dtable  # noqa: E402
from .pdfdoc import ingest_pdf  # noqa: E402

__all__ = [
    "DatasetError",
    "ServiceError",
    "IngestReport",
    "RelationalInput",
    "ingest_relational",
    "read_csv",
    "Term",
    "parse_ntriples",
    "ingest_ntriples",
    "ingest_rdf",
    "ingest_json",
    "ingest_xml",
    "ingest_html",
    "ingest_text",
    "split_sentences",
    "Grid2d",
    "ingest_2dtable",
    "ingest_pdf",
]
