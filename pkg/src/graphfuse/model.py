"""Core data model of the integrated graph.

All content from every registered dataset lands in one graph: nodes carry a
label, a kind, the id of the dataset they came from, a normalized label used
for matching, and the id of their equivalence-class representative.  Edges are
directed, labeled, and weighted with a confidence in [0, 1].
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from typing import Optional

NodeId = int
EdgeId = int
DatasetId = int

#: The empty label.
EPSILON = ""

#: Namespace reserved for edges the engine itself creates.
RESERVED_PREFIX = "cl:"

PROV_EDGE = "cl:prov"
SAME_AS_EDGE = "cl:sameAs"
SAME_AS_URI_EDGE = "cl:sameAsUri"
EXTRACT_PERSON_EDGE = "cl:extractPerson"
EXTRACT_LOCATION_EDGE = "cl:extractLocation"
EXTRACT_ORGANIZATION_EDGE = "cl:extractOrganization"
PARENT_HEADER_EDGE = "cl:parentHeaderCell"
CLOSEST_X_HEADER_EDGE = "cl:closestXHeaderCell"
CLOSEST_Y_HEADER_EDGE = "cl:closestYHeaderCell"
FROM_PDF_EDGE = "cl:extractedFromPDF"
CELL_URI_EDGE = "cl:cellUri"


class NodeKind(enum.Enum):
    """Kind assigned to every node exactly once, at creation."""

    DATASET = "dataset"
    URI = "uri"
    VALUE = "value"
    TABLE = "table"
    TUPLE = "tuple"
    MAP = "map"
    ARRAY = "array"
    ELEMENT = "element"
    ATTRIBUTE = "attribute"
    TEXT_SEGMENT = "segment"
    HEADER_CELL = "header"
    ENTITY_PERSON = "person"
    ENTITY_LOCATION = "location"
    ENTITY_ORGANIZATION = "organization"
    NUMBER = "number"
    DATE = "date"
    EMAIL = "email"
    HASHTAG = "hashtag"


#: Kinds produced by the entity extractor.
ENTITY_KINDS = frozenset(
    {NodeKind.ENTITY_PERSON, NodeKind.ENTITY_LOCATION, NodeKind.ENTITY_ORGANIZATION}
)

#: Kinds that hold leaf values from the source data (candidates for
#: factorization and for the frequent-values report).
VALUE_KINDS = frozenset(
    {NodeKind.VALUE, NodeKind.NUMBER, NodeKind.DATE, NodeKind.EMAIL, NodeKind.HASHTAG}
)


class DataModel(enum.Enum):
    """Data model a registered dataset declares."""

    RELATIONAL = "relational"
    RDF = "rdf"
    JSON = "json"
    XML = "xml"
    HTML = "html"
    TEXT = "text"
    TABLE2D = "table2d"
    PDF_DERIVED = "pdf"


#: Data models whose documents are trees; these obey the configured
#: factorization policy (RDF always behaves per-graph).
HIERARCHICAL_MODELS = frozenset(
    {
        DataModel.RELATIONAL,
        DataModel.JSON,
        DataModel.XML,
        DataModel.HTML,
        DataModel.TEXT,
        DataModel.TABLE2D,
        DataModel.PDF_DERIVED,
    }
)


@dataclass(frozen=True)
class Node:
    id: NodeId
    label: str
    kind: NodeKind
    dataset: DatasetId
    normalized_label: str
    representative: NodeId

    def with_representative(self, rep: NodeId) -> "Node":
        return replace(self, representative=rep)


@dataclass(frozen=True)
class Edge:
    id: EdgeId
    source: NodeId
    target: NodeId
    label: str
    dataset: DatasetId
    confidence: float


@dataclass(frozen=True)
class Dataset:
    id: DatasetId
    model: DataModel
    prov: Optional[str] = None
    node: NodeId = field(default=-1)  # id of the dataset node, set on registration


class ModelError(Exception):
    """Base class for graph construction errors."""


class ProvenanceError(ModelError):
    """Raised when a provenance string is not a syntactically valid URI."""


class EdgeError(ModelError):
    """Raised for out-of-range confidences or dangling endpoints."""


_WS_RUN = re.compile(r"\s+")


def normalize_label(label: str) -> str:
    """Trim, collapse internal whitespace, and case-fold a label."""
    return _WS_RUN.sub(" ", label.strip()).casefold()


def escape_reserved(edge_label: str) -> str:
    """Rewrite user-data edge labels that collide with the reserved namespace.

    Labels created by the engine itself (cl:prov, cl:sameAs, ...) must stay
    unambiguous, so an ingested label starting with "cl:" becomes "cl%3A...".
    """
    if edge_label.startswith(RESERVED_PREFIX):
        return "cl%3A" + edge_label[len(RESERVED_PREFIX) :]
    return edge_label


def check_confidence(confidence: float) -> float:
    if not (0.0 <= confidence <= 1.0):
        raise EdgeError(f"confidence {confidence!r} outside [0, 1]")
    return float(confidence)
