"""Value typing and node factorization policy.

``classify_value`` recognizes special value kinds (URI, number, date, email,
hashtag) from the label text alone.  ``factorization_key`` decides when two
occurrences of the same label fuse into a single node; the key is scoped per
instance, per path, per dataset, or per graph.  Labels that must never fuse
(booleans, small integers, null codes, entities) yield no key at all.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Optional, Tuple

from .model import ENTITY_KINDS, DatasetId, NodeKind


class FactorizationPolicy(enum.Enum):
    PER_INSTANCE = "per-instance"
    PER_PATH = "per-path"
    PER_DATASET = "per-dataset"
    PER_GRAPH = "per-graph"


#: Null codes seen in real datasets; curated per build (see frequent_values).
DEFAULT_NULL_CODES = frozenset(
    {"", "N/A", "NA", "null", "NULL", "-", "Unknown", "Données non publiées"}
)


class NullCodeSet:
    """Exact-match set of missing-value markers, compared after trimming."""

    def __init__(self, codes: Iterable[str] = DEFAULT_NULL_CODES):
        self._codes = frozenset(codes)

    def __contains__(self, label: str) -> bool:
        return label.strip() in self._codes

    def __iter__(self):
        return iter(sorted(self._codes))

    def __len__(self) -> int:
        return len(self._codes)

    def __repr__(self) -> str:
        return f"NullCodeSet({sorted(self._codes)!r})"


EMPTY_NULL_CODES = NullCodeSet(())


@dataclass(frozen=True)
class LabelPath:
    """Where a value sits: dataset plus the step labels leading down to it.

    A step is the edge label when the edge is labeled, else the parent node's
    label (element names in XML, the table name in relational data); array
    positions contribute the empty step so they stay stable under reordering.
    """

    dataset: DatasetId
    steps: Tuple[str, ...] = ()

    def child(self, step: str) -> "LabelPath":
        return LabelPath(self.dataset, self.steps + (step,))


_URI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*://\S+$")
_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s.]+$")
_HASHTAG_RE = re.compile(r"^#\w+$", re.UNICODE)
_NUMBER_RE = re.compile(r"^[+-]?\d+(\.\d+)?$")
_ISO_DATE_RE = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})([T ](\d{2}):(\d{2})(:(\d{2}))?)?$"
)
_DMY_DATE_RE = re.compile(r"^(\d{2})/(\d{2})/(\d{4})$")
_INTEGER_RE = re.compile(r"^\d+$")


def is_uri(label: str) -> bool:
    return bool(_URI_RE.match(label))


def parse_date(label: str) -> Optional[datetime]:
    """Parse ISO-8601 (date, optional time) or DD/MM/YYYY; None otherwise."""
    m = _ISO_DATE_RE.match(label)
    if m:
        y, mo, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
        hh = int(m.group(5) or 0)
        mi = int(m.group(6) or 0)
        ss = int(m.group(8) or 0)
        try:
            return datetime(y, mo, d, hh, mi, ss)
        except ValueError:
            return None
    m = _DMY_DATE_RE.match(label)
    if m:
        d, mo, y = int(m.group(1)), int(m.group(2)), int(m.group(3))
        try:
            return datetime(y, mo, d)
        except ValueError:
            return None
    return None


def classify_value(label: str) -> NodeKind:
    """Recognize the kind of a leaf value from its text; pure and total."""
    text = label.strip()
    if _URI_RE.match(text):
        return NodeKind.URI
    if _EMAIL_RE.match(text):
        return NodeKind.EMAIL
    if _HASHTAG_RE.match(text):
        return NodeKind.HASHTAG
    if _NUMBER_RE.match(text):
        return NodeKind.NUMBER
    if parse_date(text) is not None:
        return NodeKind.DATE
    return NodeKind.VALUE


def is_factorizable(label: str, kind: NodeKind, nulls: NullCodeSet) -> bool:
    """Whether occurrences of this label may fuse into a shared node.

    Booleans and unsigned integers shorter than 4 digits recur with unrelated
    meanings (flags, ordinals), and null codes must never create connections;
    entity nodes are keyed by the extraction stage, not here.
    """
    if kind in ENTITY_KINDS:
        return False
    text = label.strip()
    if text.casefold() in ("true", "false"):
        return False
    if _INTEGER_RE.match(text) and len(text) < 4:
        return False
    if label in nulls:
        return False
    return True


FactorizationKey = Tuple


def factorization_key(
    policy: FactorizationPolicy,
    label: str,
    kind: NodeKind,
    dataset: DatasetId,
    path: LabelPath,
    nulls: NullCodeSet = EMPTY_NULL_CODES,
) -> Optional[FactorizationKey]:
    """Key under which an ingester reuses an existing node, or None for a
    fresh node (per-instance creation, or a label that must not fuse)."""
    if not is_factorizable(label, kind, nulls):
        return None
    if policy is FactorizationPolicy.PER_INSTANCE:
        return None
    if policy is FactorizationPolicy.PER_PATH:
        return (label, kind.value, dataset, path.steps)
    if policy is FactorizationPolicy.PER_DATASET:
        return (label, kind.value, dataset)
    return (label, kind.value)


def frequent_values(store, k: int):
    """Top-k most frequent leaf values with exact pre-factorization counts.

    Factorization merges nodes but never edges, so the number of incoming
    edges of a value node equals the number of occurrences of its label in
    the sources, whatever the policy.  Useful for curating null codes.
    """
    if k <= 0:
        return []
    from .model import VALUE_KINDS

    value_nodes = {}
    for node in store.scan_nodes():
        if node.kind in VALUE_KINDS:
            value_nodes[node.id] = node.label
    counts: dict[str, int] = {}
    for edge in store.scan_edges():
        label = value_nodes.get(edge.target)
        if label is not None:
            counts[label] = counts.get(label, 0) + 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]
