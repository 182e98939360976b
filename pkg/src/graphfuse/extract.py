"""Named-entity extraction over node labels.

An extractor turns a text into non-overlapping entity occurrences (span,
type, confidence).  The built-in extractor is a gazetteer doing longest-match
word-boundary scanning; a remote extractor speaks a small JSON protocol so a
real tagger can be plugged in as a web service.  ``attach_entities``
materializes one entity node per key in the whole graph and one extraction
edge per occurrence.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import requests

from .build import GraphBuilder
from .match import normalize_person
from .model import (
    EXTRACT_LOCATION_EDGE,
    EXTRACT_ORGANIZATION_EDGE,
    EXTRACT_PERSON_EDGE,
    DatasetId,
    EdgeId,
    NodeId,
    NodeKind,
)

EXTRACT_EDGE_LABELS = {
    NodeKind.ENTITY_PERSON: EXTRACT_PERSON_EDGE,
    NodeKind.ENTITY_LOCATION: EXTRACT_LOCATION_EDGE,
    NodeKind.ENTITY_ORGANIZATION: EXTRACT_ORGANIZATION_EDGE,
}

WIRE_TYPES = {
    "PER": NodeKind.ENTITY_PERSON,
    "LOC": NodeKind.ENTITY_LOCATION,
    "ORG": NodeKind.ENTITY_ORGANIZATION,
}
WIRE_NAMES = {kind: name for name, kind in WIRE_TYPES.items()}

_TYPE_ALIASES = {
    "person": NodeKind.ENTITY_PERSON,
    "per": NodeKind.ENTITY_PERSON,
    "location": NodeKind.ENTITY_LOCATION,
    "loc": NodeKind.ENTITY_LOCATION,
    "organization": NodeKind.ENTITY_ORGANIZATION,
    "org": NodeKind.ENTITY_ORGANIZATION,
}


class ExtractionError(Exception):
    """Transport failures and protocol violations; distinct from an empty
    result, so callers can count failures without losing entities."""


@dataclass(frozen=True)
class EntityOccurrence:
    start: int
    end: int
    entity_type: NodeKind
    confidence: float
    surface: str

    def validate(self, text_length: int) -> "EntityOccurrence":
        if not (0 <= self.start < self.end <= text_length):
            raise ExtractionError(
                f"span [{self.start}, {self.end}) outside text of length {text_length}"
            )
        if not (0.0 <= self.confidence <= 1.0):
            raise ExtractionError(f"confidence {self.confidence} outside [0, 1]")
        if self.entity_type not in EXTRACT_EDGE_LABELS:
            raise ExtractionError(f"not an entity type: {self.entity_type}")
        return self


def normalized_surface(surface: str, entity_type: NodeKind) -> str:
    """Comparison form of a surface: collapsed, case-folded, and for persons
    with a single "Last, First" comma reordered to "First Last"."""
    if entity_type is NodeKind.ENTITY_PERSON:
        surface = normalize_person(surface)
    return " ".join(surface.split()).casefold()


def entity_key(occ: EntityOccurrence) -> Tuple:
    """Graph-wide key of a non-disambiguated entity."""
    return ("surface", occ.entity_type.value, normalized_surface(occ.surface, occ.entity_type))


def kb_entity_key(uri: str) -> Tuple:
    """Graph-wide key of an entity identified by a knowledge-base URI."""
    return ("uri", uri)


class GazetteerExtractor:
    """Longest-match scan over a fixed lexicon of surface forms.

    Matches must be word-boundary aligned; overlapping candidates resolve to
    the longest one starting earliest, so "New York" wins over "York".
    """

    def __init__(self, lexicon: Dict[str, Tuple[NodeKind, float]]):
        if not lexicon:
            raise ValueError("gazetteer lexicon is empty")
        self.lexicon = dict(lexicon)
        self._patterns = [
            (
                re.compile(r"(?<!\w)" + re.escape(surface) + r"(?!\w)"),
                surface,
                kind,
                confidence,
            )
            for surface, (kind, confidence) in self.lexicon.items()
        ]

    def extract(self, text: str) -> List[EntityOccurrence]:
        if not text:
            return []
        candidates = []
        for pattern, surface, kind, confidence in self._patterns:
            for m in pattern.finditer(text):
                candidates.append(
                    EntityOccurrence(m.start(), m.end(), kind, confidence, surface)
                )
        candidates.sort(key=lambda occ: (occ.start, -(occ.end - occ.start)))
        picked: List[EntityOccurrence] = []
        cursor = 0
        for occ in candidates:
            if occ.start >= cursor:
                picked.append(occ.validate(len(text)))
                cursor = occ.end
        return picked


class RemoteExtractor:
    """Client for an extraction web service.

    Request: ``{"text": str, "lang": "fr"|"en"}``; reply:
    ``{"entities": [{"start": int, "end": int, "type": "PER"|"LOC"|"ORG",
    "confidence": number}]}`` with code-point offsets.
    """

    def __init__(self, endpoint: str, lang: str = "fr", timeout: float = 30.0):
        self.endpoint = endpoint
        self.lang = lang
        self.timeout = timeout
        self._session = requests.Session()

    def extract(self, text: str) -> List[EntityOccurrence]:
        if not text:
            return []
        try:
            reply = self._session.post(
                self.endpoint,
                json={"text": text, "lang": self.lang},
                timeout=self.timeout,
            )
            reply.raise_for_status()
            payload = reply.json()
        except (requests.RequestException, json.JSONDecodeError, ValueError) as exc:
            raise ExtractionError(f"extraction service failed: {exc}") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("entities"), list):
            raise ExtractionError("malformed extraction reply: missing 'entities' list")
        occurrences = []
        for item in payload["entities"]:
            try:
                kind = WIRE_TYPES[item["type"]]
                occ = EntityOccurrence(
                    int(item["start"]),
                    int(item["end"]),
                    kind,
                    float(item["confidence"]),
                    text[int(item["start"]) : int(item["end"])],
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ExtractionError(f"malformed entity record: {item!r}") from exc
            occurrences.append(occ.validate(len(text)))
        occurrences.sort(key=lambda occ: occ.start)
        return occurrences


def load_gazetteer(path) -> Dict[str, Tuple[NodeKind, float]]:
    """Read a lexicon from a tab-separated file: surface, type, confidence."""
    lexicon: Dict[str, Tuple[NodeKind, float]] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            raise ValueError(f"{path}:{lineno}: expected surface<TAB>type[<TAB>confidence]")
        surface, type_name = parts[0], parts[1].strip().lower()
        if type_name not in _TYPE_ALIASES:
            raise ValueError(f"{path}:{lineno}: unknown entity type {parts[1]!r}")
        confidence = float(parts[2]) if len(parts) == 3 else 1.0
        lexicon[surface] = (_TYPE_ALIASES[type_name], confidence)
    return lexicon


def attach_entities(
    builder: GraphBuilder,
    node: NodeId,
    dataset: DatasetId,
    occurrences: Sequence[EntityOccurrence],
    keys: Optional[Sequence[Tuple]] = None,
) -> List[Tuple[NodeId, EdgeId]]:
    """Create or reuse the entity node for each occurrence and add one
    extraction edge per occurrence, carrying the extraction confidence."""
    if keys is None:
        keys = [entity_key(occ) for occ in occurrences]
    if len(keys) != len(occurrences):
        raise ValueError("occurrences and keys are not aligned")
    attached = []
    for occ, key in zip(occurrences, keys):
        entity, _ = builder.entity_node(
            key,
            occ.surface,
            occ.entity_type,
            dataset,
            normalized_surface(occ.surface, occ.entity_type),
        )
        edge = builder.add_edge(
            node,
            entity,
            EXTRACT_EDGE_LABELS[occ.entity_type],
            dataset,
            occ.confidence,
        )
        attached.append((entity, edge))
    return attached
