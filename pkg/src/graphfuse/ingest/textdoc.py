"""Text ingestion.

A document becomes a root node with one child per sentence, in reading order;
the edge to the i-th sentence is labeled with the 1-based position.  Sentence
boundaries are rule-based: sentence-final punctuation followed by whitespace
and an uppercase letter, except after initials ("P. Balkany") and a list of
known abbreviations.
"""

from __future__ import annotations

import re
from typing import Iterable, List, Optional

from ..build import GraphBuilder
from ..model import EPSILON, Dataset, NodeKind
from . import IngestReport

DEFAULT_ABBREVIATIONS = frozenset(
    {
        "m", "mr", "mrs", "ms", "dr", "prof", "st", "ste",
        "mme", "mlle", "me", "mgr", "av", "bd", "no",
        "etc", "cf", "vs", "resp", "e.g", "i.e", "p.ex",
    }
)

_BOUNDARY = re.compile(r"[.!?]+\s+")
_LAST_WORD = re.compile(r"(\S+)$")


def split_sentences(
    text: str, abbreviations: Optional[Iterable[str]] = None
) -> List[str]:
    abbrevs = (
        DEFAULT_ABBREVIATIONS
        if abbreviations is None
        else frozenset(a.lower().rstrip(".") for a in abbreviations)
    )
    boundaries = []
    for m in _BOUNDARY.finditer(text):
        if m.end() >= len(text) or not text[m.end()].isupper():
            continue
        punctuation = m.group(0).rstrip()
        if punctuation.endswith("."):
            before = _LAST_WORD.search(text[: m.start() + len(punctuation)])
            if before is not None:
                word = before.group(1).rstrip(".")
                word = word.lstrip("(\"'«")
                if len(word) == 1 and word.isupper():
                    continue  # an initial, not a sentence end
                if word.lower() in abbrevs:
                    continue
        boundaries.append(m.end())
    segments = []
    start = 0
    for cut in boundaries:
        segment = text[start:cut].strip()
        if segment:
            segments.append(segment)
        start = cut
    tail = text[start:].strip()
    if tail:
        segments.append(tail)
    return segments


def ingest_text(
    builder: GraphBuilder,
    text,
    ds: Dataset,
    abbreviations: Optional[Iterable[str]] = None,
) -> IngestReport:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    report = IngestReport(dataset=ds.id)
    root = builder.fresh_node(EPSILON, NodeKind.TEXT_SEGMENT, ds.id)
    report.nodes += 1
    for position, segment in enumerate(split_sentences(text, abbreviations), start=1):
        node = builder.fresh_node(segment, NodeKind.TEXT_SEGMENT, ds.id)
        report.nodes += 1
        builder.add_edge(root, node, str(position), ds.id, 1.0)
        report.edges += 1
    return report
