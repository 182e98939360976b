"""RDF ingestion from N-Triples.

Every distinct URI maps to one URI node in the whole graph, every literal to
a value node under the per-graph creation policy, and each triple becomes one
edge labeled with the predicate.  Blank nodes are scoped to their dataset.
Syntactically invalid lines are skipped and counted, never fatal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Optional, Tuple

from ..build import GraphBuilder
from ..model import Dataset, NodeId, NodeKind, escape_reserved
from ..values import LabelPath
from . import IngestReport

URI = "uri"
BLANK = "blank"
LITERAL = "literal"


@dataclass(frozen=True)
class Term:
    kind: str  # uri | blank | literal
    value: str  # URI text, blank label, or the literal's lexical form


_IRI = r"<([^<>\s]*)>"
_BLANK = r"_:([A-Za-z0-9][A-Za-z0-9._\-]*)"
_LITERAL = r'"((?:[^"\\]|\\.)*)"(?:\^\^<[^<>\s]*>|@[A-Za-z0-9\-]+)?'
_TRIPLE_RE = re.compile(
    rf"^\s*(?:{_IRI}|{_BLANK})\s+{_IRI}\s+(?:{_IRI}|{_BLANK}|{_LITERAL})\s*\.\s*$"
)

_ESCAPES = {
    "t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
    '"': '"', "'": "'", "\\": "\\",
}


def _unescape_literal(text: str) -> str:
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= n:
            raise ValueError("dangling escape")
        code = text[i + 1]
        if code in _ESCAPES:
            out.append(_ESCAPES[code])
            i += 2
        elif code == "u" and i + 6 <= n:
            out.append(chr(int(text[i + 2 : i + 6], 16)))
            i += 6
        elif code == "U" and i + 10 <= n:
            out.append(chr(int(text[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise ValueError(f"bad escape \\{code}")
    return "".join(out)


def parse_triple_line(line: str) -> Optional[Tuple[Term, Term, Term]]:
    """Parse one N-Triples line; None for blank/comment lines; ValueError for
    malformed ones."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _TRIPLE_RE.match(line)
    if m is None:
        raise ValueError(f"not a triple: {line.strip()[:80]!r}")
    s_uri, s_blank, pred, o_uri, o_blank, o_lit = m.groups()
    subject = Term(URI, s_uri) if s_uri is not None else Term(BLANK, s_blank)
    if o_uri is not None:
        obj = Term(URI, o_uri)
    elif o_blank is not None:
        obj = Term(BLANK, o_blank)
    else:
        obj = Term(LITERAL, _unescape_literal(o_lit))
    return subject, Term(URI, pred), obj


def parse_ntriples(lines: Iterable[str]) -> Iterator[Tuple[Term, Term, Term]]:
    """Strict variant: raises on the first malformed line."""
    for line in lines:
        triple = parse_triple_line(line)
        if triple is not None:
            yield triple


def ingest_rdf(
    builder: GraphBuilder,
    triples: Iterable[Tuple[Term, Term, Term]],
    ds: Dataset,
    report: Optional[IngestReport] = None,
) -> IngestReport:
    if report is None:
        report = IngestReport(dataset=ds.id)
    path = LabelPath(ds.id)
    blanks: Dict[str, NodeId] = {}

    def node_for(term: Term) -> NodeId:
        if term.kind == URI:
            nid, created = builder.uri_node(term.value, ds.id)
        elif term.kind == BLANK:
            existing = blanks.get(term.value)
            if existing is not None:
                return existing
            # dataset-scoped label keeps blanks from distinct datasets apart
            nid = builder.fresh_node(
                f"_:d{ds.id}:{term.value}", NodeKind.URI, ds.id
            )
            blanks[term.value] = nid
            created = True
        else:
            nid, created = builder.value_node(term.value, ds, path)
        report.created_node(created)
        return nid

    for subject, predicate, obj in triples:
        s = node_for(subject)
        o = node_for(obj)
        builder.add_edge(s, o, escape_reserved(predicate.value), ds.id, 1.0)
        report.edges += 1
    return report


def ingest_ntriples(
    builder: GraphBuilder,
    lines: Iterable[str],
    ds: Dataset,
) -> IngestReport:
    """Line-tolerant ingestion: malformed lines are skipped and counted."""
    report = IngestReport(dataset=ds.id)

    def good_triples():
        for lineno, line in enumerate(lines, start=1):
            try:
                triple = parse_triple_line(line)
            except ValueError as exc:
                report.skipped += 1
                if len(report.errors) < 20:
                    report.errors.append(f"line {lineno}: {exc}")
                continue
            if triple is not None:
                yield triple

    return ingest_rdf(builder, good_triples(), ds, report)
