"""HTML ingestion.

Treated like XML, with two differences: the parser is lenient (tag soup is
recovered, never fatal), and attributes map directly to edges labeled with
the attribute name, so a hyperlink <a href="http://a.org"> yields an element
node "a", a URI node "http://a.org", and an edge labeled "href".  Any value
satisfying URI syntax becomes a URI node, which is what preserves links
across documents ingested in the same graph.
"""

from __future__ import annotations

from html.parser import HTMLParser
from typing import List

from ..build import GraphBuilder
from ..model import EPSILON, Dataset, NodeKind, escape_reserved
from ..values import LabelPath
from . import IngestReport

_VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)


class _Element:
    __slots__ = ("tag", "attrs", "children")

    def __init__(self, tag: str, attrs):
        self.tag = tag
        self.attrs = attrs
        self.children: List = []  # _Element or str


class _TreeBuilder(HTMLParser):
    """Forgiving tree builder: mismatched end tags close up to the nearest
    matching open element or are ignored."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.roots: List[_Element] = []
        self.stack: List[_Element] = []

    def _append(self, child) -> None:
        if self.stack:
            self.stack[-1].children.append(child)
        elif isinstance(child, _Element):
            self.roots.append(child)
        elif child.strip():
            holder = _Element("html", [])
            holder.children.append(child)
            self.roots.append(holder)

    def handle_starttag(self, tag, attrs):
        element = _Element(tag, attrs)
        self._append(element)
        if tag not in _VOID_ELEMENTS:
            self.stack.append(element)

    def handle_startendtag(self, tag, attrs):
        self._append(_Element(tag, attrs))

    def handle_endtag(self, tag):
        for i in range(len(self.stack) - 1, -1, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # stray end tag: ignored

    def handle_data(self, data):
        if data.strip():
            self._append(data)


def parse_html(text: str) -> List[_Element]:
    parser = _TreeBuilder()
    parser.feed(text)
    parser.close()
    return parser.roots


def ingest_html(builder: GraphBuilder, document, ds: Dataset) -> IngestReport:
    if isinstance(document, bytes):
        document = document.decode("utf-8", errors="replace")
    report = IngestReport(dataset=ds.id)

    def walk(element: _Element, path: LabelPath):
        node = builder.fresh_node(element.tag, NodeKind.ELEMENT, ds.id)
        report.nodes += 1
        inner = path.child(element.tag)
        for name, value in element.attrs:
            value_node, created = builder.value_node(
                value if value is not None else EPSILON, ds, inner.child(name)
            )
            report.created_node(created)
            builder.add_edge(node, value_node, escape_reserved(name), ds.id, 1.0)
            report.edges += 1
        for child in element.children:
            if isinstance(child, str):
                text = child.strip()
                if not text:
                    continue
                value_node, created = builder.value_node(text, ds, inner)
                report.created_node(created)
                builder.add_edge(node, value_node, EPSILON, ds.id, 1.0)
                report.edges += 1
            else:
                sub = walk(child, inner)
                builder.add_edge(node, sub, EPSILON, ds.id, 1.0)
                report.edges += 1
        return node

    for root in parse_html(document):
        walk(root, LabelPath(ds.id))
    return report
