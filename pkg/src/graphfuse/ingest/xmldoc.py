"""XML ingestion.

Elements become element nodes labeled with their tag, attributes become
attribute nodes labeled with the attribute name whose single child holds the
attribute value, and text children become value nodes.  Structural edges
carry the empty label, so factorization paths use the element and attribute
names along the way.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..build import GraphBuilder
from ..model import EPSILON, Dataset, NodeId, NodeKind
from ..values import LabelPath
from . import DatasetError, IngestReport


def _strip_namespace(tag: str) -> str:
    return tag.rsplit("}", 1)[-1] if tag.startswith("{") else tag


def ingest_xml(builder: GraphBuilder, document, ds: Dataset) -> IngestReport:
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    if isinstance(document, str):
        try:
            root = ET.fromstring(document)
        except ET.ParseError as exc:
            raise DatasetError(f"invalid XML: {exc}") from exc
    else:
        root = document
    report = IngestReport(dataset=ds.id)

    def text_child(parent: NodeId, text, path: LabelPath) -> None:
        if text is None:
            return
        text = text.strip()
        if not text:
            return
        node, created = builder.value_node(text, ds, path)
        report.created_node(created)
        builder.add_edge(parent, node, EPSILON, ds.id, 1.0)
        report.edges += 1

    def walk(elem, path: LabelPath) -> NodeId:
        tag = _strip_namespace(elem.tag)
        node = builder.fresh_node(tag, NodeKind.ELEMENT, ds.id)
        report.nodes += 1
        inner = path.child(tag)
        for name, value in elem.attrib.items():
            name = _strip_namespace(name)
            attr_node = builder.fresh_node(name, NodeKind.ATTRIBUTE, ds.id)
            report.nodes += 1
            builder.add_edge(node, attr_node, EPSILON, ds.id, 1.0)
            report.edges += 1
            value_node, created = builder.value_node(value, ds, inner.child(name))
            report.created_node(created)
            builder.add_edge(attr_node, value_node, EPSILON, ds.id, 1.0)
            report.edges += 1
        text_child(node, elem.text, inner)
        for sub in elem:
            child = walk(sub, inner)
            builder.add_edge(node, child, EPSILON, ds.id, 1.0)
            report.edges += 1
            text_child(node, sub.tail, inner)
        return node

    walk(root, LabelPath(ds.id))
    return report
