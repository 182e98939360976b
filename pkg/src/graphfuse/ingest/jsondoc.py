"""JSON ingestion.

A document becomes a tree of map, array and value nodes.  Map and array nodes
carry the empty label; map attribute names become edge labels; array element
edges carry the empty label so factorization paths stay position-independent.
JSON nulls, like relational nulls, produce neither node nor edge.
"""

from __future__ import annotations

import json
from typing import Optional

from ..build import GraphBuilder
from ..model import EPSILON, Dataset, NodeId, NodeKind, escape_reserved
from ..values import LabelPath
from . import DatasetError, IngestReport


def _scalar_label(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def ingest_json(builder: GraphBuilder, document, ds: Dataset) -> IngestReport:
    """Ingest a JSON document given as text, bytes, or an already-parsed
    Python value.  A parse failure rejects the whole dataset."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON: {exc}") from exc
    report = IngestReport(dataset=ds.id)

    def walk(value, path: LabelPath) -> Optional[NodeId]:
        if value is None:
            return None
        if isinstance(value, dict):
            node = builder.fresh_node(EPSILON, NodeKind.MAP, ds.id)
            report.nodes += 1
            for key, item in value.items():
                child = walk(item, path.child(key))
                if child is not None:
                    builder.add_edge(node, child, escape_reserved(key), ds.id, 1.0)
                    report.edges += 1
            return node
        if isinstance(value, list):
            node = builder.fresh_node(EPSILON, NodeKind.ARRAY, ds.id)
            report.nodes += 1
            for item in value:
                child = walk(item, path.child(EPSILON))
                if child is not None:
                    builder.add_edge(node, child, EPSILON, ds.id, 1.0)
                    report.edges += 1
            return node
        node, created = builder.value_node(_scalar_label(value), ds, path)
        report.created_node(created)
        return node

    walk(document, LabelPath(ds.id))
    return report
