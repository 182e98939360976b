"""Graph construction facade shared by all ingesters.

The builder owns id allocation, the dataset/provenance bootstrap, the active
factorization policy and null codes, and the per-graph maps for URIs and
entity nodes.  Ingesters only ever call ``value_node`` / ``fresh_node`` /
``add_edge`` on it.
"""

from __future__ import annotations

import json
import threading
from typing import Optional, Tuple

from .model import (
    EPSILON,
    PROV_EDGE,
    DataModel,
    Dataset,
    DatasetId,
    Edge,
    EdgeId,
    Node,
    NodeId,
    NodeKind,
    ProvenanceError,
    check_confidence,
    normalize_label,
)
from .storage import GraphStore
from .values import (
    EMPTY_NULL_CODES,
    DEFAULT_NULL_CODES,
    FactorizationPolicy,
    LabelPath,
    NullCodeSet,
    classify_value,
    factorization_key,
    is_uri,
)

#: Key prefix distinguishing entity keys from value factorization keys.
_ENTITY_NS = "e"
_VALUE_NS = "v"


def _serialize_key(namespace: str, parts) -> str:
    return namespace + json.dumps(
        [list(p) if isinstance(p, tuple) else p for p in parts],
        ensure_ascii=False,
        separators=(",", ":"),
    )


class GraphBuilder:
    def __init__(
        self,
        store: GraphStore,
        policy: FactorizationPolicy = FactorizationPolicy.PER_DATASET,
        null_codes: Optional[NullCodeSet] = None,
        null_detection: bool = True,
    ):
        self.store = store
        self.policy = policy
        if null_codes is None:
            null_codes = NullCodeSet(DEFAULT_NULL_CODES)
        self.nulls = null_codes if null_detection else EMPTY_NULL_CODES
        self._entity_lock = threading.Lock()

    # -- dataset bootstrap ----------------------------------------------------

    def register_dataset(self, model: DataModel, prov: Optional[str] = None) -> Dataset:
        """Create the dataset node and, when provenance is given, its URI node
        and cl:prov edge."""
        if prov is not None and not is_uri(prov):
            raise ProvenanceError(f"provenance {prov!r} is not a valid URI")
        ds_id = self.store.allocate_dataset_id()
        node_id = self.fresh_node(EPSILON, NodeKind.DATASET, ds_id)
        ds = Dataset(ds_id, model, prov, node_id)
        self.store.put_dataset(ds)
        if prov is not None:
            prov_node, _ = self.uri_node(prov, ds_id)
            self.add_edge(node_id, prov_node, PROV_EDGE, ds_id, 1.0)
        return ds

    # -- node creation ---------------------------------------------------------

    def fresh_node(
        self,
        label: str,
        kind: NodeKind,
        dataset: DatasetId,
        normalized: Optional[str] = None,
    ) -> NodeId:
        nid = self.store.allocate_node_id()
        node = Node(
            nid,
            label,
            kind,
            dataset,
            normalize_label(label) if normalized is None else normalized,
            nid,
        )
        return self.store.put_node(node)

    def value_node(
        self,
        label: str,
        dataset: Dataset,
        path: LabelPath,
        kind: Optional[NodeKind] = None,
    ) -> Tuple[NodeId, bool]:
        """Policy-aware creation of a leaf value node.

        Returns ``(node id, created)``; ``created`` is False when an existing
        node was reused through its factorization key.  URIs always unify
        per graph; RDF datasets always behave per graph.
        """
        if kind is None:
            kind = classify_value(label)
        if kind is NodeKind.URI:
            return self.uri_node(label, dataset.id)
        policy = (
            FactorizationPolicy.PER_GRAPH
            if dataset.model is DataModel.RDF
            else self.policy
        )
        key = factorization_key(policy, label, kind, dataset.id, path, self.nulls)
        if key is None:
            return self.fresh_node(label, kind, dataset.id), True
        serialized = _serialize_key(_VALUE_NS, key)
        existing = self.store.lookup_by_factorization_key(serialized)
        if existing is not None:
            return existing, False
        nid = self.store.allocate_node_id()
        node = Node(nid, label, kind, dataset.id, normalize_label(label), nid)
        self.store.put_node(node, key=serialized)
        return nid, True

    def uri_node(self, uri: str, dataset: DatasetId) -> Tuple[NodeId, bool]:
        """One URI node per distinct URI in the whole graph."""
        key = _serialize_key(_VALUE_NS, (uri, NodeKind.URI.value))
        existing = self.store.lookup_by_factorization_key(key)
        if existing is not None:
            return existing, False
        nid = self.store.allocate_node_id()
        node = Node(nid, uri, NodeKind.URI, dataset, normalize_label(uri), nid)
        self.store.put_node(node, key=key)
        return nid, True

    def entity_node(
        self,
        key: Tuple,
        surface: str,
        kind: NodeKind,
        dataset: DatasetId,
        normalized_surface: str,
    ) -> Tuple[NodeId, bool]:
        """One entity node per entity key in the whole graph."""
        serialized = _serialize_key(_ENTITY_NS, key)
        with self._entity_lock:
            existing = self.store.lookup_by_factorization_key(serialized)
            if existing is not None:
                return existing, False
            nid = self.store.allocate_node_id()
            node = Node(nid, surface, kind, dataset, normalized_surface, nid)
            self.store.put_node(node, key=serialized)
            return nid, True

    # -- edges -----------------------------------------------------------------

    def add_edge(
        self,
        source: NodeId,
        target: NodeId,
        label: str,
        dataset: DatasetId,
        confidence: float = 1.0,
    ) -> EdgeId:
        check_confidence(confidence)
        eid = self.store.allocate_edge_id()
        edge = Edge(eid, source, target, label, dataset, float(confidence))
        return self.store.put_edge(edge)
