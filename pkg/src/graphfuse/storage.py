"""Persistence layer.

A ``GraphStore`` keeps the three logical relations
``Nodes(id, label, kind, dataset, normalabel, representative)``,
``Edges(id, source, target, label, dataset, confidence)`` and
``Similar(source, target, similarity)`` plus the dataset registry.  Writes are
staged in a bounded in-memory buffer and spilled to the backend in batches
when the buffer fills; reads of individual records see buffered state, scans
flush first and then iterate the backend snapshot.

Two backends ship: an in-memory store and an embedded sqlite store.  Both
also maintain an index from factorization key to node id, fronted by a
bounded label cache in the sqlite case.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

from .model import (
    DataModel,
    Dataset,
    DatasetId,
    Edge,
    EdgeError,
    EdgeId,
    Node,
    NodeId,
    NodeKind,
    check_confidence,
)


class StorageError(Exception):
    pass


class FormatError(StorageError):
    """Raised for malformed export files; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class StoreStats:
    nodes: int = 0
    edges: int = 0
    similar: int = 0
    datasets: int = 0
    by_kind: Dict[str, int] = field(default_factory=dict)

    def entity_counts(self) -> Tuple[int, int, int]:
        return (
            self.by_kind.get(NodeKind.ENTITY_PERSON.value, 0),
            self.by_kind.get(NodeKind.ENTITY_LOCATION.value, 0),
            self.by_kind.get(NodeKind.ENTITY_ORGANIZATION.value, 0),
        )


class LabelCache:
    """Bounded LRU map from factorization key to node id.

    Eviction is safe: a miss falls back to the store's key index, so a key
    that is still live in the store can never produce a duplicate node.
    """

    def __init__(self, maxsize: int):
        self.maxsize = max(1, maxsize)
        self._map: "OrderedDict[str, NodeId]" = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key: str) -> Optional[NodeId]:
        with self._lock:
            node = self._map.get(key)
            if node is not None:
                self._map.move_to_end(key)
            return node

    def put(self, key: str, node: NodeId) -> None:
        with self._lock:
            self._map[key] = node
            self._map.move_to_end(key)
            while len(self._map) > self.maxsize:
                self._map.popitem(last=False)


class GraphStore:
    """Buffered store base; subclasses provide the backend batch writes."""

    def __init__(self, buffer_size: int = 50_000, cache_size: int = 1_000_000):
        if buffer_size < 1:
            raise ValueError("buffer_size must be >= 1")
        self.buffer_size = buffer_size
        self.cache = LabelCache(cache_size)
        self._lock = threading.Lock()
        self._node_counter = 1
        self._edge_counter = 1
        self._dataset_counter = 1
        # staged writes
        self._buf_nodes: List[Node] = []
        self._buf_edges: List[Edge] = []
        self._buf_datasets: List[Dataset] = []
        self._buf_similar: Dict[Tuple[NodeId, NodeId], float] = {}
        self._buf_reps: Dict[NodeId, NodeId] = {}
        self._buf_keys: Dict[str, NodeId] = {}
        # ids of all nodes ever put (buffered or flushed), for referential checks
        self._node_ids: set = set()

    # -- allocation ---------------------------------------------------------

    def allocate_node_id(self) -> NodeId:
        with self._lock:
            nid = self._node_counter
            self._node_counter += 1
            return nid

    def allocate_edge_id(self) -> EdgeId:
        with self._lock:
            eid = self._edge_counter
            self._edge_counter += 1
            return eid

    def allocate_dataset_id(self) -> DatasetId:
        with self._lock:
            did = self._dataset_counter
            self._dataset_counter += 1
            return did

    # -- writes -------------------------------------------------------------

    def put_dataset(self, ds: Dataset) -> DatasetId:
        self._dataset_counter = max(self._dataset_counter, ds.id + 1)
        self._buf_datasets.append(ds)
        self._maybe_spill()
        return ds.id

    def put_node(self, node: Node, key: Optional[str] = None) -> NodeId:
        if node.id in self._node_ids:
            raise StorageError(f"node id {node.id} already stored")
        self._node_counter = max(self._node_counter, node.id + 1)
        self._node_ids.add(node.id)
        self._buf_nodes.append(node)
        if key is not None:
            self._buf_keys[key] = node.id
            self.cache.put(key, node.id)
        self._maybe_spill()
        return node.id

    def put_edge(self, edge: Edge) -> EdgeId:
        check_confidence(edge.confidence)
        if edge.source not in self._node_ids or edge.target not in self._node_ids:
            raise EdgeError(
                f"edge {edge.id} has dangling endpoint "
                f"({edge.source} -> {edge.target})"
            )
        self._edge_counter = max(self._edge_counter, edge.id + 1)
        self._buf_edges.append(edge)
        self._maybe_spill()
        return edge.id

    def put_similar(self, a: NodeId, b: NodeId, similarity: float) -> None:
        if not (0.0 <= similarity <= 1.0):
            raise StorageError(f"similarity {similarity!r} outside [0, 1]")
        if a == b:
            raise StorageError("similar record cannot pair a node with itself")
        if a > b:
            a, b = b, a
        prev = self._buf_similar.get((a, b))
        if prev is None or similarity > prev:
            self._buf_similar[(a, b)] = similarity
        self._maybe_spill()

    def set_representative(self, node: NodeId, rep: NodeId) -> None:
        if node not in self._node_ids or rep not in self._node_ids:
            raise StorageError(f"set_representative on unknown node {node} or {rep}")
        self._buf_reps[node] = rep
        self._maybe_spill()

    def _maybe_spill(self) -> None:
        pending = (
            len(self._buf_nodes)
            + len(self._buf_edges)
            + len(self._buf_similar)
            + len(self._buf_reps)
            + len(self._buf_datasets)
        )
        if pending >= self.buffer_size:
            self.flush()

    def flush(self) -> None:
        if self._buf_datasets:
            self._commit_datasets(self._buf_datasets)
            self._buf_datasets = []
        if self._buf_nodes:
            self._commit_nodes(self._buf_nodes)
            self._buf_nodes = []
        if self._buf_keys:
            self._commit_keys(list(self._buf_keys.items()))
            self._buf_keys = {}
        if self._buf_edges:
            self._commit_edges(self._buf_edges)
            self._buf_edges = []
        if self._buf_similar:
            self._commit_similar(list(self._buf_similar.items()))
            self._buf_similar = {}
        if self._buf_reps:
            self._commit_representatives(list(self._buf_reps.items()))
            self._buf_reps = {}
        self._commit_counters()

    # -- reads --------------------------------------------------------------

    def get_node(self, node: NodeId) -> Optional[Node]:
        rep = self._buf_reps.get(node)
        for staged in reversed(self._buf_nodes):
            if staged.id == node:
                return staged if rep is None else staged.with_representative(rep)
        found = self._backend_get_node(node)
        if found is not None and rep is not None:
            return found.with_representative(rep)
        return found

    def lookup_by_factorization_key(self, key: str) -> Optional[NodeId]:
        node = self.cache.get(key)
        if node is None:
            node = self._buf_keys.get(key)
        if node is None:
            node = self._backend_get_key(key)
        if node is not None:
            self.cache.put(key, node)
        return node

    def scan_nodes(self) -> Iterator[Node]:
        self.flush()
        return self._backend_scan_nodes()

    def scan_edges(self) -> Iterator[Edge]:
        self.flush()
        return self._backend_scan_edges()

    def scan_similar(self) -> Iterator[Tuple[NodeId, NodeId, float]]:
        self.flush()
        return self._backend_scan_similar()

    def scan_datasets(self) -> Iterator[Dataset]:
        self.flush()
        return self._backend_scan_datasets()

    def stats(self) -> StoreStats:
        self.flush()
        return self._backend_stats()

    def close(self) -> None:
        self.flush()

    # -- meta (small key/value side channel, e.g. the last build report) -----

    def set_meta(self, key: str, value: str) -> None:
        raise NotImplementedError

    def get_meta(self, key: str) -> Optional[str]:
        raise NotImplementedError

    # -- backend hooks --------------------------------------------------------

    def _commit_datasets(self, batch: List[Dataset]) -> None:
        raise NotImplementedError

    def _commit_nodes(self, batch: List[Node]) -> None:
        raise NotImplementedError

    def _commit_keys(self, batch: List[Tuple[str, NodeId]]) -> None:
        raise NotImplementedError

    def _commit_edges(self, batch: List[Edge]) -> None:
        raise NotImplementedError

    def _commit_similar(self, batch) -> None:
        raise NotImplementedError

    def _commit_representatives(self, batch) -> None:
        raise NotImplementedError

    def _commit_counters(self) -> None:
        raise NotImplementedError

    def _backend_get_node(self, node: NodeId) -> Optional[Node]:
        raise NotImplementedError

    def _backend_get_key(self, key: str) -> Optional[NodeId]:
        raise NotImplementedError

    def _backend_scan_nodes(self) -> Iterator[Node]:
        raise NotImplementedError

    def _backend_scan_edges(self) -> Iterator[Edge]:
        raise NotImplementedError

    def _backend_scan_similar(self):
        raise NotImplementedError

    def _backend_scan_datasets(self):
        raise NotImplementedError

    def _backend_stats(self) -> StoreStats:
        raise NotImplementedError


class MemoryStore(GraphStore):
    """Dictionary-backed store for tests and small builds."""

    def __init__(self, buffer_size: int = 50_000, cache_size: int = 1_000_000):
        super().__init__(buffer_size, cache_size)
        self._nodes: Dict[NodeId, Node] = {}
        self._edges: Dict[EdgeId, Edge] = {}
        self._similar: Dict[Tuple[NodeId, NodeId], float] = {}
        self._datasets: Dict[DatasetId, Dataset] = {}
        self._keys: Dict[str, NodeId] = {}
        self._meta: Dict[str, str] = {}

    def _commit_datasets(self, batch):
        for ds in batch:
            self._datasets[ds.id] = ds

    def _commit_nodes(self, batch):
        for node in batch:
            self._nodes[node.id] = node

    def _commit_keys(self, batch):
        self._keys.update(batch)

    def _commit_edges(self, batch):
        for edge in batch:
            self._edges[edge.id] = edge

    def _commit_similar(self, batch):
        for pair, sim in batch:
            prev = self._similar.get(pair)
            if prev is None or sim > prev:
                self._similar[pair] = sim

    def _commit_representatives(self, batch):
        for node, rep in batch:
            self._nodes[node] = self._nodes[node].with_representative(rep)

    def _commit_counters(self):
        pass

    def _backend_get_node(self, node):
        return self._nodes.get(node)

    def _backend_get_key(self, key):
        return self._keys.get(key)

    def _backend_scan_nodes(self):
        return iter(sorted(self._nodes.values(), key=lambda n: n.id))

    def _backend_scan_edges(self):
        return iter(sorted(self._edges.values(), key=lambda e: e.id))

    def _backend_scan_similar(self):
        return iter(
            (a, b, s) for (a, b), s in sorted(self._similar.items())
        )

    def _backend_scan_datasets(self):
        return iter(sorted(self._datasets.values(), key=lambda d: d.id))

    def _backend_stats(self):
        by_kind: Dict[str, int] = {}
        for node in self._nodes.values():
            by_kind[node.kind.value] = by_kind.get(node.kind.value, 0) + 1
        return StoreStats(
            nodes=len(self._nodes),
            edges=len(self._edges),
            similar=len(self._similar),
            datasets=len(self._datasets),
            by_kind=by_kind,
        )

    def set_meta(self, key, value):
        self._meta[key] = value

    def get_meta(self, key):
        return self._meta.get(key)


_SCHEMA = """
CREATE TABLE IF NOT EXISTS datasets (
    id INTEGER PRIMARY KEY, model TEXT NOT NULL, prov TEXT, node INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS nodes (
    id INTEGER PRIMARY KEY, label TEXT NOT NULL, kind TEXT NOT NULL,
    dataset INTEGER NOT NULL, normalabel TEXT NOT NULL, representative INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS edges (
    id INTEGER PRIMARY KEY, source INTEGER NOT NULL, target INTEGER NOT NULL,
    label TEXT NOT NULL, dataset INTEGER NOT NULL, confidence REAL NOT NULL);
CREATE TABLE IF NOT EXISTS similar (
    source INTEGER NOT NULL, target INTEGER NOT NULL, similarity REAL NOT NULL,
    PRIMARY KEY (source, target));
CREATE TABLE IF NOT EXISTS fkeys (key TEXT PRIMARY KEY, node INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
"""


class SqliteStore(GraphStore):
    """Embedded persistent store; one sqlite database per graph directory."""

    DB_NAME = "graph.sqlite"

    def __init__(
        self,
        directory,
        buffer_size: int = 50_000,
        cache_size: int = 1_000_000,
    ):
        super().__init__(buffer_size, cache_size)
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._db = sqlite3.connect(self.directory / self.DB_NAME)
        # durability boundary is flush(); WAL + NORMAL keeps commits cheap
        # while a committed transaction still survives a process kill
        self._db.execute("PRAGMA journal_mode=WAL")
        self._db.execute("PRAGMA synchronous=NORMAL")
        self._db.execute("PRAGMA cache_size=-262144")  # 256 MiB page cache
        self._db.execute("PRAGMA temp_store=MEMORY")
        self._db.executescript(_SCHEMA)
        self._db.commit()
        self._load_state()

    def _load_state(self):
        cur = self._db.execute("SELECT key, value FROM meta")
        meta = dict(cur.fetchall())
        self._node_counter = int(meta.get("node_counter", 1))
        self._edge_counter = int(meta.get("edge_counter", 1))
        self._dataset_counter = int(meta.get("dataset_counter", 1))
        self._node_ids = {row[0] for row in self._db.execute("SELECT id FROM nodes")}

    def _commit_datasets(self, batch):
        self._db.executemany(
            "INSERT INTO datasets (id, model, prov, node) VALUES (?, ?, ?, ?)",
            [(d.id, d.model.value, d.prov, d.node) for d in batch],
        )

    def _commit_nodes(self, batch):
        self._db.executemany(
            "INSERT INTO nodes VALUES (?, ?, ?, ?, ?, ?)",
            [
                (n.id, n.label, n.kind.value, n.dataset, n.normalized_label, n.representative)
                for n in batch
            ],
        )

    def _commit_keys(self, batch):
        self._db.executemany(
            "INSERT OR REPLACE INTO fkeys VALUES (?, ?)", batch
        )

    def _commit_edges(self, batch):
        self._db.executemany(
            "INSERT INTO edges VALUES (?, ?, ?, ?, ?, ?)",
            [
                (e.id, e.source, e.target, e.label, e.dataset, e.confidence)
                for e in batch
            ],
        )

    def _commit_similar(self, batch):
        self._db.executemany(
            "INSERT INTO similar VALUES (?, ?, ?) "
            "ON CONFLICT (source, target) DO UPDATE SET "
            "similarity = MAX(similarity, excluded.similarity)",
            [(a, b, s) for (a, b), s in batch],
        )

    def _commit_representatives(self, batch):
        self._db.executemany(
            "UPDATE nodes SET representative = ? WHERE id = ?",
            [(rep, node) for node, rep in batch],
        )

    def _commit_counters(self):
        self._db.executemany(
            "INSERT OR REPLACE INTO meta VALUES (?, ?)",
            [
                ("node_counter", str(self._node_counter)),
                ("edge_counter", str(self._edge_counter)),
                ("dataset_counter", str(self._dataset_counter)),
            ],
        )
        self._db.commit()

    def _backend_get_node(self, node):
        row = self._db.execute(
            "SELECT id, label, kind, dataset, normalabel, representative "
            "FROM nodes WHERE id = ?",
            (node,),
        ).fetchone()
        return None if row is None else _node_from_row(row)

    def _backend_get_key(self, key):
        row = self._db.execute(
            "SELECT node FROM fkeys WHERE key = ?", (key,)
        ).fetchone()
        return None if row is None else row[0]

    def _backend_scan_nodes(self):
        cur = self._db.execute(
            "SELECT id, label, kind, dataset, normalabel, representative "
            "FROM nodes ORDER BY id"
        )
        return (_node_from_row(row) for row in cur)

    def _backend_scan_edges(self):
        cur = self._db.execute(
            "SELECT id, source, target, label, dataset, confidence "
            "FROM edges ORDER BY id"
        )
        return (
            Edge(row[0], row[1], row[2], row[3], row[4], row[5]) for row in cur
        )

    def _backend_scan_similar(self):
        cur = self._db.execute(
            "SELECT source, target, similarity FROM similar ORDER BY source, target"
        )
        return iter(cur.fetchall())

    def _backend_scan_datasets(self):
        cur = self._db.execute("SELECT id, model, prov, node FROM datasets ORDER BY id")
        return (
            Dataset(row[0], DataModel(row[1]), row[2], row[3]) for row in cur
        )

    def _backend_stats(self):
        by_kind = dict(
            self._db.execute("SELECT kind, COUNT(*) FROM nodes GROUP BY kind")
        )
        (nodes,) = self._db.execute("SELECT COUNT(*) FROM nodes").fetchone()
        (edges,) = self._db.execute("SELECT COUNT(*) FROM edges").fetchone()
        (similar,) = self._db.execute("SELECT COUNT(*) FROM similar").fetchone()
        (datasets,) = self._db.execute("SELECT COUNT(*) FROM datasets").fetchone()
        return StoreStats(nodes, edges, similar, datasets, by_kind)

    def set_meta(self, key, value):
        self._db.execute("INSERT OR REPLACE INTO meta VALUES (?, ?)", (key, value))
        self._db.commit()

    def get_meta(self, key):
        row = self._db.execute("SELECT value FROM meta WHERE key = ?", (key,)).fetchone()
        return None if row is None else row[0]

    def close(self):
        super().close()
        self._db.close()


def _node_from_row(row) -> Node:
    return Node(row[0], row[1], NodeKind(row[2]), row[3], row[4], row[5])


# -- export / import ---------------------------------------------------------

EXPORT_FORMAT = "graphfuse-export"
EXPORT_VERSION = 1


def export_graph(store: GraphStore, sink) -> int:
    """Write the whole store as line-delimited JSON; returns the line count.

    ``sink`` is a text file object or a path.  Records appear grouped as
    header, datasets, nodes, edges, similar, so a stream importer can check
    referential integrity on the fly.
    """
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as handle:
            return export_graph(store, handle)
    lines = 0

    def emit(record) -> None:
        nonlocal lines
        sink.write(json.dumps(record, ensure_ascii=False) + "\n")
        lines += 1

    emit({"rec": "header", "format": EXPORT_FORMAT, "version": EXPORT_VERSION})
    for ds in store.scan_datasets():
        emit(
            {"rec": "dataset", "id": ds.id, "model": ds.model.value,
             "prov": ds.prov, "node": ds.node}
        )
    for node in store.scan_nodes():
        emit(
            {"rec": "node", "id": node.id, "label": node.label,
             "kind": node.kind.value, "dataset": node.dataset,
             "norm": node.normalized_label, "rep": node.representative}
        )
    for edge in store.scan_edges():
        emit(
            {"rec": "edge", "id": edge.id, "source": edge.source,
             "target": edge.target, "label": edge.label,
             "dataset": edge.dataset, "confidence": edge.confidence}
        )
    for a, b, sim in store.scan_similar():
        emit({"rec": "similar", "source": a, "target": b, "similarity": sim})
    return lines


def import_graph(source, store: Optional[GraphStore] = None) -> GraphStore:
    """Rebuild a store from an export stream; aborts on the first bad line."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            return import_graph(handle, store)
    if store is None:
        store = MemoryStore()

    seen_datasets: set = set()
    header_seen = False
    for lineno, raw in enumerate(source, start=1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON ({exc.msg})", lineno) from exc
        if not isinstance(record, dict) or "rec" not in record:
            raise FormatError("record without 'rec' discriminator", lineno)
        rec = record["rec"]
        try:
            if rec == "header":
                if record.get("format") != EXPORT_FORMAT:
                    raise FormatError("unknown export format", lineno)
                header_seen = True
            elif rec == "dataset":
                ds = Dataset(
                    int(record["id"]), DataModel(record["model"]),
                    record.get("prov"), int(record["node"]),
                )
                store.put_dataset(ds)
                seen_datasets.add(ds.id)
            elif rec == "node":
                node = Node(
                    int(record["id"]), record["label"], NodeKind(record["kind"]),
                    int(record["dataset"]), record["norm"], int(record["rep"]),
                )
                if node.dataset not in seen_datasets:
                    raise FormatError(f"node references unknown dataset {node.dataset}", lineno)
                store.put_node(node)
            elif rec == "edge":
                edge = Edge(
                    int(record["id"]), int(record["source"]), int(record["target"]),
                    record["label"], int(record["dataset"]), float(record["confidence"]),
                )
                store.put_edge(edge)
            elif rec == "similar":
                store.put_similar(
                    int(record["source"]), int(record["target"]),
                    float(record["similarity"]),
                )
            else:
                raise FormatError(f"unknown record type {rec!r}", lineno)
        except FormatError:
            raise
        except (KeyError, ValueError, TypeError, EdgeError, StorageError) as exc:
            raise FormatError(str(exc), lineno) from exc
    if not header_seen:
        raise FormatError("missing header record", 1)
    store.flush()
    return store
