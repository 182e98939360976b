"""Connection demonstration: shortest undirected path between two labels.

Breadth-first search over the stored edges plus the similarity links;
equivalent nodes (shared representative) count as a single vertex, so
crossing an equivalence is free, while sameAs similarity records are
traversed like edges labeled cl:sameAs with their stored confidence.
Not a search engine; a bounded demo of the connections the graph holds.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .model import SAME_AS_EDGE, Node, NodeId, normalize_label
from .storage import GraphStore

FOUND = "found"
NO_MATCH = "no-match"
NO_PATH = "no-path"


@dataclass
class PathStep:
    source: NodeId
    source_label: str
    label: str
    confidence: float
    target: NodeId
    target_label: str

    def to_dict(self) -> dict:
        return dict(vars(self))


@dataclass
class ConnectionResult:
    status: str
    message: str = ""
    endpoints: Tuple[Optional[NodeId], Optional[NodeId]] = (None, None)
    path: List[PathStep] = field(default_factory=list)

    @property
    def hops(self) -> int:
        return len(self.path)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "message": self.message,
            "endpoints": list(self.endpoints),
            "hops": self.hops,
            "path": [step.to_dict() for step in self.path],
        }


def _resolve(nodes: Dict[NodeId, Node], node: NodeId) -> NodeId:
    seen = set()
    current = node
    while True:
        rep = nodes[current].representative
        if rep == current or rep in seen:
            return rep
        seen.add(current)
        current = rep


def find_connection(
    store: GraphStore, label_a: str, label_b: str, max_hops: int = 10
) -> ConnectionResult:
    nodes: Dict[NodeId, Node] = {n.id: n for n in store.scan_nodes()}

    def matches(query: str) -> List[NodeId]:
        norm = normalize_label(query)
        return sorted(
            n.id
            for n in nodes.values()
            if n.label == query or n.normalized_label == norm
        )

    side_a, side_b = matches(label_a), matches(label_b)
    if not side_a or not side_b:
        missing = label_a if not side_a else label_b
        return ConnectionResult(NO_MATCH, f"no node labeled {missing!r}")

    adjacency: Dict[NodeId, List[Tuple[NodeId, PathStep]]] = {}

    def connect(u: NodeId, v: NodeId, step: PathStep) -> None:
        ru, rv = _resolve(nodes, u), _resolve(nodes, v)
        adjacency.setdefault(ru, []).append((rv, step))
        adjacency.setdefault(rv, []).append((ru, step))

    for edge in store.scan_edges():
        step = PathStep(
            edge.source,
            nodes[edge.source].label,
            edge.label,
            edge.confidence,
            edge.target,
            nodes[edge.target].label,
        )
        connect(edge.source, edge.target, step)
    for a, b, sim in store.scan_similar():
        step = PathStep(a, nodes[a].label, SAME_AS_EDGE, sim, b, nodes[b].label)
        connect(a, b, step)

    sources = {_resolve(nodes, n) for n in side_a}
    targets = {_resolve(nodes, n) for n in side_b}
    overlap = sources & targets
    if overlap:
        anchor = min(overlap)
        return ConnectionResult(
            FOUND, "labels resolve to the same node", (anchor, anchor), []
        )

    parents: Dict[NodeId, Tuple[Optional[NodeId], Optional[PathStep]]] = {
        s: (None, None) for s in sorted(sources)
    }
    frontier = deque((s, 0) for s in sorted(sources))
    reached: Optional[NodeId] = None
    while frontier:
        vertex, depth = frontier.popleft()
        if depth >= max_hops:
            continue
        for neighbor, step in adjacency.get(vertex, ()):
            if neighbor in parents:
                continue
            parents[neighbor] = (vertex, step)
            if neighbor in targets:
                reached = neighbor
                frontier.clear()
                break
            frontier.append((neighbor, depth + 1))
    if reached is None:
        return ConnectionResult(
            NO_PATH, f"no path within {max_hops} hops", (min(sources), min(targets))
        )

    steps: List[PathStep] = []
    cursor: Optional[NodeId] = reached
    while cursor is not None:
        previous, step = parents[cursor]
        if step is not None:
            steps.append(step)
        cursor = previous
    steps.reverse()
    return ConnectionResult(FOUND, "", (min(sources), reached), steps)


def datasets_on_path(store: GraphStore, result: ConnectionResult) -> set:
    """Distinct dataset ids the path's endpoint nodes belong to."""
    nodes = {n.id: n for n in store.scan_nodes()}
    touched = set()
    for step in result.path:
        touched.add(nodes[step.source].dataset)
        touched.add(nodes[step.target].dataset)
    return touched
