"""Named-entity disambiguation client.

Disambiguation maps entity mentions to knowledge-base URIs through a remote
service; little-known entities come back empty.  Linking an entity node to a
KB URI adds a cl:sameAsUri edge to the per-graph URI node and makes all
entity nodes sharing that URI equivalent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import requests

from .build import GraphBuilder
from .match import EquivalenceStore
from .model import SAME_AS_URI_EDGE, EdgeId, NodeId, NodeKind

#: Wire name per entity kind, shared with the extraction protocol.
_MENTION_TYPES = {
    NodeKind.ENTITY_PERSON: "PER",
    NodeKind.ENTITY_LOCATION: "LOC",
    NodeKind.ENTITY_ORGANIZATION: "ORG",
}


class DisambiguationError(Exception):
    pass


@dataclass(frozen=True)
class NedRequest:
    sentence: str
    mentions: Tuple[Tuple[int, int, NodeKind], ...]

    def __post_init__(self):
        for start, end, _ in self.mentions:
            if not (0 <= start < end <= len(self.sentence)):
                raise DisambiguationError(
                    f"mention span [{start}, {end}) outside sentence"
                )


@dataclass(frozen=True)
class NedResult:
    uris: Tuple[Optional[str], ...]


class NedClient:
    """Client for the disambiguation service, with a per-mention cache.

    Request: ``{"text": str, "lang": str, "mentions": [{"start", "end",
    "type"}]}``; reply: ``{"links": [{"uri": str|null}]}`` aligned 1:1.
    A transport failure or malformed reply degrades to an all-empty result
    and bumps ``failures``; the build never aborts on disambiguation.
    """

    def __init__(self, endpoint: str, lang: str = "fr", timeout: float = 30.0):
        self.endpoint = endpoint
        self.lang = lang
        self.timeout = timeout
        self.failures = 0
        self._cache: Dict[Tuple[str, int, int, str], Optional[str]] = {}
        self._session = requests.Session()

    def disambiguate(self, request: NedRequest) -> NedResult:
        if not request.mentions:
            return NedResult(())
        keys = [
            (request.sentence, start, end, kind.value)
            for start, end, kind in request.mentions
        ]
        missing = [i for i, key in enumerate(keys) if key not in self._cache]
        if missing:
            fetched = self._call(
                request.sentence, [request.mentions[i] for i in missing]
            )
            for i, uri in zip(missing, fetched):
                self._cache[keys[i]] = uri
        return NedResult(tuple(self._cache[key] for key in keys))

    def _call(self, sentence: str, mentions) -> List[Optional[str]]:
        payload = {
            "text": sentence,
            "lang": self.lang,
            "mentions": [
                {"start": start, "end": end, "type": _MENTION_TYPES[kind]}
                for start, end, kind in mentions
            ],
        }
        try:
            reply = self._session.post(self.endpoint, json=payload, timeout=self.timeout)
            reply.raise_for_status()
            body = reply.json()
            links = body["links"]
            if not isinstance(links, list) or len(links) != len(mentions):
                raise ValueError("links not aligned with mentions")
            uris: List[Optional[str]] = []
            for link in links:
                uri = link.get("uri") if isinstance(link, dict) else None
                if uri is not None and not isinstance(uri, str):
                    raise ValueError(f"bad uri value {uri!r}")
                uris.append(uri)
            return uris
        except (requests.RequestException, json.JSONDecodeError, ValueError,
                KeyError, TypeError):
            self.failures += 1
            return [None] * len(mentions)


class EntityLinker:
    """Links entity nodes to KB URI nodes, idempotently, and records the
    equivalence of entity nodes that share a KB identity."""

    def __init__(self, builder: GraphBuilder, equivalences: EquivalenceStore):
        self.builder = builder
        self.equivalences = equivalences
        self._linked: Dict[Tuple[NodeId, str], EdgeId] = {}
        self._first_entity_for_uri: Dict[str, NodeId] = {}

    def link_entity(self, entity_node: NodeId, kb_uri: str) -> EdgeId:
        node = self.builder.store.get_node(entity_node)
        if node is None or node.kind not in _MENTION_TYPES:
            raise DisambiguationError(f"node {entity_node} is not an entity node")
        already = self._linked.get((entity_node, kb_uri))
        if already is not None:
            return already
        uri_node, _ = self.builder.uri_node(kb_uri, node.dataset)
        edge = self.builder.add_edge(
            entity_node, uri_node, SAME_AS_URI_EDGE, node.dataset, 1.0
        )
        self._linked[(entity_node, kb_uri)] = edge
        first = self._first_entity_for_uri.setdefault(kb_uri, entity_node)
        if first != entity_node:
            self.equivalences.union(first, entity_node)
        return edge
