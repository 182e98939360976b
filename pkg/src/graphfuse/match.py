"""Set-at-a-time node matching.

Each rule pairs two node groups, filters the pairs cheaply (blocking), then
computes one similarity function.  A similarity of exactly 1.0 makes the two
nodes equivalent: no edge is stored, the smaller node id becomes the class
representative (k equivalent nodes cost k representative entries instead of
k(k-1)/2 edges).  A similarity in [threshold, 1.0) is stored as one Similar
record whose confidence is the similarity itself.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple

from .model import EPSILON, Node, NodeId, NodeKind
from .storage import GraphStore
from .values import EMPTY_NULL_CODES, NullCodeSet, parse_date

# -- similarity kernels -------------------------------------------------------


def jaro(s1: str, s2: str) -> float:
    """Jaro similarity with the standard match window floor(max/2) - 1."""
    if s1 == s2:
        return 1.0
    len1, len2 = len(s1), len(s2)
    if len1 == 0 or len2 == 0:
        return 0.0
    window = max(0, max(len1, len2) // 2 - 1)
    matched1 = [False] * len1
    matched2 = [False] * len2
    matches = 0
    for i, ch in enumerate(s1):
        lo = max(0, i - window)
        hi = min(i + window + 1, len2)
        for j in range(lo, hi):
            if matched2[j] or s2[j] != ch:
                continue
            matched1[i] = matched2[j] = True
            matches += 1
            break
    if matches == 0:
        return 0.0
    transposed = 0
    j = 0
    for i in range(len1):
        if not matched1[i]:
            continue
        while not matched2[j]:
            j += 1
        if s1[i] != s2[j]:
            transposed += 1
        j += 1
    t = transposed / 2
    m = matches
    return (m / len1 + m / len2 + (m - t) / m) / 3


def levenshtein(s1: str, s2: str) -> int:
    """Edit distance (insert/delete/substitute), two-row dynamic program."""
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    if not s2:
        return len(s1)
    previous = list(range(len(s2) + 1))
    for i, ch1 in enumerate(s1, start=1):
        current = [i]
        for j, ch2 in enumerate(s2, start=1):
            cost = 0 if ch1 == ch2 else 1
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
            )
        previous = current
    return previous[-1]


def levenshtein_sim(s1: str, s2: str) -> float:
    longest = max(len(s1), len(s2))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(s1, s2) / longest


def _words(s: str) -> frozenset:
    stripped = "".join(
        ch for ch in s.casefold() if not unicodedata.category(ch).startswith("P")
    )
    return frozenset(stripped.split())


def jaccard_words(s1: str, s2: str) -> float:
    a, b = _words(s1), _words(s2)
    if not a and not b:
        return 1.0
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def normalize_person(label: str) -> str:
    """Reorder a single "Last, First" comma form and collapse whitespace."""
    collapsed = " ".join(label.split())
    if collapsed.count(",") == 1:
        last, first = (part.strip() for part in collapsed.split(","))
        if last and first:
            return f"{first} {last}"
    return collapsed


# -- equivalence classes ------------------------------------------------------


class EquivalenceStore:
    """Union-find over node ids; the smallest id of a class is its
    representative, which keeps results deterministic."""

    def __init__(self):
        self.parent: Dict[NodeId, NodeId] = {}

    def find(self, node: NodeId) -> NodeId:
        parent = self.parent
        if node not in parent:
            parent[node] = node
            return node
        root = node
        while parent[root] != root:
            root = parent[root]
        while parent[node] != root:
            parent[node], node = root, parent[node]
        return root

    def union(self, a: NodeId, b: NodeId) -> NodeId:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        root, other = (ra, rb) if ra < rb else (rb, ra)
        self.parent[other] = root
        return root

    def __len__(self) -> int:
        return len(self.parent)

    def classes(self) -> Dict[NodeId, List[NodeId]]:
        grouped: Dict[NodeId, List[NodeId]] = {}
        for node in self.parent:
            grouped.setdefault(self.find(node), []).append(node)
        return grouped

    def persist(self, store: GraphStore) -> int:
        """Write every tracked member's representative; returns entry count."""
        entries = 0
        for node in sorted(self.parent):
            store.set_representative(node, self.find(node))
            entries += 1
        return entries


# -- match rules --------------------------------------------------------------

_STRING_KINDS = frozenset({NodeKind.VALUE, NodeKind.TEXT_SEGMENT})


def canonical_number(label: str) -> Optional[str]:
    try:
        d = Decimal(label.strip())
    except InvalidOperation:
        return None
    if d == 0:
        d = Decimal(0)
    d = d.normalize()
    if d.as_tuple().exponent > 0:
        d = d.quantize(Decimal(1))
    return str(d)


def canonical_timestamp(label: str) -> Optional[str]:
    from datetime import datetime

    dt = parse_date(label.strip())
    if dt is None:
        return None
    return str(int((dt - datetime(1970, 1, 1)).total_seconds()))


def _relative_length_ok(l1: int, l2: int) -> bool:
    return abs(l1 - l2) <= 0.2 * max(l1, l2)


def _prefix3(label: str) -> str:
    return label.casefold()[:3]


@dataclass
class MatchRule:
    name: str
    kinds: frozenset
    similarity: Callable[[str, str], float]
    threshold: float
    # key for equality blocking / candidate bucketing; None keeps one bucket
    block_key: Optional[Callable[[Node], Optional[str]]] = None
    pair_filter: Optional[Callable[[Node, Node], bool]] = None
    use_normalized: bool = False
    # long-string rule buckets by shared word instead of a single key
    word_blocking: bool = False

    def selects(self, node: Node, nulls: NullCodeSet) -> bool:
        if node.kind not in self.kinds:
            return False
        if node.label == EPSILON or node.label in nulls:
            return False
        return True

    def label_of(self, node: Node) -> str:
        return node.normalized_label if self.use_normalized else node.label


def _equality_rule(name: str, kinds, key: Callable[[Node], Optional[str]]) -> MatchRule:
    return MatchRule(
        name=name,
        kinds=frozenset(kinds),
        similarity=lambda a, b: 1.0,
        threshold=1.0,
        block_key=key,
    )


def _short_string_filter(a: Node, b: Node) -> bool:
    l1, l2 = len(a.label), len(b.label)
    return l1 < 128 and l2 < 128 and _relative_length_ok(l1, l2)


def _long_string_filter(a: Node, b: Node) -> bool:
    l1, l2 = len(a.label), len(b.label)
    return l1 > 32 and l2 > 32 and _relative_length_ok(l1, l2)


def default_rules(entity_only: bool = False) -> List[MatchRule]:
    """The shipped rule set: one rule per matching-table row."""
    rules = [
        MatchRule(
            "person",
            frozenset({NodeKind.ENTITY_PERSON}),
            jaro,
            0.8,
            use_normalized=True,
        ),
        MatchRule(
            "location",
            frozenset({NodeKind.ENTITY_LOCATION}),
            jaro,
            0.8,
            use_normalized=True,
        ),
        MatchRule(
            "organization",
            frozenset({NodeKind.ENTITY_ORGANIZATION}),
            jaro,
            0.95,
            use_normalized=True,
        ),
        _equality_rule(
            "identifier",
            {NodeKind.URI, NodeKind.HASHTAG, NodeKind.EMAIL},
            lambda node: f"{node.kind.value}\x00{node.label}",
        ),
        _equality_rule(
            "number",
            {NodeKind.NUMBER},
            lambda node: canonical_number(node.label),
        ),
        _equality_rule(
            "date",
            {NodeKind.DATE},
            lambda node: canonical_timestamp(node.label),
        ),
    ]
    if not entity_only:
        rules.append(
            MatchRule(
                "short-string",
                _STRING_KINDS,
                levenshtein_sim,
                0.8,
                block_key=lambda node: _prefix3(node.label),
                pair_filter=_short_string_filter,
            )
        )
        rules.append(
            MatchRule(
                "long-string",
                _STRING_KINDS,
                jaccard_words,
                0.8,
                pair_filter=_long_string_filter,
                word_blocking=True,
            )
        )
    return rules


# -- candidate generation and matching ----------------------------------------


def candidate_pairs(
    store: GraphStore,
    rule: MatchRule,
    nulls: NullCodeSet = EMPTY_NULL_CODES,
) -> Iterator[Tuple[Node, Node]]:
    """All unordered node pairs the rule selects, each exactly once."""
    nodes = [n for n in store.scan_nodes() if rule.selects(n, nulls)]
    yield from _pairs_from(nodes, rule)


def _pairs_from(nodes: List[Node], rule: MatchRule) -> Iterator[Tuple[Node, Node]]:
    if rule.word_blocking:
        yield from _word_blocked_pairs(nodes, rule)
        return
    buckets: Dict[str, List[Node]] = {}
    if rule.block_key is None:
        buckets[""] = nodes
    else:
        for node in nodes:
            key = rule.block_key(node)
            if key is None:
                continue
            buckets.setdefault(key, []).append(node)
    for key in buckets:
        group = buckets[key]
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                a, b = group[i], group[j]
                if rule.pair_filter is not None and not rule.pair_filter(a, b):
                    continue
                yield (a, b) if a.id < b.id else (b, a)


def _word_blocked_pairs(nodes: List[Node], rule: MatchRule) -> Iterator[Tuple[Node, Node]]:
    by_word: Dict[str, List[int]] = {}
    for idx, node in enumerate(nodes):
        for word in sorted(_words(node.label)):
            by_word.setdefault(word, []).append(idx)
    seen: set = set()
    for word in by_word:
        group = by_word[word]
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                pair = (group[i], group[j])
                if pair in seen:
                    continue
                seen.add(pair)
                a, b = nodes[pair[0]], nodes[pair[1]]
                if rule.pair_filter is not None and not rule.pair_filter(a, b):
                    continue
                yield (a, b) if a.id < b.id else (b, a)


@dataclass
class RuleOutcome:
    pairs: int = 0
    records: int = 0
    unions: int = 0


@dataclass
class MatchReport:
    pairs_compared: int = 0
    similar_records: int = 0
    unions: int = 0
    representative_entries: int = 0
    per_rule: Dict[str, RuleOutcome] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "pairs_compared": self.pairs_compared,
            "similar_records": self.similar_records,
            "unions": self.unions,
            "representative_entries": self.representative_entries,
            "per_rule": {
                name: vars(outcome) for name, outcome in self.per_rule.items()
            },
        }


def match_nodes(
    store: GraphStore,
    rules: Optional[Iterable[MatchRule]] = None,
    nulls: NullCodeSet = EMPTY_NULL_CODES,
    equivalences: Optional[EquivalenceStore] = None,
) -> MatchReport:
    """Run every rule, store Similar records, and persist representatives."""
    if rules is None:
        rules = default_rules()
    equiv = equivalences if equivalences is not None else EquivalenceStore()
    report = MatchReport()
    for rule in rules:
        outcome = RuleOutcome()
        for a, b in candidate_pairs(store, rule, nulls):
            outcome.pairs += 1
            sim = rule.similarity(rule.label_of(a), rule.label_of(b))
            if sim >= 1.0:
                equiv.union(a.id, b.id)
                outcome.unions += 1
            elif sim >= rule.threshold:
                store.put_similar(a.id, b.id, sim)
                outcome.records += 1
        report.per_rule[rule.name] = outcome
        report.pairs_compared += outcome.pairs
        report.similar_records += outcome.records
        report.unions += outcome.unions
    report.representative_entries = equiv.persist(store)
    store.flush()
    return report


def find_representative(equiv: EquivalenceStore, node: NodeId) -> NodeId:
    return equiv.find(node)


def union(equiv: EquivalenceStore, a: NodeId, b: NodeId) -> NodeId:
    return equiv.union(a, b)
