"""Finite relational structures and their Gaifman-graph geometry.

A structure has universe {0, ..., size-1} (possibly empty), a relational
vocabulary, and one finite set of tuples per relation symbol. Structures are
value objects: treat them as immutable, never mutate ``relations`` after
construction. Equality and hashing use the canonical sorted form.

Distances in the Gaifman graph may be infinite; that is represented by
``math.inf``, an explicit comparable value rather than a sentinel integer.
"""

from __future__ import annotations

import json
import math
import re
from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import ValidationError

Tup = Tuple[int, ...]

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

INFINITE = math.inf


class Vocabulary:
    """An ordered list of (relation name, arity >= 1) pairs with distinct names."""

    __slots__ = ("symbols", "_arities")

    def __init__(self, symbols: Iterable[Tuple[str, int]]):
        syms = tuple((str(n), int(a)) for n, a in symbols)
        seen = set()
        for name, arity in syms:
            if not _NAME_RE.match(name):
                raise ValidationError(f"bad relation name {name!r}")
            if arity < 1:
                raise ValidationError(f"relation {name}: arity must be >= 1, got {arity}")
            if name in seen:
                raise ValidationError(f"duplicate relation name {name!r}")
            seen.add(name)
        self.symbols: Tuple[Tuple[str, int], ...] = syms
        self._arities: Dict[str, int] = dict(syms)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    def arity(self, name: str) -> int:
        try:
            return self._arities[name]
        except KeyError:
            raise ValidationError(f"unknown relation name {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._arities

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}/{a}" for n, a in self.symbols)
        return f"Vocabulary({inner})"


class Structure:
    """A finite structure over a vocabulary; universe is range(size)."""

    __slots__ = ("vocabulary", "size", "relations", "_key")

    def __init__(
        self,
        vocabulary: Vocabulary,
        size: int,
        relations: Optional[Mapping[str, Iterable[Sequence[int]]]] = None,
    ):
        if not isinstance(size, int) or isinstance(size, bool) or size < 0:
            raise ValidationError(f"size must be a nonnegative int, got {size!r}")
        rels: Dict[str, FrozenSet[Tup]] = {name: frozenset() for name in vocabulary.names}
        if relations:
            for name, tuples in relations.items():
                if name not in vocabulary:
                    raise ValidationError(f"relation {name!r} not in vocabulary")
                arity = vocabulary.arity(name)
                out = set()
                for t in tuples:
                    tt = tuple(int(v) for v in t)
                    if len(tt) != arity:
                        raise ValidationError(
                            f"relation {name}: tuple {tt} has length {len(tt)}, arity is {arity}"
                        )
                    for v in tt:
                        if not 0 <= v < size:
                            raise ValidationError(
                                f"relation {name}: entry {v} outside universe 0..{size - 1}"
                            )
                    out.add(tt)
                rels[name] = frozenset(out)
        self.vocabulary = vocabulary
        self.size = size
        self.relations = rels
        self._key = (
            vocabulary.symbols,
            size,
            tuple((n, tuple(sorted(rels[n]))) for n in vocabulary.names),
        )

    def tuples(self, name: str) -> FrozenSet[Tup]:
        try:
            return self.relations[name]
        except KeyError:
            raise ValidationError(f"unknown relation name {name!r}") from None

    def __eq__(self, other) -> bool:
        return isinstance(other, Structure) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        counts = ", ".join(f"{n}:{len(self.relations[n])}" for n in self.vocabulary.names)
        return f"Structure(size={self.size}, {counts})"


class SubsetMask:
    """A subset of the universe of a structure of a given size."""

    __slots__ = ("parent_size", "members")

    def __init__(self, parent_size: int, members: Iterable[int]):
        if parent_size < 0:
            raise ValidationError("parent_size must be >= 0")
        mem = frozenset(int(v) for v in members)
        for v in mem:
            if not 0 <= v < parent_size:
                raise ValidationError(f"member {v} outside universe 0..{parent_size - 1}")
        self.parent_size = parent_size
        self.members = mem

    @classmethod
    def empty(cls, parent_size: int) -> "SubsetMask":
        return cls(parent_size, ())

    @classmethod
    def full(cls, parent_size: int) -> "SubsetMask":
        return cls(parent_size, range(parent_size))

    def sorted_members(self) -> Tuple[int, ...]:
        return tuple(sorted(self.members))

    def complement(self) -> "SubsetMask":
        return SubsetMask(self.parent_size, set(range(self.parent_size)) - self.members)

    def __contains__(self, v: int) -> bool:
        return v in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubsetMask)
            and self.parent_size == other.parent_size
            and self.members == other.members
        )

    def __hash__(self) -> int:
        return hash((self.parent_size, self.members))

    def __repr__(self) -> str:
        return f"SubsetMask({self.parent_size}, {sorted(self.members)})"


class GaifmanGraph:
    """Undirected adjacency view: vertices joined iff they co-occur in a tuple."""

    __slots__ = ("size", "adj")

    def __init__(self, size: int, adj: Sequence[FrozenSet[int]]):
        self.size = size
        self.adj = tuple(adj)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for u in range(self.size) for v in self.adj[u] if u < v]


def gaifman(s: Structure) -> GaifmanGraph:
    """Build the Gaifman graph of ``s``.

    Distinct elements are adjacent iff they occur together in some relation
    tuple. Tuples with repeated entries contribute no self-loops.
    """
    adj: List[set] = [set() for _ in range(s.size)]
    for name in s.vocabulary.names:
        for t in s.relations[name]:
            for i, u in enumerate(t):
                for v in t[i + 1 :]:
                    if u != v:
                        adj[u].add(v)
                        adj[v].add(u)
    return GaifmanGraph(s.size, [frozenset(a) for a in adj])


def bfs_distances(g: GaifmanGraph, sources: Iterable[int]) -> List[float]:
    """Distances from a source set; unreachable vertices get math.inf."""
    dist: List[float] = [INFINITE] * g.size
    q: deque = deque()
    for v in sources:
        if not 0 <= v < g.size:
            raise ValidationError(f"vertex {v} outside universe 0..{g.size - 1}")
        if dist[v] != 0:
            dist[v] = 0
            q.append(v)
    while q:
        u = q.popleft()
        for w in g.adj[u]:
            if dist[w] == INFINITE:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def distance(g: GaifmanGraph, x: int, y: int) -> float:
    """Gaifman distance between two vertices (math.inf if disconnected)."""
    for v in (x, y):
        if not 0 <= v < g.size:
            raise ValidationError(f"vertex {v} outside universe 0..{g.size - 1}")
    if x == y:
        return 0
    dist = [INFINITE] * g.size
    dist[x] = 0
    q = deque([x])
    while q:
        u = q.popleft()
        for w in g.adj[u]:
            if dist[w] == INFINITE:
                dist[w] = dist[u] + 1
                if w == y:
                    return dist[w]
                q.append(w)
    return dist[y]


def ball(s: Structure, centers: SubsetMask, n: int) -> SubsetMask:
    """B_n(centers): all elements at Gaifman distance <= n from the center set."""
    if centers.parent_size != s.size:
        raise ValidationError("centers mask does not match structure size")
    if not centers.members:
        raise ValidationError("ball requires a nonempty center set")
    if n < 0:
        raise ValidationError("radius must be >= 0")
    dist = bfs_distances(gaifman(s), centers.members)
    return SubsetMask(s.size, [v for v in range(s.size) if dist[v] <= n])


def induced(s: Structure, mask: SubsetMask) -> Tuple[Structure, Dict[int, int]]:
    """Substructure induced on ``mask``, plus the old-index -> new-index map.

    Retained elements keep their relative order, so the least retained element
    becomes index 0.
    """
    if mask.parent_size != s.size:
        raise ValidationError("mask does not match structure size")
    kept = mask.sorted_members()
    index_map = {old: new for new, old in enumerate(kept)}
    rels = {}
    for name in s.vocabulary.names:
        rels[name] = [
            tuple(index_map[v] for v in t)
            for t in s.relations[name]
            if all(v in index_map for v in t)
        ]
    return Structure(s.vocabulary, len(kept), rels), index_map


def components(s: Structure) -> List[SubsetMask]:
    """Gaifman connected components, ordered by least element."""
    g = gaifman(s)
    seen = [False] * s.size
    out: List[SubsetMask] = []
    for start in range(s.size):
        if seen[start]:
            continue
        comp = []
        q = deque([start])
        seen[start] = True
        while q:
            u = q.popleft()
            comp.append(u)
            for w in g.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    q.append(w)
        out.append(SubsetMask(s.size, comp))
    return out


def disjoint_union(a: Structure, b: Structure) -> Structure:
    """Disjoint union; b's elements are shifted up by a.size."""
    if a.vocabulary != b.vocabulary:
        raise ValidationError("disjoint_union requires identical vocabularies")
    off = a.size
    rels: Dict[str, List[Tup]] = {}
    for name in a.vocabulary.names:
        rels[name] = list(a.relations[name]) + [
            tuple(v + off for v in t) for t in b.relations[name]
        ]
    return Structure(a.vocabulary, a.size + b.size, rels)


def max_degree(s: Structure) -> int:
    """Maximum Gaifman degree (0 for the empty structure)."""
    g = gaifman(s)
    return max((g.degree(v) for v in range(s.size)), default=0)


# --- JSON serialization ------------------------------------------------------

_STRUCT_KEYS = {"vocabulary", "size", "relations"}


def structure_to_json(s: Structure) -> dict:
    return {
        "vocabulary": [{"name": n, "arity": a} for n, a in s.vocabulary.symbols],
        "size": s.size,
        "relations": {
            n: [list(t) for t in sorted(s.relations[n])] for n in s.vocabulary.names
        },
    }


def _vocabulary_from_json(items) -> Vocabulary:
    if not isinstance(items, list):
        raise ValidationError("vocabulary must be a list")
    syms = []
    for item in items:
        if not isinstance(item, dict):
            raise ValidationError("vocabulary entries must be objects")
        extra = set(item) - {"name", "arity"}
        if extra:
            raise ValidationError(f"unknown vocabulary keys {sorted(extra)}")
        if "name" not in item or "arity" not in item:
            raise ValidationError("vocabulary entries need 'name' and 'arity'")
        syms.append((item["name"], item["arity"]))
    return Vocabulary(syms)


def structure_from_json(data: dict) -> Structure:
    if not isinstance(data, dict):
        raise ValidationError("structure JSON must be an object")
    extra = set(data) - _STRUCT_KEYS
    if extra:
        raise ValidationError(f"unknown structure keys {sorted(extra)}")
    missing = _STRUCT_KEYS - set(data)
    if missing:
        raise ValidationError(f"missing structure keys {sorted(missing)}")
    vocab = _vocabulary_from_json(data["vocabulary"])
    size = data["size"]
    if not isinstance(size, int) or isinstance(size, bool) or size < 0:
        raise ValidationError("size must be a nonnegative integer")
    relations = data["relations"]
    if not isinstance(relations, dict):
        raise ValidationError("relations must be an object")
    for name, tuples in relations.items():
        if name not in vocab:
            raise ValidationError(f"relation {name!r} not in vocabulary")
        if not isinstance(tuples, list):
            raise ValidationError(f"relation {name}: tuples must be a list")
        seen = set()
        for t in tuples:
            if not isinstance(t, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in t
            ):
                raise ValidationError(f"relation {name}: tuples must be lists of ints")
            tt = tuple(t)
            if tt in seen:
                raise ValidationError(f"relation {name}: duplicate tuple {t}")
            seen.add(tt)
    return Structure(vocab, size, relations)


def load_structure(path: str) -> Structure:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValidationError(f"not valid JSON: {e}") from None
    return structure_from_json(data)
