"""Locally computable infinite ambient structures and their finite ball patches.

An ambient generator presents an infinite structure through local queries
only: the tuples incident to a vertex, exact Gaifman distance, a base point,
and a candidate list of ball centers guaranteed to cover every isomorphism
class of radius-n balls. That is enough to cut out finite ball patches, to
enumerate ball representatives up to center-pointed isomorphism, to decide
whether a finite structure embeds (each connected component of a candidate
with s elements sits inside the radius-(s-1) ball around the image of its
least element, so only finitely many pointed balls need checking), and to
produce the extension axioms "a closed copy of F exists / F does not embed".

Every built-in is connected, infinite, and has bounded degree, and satisfies
the duplicate substructure property: any finite part re-occurs disjointly
(each docstring sketches why). Vertex ids are canonical strings.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .errors import GuardError, ValidationError
from .morphisms import find_embeddings, is_isomorphic
from .structures import (
    Structure,
    Vocabulary,
    components,
    gaifman,
    induced,
    structure_from_json,
    structure_to_json,
)


class AmbientGenerator(ABC):
    """Local-query presentation of an infinite bounded-degree structure."""

    name: str
    vocabulary: Vocabulary
    degree_bound: int
    base_point: str

    def __init__(self):
        self._rep_cache: Dict[int, List["BallPatch"]] = {}

    @abstractmethod
    def validate_id(self, v: str) -> None:
        """Raise ValidationError unless v is a canonical vertex id."""

    @abstractmethod
    def incident_tuples(self, v: str) -> List[Tuple[str, Tuple[str, ...]]]:
        """All relation tuples containing v, as (relation name, id tuple)."""

    @abstractmethod
    def distance(self, u: str, v: str) -> int:
        """Exact Gaifman distance between two vertices."""

    @abstractmethod
    def sort_key(self, v: str):
        """Total order on vertex ids; all deterministic scans use it."""

    @abstractmethod
    def rep_centers(self, n: int) -> List[str]:
        """Finitely many centers covering every radius-n ball class."""

    # -- generic local machinery -----------------------------------------

    def neighbors(self, v: str) -> List[str]:
        out = set()
        for _, ids in self.incident_tuples(v):
            out.update(u for u in ids if u != v)
        return sorted(out, key=self.sort_key)

    def has_tuple(self, rel: str, ids: Tuple[str, ...]) -> bool:
        if rel not in self.vocabulary:
            raise ValidationError(f"unknown relation {rel!r}")
        return (rel, tuple(ids)) in self.incident_tuples(ids[0])

    def ball_ids(self, centers: Sequence[str], n: int) -> Dict[str, int]:
        """BFS distances from a center set, limited to distance <= n."""
        if not centers:
            raise ValidationError("ball requires a nonempty center set")
        if n < 0:
            raise ValidationError("radius must be >= 0")
        for c in centers:
            self.validate_id(c)
        if len(set(centers)) != len(centers):
            raise ValidationError("duplicate centers")
        dist = {c: 0 for c in centers}
        q = deque(centers)
        while q:
            u = q.popleft()
            if dist[u] == n:
                continue
            for w in self.neighbors(u):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return dist

    def sphere(self, center: str, d: int) -> List[str]:
        """All vertices at exact distance d from center, in sort_key order."""
        self.validate_id(center)
        if d < 0:
            raise ValidationError("distance must be >= 0")
        if d == 0:
            return [center]
        prev = {center}
        cur = {center}
        for _ in range(d):
            nxt = set()
            for u in cur:
                nxt.update(self.neighbors(u))
            nxt -= prev
            prev |= nxt
            cur = nxt
        return sorted(cur, key=self.sort_key)


@dataclass(frozen=True)
class BallPatch:
    """A finite ball cut out of an ambient structure.

    ``ids[i]`` is the ambient id of local element i; ``centers`` maps each
    center id to its local index.
    """

    structure: Structure
    ids: Tuple[str, ...]
    centers: Tuple[Tuple[str, int], ...]
    radius: int

    def center_index(self, c: str) -> int:
        for cid, idx in self.centers:
            if cid == c:
                return idx
        raise ValidationError(f"{c!r} is not a center of this patch")

    def local_index(self, v: str) -> int:
        try:
            return self.ids.index(v)
        except ValueError:
            raise ValidationError(f"{v!r} is not in this patch") from None


def ball_of_set(g: AmbientGenerator, centers: Sequence[str], n: int) -> BallPatch:
    """The induced substructure on B_n(centers), with ids in sort_key order."""
    dist = g.ball_ids(centers, n)
    ids = tuple(sorted(dist, key=g.sort_key))
    index = {v: i for i, v in enumerate(ids)}
    idset = set(ids)
    rels: Dict[str, set] = {name: set() for name in g.vocabulary.names}
    for v in ids:
        for rel, tup in g.incident_tuples(v):
            if all(u in idset for u in tup):
                rels[rel].add(tuple(index[u] for u in tup))
    structure = Structure(g.vocabulary, len(ids), {k: list(v) for k, v in rels.items()})
    return BallPatch(structure, ids, tuple((c, index[c]) for c in centers), n)


def ball_of(g: AmbientGenerator, center: str, n: int) -> BallPatch:
    return ball_of_set(g, [center], n)


def patch_to_json(p: BallPatch) -> dict:
    data = structure_to_json(p.structure)
    data["centers"] = {c: idx for c, idx in p.centers}
    data["radius"] = p.radius
    return data


def patch_from_json(data: dict) -> BallPatch:
    if not isinstance(data, dict):
        raise ValidationError("patch JSON must be an object")
    extra = set(data) - {"vocabulary", "size", "relations", "centers", "radius"}
    if extra:
        raise ValidationError(f"unknown patch keys {sorted(extra)}")
    if "centers" not in data or "radius" not in data:
        raise ValidationError("patch JSON needs 'centers' and 'radius'")
    structure = structure_from_json(
        {k: data[k] for k in ("vocabulary", "size", "relations")}
    )
    centers = data["centers"]
    if not isinstance(centers, dict) or not centers:
        raise ValidationError("'centers' must be a nonempty object")
    for c, idx in centers.items():
        if not isinstance(idx, int) or not 0 <= idx < structure.size:
            raise ValidationError(f"center {c!r} has bad local index {idx!r}")
    radius = data["radius"]
    if not isinstance(radius, int) or radius < 0:
        raise ValidationError("'radius' must be a nonnegative integer")
    # ambient ids are not stored in JSON; keep local indices as synthetic ids
    ids = tuple(str(i) for i in range(structure.size))
    return BallPatch(structure, ids, tuple(centers.items()), radius)


def pointed_isomorphic(p: BallPatch, q: BallPatch) -> bool:
    """Isomorphism of single-center patches matching center to center."""
    if len(p.centers) != 1 or len(q.centers) != 1:
        raise ValidationError("pointed comparison needs single-center patches")
    a, b = p.structure, q.structure
    if a.size != b.size:
        return False
    for name in a.vocabulary.names:
        if len(a.relations[name]) != len(b.relations[name]):
            return False
    anchor = {p.centers[0][1]: q.centers[0][1]}
    return bool(find_embeddings(a, b, limit=1, anchor=anchor))


def ball_representatives(g: AmbientGenerator, n: int) -> List[BallPatch]:
    """One radius-n ball patch per center-pointed isomorphism class."""
    if n < 0:
        raise ValidationError("radius must be >= 0")
    if n in g._rep_cache:
        return g._rep_cache[n]
    reps: List[BallPatch] = []
    buckets: Dict[tuple, List[int]] = {}
    for c in g.rep_centers(n):
        patch = ball_of(g, c, n)
        s = patch.structure
        ga = gaifman(s)
        key = (
            s.size,
            tuple(len(s.relations[r]) for r in s.vocabulary.names),
            tuple(sorted(ga.degree(v) for v in range(s.size))),
            ga.degree(patch.centers[0][1]),
        )
        if not any(pointed_isomorphic(patch, reps[i]) for i in buckets.get(key, [])):
            buckets.setdefault(key, []).append(len(reps))
            reps.append(patch)
    g._rep_cache[n] = reps
    return reps


def embeds_in_ambient(g: AmbientGenerator, f: Structure) -> bool:
    """Decide whether f has an induced embedding into the ambient structure.

    Component by component: a connected component with s elements has Gaifman
    diameter at most s-1, so any embedding places it inside the radius-(s-1)
    ball around the image of its least element. Checking one anchored search
    per representative of that radius is therefore complete, and sound because
    a ball patch is an induced substructure of the ambient.
    """
    if f.vocabulary != g.vocabulary:
        raise ValidationError("pattern vocabulary does not match the generator")
    for comp in components(f):
        sub, _ = induced(f, comp)
        radius = max(sub.size - 1, 0)
        found = False
        for rep in ball_representatives(g, radius):
            anchor = {0: rep.centers[0][1]}
            if find_embeddings(sub, rep.structure, limit=1, anchor=anchor):
                found = True
                break
        if not found:
            return False
    return True


@dataclass(frozen=True)
class SigmaAxiom:
    """One extension axiom: the pattern and whether it occurs in the ambient.

    ``in_class`` True reads "a disjoint closed copy of this pattern always
    exists"; False reads "this pattern never embeds".
    """

    pattern: Structure
    in_class: bool


_SIGMA_BIT_LIMIT = 20


def sigma_axioms(g: AmbientGenerator, max_size: int) -> List[SigmaAxiom]:
    """Axioms for all isomorphism classes of patterns of size 1..max_size."""
    if max_size < 0:
        raise ValidationError("max_size must be >= 0")
    out: List[SigmaAxiom] = []
    vocab = g.vocabulary
    for size in range(1, max_size + 1):
        slots: List[Tuple[str, Tuple[int, ...]]] = []
        for name, arity in vocab.symbols:
            slots.extend(
                (name, t) for t in itertools.product(range(size), repeat=arity)
            )
        if len(slots) > _SIGMA_BIT_LIMIT:
            raise GuardError(
                f"enumerating size {size} needs 2^{len(slots)} patterns "
                f"(bit limit {_SIGMA_BIT_LIMIT}); lower max_size"
            )
        reps: List[Structure] = []
        buckets: Dict[tuple, List[int]] = {}
        for bits in range(1 << len(slots)):
            rels: Dict[str, List[Tuple[int, ...]]] = {n: [] for n, _ in vocab.symbols}
            for j, (name, t) in enumerate(slots):
                if bits >> j & 1:
                    rels[name].append(t)
            s = Structure(vocab, size, rels)
            ga = gaifman(s)
            key = (
                tuple(len(s.relations[r]) for r in vocab.names),
                tuple(sorted(ga.degree(v) for v in range(size))),
            )
            if any(is_isomorphic(s, reps[i]) for i in buckets.get(key, [])):
                continue
            buckets.setdefault(key, []).append(len(reps))
            reps.append(s)
        for s in reps:
            out.append(SigmaAxiom(s, embeds_in_ambient(g, s)))
    return out


# --- built-in generators -------------------------------------------------------


def _word_ok(w: str, k: int) -> bool:
    return all("1" <= ch <= str(k) for ch in w)


class ZLine(AmbientGenerator):
    """The integer line with the successor relation S(i, i+1).

    Connected two-way infinite path; degree bound 2. Translations act
    transitively on vertices, so a single center covers all ball classes, and
    translating any finite part far enough along the line yields a disjoint
    duplicate.
    """

    name = "z"
    degree_bound = 2
    base_point = "0"

    def __init__(self):
        super().__init__()
        self.vocabulary = Vocabulary([("S", 2)])

    def validate_id(self, v: str) -> None:
        try:
            i = int(v)
        except (TypeError, ValueError):
            raise ValidationError(f"bad z vertex id {v!r}") from None
        if str(i) != v:
            raise ValidationError(f"non-canonical z vertex id {v!r}")

    def incident_tuples(self, v: str):
        self.validate_id(v)
        i = int(v)
        return [("S", (str(i - 1), v)), ("S", (v, str(i + 1)))]

    def distance(self, u: str, v: str) -> int:
        self.validate_id(u)
        self.validate_id(v)
        return abs(int(u) - int(v))

    def sort_key(self, v: str):
        return int(v)

    def rep_centers(self, n: int) -> List[str]:
        return ["0"]


class GridZ2(AmbientGenerator):
    """The integer grid with horizontal and vertical successor relations.

    H((i,j), (i+1,j)) and V((i,j), (i,j+1)); degree bound 4; distance is the
    L1 metric. Translations are transitive, so one center suffices and any
    finite part duplicates disjointly by a long translation.
    """

    name = "grid2"
    degree_bound = 4
    base_point = "0,0"

    def __init__(self):
        super().__init__()
        self.vocabulary = Vocabulary([("H", 2), ("V", 2)])

    def _parse(self, v: str) -> Tuple[int, int]:
        parts = v.split(",") if isinstance(v, str) else None
        if not parts or len(parts) != 2:
            raise ValidationError(f"bad grid vertex id {v!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValidationError(f"bad grid vertex id {v!r}") from None
        if f"{i},{j}" != v:
            raise ValidationError(f"non-canonical grid vertex id {v!r}")
        return i, j

    def validate_id(self, v: str) -> None:
        self._parse(v)

    def incident_tuples(self, v: str):
        i, j = self._parse(v)
        return [
            ("H", (f"{i - 1},{j}", v)),
            ("H", (v, f"{i + 1},{j}")),
            ("V", (f"{i},{j - 1}", v)),
            ("V", (v, f"{i},{j + 1}")),
        ]

    def distance(self, u: str, v: str) -> int:
        a = self._parse(u)
        b = self._parse(v)
        return abs(a[0] - b[0]) + abs(a[1] - b[1])

    def sort_key(self, v: str):
        return self._parse(v)

    def rep_centers(self, n: int) -> List[str]:
        return ["0,0"]


class KaryTree(AmbientGenerator):
    """The full rooted k-ary tree with one child relation C(parent, child).

    Vertices are words over 1..k (root is the empty word); degree bound k+1.
    The Gaifman graph is the undirected tree, so distance is depth(u) +
    depth(v) - 2 * (longest common prefix). Any vertex of depth d maps to
    1^d by an automorphism permuting child labels, so centers 1^0 .. 1^n
    cover all radius-n classes (for depth >= n the ball no longer sees the
    root). Every finite part sits under some vertex up to bounded depth and
    re-occurs disjointly inside a parallel subtree.
    """

    def __init__(self, k: int):
        super().__init__()
        if not 1 <= k <= 9:
            raise ValidationError(f"tree arity must be in 1..9, got {k}")
        self.k = k
        self.name = f"tree:{k}"
        self.degree_bound = k + 1
        self.base_point = ""
        self.vocabulary = Vocabulary([("C", 2)])

    def validate_id(self, v: str) -> None:
        if not isinstance(v, str) or not _word_ok(v, self.k):
            raise ValidationError(f"bad tree vertex id {v!r}")

    def incident_tuples(self, v: str):
        self.validate_id(v)
        out = []
        if v:
            out.append(("C", (v[:-1], v)))
        out.extend(("C", (v, v + str(a + 1))) for a in range(self.k))
        return out

    def distance(self, u: str, v: str) -> int:
        self.validate_id(u)
        self.validate_id(v)
        lcp = 0
        for a, b in zip(u, v):
            if a != b:
                break
            lcp += 1
        return (len(u) - lcp) + (len(v) - lcp)

    def sort_key(self, v: str):
        return (len(v), v)

    def rep_centers(self, n: int) -> List[str]:
        return ["1" * d for d in range(n + 1)]


class FreeMonoid(AmbientGenerator):
    """The Cayley diagram of the free monoid on k generators.

    Vertices are words over 1..k; generator a contributes G{a}(w, wa). The
    underlying tree is the same as the k-ary tree, but edges carry their
    generator's relation, so the ball around a word also records the labels
    of the ancestor path. Centers must therefore range over all words of
    length <= n: short words are their own ancestries (the identity vertex,
    with no incoming edge, is visible), and a length-n word realizes each
    possible depth-n ancestor labeling. Disjoint duplicates arrive by
    prefixing with a long word.
    """

    def __init__(self, k: int):
        super().__init__()
        if not 1 <= k <= 9:
            raise ValidationError(f"monoid rank must be in 1..9, got {k}")
        self.k = k
        self.name = f"monoid:{k}"
        self.degree_bound = k + 1
        self.base_point = ""
        self.vocabulary = Vocabulary([(f"G{a + 1}", 2) for a in range(k)])

    def validate_id(self, v: str) -> None:
        if not isinstance(v, str) or not _word_ok(v, self.k):
            raise ValidationError(f"bad monoid vertex id {v!r}")

    def incident_tuples(self, v: str):
        self.validate_id(v)
        out = []
        if v:
            out.append((f"G{v[-1]}", (v[:-1], v)))
        out.extend((f"G{a + 1}", (v, v + str(a + 1))) for a in range(self.k))
        return out

    def distance(self, u: str, v: str) -> int:
        self.validate_id(u)
        self.validate_id(v)
        lcp = 0
        for a, b in zip(u, v):
            if a != b:
                break
            lcp += 1
        return (len(u) - lcp) + (len(v) - lcp)

    def sort_key(self, v: str):
        return (len(v), v)

    def rep_centers(self, n: int) -> List[str]:
        out = [""]
        for d in range(1, n + 1):
            out.extend(
                "".join(w)
                for w in itertools.product(*(["123456789"[: self.k]] * d))
            )
        return out


def _uutree_prefix_chars(max_len: int) -> int:
    return sum(j * (1 << j) for j in range(1, max_len + 1))


class UniversalUnaryTree(AmbientGenerator):
    """A one-way labeled path listing every binary word, in shortlex order.

    Vertex i connects to i+1 by L0 or L1 according to the i-th character of
    the infinite label sequence 01 00 01 10 11 000 ... (all binary words,
    shortest first, ties in binary order). Degree bound 2; distance is |i-j|.
    Every binary word of length 2n appears as a block, so every interior
    radius-n ball class (determined by its 2n-label window) occurs with its
    center at index <= chars(2n) - n, and centers 0..n-1 realize the classes
    that still see the endpoint; those finitely many centers cover all
    classes. Each window recurs infinitely often (the word re-appears inside
    longer blocks), far enough along to be disjoint.
    """

    name = "uutree"
    degree_bound = 2
    base_point = "0"

    def __init__(self):
        super().__init__()
        self.vocabulary = Vocabulary([("L0", 2), ("L1", 2)])

    def validate_id(self, v: str) -> None:
        try:
            i = int(v)
        except (TypeError, ValueError):
            raise ValidationError(f"bad uutree vertex id {v!r}") from None
        if str(i) != v or i < 0:
            raise ValidationError(f"bad uutree vertex id {v!r}")

    def label(self, i: int) -> str:
        """The i-th character (0-based) of the shortlex label sequence."""
        if i < 0:
            raise ValidationError("label index must be >= 0")
        length = 1
        total = 0
        while total + length * (1 << length) <= i:
            total += length * (1 << length)
            length += 1
        off = i - total
        word_index, pos = divmod(off, length)
        word = format(word_index, f"0{length}b")
        return word[pos]

    def incident_tuples(self, v: str):
        self.validate_id(v)
        i = int(v)
        out = []
        if i > 0:
            out.append((f"L{self.label(i - 1)}", (str(i - 1), v)))
        out.append((f"L{self.label(i)}", (v, str(i + 1))))
        return out

    def distance(self, u: str, v: str) -> int:
        self.validate_id(u)
        self.validate_id(v)
        return abs(int(u) - int(v))

    def sort_key(self, v: str):
        return int(v)

    def rep_centers(self, n: int) -> List[str]:
        last = _uutree_prefix_chars(2 * n) - n if n > 0 else 0
        return [str(i) for i in range(last + 1)]


def make_generator(selector: str) -> AmbientGenerator:
    """Build a generator from a selector: z, grid2, tree:k, monoid:k, uutree."""
    if selector == "z":
        return ZLine()
    if selector == "grid2":
        return GridZ2()
    if selector == "uutree":
        return UniversalUnaryTree()
    for prefix, cls in (("tree:", KaryTree), ("monoid:", FreeMonoid)):
        if selector.startswith(prefix):
            try:
                k = int(selector[len(prefix):])
            except ValueError:
                raise ValidationError(f"bad generator selector {selector!r}") from None
            return cls(k)
    raise ValidationError(
        f"unknown generator selector {selector!r} "
        "(expected z, grid2, tree:k, monoid:k, or uutree)"
    )
