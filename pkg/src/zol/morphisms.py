"""Partial isomorphisms, induced embeddings, closed copies, and EF games.

An embedding here is always an induced one: tuples must be preserved in both
directions between the pattern and the image. A subset of a host is closed
when it is a union of Gaifman components; two subsets are disjoint when no
element of one is within Gaifman distance 1 of the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .errors import ValidationError
from .structures import (
    GaifmanGraph,
    Structure,
    SubsetMask,
    ball,
    bfs_distances,
    components,
    gaifman,
    induced,
)


@dataclass(frozen=True)
class PartialMap:
    """A finite injective partial map between two universes, as sorted pairs."""

    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        srcs = [a for a, _ in self.pairs]
        dsts = [b for _, b in self.pairs]
        if len(set(srcs)) != len(srcs):
            raise ValidationError("partial map is not functional")
        if len(set(dsts)) != len(dsts):
            raise ValidationError("partial map is not injective")
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))

    @classmethod
    def of(cls, mapping: Dict[int, int]) -> "PartialMap":
        return cls(tuple(mapping.items()))

    def as_dict(self) -> Dict[int, int]:
        return dict(self.pairs)

    def inverse(self) -> "PartialMap":
        return PartialMap(tuple((b, a) for a, b in self.pairs))

    def domain(self) -> Tuple[int, ...]:
        return tuple(a for a, _ in self.pairs)

    def image(self) -> Tuple[int, ...]:
        return tuple(sorted(b for _, b in self.pairs))


def is_partial_isomorphism(a: Structure, b: Structure, pm: PartialMap) -> bool:
    """True iff pm preserves and reflects all relations over its domain."""
    fwd = pm.as_dict()
    for x, y in pm.pairs:
        if not 0 <= x < a.size or not 0 <= y < b.size:
            return False
    dom = set(fwd)
    img = set(fwd.values())
    for name in a.vocabulary.names:
        bt = b.relations[name]
        for t in a.relations[name]:
            if all(v in dom for v in t):
                if tuple(fwd[v] for v in t) not in bt:
                    return False
        inv = {v: k for k, v in fwd.items()}
        at = a.relations[name]
        for t in bt:
            if all(v in img for v in t):
                if tuple(inv[v] for v in t) not in at:
                    return False
    return True


@dataclass(frozen=True)
class Embedding:
    """An induced embedding of ``pattern`` into ``host``; mapping[i] is the image of i."""

    pattern: Structure
    host: Structure
    mapping: Tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != self.pattern.size:
            raise ValidationError("embedding mapping has wrong length")
        if len(set(self.mapping)) != len(self.mapping):
            raise ValidationError("embedding is not injective")
        for v in self.mapping:
            if not 0 <= v < self.host.size:
                raise ValidationError("embedding image outside host universe")
        img = set(self.mapping)
        for name in self.pattern.vocabulary.names:
            ht = self.host.relations[name]
            for t in self.pattern.relations[name]:
                if tuple(self.mapping[v] for v in t) not in ht:
                    raise ValidationError("embedding does not preserve a tuple")
            inv = {w: v for v, w in enumerate(self.mapping)}
            pt = self.pattern.relations[name]
            for t in ht:
                if all(w in img for w in t):
                    if tuple(inv[w] for w in t) not in pt:
                        raise ValidationError("embedding image is not induced")

    def image_mask(self) -> SubsetMask:
        return SubsetMask(self.host.size, self.mapping)


def iter_embeddings(
    pattern: Structure,
    host: Structure,
    anchor: Optional[Dict[int, int]] = None,
) -> Iterator[Tuple[int, ...]]:
    """Yield induced-embedding mappings in lexicographic order.

    ``anchor`` pins pattern vertices to host vertices up front. Backtracking
    assigns pattern vertices 0..m-1 in order, pruning on degrees and on every
    relation tuple that becomes fully assigned on either side.
    """
    if pattern.vocabulary != host.vocabulary:
        raise ValidationError("pattern and host vocabularies differ")
    m = pattern.size
    anchor = anchor or {}
    for k, v in anchor.items():
        if not 0 <= k < m:
            raise ValidationError(f"anchor source {k} outside pattern universe")
        if not 0 <= v < host.size:
            raise ValidationError(f"anchor target {v} outside host universe")
    if len(set(anchor.values())) != len(anchor):
        raise ValidationError("anchor is not injective")
    if m == 0:
        yield ()
        return
    if m > host.size:
        return

    gp, gh = gaifman(pattern), gaifman(host)
    names = pattern.vocabulary.names
    # pattern tuples become checkable once their largest-index vertex is set
    ready: List[List[Tuple[str, Tuple[int, ...]]]] = [[] for _ in range(m)]
    for name in names:
        for t in pattern.relations[name]:
            ready[max(t)].append((name, t))
    # host tuples incident to a vertex, for the reverse (induced) check
    incident: List[List[Tuple[str, Tuple[int, ...]]]] = [[] for _ in range(host.size)]
    for name in names:
        for t in host.relations[name]:
            for w in set(t):
                incident[w].append((name, t))

    assign: List[int] = [-1] * m
    used = [False] * host.size
    inv: Dict[int, int] = {}

    def ok(v: int, w: int) -> bool:
        if gh.degree(w) < gp.degree(v):
            return False
        for name, t in ready[v]:
            if tuple(assign[u] for u in t) not in host.relations[name]:
                return False
        for name, t in incident[w]:
            if all(u in inv or u == w for u in t):
                pre = tuple(inv.get(u, v) for u in t)
                if pre not in pattern.relations[name]:
                    return False
        return True

    def rec(v: int) -> Iterator[Tuple[int, ...]]:
        if v == m:
            yield tuple(assign)
            return
        candidates = (anchor[v],) if v in anchor else range(host.size)
        for w in candidates:
            if used[w]:
                continue
            assign[v] = w
            inv[w] = v
            if ok(v, w):
                used[w] = True
                yield from rec(v + 1)
                used[w] = False
            del inv[w]
            assign[v] = -1

    yield from rec(0)


def find_embeddings(
    pattern: Structure,
    host: Structure,
    limit: Optional[int] = None,
    anchor: Optional[Dict[int, int]] = None,
) -> List[Embedding]:
    """All induced embeddings, lexicographically ordered; ``limit`` truncates."""
    out = []
    for mapping in iter_embeddings(pattern, host, anchor):
        out.append(Embedding(pattern, host, mapping))
        if limit is not None and len(out) >= limit:
            break
    return out


def is_isomorphic(a: Structure, b: Structure) -> bool:
    if a.vocabulary != b.vocabulary or a.size != b.size:
        return False
    for name in a.vocabulary.names:
        if len(a.relations[name]) != len(b.relations[name]):
            return False
    ga, gb = gaifman(a), gaifman(b)
    if sorted(ga.degree(v) for v in range(a.size)) != sorted(
        gb.degree(v) for v in range(b.size)
    ):
        return False
    for _ in iter_embeddings(a, b):
        return True
    return False


def is_closed(host: Structure, mask: SubsetMask) -> bool:
    """True iff mask is a union of Gaifman components of host (empty counts)."""
    if mask.parent_size != host.size:
        raise ValidationError("mask does not match host size")
    for comp in components(host):
        inter = comp.members & mask.members
        if inter and inter != comp.members:
            return False
    return True


def are_disjoint(host: Structure, m1: SubsetMask, m2: SubsetMask) -> bool:
    """True iff the two subsets are at Gaifman distance >= 2 in host."""
    if m1.parent_size != host.size or m2.parent_size != host.size:
        raise ValidationError("mask does not match host size")
    if m1.members & m2.members:
        return False
    if not m1.members or not m2.members:
        return True
    g = gaifman(host)
    for u in m1.members:
        if g.adj[u] & m2.members:
            return False
    return True


def has_closed_copy(host: Structure, pattern: Structure) -> Optional[Embedding]:
    """Lexicographically least embedding of pattern whose image is closed in host."""
    for mapping in iter_embeddings(pattern, host):
        emb = Embedding(pattern, host, mapping)
        if is_closed(host, emb.image_mask()):
            return emb
    return None


def find_disjoint_copy(host: Structure, emb: Embedding) -> Optional[Embedding]:
    """Lexicographically least copy of emb.pattern disjoint from emb's image."""
    if emb.host is not host and emb.host != host:
        raise ValidationError("embedding does not live in this host")
    base = emb.image_mask()
    for mapping in iter_embeddings(emb.pattern, host):
        cand = Embedding(emb.pattern, host, mapping)
        if are_disjoint(host, cand.image_mask(), base):
            return cand
    return None


# --- Ehrenfeucht-Fraisse games -------------------------------------------------


def _extension_ok(
    a: Structure, b: Structure, fwd: Dict[int, int], x: int, y: int
) -> bool:
    # incremental partial-isomorphism check for adding x -> y
    inv = {v: k for k, v in fwd.items()}
    for name in a.vocabulary.names:
        bt = b.relations[name]
        for t in a.relations[name]:
            if x in t and all(u in fwd or u == x for u in t):
                if tuple(fwd.get(u, y) for u in t) not in bt:
                    return False
        at = a.relations[name]
        for t in bt:
            if y in t and all(u in inv or u == y for u in t):
                if tuple(inv.get(u, x) for u in t) not in at:
                    return False
    return True


def ef_equivalent(a: Structure, b: Structure, n: int) -> bool:
    """Duplicator wins the n-round Ehrenfeucht-Fraisse game on (a, b)."""
    if a.vocabulary != b.vocabulary:
        raise ValidationError("structures have different vocabularies")
    if n < 0:
        raise ValidationError("round count must be >= 0")

    memo: Dict[Tuple[Tuple[Tuple[int, int], ...], int], bool] = {}

    def win(pairs: Tuple[Tuple[int, int], ...], rounds: int) -> bool:
        if rounds == 0:
            return True
        key = (pairs, rounds)
        if key in memo:
            return memo[key]
        fwd = dict(pairs)
        bwd = {v: k for k, v in pairs}
        result = True
        for x in range(a.size):
            if x in fwd:
                # re-picking a pinned element is answered by its partner
                if not win(pairs, rounds - 1):
                    result = False
                    break
                continue
            good = False
            for y in range(b.size):
                if y in bwd:
                    continue
                if _extension_ok(a, b, fwd, x, y):
                    if win(tuple(sorted(pairs + ((x, y),))), rounds - 1):
                        good = True
                        break
            if not good:
                result = False
                break
        if result:
            for y in range(b.size):
                if y in bwd:
                    if not win(pairs, rounds - 1):
                        result = False
                        break
                    continue
                good = False
                for x in range(a.size):
                    if x in fwd:
                        continue
                    if _extension_ok(a, b, fwd, x, y):
                        if win(tuple(sorted(pairs + ((x, y),))), rounds - 1):
                            good = True
                            break
                if not good:
                    result = False
                    break
        memo[key] = result
        return result

    return win((), n)


# --- ball isomorphism property reports ----------------------------------------


def check_ball_iso_props(
    x1: Structure,
    centers: SubsetMask,
    n: int,
    alpha: PartialMap,
    x2: Structure,
) -> List[dict]:
    """Check the four distance/adjacency properties of a ball isomorphism.

    ``alpha`` must be an induced embedding of the substructure on B_n(centers)
    in x1 into x2. The report lists, per claim:

      1. adjacency is pushed forward off the boundary: an edge (u, v) of x1
         with u in B_{n-1}(centers) and v in B_n(centers) maps to an edge;
      2. distances to the center set do not grow: d(alpha(u), alpha(centers))
         <= d(u, centers) for u in B_n(centers);
      3. the image lands inside B_n(alpha(centers));
      4. when the image is exactly B_n(alpha(centers)), distances to the
         center set are preserved exactly (not applicable otherwise).

    Each entry is {"claim": k, "pass": bool | None, "witness": ...} with pass
    None meaning not applicable.
    """
    if centers.parent_size != x1.size:
        raise ValidationError("centers mask does not match structure size")
    if not centers.members:
        raise ValidationError("center set must be nonempty")
    if n < 0:
        raise ValidationError("radius must be >= 0")
    fwd = alpha.as_dict()
    dom = set(fwd)
    ball_n = ball(x1, centers, n)
    if dom != ball_n.members:
        raise ValidationError("alpha's domain must be exactly the radius-n ball")
    for y in fwd.values():
        if not 0 <= y < x2.size:
            raise ValidationError("alpha's image outside the codomain universe")
    if not is_partial_isomorphism(x1, x2, alpha):
        raise ValidationError("alpha is not an induced embedding on the ball")

    g1, g2 = gaifman(x1), gaifman(x2)
    d1 = bfs_distances(g1, centers.members)
    img_centers = sorted(fwd[c] for c in centers.members)
    d2 = bfs_distances(g2, img_centers)
    report: List[dict] = []

    # claim 1: edges from the interior push forward
    pass1, wit1 = True, None
    for u in dom:
        if d1[u] <= n - 1:
            for v in g1.adj[u]:
                if v in dom and fwd[v] not in g2.adj[fwd[u]]:
                    pass1, wit1 = False, {"edge": [u, v]}
                    break
        if not pass1:
            break
    report.append({"claim": 1, "pass": pass1, "witness": wit1})

    # claim 2: distances to the center set do not grow under alpha
    pass2, wit2 = True, None
    for u in sorted(dom):
        if d2[fwd[u]] > d1[u]:
            pass2, wit2 = False, {"element": u, "d1": d1[u], "d2": d2[fwd[u]]}
            break
    report.append({"claim": 2, "pass": pass2, "witness": wit2})

    # claim 3: the image lies inside the radius-n ball around the image centers
    pass3, wit3 = True, None
    for u in sorted(dom):
        if d2[fwd[u]] > n:
            pass3, wit3 = False, {"element": u, "d2": d2[fwd[u]]}
            break
    report.append({"claim": 3, "pass": pass3, "witness": wit3})

    # claim 4: exact distance preservation when alpha is onto the image ball
    image = set(fwd.values())
    ball2 = {v for v in range(x2.size) if d2[v] <= n}
    if image == ball2:
        pass4, wit4 = True, None
        for u in sorted(dom):
            if d2[fwd[u]] != d1[u]:
                pass4, wit4 = False, {"element": u, "d1": d1[u], "d2": d2[fwd[u]]}
                break
        report.append({"claim": 4, "pass": pass4, "witness": wit4})
    else:
        report.append({"claim": 4, "pass": None, "witness": "not applicable"})
    return report
