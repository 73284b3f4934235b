"""Random substructures of a ball and the statistics built on them.

The probability space is the set of subsets of a finite ball: each element is
kept independently with probability p. A cone pins some elements in (S) and
some out (T) and has measure p^|S| (1-p)^|T|. On top of sampling this module
offers exact and Monte Carlo estimates of the fraction of substructures
satisfying a sentence, trajectories of that fraction over growing radii, the
probability of containing a closed copy of a pattern, and the generic lower
bound on that probability coming from many disjoint windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .ambient import AmbientGenerator, ball_of, embeds_in_ambient
from .errors import BudgetError, GuardError, ValidationError
from .formulas import Formula
from .kernels import compile_eval
from .morphisms import are_disjoint, has_closed_copy, iter_embeddings
from .rng import check_prob, sample_masks
from .structures import Structure, SubsetMask, bfs_distances, gaifman, induced

Prob = Union[float, Fraction]

_EXACT_SIZE_LIMIT = 25
_MC_CONFIDENCE_LN = math.log(200.0)  # 99% two-sided Hoeffding bound


@dataclass(frozen=True)
class ConeSpec:
    """A cylinder event: everything in ``include`` kept, ``exclude`` dropped."""

    include: SubsetMask
    exclude: SubsetMask
    p: Prob

    def __post_init__(self):
        if self.include.parent_size != self.exclude.parent_size:
            raise ValidationError("include and exclude live in different universes")
        if self.include.members & self.exclude.members:
            raise ValidationError("include and exclude overlap")
        check_prob(self.p)


def cone_measure(spec: ConeSpec) -> Prob:
    """p^|include| (1-p)^|exclude|; exact Fraction when p is rational."""
    s, t = len(spec.include), len(spec.exclude)
    if isinstance(spec.p, (Fraction, int)):
        p = Fraction(spec.p)
        return p**s * (1 - p) ** t
    return float(spec.p) ** s * (1.0 - float(spec.p)) ** t


def sample_substructure(ball: Structure, p: Prob, seed: int) -> SubsetMask:
    """One random subset of the ball's universe; deterministic in (seed, element)."""
    row = sample_masks(seed, 1, ball.size, p)[0]
    return SubsetMask(ball.size, np.flatnonzero(row).tolist())


@dataclass(frozen=True)
class FractionResult:
    """Fraction of substructures of a ball satisfying a sentence."""

    satisfied: int
    total: int
    fraction: Fraction
    value: float
    mode: str  # "exact" | "monte-carlo"
    halfwidth: Optional[float] = None
    seed: Optional[int] = None

    def as_row(self, n: int) -> dict:
        return {
            "n": n,
            "total": self.total,
            "satisfied": self.satisfied,
            "fraction": str(self.fraction),
            "value": self.value,
            "halfwidth": self.halfwidth,
            "mode": self.mode,
        }


def _all_masks(size: int) -> np.ndarray:
    idx = np.arange(1 << size, dtype=np.uint64)
    if size == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    bits = (idx[:, None] >> np.arange(size, dtype=np.uint64)[None, :]) & 1
    return bits.astype(np.uint8)


def fraction_exact(
    ball: Structure, phi: Formula, impl: Optional[str] = None
) -> FractionResult:
    """Exact satisfaction fraction by enumerating all 2^size substructures."""
    if ball.size > _EXACT_SIZE_LIMIT:
        raise GuardError(
            f"exact enumeration needs 2^{ball.size} substructures "
            f"(size limit {_EXACT_SIZE_LIMIT}); use the Monte Carlo estimate"
        )
    ce = compile_eval(ball, phi)
    total = 1 << ball.size
    satisfied = 0
    chunk = 1 << min(ball.size, 16)
    masks = _all_masks(ball.size)
    for start in range(0, total, chunk):
        satisfied += ce.count(masks[start : start + chunk], impl=impl)
    fr = Fraction(satisfied, total)
    return FractionResult(satisfied, total, fr, float(fr), "exact")


def fraction_mc(
    ball: Structure,
    phi: Formula,
    samples: int,
    seed: int,
    impl: Optional[str] = None,
) -> FractionResult:
    """Monte Carlo estimate under the uniform (p = 1/2) substructure measure.

    The reported halfwidth is the two-sided 99% Hoeffding bound
    sqrt(ln(200) / (2 samples)).
    """
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    ce = compile_eval(ball, phi)
    masks = sample_masks(seed, samples, ball.size, Fraction(1, 2))
    satisfied = ce.count(masks, impl=impl)
    fr = Fraction(satisfied, samples)
    hw = math.sqrt(_MC_CONFIDENCE_LN / (2.0 * samples))
    return FractionResult(satisfied, samples, fr, float(fr), "monte-carlo", hw, seed)


@dataclass(frozen=True)
class TrajectoryResult:
    rows: Tuple[Tuple[int, FractionResult], ...]
    verdict: str  # "toward-1" | "toward-0" | "inconclusive"


def trajectory(
    g: AmbientGenerator,
    center: str,
    phi: Formula,
    n_max: int,
    mode: str,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    impl: Optional[str] = None,
) -> TrajectoryResult:
    """Satisfaction fractions on B_1(center) .. B_{n_max}(center).

    The verdict looks at the last radius: >= 0.9 reads toward-1, <= 0.1 reads
    toward-0, anything else is inconclusive.
    """
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    if mode not in ("exact", "mc"):
        raise ValidationError(f"mode must be 'exact' or 'mc', got {mode!r}")
    if mode == "mc":
        if samples is None or seed is None:
            raise ValidationError("Monte Carlo trajectories need samples and seed")
    rows = []
    for n in range(1, n_max + 1):
        patch = ball_of(g, center, n)
        if mode == "exact":
            rows.append((n, fraction_exact(patch.structure, phi, impl=impl)))
        else:
            rows.append((n, fraction_mc(patch.structure, phi, samples, seed, impl=impl)))
    last = rows[-1][1].value
    verdict = "toward-1" if last >= 0.9 else "toward-0" if last <= 0.1 else "inconclusive"
    return TrajectoryResult(tuple(rows), verdict)


@dataclass(frozen=True)
class ClosedCopyEstimate:
    estimate: float
    fraction: Fraction
    samples: int
    seed: int
    window_radius: int
    window_size: int


def closed_copy_prob(
    g: AmbientGenerator,
    pattern: Structure,
    window_radius: int,
    p: Prob,
    samples: int,
    seed: int,
) -> ClosedCopyEstimate:
    """Monte Carlo probability that a random substructure of the window around
    the base point contains a closed copy of ``pattern``.

    Only meaningful for patterns that embed in the ambient; anything else is
    rejected (its probability is identically zero at every radius).
    """
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    if window_radius < 0:
        raise ValidationError("window radius must be >= 0")
    if not embeds_in_ambient(g, pattern):
        raise ValidationError("pattern does not embed in the ambient structure")
    patch = ball_of(g, g.base_point, window_radius)
    host = patch.structure
    masks = sample_masks(seed, samples, host.size, p)
    weights = 1 << np.arange(host.size, dtype=np.uint64) if host.size else None
    hits = 0
    cache: Dict[int, bool] = {}
    for row in masks:
        key = int(row @ weights) if host.size else 0
        found = cache.get(key)
        if found is None:
            sub, _ = induced(host, SubsetMask(host.size, np.flatnonzero(row).tolist()))
            found = has_closed_copy(sub, pattern) is not None
            cache[key] = found
        hits += found
    fr = Fraction(hits, samples)
    return ClosedCopyEstimate(float(fr), fr, samples, seed, window_radius, host.size)


@dataclass(frozen=True)
class DensityReport:
    """Witness that disjoint windows force the closed-copy probability up.

    ``k`` is the size of the window (the 1-ball) around the densest pattern
    placement; ``fraction`` is the exactly counted probability that the
    restriction of a uniform random subset to some window equals that
    window's pattern copy (which makes the copy closed); ``bound`` is the
    closed form 1 - (1 - 2^-k)^m it must reach.
    """

    k: int
    m: int
    fraction: Fraction
    bound: Fraction
    ok: bool
    patch_radius: int
    windows: Tuple[Tuple[str, ...], ...]


def generic_density_check(
    g: AmbientGenerator, pattern: Structure, m: int
) -> DensityReport:
    """Place m disjoint windows around pattern copies and verify the bound.

    A window is the 1-ball around an embedded copy of the pattern, so keeping
    exactly the copy and dropping the rest of its window leaves the copy
    closed. The densest placement fixes the window size k; m pairwise
    disjoint window copies are then located inside a patch grown by iterative
    deepening. The hit probability of each window is counted exactly over its
    2^k cell assignments, and the windows are disjoint, so the union
    probability is the exact product formula; it is compared against the
    closed-form bound 1 - (1 - 2^-k)^m.
    """
    if m < 1:
        raise ValidationError("m must be >= 1")
    if pattern.size < 1:
        raise ValidationError("pattern must be nonempty")
    if not embeds_in_ambient(g, pattern):
        raise ValidationError("pattern does not embed in the ambient structure")

    start_radius = pattern.size + 4
    cap_radius = start_radius + 2 * m + 14
    radius = start_radius
    while True:
        patch = ball_of(g, g.base_point, radius)
        host = patch.structure
        hg = gaifman(host)
        depth = bfs_distances(hg, [patch.centers[0][1]])

        def one_ball(members) -> frozenset:
            out = set(members)
            for v in members:
                out.update(hg.adj[v])
            return frozenset(out)

        def interior(members, margin: int) -> bool:
            # elements this deep inside the patch have their true 1-ball here
            return all(depth[v] <= radius - margin for v in members)

        # densest placement: maximize k = |B_1(copy)| over interior embeddings
        k = 0
        base_window: Optional[frozenset] = None
        base_copy: Optional[Tuple[int, ...]] = None
        for mapping in iter_embeddings(pattern, host):
            if not interior(mapping, 2):
                continue
            w = one_ball(mapping)
            if len(w) > k:
                k, base_window, base_copy = len(w), w, mapping
        if base_window is not None:
            base_sub, base_index = induced(host, SubsetMask(host.size, base_window))
            copy_local = sorted(base_index[v] for v in base_copy)
            windows: List[SubsetMask] = []
            copies: List[frozenset] = []
            for mapping in iter_embeddings(base_sub, host):
                win = SubsetMask(host.size, mapping)
                copy = frozenset(mapping[j] for j in copy_local)
                if not interior(mapping, 1):
                    continue
                # the copy's whole 1-neighborhood must lie inside the window,
                # otherwise dropping the window does not close the copy
                if not one_ball(copy) <= win.members:
                    continue
                if all(are_disjoint(host, win, w) for w in windows):
                    windows.append(win)
                    copies.append(copy)
                    if len(windows) == m:
                        break
            if len(windows) == m:
                # exact weighted count per window: enumerate its 2^k cell
                # assignments and count those whose kept set is the copy;
                # disjoint windows make the union probability a product
                miss = Fraction(1)
                for win, copy in zip(windows, copies):
                    cells = win.sorted_members()
                    hits = 0
                    for bits in range(1 << len(cells)):
                        kept = {cells[j] for j in range(len(cells)) if bits >> j & 1}
                        hits += kept == copy
                    miss *= 1 - Fraction(hits, 1 << len(cells))
                fraction = 1 - miss
                bound = 1 - (1 - Fraction(1, 2**k)) ** m
                return DensityReport(
                    k=k,
                    m=m,
                    fraction=fraction,
                    bound=bound,
                    ok=fraction >= bound,
                    patch_radius=radius,
                    windows=tuple(
                        tuple(patch.ids[v] for v in w.sorted_members()) for w in windows
                    ),
                )
        radius += 2
        if radius > cap_radius:
            raise BudgetError(
                f"could not place {m} disjoint windows within radius {cap_radius}"
            )
