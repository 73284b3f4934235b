"""Descending-path probabilities on the k-ary tree and unary-forest counts.

Site percolation on the full k-ary tree keeps each vertex independently with
probability p. Writing p_n for the probability that no descending path of
length n starts at a fixed vertex, p_0 = q = 1-p and p_{n+1} = q + p p_n^k.
The limit is the least fixed point of f(x) = q + p x^k, and 1 - lim p_n is
the infinite-path probability, positive exactly when p > 1/k.

Unary forests are directed graphs with in- and out-degree at most 1 and
edges labeled 0/1, i.e. disjoint unions of labeled directed paths. b_n counts
them up to isomorphism (multisets of labeled paths), a_n counts them on the
labeled universe {1..n}; both satisfy geometric-type bounds that pin the
generating functions' radii of convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

import numpy as np

from .errors import GuardError, ValidationError
from .rng import check_prob, generator

Prob = Union[float, Fraction]

_ITERATION_CAP = 10_000_000


@dataclass(frozen=True)
class FixpointParams:
    """Branching parameters: arity k and retention probability p; q = 1 - p."""

    k: int
    p: Prob

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k!r}")
        check_prob(self.p)

    @property
    def q(self) -> float:
        return 1.0 - float(self.p)


def _f(params: FixpointParams, x: float) -> float:
    return params.q + float(params.p) * x**params.k


def _fprime(params: FixpointParams, x: float) -> float:
    return float(params.p) * params.k * x ** (params.k - 1)


def iterate_pn(params: FixpointParams, n: int) -> float:
    """p_n by direct iteration of p_0 = q, p_{i+1} = q + p p_i^k."""
    if n < 0:
        raise ValidationError("n must be >= 0")
    x = params.q
    for _ in range(n):
        x = _f(params, x)
    return x


@dataclass(frozen=True)
class FixpointResult:
    value: float
    iterations: int


def least_fixed_point(params: FixpointParams, tol: float = 1e-12) -> FixpointResult:
    """The least fixed point of f(x) = q + p x^k, to within tol.

    For p <= 1/k the answer is exactly 1: f(x) - x has derivative
    p k x^(k-1) - 1 <= 0 on [0, 1], so it decreases to its root at 1 and
    has no smaller root. Iterating would creep toward 1 at a sub-geometric
    rate and stall on float rounding, so that case is returned in closed
    form with zero iterations.

    Otherwise phase one iterates from 0; the iterates increase and stay
    below the least fixed point x0 (f is monotone and f(x) > x on [0, x0)),
    so the limit is x0 and never the larger root at 1. Phase two polishes by
    Newton from the last iterate: starting below x0 on this convex f, Newton
    steps stay below x0, so the polish tightens the answer without ever
    selecting a different root. The iteration phase is capped at 10^7 steps,
    relevant only when p sits barely above 1/k.
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    if float(params.p) * params.k <= 1.0:
        return FixpointResult(1.0, 0)
    x = 0.0
    stop = max(tol * tol / 2.0, 1e-9)
    iterations = 0
    while True:
        nxt = _f(params, x)
        iterations += 1
        if nxt - x <= stop:
            x = nxt
            break
        x = nxt
        if iterations >= _ITERATION_CAP:
            raise GuardError(
                f"fixed-point iteration did not settle within {_ITERATION_CAP} steps"
            )
    for _ in range(120):
        g = _f(params, x) - x
        gp = _fprime(params, x) - 1.0
        if gp == 0.0:
            break
        step = g / gp
        nxt = x - step
        if not 0.0 <= nxt <= 1.0:
            break
        iterations += 1
        if abs(nxt - x) <= 1e-16:
            x = nxt
            break
        x = nxt
    return FixpointResult(min(x, 1.0), iterations)


@dataclass(frozen=True)
class InfinitePathResult:
    prob: float
    lfp: float
    iterations: int


def infinite_path_prob(params: FixpointParams, tol: float = 1e-12) -> InfinitePathResult:
    """Probability that percolation leaves an infinite descending path."""
    r = least_fixed_point(params, tol)
    return InfinitePathResult(1.0 - r.value, r.value, r.iterations)


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    hits: int
    samples: int
    seed: int
    depth: int


def descending_path_mc(
    params: FixpointParams, depth: int, samples: int, seed: int
) -> McEstimate:
    """Monte Carlo estimate of 1 - p_depth by level-by-level percolation.

    A sample succeeds when some kept descending path of length ``depth``
    starts at the root (depth 0 asks only that the root is kept). Only the
    count of surviving path endpoints per level matters: endpoints of
    distinct kept paths at one level have disjoint child sets, so the next
    level's count is Binomial(k * count, p). Simulating that chain is
    exactly the law of expanding the surviving frontier node by node.
    """
    if depth < 0:
        raise ValidationError("depth must be >= 0")
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    p = check_prob(params.p)
    rng = generator(seed)
    alive = rng.random(samples) < p  # the root itself
    counts = alive.astype(np.int64)
    for _ in range(depth):
        counts = rng.binomial(counts * params.k, p)
    hits = int(np.count_nonzero(counts))
    return McEstimate(hits / samples, hits, samples, seed, depth)


# --- unary forest counting -----------------------------------------------------


@dataclass(frozen=True)
class ForestCount:
    n: int
    a: Optional[int] = None  # labeled count
    b: Optional[int] = None  # unlabeled count


def _unlabeled_b(n_max: int) -> List[int]:
    # Euler-product DP: multisets of labeled directed paths; a v-vertex path
    # has 2^(v-1) edge labelings, so multiply out (1 - t^v)^(-2^(v-1))
    coeff = [1] + [0] * n_max
    for v in range(1, n_max + 1):
        c_v = 1 << (v - 1)
        new = [0] * (n_max + 1)
        for i in range(n_max + 1):
            j = 0
            while j * v <= i:
                new[i] += math.comb(c_v + j - 1, j) * coeff[i - j * v]
                j += 1
        coeff = new
    return coeff


def _labeled_a(n_max: int) -> List[int]:
    # a_n = sum over the size v of the path containing label n:
    # choose its other labels, order them (v! orders give distinct paths,
    # divided by nothing since paths are directed), pick edge labels
    a = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        a[n] = sum(
            math.comb(n - 1, v - 1) * math.factorial(v) * (1 << (v - 1)) * a[n - v]
            for v in range(1, n + 1)
        )
    return a


def count_unlabeled_forests(n_max: int) -> List[ForestCount]:
    """b_n for n = 1..n_max: unary forests up to isomorphism."""
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    b = _unlabeled_b(n_max)
    return [ForestCount(n=n, b=b[n]) for n in range(1, n_max + 1)]


def count_labeled_forests(n_max: int) -> List[ForestCount]:
    """a_n for n = 1..n_max: unary forests on the labeled universe {1..n}."""
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    a = _labeled_a(n_max)
    return [ForestCount(n=n, a=a[n]) for n in range(1, n_max + 1)]


def forest_bounds(n: int) -> tuple:
    """The proved sandwich for b_n: (2^(n-1), 3^(n-1))."""
    return (1 << (n - 1), 3 ** (n - 1))


def forest_count_table(n_max: int) -> List[dict]:
    """Merged rows n, a_n, b_n plus the b-bounds check, ready for CSV."""
    a = _labeled_a(n_max)
    b = _unlabeled_b(n_max)
    rows = []
    for n in range(1, n_max + 1):
        lo, hi = forest_bounds(n)
        ok = lo <= b[n] <= hi and lo * math.factorial(n) <= a[n] <= hi * math.factorial(n)
        rows.append(
            {"n": n, "a_n": a[n], "b_n": b[n], "lower_b": lo, "upper_b": hi, "ok": ok}
        )
    return rows


@dataclass(frozen=True)
class RadiusReport:
    n_max: int
    b_ratios: List[float]  # b_{n+1}/b_n for n = 1..n_max
    a_hat_ratios: List[float]  # (a_{n+1}/(n+1)!)/(a_n/n!) for n = 1..n_max
    window_start: int
    b_in_window: bool
    a_in_window: bool


def radius_probe(n_max: int) -> RadiusReport:
    """Ratio sequences behind the radius-of-convergence bounds.

    Both b_{n+1}/b_n and the n!-normalized labeled ratios must lie in [2, 3]
    for 10 <= n <= n_max, consistent with counts sandwiched between 2^(n-1)
    and 3^(n-1) (radii between 1/3 and 1/2).
    """
    if n_max < 10:
        raise ValidationError("n_max must be >= 10")
    b = _unlabeled_b(n_max + 1)
    a = _labeled_a(n_max + 1)
    b_ratios = [b[n + 1] / b[n] for n in range(1, n_max + 1)]
    a_hat_ratios = [
        float(Fraction(a[n + 1], math.factorial(n + 1)) / Fraction(a[n], math.factorial(n)))
        for n in range(1, n_max + 1)
    ]
    window = range(10, n_max + 1)
    b_ok = all(2.0 <= b_ratios[n - 1] <= 3.0 for n in window)
    a_ok = all(2.0 <= a_hat_ratios[n - 1] <= 3.0 for n in window)
    return RadiusReport(n_max, b_ratios, a_hat_ratios, 10, b_ok, a_ok)
