"""Deterministic sampling built on the counter-based Philox generator.

Every stochastic entry point takes an explicit integer seed and derives all
randomness from ``np.random.Generator(np.random.Philox(key=seed))``. Sample
matrices are laid out (sample, element) and drawn in one call, so the bits
behind sample i do not depend on how many samples follow it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

import numpy as np

from .errors import ValidationError

Prob = Union[float, Fraction]


def generator(seed: int) -> np.random.Generator:
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValidationError(f"seed must be an int, got {seed!r}")
    return np.random.Generator(np.random.Philox(key=seed))


def check_prob(p: Prob, *, open_interval: bool = True) -> float:
    """Validate a probability parameter and return it as a float."""
    try:
        pf = float(p)
    except (TypeError, ValueError):
        raise ValidationError(f"not a probability: {p!r}") from None
    if open_interval:
        if not 0.0 < pf < 1.0:
            raise ValidationError(f"probability must be in (0, 1), got {p}")
    elif not 0.0 <= pf <= 1.0:
        raise ValidationError(f"probability must be in [0, 1], got {p}")
    return pf


def sample_masks(seed: int, samples: int, size: int, p: Prob) -> np.ndarray:
    """Boolean (samples, size) matrix; each cell kept independently with prob p."""
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    pf = check_prob(p)
    u = generator(seed).random((samples, size))
    return u < pf
