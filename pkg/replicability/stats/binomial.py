"""Exact binomial tails and the ascending scans behind the FDP upper bounds."""

from __future__ import annotations

import numpy as np
from scipy.stats import binom

from replicability.errors import InvalidArgumentError


def binom_cdf(k: int, n: int, p: float) -> float:
    """Return P(Binomial(n, p) <= k) exactly (no normal approximation)."""
    if n < 0 or not 0 <= k <= n:
        raise InvalidArgumentError(f"binom_cdf requires 0 <= k <= n, got k={k}, n={n}.")
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"Success probability must lie in [0, 1], got {p}.")
    if k == n:
        return 1.0
    return float(binom.cdf(k, n, p))


def largest_accepted_size(successes: int, start: int, stop: int, p: float, confidence: float) -> int:
    """
    Return max{n in [start, stop] : P(Binomial(n, p) <= successes) >= 1 - confidence}.

    The tail is nonincreasing in n, so the answer is one below the first failing
    size of the ascending scan. Sizes with n <= successes always pass.
    """
    if not 0.0 < confidence < 1.0:
        raise InvalidArgumentError(f"confidence must lie in (0, 1), got {confidence}.")
    if stop < start:
        raise InvalidArgumentError(f"Empty scan range [{start}, {stop}].")
    sizes = np.arange(start, stop + 1)
    tails = np.where(sizes <= successes, 1.0, binom.cdf(successes, sizes, p))
    failing = np.flatnonzero(tails < 1.0 - confidence)
    if failing.size == 0:
        return int(stop)
    if failing[0] == 0:
        raise InvalidArgumentError(f"Scan start {start} already rejects {successes} successes.")
    return int(sizes[failing[0]] - 1)
