"""Empirical tails, centralised moments, and moment-transfer checks.

Moment orders are capped at 16 (2m <= 16): beyond that the folded tails of
desk-scale sample sizes dominate the estimate and the numbers stop meaning
anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MAX_MOMENT_ORDER = 16
WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class SampleSeries:
    values: np.ndarray
    seed: int
    generator_tag: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


def wilson_interval(successes: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    if n <= 0:
        raise DomainError("interval needs at least one sample")
    phat = successes / n
    denom = 1.0 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    # the exact interval always contains phat; rounding must not break that
    return max(0.0, min(centre - half, phat)), min(1.0, max(centre + half, phat))


def empirical_tail(s: SampleSeries, threshold: float) -> dict:
    """Fraction of samples strictly above the threshold, with a 95% interval."""
    n = s.values.size
    if n == 0:
        raise DomainError("empty sample series")
    count = int((s.values > threshold).sum())
    lo, hi = wilson_interval(count, n)
    return {
        "threshold": float(threshold),
        "fraction": count / n,
        "count": count,
        "n": n,
        "wilson_low": lo,
        "wilson_high": hi,
    }


def centralized_moment(s: SampleSeries, center: float, order: int) -> float:
    """E[(X - center)^order] over the samples; order must be even."""
    if order <= 0 or order % 2 != 0:
        raise DomainError(f"moment order must be a positive even integer, got {order}")
    if order > MAX_MOMENT_ORDER:
        raise DomainError(f"moment order capped at {MAX_MOMENT_ORDER}")
    if s.values.size == 0:
        raise DomainError("empty sample series")
    return float(((s.values - center) ** order).mean())


def tail_from_moment(s: SampleSeries, center: float, m: int, kappa: float) -> dict:
    """Markov-style tail estimate moment / kappa^(2m) next to the direct tail.

    Both sides are evaluated on the same empirical measure, so the bound
    column always dominates the direct column.
    """
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    moment = centralized_moment(s, center, 2 * m)
    bound = moment / kappa ** (2 * m)
    direct = float((np.abs(s.values - center) > kappa).mean())
    return {
        "markov_bound": bound,
        "empirical": direct,
        "dominates": bool(bound >= direct - 1e-15),
        "moment": moment,
        "order": 2 * m,
    }


def moment_transfer_check(c: float, a: float, mu: float, m: int,
                          samples: int = 1_000_000, seed: int = 0) -> dict:
    """Check the tail-to-moment transfer on a synthetic folded Gaussian.

    X = |mu + Z| with Z centred normal of variance 1/(2a) satisfies
    P[|X - mu| > kappa] <= 2 exp(-a kappa^2), so c >= 2 is required for the
    assumption to hold. Verified displays: E[(X-mu)^2m] <= c (m/a)^m and the
    two-regime bound on E[(X^2-mu^2)^2m] split at m = (9/64) a mu^2.
    """
    if c < 2.0:
        raise DomainError("the synthetic family realises tail constant 2; need c >= 2")
    if a <= 0 or mu < 0:
        raise DomainError("need a > 0 and mu >= 0")
    if m < 1 or 2 * m > MAX_MOMENT_ORDER:
        raise DomainError(f"m must satisfy 2 <= 2m <= {MAX_MOMENT_ORDER}")
    rng = np.random.default_rng(seed)
    x = np.abs(mu + rng.standard_normal(samples) / math.sqrt(2.0 * a))
    central = float(((x - mu) ** (2 * m)).mean())
    central_bound = c * (m / a) ** m
    sq = x * x - mu * mu
    sq_moment = float((sq ** (2 * m)).mean())
    split = (9.0 / 64.0) * a * mu * mu
    small_m_regime = m <= split
    if small_m_regime:
        sq_bound = 2.0 * c * (9.0 * m * mu * mu / a) ** m
    else:
        sq_bound = 2.0 * c * (64.0 * m * m / (a * a)) ** m
    return {
        "central_moment": central,
        "central_bound": central_bound,
        "central_ok": bool(central <= central_bound),
        "square_moment": sq_moment,
        "square_bound": sq_bound,
        "square_ok": bool(sq_moment <= sq_bound),
        "regime": "small_m" if small_m_regime else "large_m",
        "regime_split": split,
        "samples": samples,
    }


def levy_consistency(s: SampleSeries, dim: int, lipschitz: float,
                     kappas) -> list[dict]:
    """Empirical deviation tails against the unitary-group concentration bound
    2 exp(-dim kappa^2 / (4 L^2)), padded by three Wilson half-widths."""
    if lipschitz <= 0:
        raise DomainError("Lipschitz constant must be positive")
    mean = float(s.values.mean())
    n = s.values.size
    out = []
    for kappa in kappas:
        count = int((np.abs(s.values - mean) >= kappa).sum())
        lo, hi = wilson_interval(count, n)
        half = (hi - lo) / 2.0
        bound = 2.0 * math.exp(-dim * kappa * kappa / (4.0 * lipschitz * lipschitz))
        out.append({
            "kappa": float(kappa),
            "empirical": count / n,
            "bound": min(bound, 1.0),
            "halfwidth": half,
            "ok": bool(count / n <= min(bound, 1.0) + 3.0 * half),
        })
    return out
