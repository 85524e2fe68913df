"""Finite-rank diagonal Wiener chaos: construction, sampling, and moments.

A chaos variable of order q with diagonal kernel along orthonormal directions
e_1, ..., e_m and coefficients alpha_i has the exact representation

    F = sum_i alpha_i * H_q(N_i),      N_i iid standard normal,

where H_q is the probabilists' Hermite polynomial.  This makes F samplable
without discretization bias and gives closed-form moments for q = 2:
writing kappa_2 = 2 * sum alpha_i^2 and kappa_4 = 48 * sum alpha_i^4
(cumulants of the weighted sum of centered chi-squares),

    Var F  = kappa_2,          E F^4 = 3 * kappa_2^2 + kappa_4.

For q >= 3 the fourth moment is estimated by Monte Carlo with a reported
standard error.  The fourth-moment discrepancy

    d = sqrt((q - 1) / (3 q) * (E F^4 - 3))

upper-bounds the Stein discrepancy of a variance-one chaos and is the
multiplier used by the bound engine.  The rank-one q = 2 case
F = (N^2 - 1)/sqrt(2) additionally has an exact CDF, used as the closed-form
oracle throughout the test and certification suites.

Batch sampling runs on independently seeded substreams per fixed-size chunk
and reduces in chunk order, so results do not depend on worker scheduling;
everything else is pure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .gaussian import normal_cdf, normal_tail
from .sampling import map_chunks

__all__ = [
    "DiagonalChaosSpec",
    "ChaosMoments",
    "hermite",
    "variance",
    "normalize",
    "sample",
    "sample_batch",
    "fourth_moment",
    "fourth_moment_mc",
    "stein_discrepancy_upper",
    "chaos_moments",
    "exact_cdf_q2_rank1",
    "exact_abs_tail_q2_rank1",
    "calibrate_major_constant",
]

SAMPLE_CHUNK = 1 << 18  # fixed chunk size of the parallel sampling layout


@dataclass(frozen=True)
class DiagonalChaosSpec:
    """Order q >= 2 and coefficients against orthonormal directions."""

    q: int
    alphas: tuple[float, ...]

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise ValueError(f"chaos order q must be an integer >= 2, got {self.q}")
        object.__setattr__(self, "q", int(self.q))
        alphas = tuple(float(a) for a in self.alphas)
        if len(alphas) == 0:
            raise ValueError("alphas must be nonempty")
        if not all(math.isfinite(a) for a in alphas):
            raise ValueError(f"alphas must be finite, got {alphas}")
        if all(a == 0.0 for a in alphas):
            raise ValueError("at least one alpha must be nonzero")
        object.__setattr__(self, "alphas", alphas)


@dataclass(frozen=True)
class ChaosMoments:
    """Variance of the spec and moments of its variance-one normalization."""

    variance: float
    fourth_moment: float
    fourth_moment_se: float
    discrepancy_upper: float


def hermite(q: int, x):
    """Probabilists' Hermite polynomial H_q via the three-term recurrence."""
    if int(q) != q or q < 0:
        raise ValueError(f"hermite order must be an integer >= 0, got {q}")
    xa = np.asarray(x, dtype=float)
    h_prev = np.ones_like(xa)
    if q == 0:
        return float(h_prev) if xa.ndim == 0 else h_prev
    h = xa.copy()
    for k in range(1, q):
        h, h_prev = xa * h - k * h_prev, h
    return float(h) if xa.ndim == 0 else h


def variance(spec: DiagonalChaosSpec) -> float:
    """Exact variance q! * sum alpha_i^2 (Wiener-Ito isometry)."""
    return math.factorial(spec.q) * float(sum(a * a for a in spec.alphas))


def normalize(spec: DiagonalChaosSpec) -> DiagonalChaosSpec:
    """Rescale the coefficients so the variance is exactly one."""
    scale = 1.0 / math.sqrt(variance(spec))
    return DiagonalChaosSpec(q=spec.q, alphas=tuple(a * scale for a in spec.alphas))


def _is_normalized(spec: DiagonalChaosSpec, tol: float = 1e-12) -> bool:
    return abs(variance(spec) - 1.0) <= tol


def _require_normalized(spec: DiagonalChaosSpec):
    if not _is_normalized(spec):
        raise ValueError(
            f"spec must have variance one (got {variance(spec)!r}); call normalize() first"
        )


def sample(spec: DiagonalChaosSpec, rng: np.random.Generator) -> float:
    """One realization; consumes exactly len(alphas) standard normals."""
    w = rng.standard_normal(len(spec.alphas))
    return float(np.dot(hermite(spec.q, w), spec.alphas))


def _sample_chunk(rng: np.random.Generator, count: int, q: int, alphas: tuple) -> np.ndarray:
    w = rng.standard_normal((count, len(alphas)))
    return hermite(q, w) @ np.asarray(alphas)


def sample_batch(
    spec: DiagonalChaosSpec,
    n: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = SAMPLE_CHUNK,
) -> np.ndarray:
    """n realizations on the fixed substream layout (worker-count invariant)."""
    return map_chunks(_sample_chunk, (spec.q, spec.alphas), seed, n, chunk_size, workers)


def fourth_moment(
    spec: DiagonalChaosSpec,
    rng: np.random.Generator | None = None,
    n_samples: int = 200_000,
) -> tuple[float, float]:
    """E F^4 of the variance-one spec, with its standard error.

    q = 2 uses the exact cumulant formula (standard error 0); q >= 3 falls
    back to Monte Carlo and needs an rng.
    """
    _require_normalized(spec)
    if spec.q == 2:
        # unit variance means kappa_2 = 1, so E F^4 = 3 + kappa_4
        return 3.0 + 48.0 * float(sum(a**4 for a in spec.alphas)), 0.0
    if rng is None:
        raise ValueError(f"q={spec.q} has no closed-form fourth moment; pass an rng for Monte Carlo")
    w = rng.standard_normal((n_samples, len(spec.alphas)))
    f4 = (hermite(spec.q, w) @ np.asarray(spec.alphas)) ** 4
    return float(np.mean(f4)), float(np.std(f4, ddof=1) / math.sqrt(n_samples))


def fourth_moment_mc(spec: DiagonalChaosSpec, n_samples: int, seed: int, workers: int = 1) -> tuple[float, float]:
    """Monte Carlo E F^4 on the reproducible substream layout, for any q."""
    _require_normalized(spec)
    f4 = sample_batch(spec, n_samples, seed, workers=workers) ** 4
    return float(np.mean(f4)), float(np.std(f4, ddof=1) / math.sqrt(n_samples))


def stein_discrepancy_upper(fourth_moment_value: float, q: int) -> float:
    """sqrt((q-1)/(3q) * (E F^4 - 3)) for a variance-one chaos of order q.

    Monte Carlo noise can push the radicand below zero; it is clamped to zero
    with a warning since the true quantity is nonnegative.
    """
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    radicand = (q - 1) / (3.0 * q) * (fourth_moment_value - 3.0)
    if radicand < 0.0:
        warnings.warn(
            f"fourth moment {fourth_moment_value} below 3 (Monte Carlo noise); clamping discrepancy to 0",
            stacklevel=2,
        )
        return 0.0
    return math.sqrt(radicand)


def chaos_moments(
    spec: DiagonalChaosSpec,
    rng: np.random.Generator | None = None,
    n_samples: int = 200_000,
) -> ChaosMoments:
    """Variance plus fourth-moment data of the normalized spec."""
    var = variance(spec)
    m4, se = fourth_moment(normalize(spec), rng=rng, n_samples=n_samples)
    return ChaosMoments(
        variance=var,
        fourth_moment=m4,
        fourth_moment_se=se,
        discrepancy_upper=stein_discrepancy_upper(m4, spec.q),
    )


def exact_cdf_q2_rank1(z):
    """Exact CDF of F = (N^2 - 1)/sqrt(2): 2 Phi(sqrt(1 + sqrt(2) z)) - 1.

    F >= -1/sqrt(2) almost surely, so the CDF is 0 below that point.
    """
    za = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(za)):
        raise ValueError(f"z must be finite, got {z!r}")
    arg = 1.0 + math.sqrt(2.0) * za
    out = np.where(arg > 0.0, 2.0 * normal_cdf(np.sqrt(np.maximum(arg, 0.0))) - 1.0, 0.0)
    return float(out) if za.ndim == 0 else out


def exact_abs_tail_q2_rank1(x):
    """Exact P(|F| > x) for F = (N^2 - 1)/sqrt(2), x >= 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or not np.all(np.isfinite(xa)):
        raise ValueError(f"x must be finite and >= 0, got {x!r}")
    upper = 2.0 * normal_tail(np.sqrt(1.0 + math.sqrt(2.0) * xa))
    low_arg = 1.0 - math.sqrt(2.0) * xa
    lower = np.where(low_arg > 0.0, 2.0 * normal_cdf(np.sqrt(np.maximum(low_arg, 0.0))) - 1.0, 0.0)
    out = upper + lower
    return float(out) if xa.ndim == 0 else out


def calibrate_major_constant(samples: np.ndarray, q: int, xs) -> float:
    """Smallest c with empirical P(|F| > x) <= c^2 exp(-x^{2/q}/2) on the xs grid.

    Diagnostic only: the calibrated constant is a sample quantity on a finite
    range, not a proof of the concentration inequality.
    """
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0.0):
        raise ValueError("calibration grid must be nonnegative")
    abs_sorted = np.sort(np.abs(np.asarray(samples, dtype=float)))
    n = abs_sorted.size
    p_hat = 1.0 - np.searchsorted(abs_sorted, xs, side="right") / n
    c_sq = p_hat * np.exp(xs ** (2.0 / q) / 2.0)
    return float(np.sqrt(np.max(c_sq)))
