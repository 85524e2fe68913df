"""Non-uniform Berry-Esseen bound formulas over z-grids.

The engine evaluates

    bound(z) = (|E F| + d) * (sqrt(P(|F| > |z|/2)) + 2 e^{-z^2/4})

where d is a Stein discrepancy (either the Malliavin inner-product form or
the Skorokhod-integrand form; the arithmetic is identical and only the
provenance of d differs) and P(|F| > x) comes from a pluggable tail model:
exact CDF, Markov, chaos concentration, exponential-functional concentration,
empirical, or the constant 1.  Tail values are clamped to [0, 1]; clamping
only tightens the bound since the modeled quantity is a probability.

The chaos specialization for a variance-one multiple Wiener-Ito integral of
order q >= 2 is provided as `chaos_bound` in its displayed closed form

    sqrt((q-1)/(3q) (E F^4 - 3)) * (c_q e^{-|z|^{2/q}/2^{2+2/q}} + 2 e^{-z^2/4});

the constant c_q is required from the caller (it is only known to exist, so
curves should be read as a parametric family in c_q).  The z-independent
discrepancy d itself is the uniform baseline the non-uniform curves are
compared against.

All evaluation is pure over immutable inputs; a curve may be partitioned
across its grid arbitrarily with identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import expfun
from .chaos import stein_discrepancy_upper

__all__ = [
    "TailModel",
    "UnitTail",
    "MarkovTail",
    "MajorChaosTail",
    "ExactCdfTail",
    "EmpiricalTail",
    "ExpFunTail",
    "BoundInputs",
    "BoundRow",
    "BoundCurve",
    "tail_probability",
    "nonuniform_bound",
    "chaos_bound",
    "uniform_bound",
    "evaluate_curve",
]


class TailModel:
    """Upper bound for P(|F| > x); subclasses implement the unclamped value."""

    def raw(self, x: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class UnitTail(TailModel):
    """Constant 1 (the trivial tail bound)."""

    def raw(self, x: float) -> float:
        return 1.0


@dataclass(frozen=True)
class MarkovTail(TailModel):
    """Markov bound E|F|^p / x^p from a known absolute moment."""

    p: float
    moment_p: float

    def __post_init__(self):
        if not (self.p > 0.0 and math.isfinite(self.p)):
            raise ValueError(f"p must be > 0, got {self.p}")
        if not (self.moment_p >= 0.0 and math.isfinite(self.moment_p)):
            raise ValueError(f"moment_p must be >= 0, got {self.moment_p}")

    def raw(self, x: float) -> float:
        if x == 0.0:
            return 1.0
        return self.moment_p / x**self.p


@dataclass(frozen=True)
class MajorChaosTail(TailModel):
    """Chaos concentration c_q^2 exp(-x^{2/q}/2) for order-q, variance-one chaos."""

    q: int
    c_q: float

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise ValueError(f"q must be an integer >= 2, got {self.q}")
        if not (self.c_q > 0.0 and math.isfinite(self.c_q)):
            raise ValueError(f"c_q must be > 0, got {self.c_q}")

    def raw(self, x: float) -> float:
        return self.c_q**2 * math.exp(-(x ** (2.0 / self.q)) / 2.0)


@dataclass(frozen=True)
class ExactCdfTail(TailModel):
    """Exact two-sided tail 1 - cdf(x) + cdf(-x) of a continuous law."""

    cdf: Callable[[float], float]

    def raw(self, x: float) -> float:
        return 1.0 - float(self.cdf(x)) + float(self.cdf(-x))


@dataclass(frozen=True)
class EmpiricalTail(TailModel):
    """Plug-in tail #{|sample| > x}/n from a sample set."""

    sorted_abs: np.ndarray = field(repr=False)

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalTail":
        arr = np.asarray(samples, dtype=float)
        if arr.size == 0 or not np.all(np.isfinite(arr)):
            raise ValueError("samples must be nonempty and finite")
        return cls(sorted_abs=np.sort(np.abs(arr)))

    def raw(self, x: float) -> float:
        n = self.sorted_abs.size
        return 1.0 - np.searchsorted(self.sorted_abs, x, side="right") / n


@dataclass(frozen=True)
class ExpFunTail(TailModel):
    """Two-sided concentration bound for the standardized exponential functional."""

    params: expfun.ExpFunParams
    moments: expfun.ExpFunMoments

    def raw(self, x: float) -> float:
        return expfun.upper_tail_bound(x, self.params, self.moments) + expfun.lower_tail_bound(x)


def tail_probability(model: TailModel, x: float) -> float:
    """Evaluate a tail model at x >= 0, clamped into [0, 1]."""
    if not (math.isfinite(x) and x >= 0.0):
        raise ValueError(f"x must be finite and >= 0, got {x}")
    return min(1.0, max(0.0, float(model.raw(x))))


@dataclass(frozen=True)
class BoundInputs:
    """(|E F|, Stein discrepancy, tail model) parameterizing the bound."""

    mean_abs: float
    stein_discrepancy: float
    tail: TailModel

    def __post_init__(self):
        if not (math.isfinite(self.mean_abs) and self.mean_abs >= 0.0):
            raise ValueError(f"mean_abs must be finite and >= 0, got {self.mean_abs}")
        if not (math.isfinite(self.stein_discrepancy) and self.stein_discrepancy >= 0.0):
            raise ValueError(
                f"stein_discrepancy must be finite and >= 0, got {self.stein_discrepancy}"
            )
        if not isinstance(self.tail, TailModel):
            raise ValueError(f"tail must be a TailModel, got {type(self.tail)!r}")


@dataclass(frozen=True)
class BoundRow:
    z: float
    tail_term: float  # P(|F| > |z|/2), before the square root
    gaussian_term: float  # 2 e^{-z^2/4}
    bound: float


@dataclass(frozen=True)
class BoundCurve:
    rows: tuple[BoundRow, ...]

    @property
    def z(self) -> np.ndarray:
        return np.array([r.z for r in self.rows])

    @property
    def bounds(self) -> np.ndarray:
        return np.array([r.bound for r in self.rows])


def nonuniform_bound(inputs: BoundInputs, z: float) -> float:
    """(|E F| + d) * (sqrt(tail(|z|/2)) + 2 e^{-z^2/4}); even in z."""
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    tail = tail_probability(inputs.tail, abs(z) / 2.0)
    return (inputs.mean_abs + inputs.stein_discrepancy) * (
        math.sqrt(tail) + 2.0 * math.exp(-z * z / 4.0)
    )


def chaos_bound(q: int, fourth_moment: float, c_q: float, z: float) -> float:
    """Displayed non-uniform bound for a variance-one chaos of order q."""
    if int(q) != q or q < 2:
        raise ValueError(f"q must be an integer >= 2, got {q}")
    if not (c_q > 0.0 and math.isfinite(c_q)):
        raise ValueError(f"c_q must be > 0, got {c_q}")
    if fourth_moment < 3.0:
        raise ValueError(
            f"fourth_moment={fourth_moment} < 3 violates the fourth-moment inequality "
            "for a variance-one chaos of order >= 2"
        )
    d = stein_discrepancy_upper(fourth_moment, q)
    az = abs(z)
    return d * (
        c_q * math.exp(-(az ** (2.0 / q)) / 2.0 ** (2.0 + 2.0 / q))
        + 2.0 * math.exp(-z * z / 4.0)
    )


def uniform_bound(inputs: BoundInputs) -> float:
    """The z-independent baseline: the Stein discrepancy itself (zero-mean setting)."""
    return inputs.stein_discrepancy


def evaluate_curve(inputs: BoundInputs, grid: Sequence[float]) -> BoundCurve:
    """One BoundRow per grid point, in grid order."""
    zs = np.atleast_1d(np.asarray(grid, dtype=float))
    if zs.size == 0:
        raise ValueError("grid must be nonempty")
    rows = []
    for z in zs:
        try:
            tail = tail_probability(inputs.tail, abs(z) / 2.0)
            gauss = 2.0 * math.exp(-z * z / 4.0)
            bound = (inputs.mean_abs + inputs.stein_discrepancy) * (math.sqrt(tail) + gauss)
        except Exception as exc:
            raise ValueError(f"bound evaluation failed at z={z}: {exc}") from exc
        rows.append(BoundRow(z=float(z), tail_term=tail, gaussian_term=gauss, bound=bound))
    return BoundCurve(rows=tuple(rows))
