"""Ergodic-sum estimation of moment and functional-moment hierarchies.

These sums are the only statistics the reconstruction ever reads from data:

* ``M_k``: mean of ``x**k`` over the series,
* ``Gamma_j``: mean of ``x_{t+1} * x_t**j`` over consecutive pairs,

and their bivariate counterparts ``M_ij`` (mean of ``x1**i * x2**j``) and
``Gamma_s^{(h,k)}`` (mean of the next value of component ``s`` times
``x1**h * x2**k``).

All sums use exactly-rounded accumulation (``math.fsum``).  Transition
averages divide by the number of transitions, N - 1, not by N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .errors import OverflowRisk, SeriesTooShort
from .generators import TimeSeries, TimeSeries2D

_LOG_DBL_MAX = math.log(np.finfo(np.float64).max)


def _guard_overflow(values: np.ndarray, max_power: int) -> None:
    top = float(np.max(np.abs(values))) if values.size else 0.0
    if top > 1.0 and max_power * math.log(top) > _LOG_DBL_MAX:
        raise OverflowRisk(
            f"max |x| = {top:g} raised to power {max_power} exceeds double range"
        )


def _mean(values: np.ndarray) -> float:
    return math.fsum(values.tolist()) / len(values)


def _extended_power_means(x: np.ndarray, powers: int, weights=None) -> list:
    """Means of x**k (optionally times ``weights``) carrying ~2^-64 accuracy.

    The fitting core divides by Gram pivots as small as 1e-9 of the moment
    scale, which amplifies even the half-ulp rounding of a float64 moment
    into the model's last decimals.  Sums are therefore accumulated in
    ``np.longdouble`` and handed over as exact double-double pairs.
    """
    from mpmath import mpf

    xl = x.astype(np.longdouble)
    wl = None if weights is None else weights.astype(np.longdouble)
    out = []
    p = np.ones_like(xl)
    for k in range(powers + 1):
        term = p if wl is None else wl * p
        total = np.sum(term) / len(x)
        hi = float(total)
        lo = float(total - np.longdouble(hi))
        out.append(mpf(hi) + mpf(lo))
        p = p * xl
    return out


@dataclass(frozen=True)
class MomentHierarchy:
    """Estimates of M_0..M_K; M_0 is identically 1."""

    values: np.ndarray
    sample_count: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])


@dataclass(frozen=True)
class FunctionalMoments:
    """Estimates of Gamma_0..Gamma_J over the N - 1 transitions."""

    values: np.ndarray
    sample_count: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, j: int) -> float:
        return float(self.values[j])


@dataclass(frozen=True)
class MomentHierarchy2D:
    """Estimates of M_ij for all i + j <= max_total_degree."""

    values: Dict[Tuple[int, int], float]
    sample_count: int
    max_total_degree: int

    def __getitem__(self, ij: Tuple[int, int]) -> float:
        return self.values[ij]


@dataclass(frozen=True)
class FunctionalMoments2D:
    """Estimates of Gamma_s^{(h,k)} for s in {1, 2} and h + k <= max degree."""

    values: Dict[Tuple[int, int, int], float]
    sample_count: int
    max_total_degree: int

    def __getitem__(self, shk: Tuple[int, int, int]) -> float:
        return self.values[shk]


def moment_hierarchy(series: TimeSeries, max_k: int) -> MomentHierarchy:
    if len(series) < 2:
        raise SeriesTooShort("moment estimation needs at least 2 samples")
    if max_k < 0:
        raise ValueError("max_k must be non-negative")
    return MomentHierarchy(_moments_of(series.values, max_k), len(series))


def _moments_of(x: np.ndarray, max_k: int) -> np.ndarray:
    _guard_overflow(x, max_k)
    out = np.empty(max_k + 1)
    out[0] = 1.0
    p = np.ones_like(x)
    for k in range(1, max_k + 1):
        p = p * x
        out[k] = _mean(p)
    return out


def functional_moments(series: TimeSeries, max_j: int) -> FunctionalMoments:
    if len(series) < 2:
        raise SeriesTooShort("functional moments need at least one transition")
    if max_j < 0:
        raise ValueError("max_j must be non-negative")
    x = series.values
    return FunctionalMoments(_functional_of(x[:-1], x[1:], max_j), len(series) - 1)


def _functional_of(src: np.ndarray, nxt: np.ndarray, max_j: int) -> np.ndarray:
    _guard_overflow(src, max_j + 1)
    out = np.empty(max_j + 1)
    p = np.ones_like(src)
    for j in range(max_j + 1):
        out[j] = _mean(nxt * p)
        p = p * src
    return out


def moment_hierarchy_2d(series: TimeSeries2D, max_total_degree: int) -> MomentHierarchy2D:
    if len(series) < 2:
        raise SeriesTooShort("moment estimation needs at least 2 samples")
    if max_total_degree < 0:
        raise ValueError("max_total_degree must be non-negative")
    vals = _moments2d_of(series.values, max_total_degree)
    return MomentHierarchy2D(vals, len(series), max_total_degree)


def _moments2d_of(pts: np.ndarray, max_total_degree: int) -> Dict[Tuple[int, int], float]:
    x1, x2 = pts[:, 0], pts[:, 1]
    _guard_overflow(pts, max_total_degree)
    # Powers cached once; (i, j) pairs filled in graded order.
    pow1 = [np.ones_like(x1)]
    pow2 = [np.ones_like(x2)]
    for _ in range(max_total_degree):
        pow1.append(pow1[-1] * x1)
        pow2.append(pow2[-1] * x2)
    vals: Dict[Tuple[int, int], float] = {}
    for total in range(max_total_degree + 1):
        for j in range(total + 1):
            i = total - j
            vals[(i, j)] = _mean(pow1[i] * pow2[j]) if total else 1.0
    return vals


def functional_moments_2d(series: TimeSeries2D, max_total_degree: int) -> FunctionalMoments2D:
    if len(series) < 2:
        raise SeriesTooShort("functional moments need at least one transition")
    if max_total_degree < 0:
        raise ValueError("max_total_degree must be non-negative")
    pts = series.values
    src, nxt = pts[:-1], pts[1:]
    _guard_overflow(src, max_total_degree + 1)
    x1, x2 = src[:, 0], src[:, 1]
    pow1 = [np.ones_like(x1)]
    pow2 = [np.ones_like(x2)]
    for _ in range(max_total_degree):
        pow1.append(pow1[-1] * x1)
        pow2.append(pow2[-1] * x2)
    vals: Dict[Tuple[int, int, int], float] = {}
    for s in (1, 2):
        target = nxt[:, s - 1]
        for total in range(max_total_degree + 1):
            for k in range(total + 1):
                h = total - k
                vals[(s, h, k)] = _mean(target * pow1[h] * pow2[k])
    return FunctionalMoments2D(vals, len(series) - 1, max_total_degree)
