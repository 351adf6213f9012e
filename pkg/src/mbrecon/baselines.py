"""Comparison predictors: analog method, autoregressive fit, monomial fit.

The global monomial least-squares fit doubles as the correctness oracle for
the moment-based models: both characterize the polynomial minimizing the
one-step squared error over the transitions, so their coefficients must
agree to rounding wherever both succeed.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .analysis import delay_embed
from .errors import NotEnoughNeighbors, SeriesTooShort, SingularNormalEquations
from .generators import TimeSeries, TimeSeries2D
from .mbr2d import BivarIndex, graded_indices


@dataclass(frozen=True)
class ARModel:
    """Linear autoregression; coefficients[0] weights the most recent value."""

    order: int
    coefficients: np.ndarray
    residual_variance: float

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.float64)
        if self.order < 1 or len(c) != self.order:
            raise ValueError("need one coefficient per lag, order >= 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)


@dataclass(frozen=True)
class MonomialModel:
    """Polynomial one-step predictor in the plain monomial basis.

    1-d: ``coefficients[j]`` multiplies x**j.  2-d: ``coefficients[s, p]``
    multiplies the p-th graded monomial for component s; ``indices`` lists
    the graded index pairs.
    """

    order: int
    coefficients: np.ndarray
    indices: Optional[Tuple[BivarIndex, ...]] = None

    @property
    def dim(self) -> int:
        return 1 if self.indices is None else 2

    def eval(self, state):
        if self.dim == 1:
            acc = 0.0
            for b in self.coefficients[::-1]:
                acc = acc * state + b
            return float(acc)
        x1, x2 = state
        mono = np.array([x1 ** (i - j) * x2 ** j for (i, j) in self.indices])
        f = self.coefficients @ mono
        return float(f[0]), float(f[1])


def analog_predict(train: TimeSeries, m: int, tau: int, query, s: int = 1) -> float:
    """Mean of the successors of the s nearest embedded neighbours.

    Neighbours are delay vectors of the training series whose final element
    has a successor; distance is Euclidean and ties resolve toward the
    earlier index.
    """
    if s < 1:
        raise ValueError("need at least one neighbour")
    vectors = delay_embed(train, m, tau)
    candidates = vectors[:-1]          # the last vector has no successor
    if len(candidates) < s:
        raise NotEnoughNeighbors(f"{len(candidates)} candidate(s) for s={s}")
    q = np.atleast_1d(np.asarray(query, dtype=np.float64))
    if q.shape != (m,):
        raise ValueError(f"query must have {m} component(s)")
    d2 = np.sum((candidates - q) ** 2, axis=1)
    nearest = np.argsort(d2, kind="stable")[:s]
    successors = train.values[nearest + (m - 1) * tau + 1]
    return float(np.mean(successors))


def ar_fit(series: TimeSeries, order: int) -> ARModel:
    """Least-squares autoregression over all full windows."""
    if order < 1:
        raise ValueError("order must be at least 1")
    if len(series) < 2 * order + 1:
        raise SeriesTooShort(f"order {order} needs at least {2 * order + 1} samples")
    x = series.values
    rows = len(x) - order
    design = np.column_stack([x[order - j - 1:order - j - 1 + rows]
                              for j in range(order)])
    target = x[order:]
    coeffs, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < order:
        raise SingularNormalEquations(f"design rank {rank} < order {order}")
    resid = target - design @ coeffs
    return ARModel(order, coeffs, float(np.mean(resid ** 2)))


def ar_predict(model: ARModel, history: Sequence[float], steps: int) -> TimeSeries:
    """Iterate the deterministic part of the model (noise term zero).

    ``history`` holds the last ``order`` values in chronological order.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    h = list(float(v) for v in history)
    if len(h) != model.order:
        raise ValueError(f"history must hold exactly {model.order} values")
    out = np.empty(steps)
    for t in range(steps):
        nxt = float(np.dot(model.coefficients, h[::-1]))
        out[t] = nxt
        h = h[1:] + [nxt]
    return TimeSeries(out, label="ar-predicted")


def monomial_ls_fit(series: Union[TimeSeries, TimeSeries2D], order: int) -> MonomialModel:
    """Least-squares polynomial one-step predictor over all transitions.

    Solved through an orthogonal factorization of the design matrix rather
    than explicit normal equations; the design is built on data mapped to
    [-1, 1] (Vandermonde matrices on off-center ranges lose digits fast)
    and the coefficients are transformed back afterwards.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    if isinstance(series, TimeSeries2D):
        return _monomial_ls_2d(series, order)
    if len(series) < order + 2:
        raise SeriesTooShort(f"order {order} needs at least {order + 2} samples")
    x = series.values
    src = x[:-1]
    a, b = _unit_map(src)
    design = np.vander(a * src + b, order + 1, increasing=True)
    scaled, _, rank, _ = np.linalg.lstsq(design, x[1:], rcond=None)
    if rank < order + 1:
        raise SingularNormalEquations(f"design rank {rank} < {order + 1}")
    # Compose with u = a x + b by Horner in coefficient space.
    poly = np.zeros(1)
    for cj in scaled[::-1]:
        poly = np.polynomial.polynomial.polymul(poly, np.array([b, a]))
        poly[0] += cj
    coeffs = np.zeros(order + 1)
    coeffs[:len(poly)] = poly
    return MonomialModel(order, coeffs)


def _unit_map(values: np.ndarray):
    """Affine map u = a x + b sending the value range onto [-1, 1]."""
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        raise SingularNormalEquations("all source points identical")
    a = 2.0 / (hi - lo)
    return a, -(hi + lo) / (hi - lo)


def _monomial_ls_2d(series: TimeSeries2D, order: int) -> MonomialModel:
    idx = tuple(graded_indices(order))
    if len(series) < len(idx) + 1:
        raise SeriesTooShort(f"order {order} needs at least {len(idx) + 1} samples")
    pts = series.values
    x1, x2 = pts[:-1, 0], pts[:-1, 1]
    a1, b1 = _unit_map(x1)
    a2, b2 = _unit_map(x2)
    u1, u2 = a1 * x1 + b1, a2 * x2 + b2
    design = np.column_stack([u1 ** (i - j) * u2 ** j for (i, j) in idx])
    scaled, _, rank, _ = np.linalg.lstsq(design, pts[1:], rcond=None)
    if rank < len(idx):
        raise SingularNormalEquations(f"design rank {rank} < {len(idx)}")
    transform = _binomial_transform(idx, a1, b1, a2, b2)
    return MonomialModel(order, (transform.T @ scaled).T, idx)


def _binomial_transform(idx, a1, b1, a2, b2) -> np.ndarray:
    """Matrix expanding each scaled monomial over the raw graded monomials."""
    pos = {ij: p for p, ij in enumerate(idx)}
    out = np.zeros((len(idx), len(idx)))
    for row, (i, j) in enumerate(idx):
        d1, d2 = i - j, j
        for p in range(d1 + 1):
            w1 = math.comb(d1, p) * a1 ** p * b1 ** (d1 - p)
            for q in range(d2 + 1):
                w2 = math.comb(d2, q) * a2 ** q * b2 ** (d2 - q)
                out[row, pos[BivarIndex(p + q, q)]] += w1 * w2
    return out
