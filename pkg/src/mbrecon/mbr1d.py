"""One-dimensional reconstruction of a map from moment sums alone.

Fitting reads two hierarchies off the series: monomial moments of the
transition *source* points (every sample but the last) and functional
moments over the transitions.  The orthonormal basis is built from the
former, and the expansion coefficients come out as

    c_k = sum_j a[k][j] * Gamma_j

with no iterative optimization anywhere.  Both hierarchies deliberately
average over the same N - 1 source points: sharing one empirical measure is
what makes the fit land exactly on the least-squares solution (and recover
polynomial maps to rounding) instead of agreeing with it only to O(1/N).

Models serialize to a plain-text format::

    mbr1 n=<order> N=<training samples>
    <c_0>
    ...
    <c_n>
    <a[0][0]>
    <a[1][0]> <a[1][1]>
    ...

with round-trip decimal precision throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._mputil import workdps
from .errors import PredictionDiverged, SeriesTooShort
from .generators import TimeSeries
from .moments import (MomentHierarchy, _extended_power_means, _moments_of)
from .orthopoly import (CONDITION_THRESHOLD, OrthoPolySystem, _float_system,
                        _natural_tables, _require_order)

PREDICTION_BOUND = 1.0e6


@dataclass(frozen=True)
class TrainingMeta:
    sample_count: int
    data_min: Optional[float] = None
    data_max: Optional[float] = None


@dataclass(frozen=True)
class ReconstructedMap1D:
    """An evaluable, iterable polynomial model of the generating map."""

    order: int
    c: np.ndarray
    basis: OrthoPolySystem
    training_meta: TrainingMeta

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.float64)
        if len(c) != self.order + 1:
            raise ValueError("coefficient count must equal order + 1")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def eval(self, x: float) -> float:
        """Model value at x: sum of c_k times the basis polynomial values.

        Polynomials are global, so x outside the training range is allowed.
        """
        return float(sum(self.c[k] * self.basis.eval(k, x) for k in range(self.order + 1)))

    def predict(self, x_start: float, steps: int) -> TimeSeries:
        """Iterate the model from ``x_start`` for ``steps`` steps.

        Raises :class:`PredictionDiverged` (carrying the computed prefix)
        when an iterate's magnitude exceeds ``PREDICTION_BOUND``; iterated
        polynomials can escape to infinity.
        """
        if steps < 1:
            raise ValueError("steps must be at least 1")
        out = np.empty(steps)
        x = x_start
        for i in range(steps):
            x = self.eval(x)
            if abs(x) > PREDICTION_BOUND:
                raise PredictionDiverged(out[:i].copy(), i, x)
            out[i] = x
        return TimeSeries(out, label="predicted")

    def to_monomial(self) -> np.ndarray:
        """Expand the model into monomial coefficients b_0..b_n."""
        return np.asarray(self.c @ self.basis.coeffs, dtype=np.float64)

    def to_text(self) -> str:
        lines = [f"mbr1 n={self.order} N={self.training_meta.sample_count}"]
        lines += [repr(float(v)) for v in self.c]
        for k in range(self.order + 1):
            lines.append(" ".join(repr(float(self.basis.coeffs[k, j]))
                                  for j in range(k + 1)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ReconstructedMap1D":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "mbr1":
            raise ValueError("not a 1-d model file")
        fields = dict(part.split("=", 1) for part in head[1:])
        n = int(fields["n"])
        samples = int(fields["N"])
        c = np.array([float(v) for v in lines[1:n + 2]])
        table = np.zeros((n + 1, n + 1))
        for k in range(n + 1):
            row = [float(v) for v in lines[n + 2 + k].split()]
            table[k, :k + 1] = row
        norms = np.array([1.0] + [1.0 / table[k, k] ** 2 for k in range(1, n + 1)])
        basis = OrthoPolySystem(n, table, norms)
        return cls(n, c, basis, TrainingMeta(samples))


def fit(series: TimeSeries, n: int,
        threshold: float = CONDITION_THRESHOLD) -> ReconstructedMap1D:
    """Fit an order-``n`` model to the series.

    Raises :class:`SeriesTooShort` below ``2n + 2`` samples and propagates
    :class:`IllConditioned` from the basis construction (a degenerate
    empirical measure, e.g. constant data, fails at degree 1).
    """
    if n < 0:
        raise ValueError("order must be non-negative")
    if len(series) < 2 * n + 2:
        raise SeriesTooShort(f"order {n} needs at least {2 * n + 2} samples")
    x = series.values
    src, nxt = x[:-1], x[1:]
    moments = MomentHierarchy(_moments_of(src, 2 * n), len(src))
    _require_order(moments, n)
    with workdps():
        m_ext = _extended_power_means(src, 2 * n)
        g_ext = _extended_power_means(src, n, weights=nxt)
        rows, norms = _natural_tables(m_ext, n, threshold)
        c = np.array([float(sum(rows[k][j] * g_ext[j] for j in range(k + 1)))
                      for k in range(n + 1)])
        basis = _float_system(rows, norms, moments, n)
    meta = TrainingMeta(len(series), float(np.min(x)), float(np.max(x)))
    return ReconstructedMap1D(n, c, basis, meta)


def predict(model: ReconstructedMap1D, x_start: float, steps: int) -> TimeSeries:
    return model.predict(x_start, steps)


def to_monomial(model: ReconstructedMap1D) -> np.ndarray:
    return model.to_monomial()


def save_model(model: ReconstructedMap1D, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(model.to_text())


def load_model(path) -> ReconstructedMap1D:
    with open(path, "r", encoding="ascii") as fh:
        return ReconstructedMap1D.from_text(fh.read())
