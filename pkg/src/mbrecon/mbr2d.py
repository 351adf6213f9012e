"""Two-dimensional reconstruction, in a sound form and a defective one.

The sound path (``poly_system_2d`` / ``fit2d``) orthonormalizes the bivariate
monomials in graded order against the empirical measure by triangular
factorization of the moment Gram matrix

    G[(i,j), (h,k)] = M[(i-j)+(h-k), j+k]

(the product of the two monomials is again a monomial, so every Gram entry
is itself a moment).  Coefficients of the two component maps then follow by
projection onto the functional moments, exactly as in one dimension.

The legacy path (``poly_system_2d_legacy``) preserves a historical recursive
formulation of the same construction that is defective above linear order:
its projection coefficients take their moment offsets from each projected
row's own index pair instead of from the target monomial (the constant row
keeps the target pair), and the recursion for carrying coefficient tables
forward has an ambiguous index on one eta reference.  On strongly non-product
measures the defect drives the squared norm at index (2, 0) negative, which
:class:`NegativeNorm` reports rather than letting a complex square root
through.  ``n20_closed_form`` evaluates the matching hand expansion of
N[2,0] straight from raw moments; ``diagnose2d`` tabulates both paths side
by side.

Basis indices are graded: total degree ``i`` ascending, then the power ``j``
of the second coordinate ascending, so ``(i, j)`` tags the monomial
``x1**(i-j) * x2**j``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from mpmath import mpf

from ._mputil import cholesky_lower, invert_lower, workdps
from .errors import IllConditioned, NegativeNorm, PredictionDiverged, SeriesTooShort
from .generators import TimeSeries2D
from .moments import (MomentHierarchy2D, functional_moments_2d,
                      moment_hierarchy_2d)
from .orthopoly import CONDITION_THRESHOLD

PREDICTION_BOUND = 1.0e6

ETA_SUBSCRIPT_READINGS = ("h", "k", "i")
_FLOOR = sys.float_info.min


class BivarIndex(NamedTuple):
    """Graded basis index: total degree ``i``, power ``j`` of x2 (j <= i)."""

    i: int
    j: int

    @property
    def powers(self) -> Tuple[int, int]:
        return self.i - self.j, self.j


def graded_indices(n: int) -> List[BivarIndex]:
    return [BivarIndex(i, j) for i in range(n + 1) for j in range(i + 1)]


@dataclass(frozen=True)
class TraceStep:
    """Every intermediate of one legacy construction step."""

    index: BivarIndex
    a_coeffs: Dict[BivarIndex, float]
    b_coeffs: Dict[int, float]
    norm: float


@dataclass(frozen=True)
class OrthoPolySystem2D:
    """Bivariate orthonormal system over the graded monomials.

    ``coeffs[r, c]`` is the coefficient of the c-th graded monomial in the
    r-th basis polynomial (lower triangular).  ``construction_trace`` is
    populated only by the legacy recursion.
    """

    order: int
    indices: Tuple[BivarIndex, ...]
    coeffs: np.ndarray
    norms: Dict[BivarIndex, float]
    construction_trace: Tuple[TraceStep, ...] = field(default_factory=tuple)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "indices", tuple(BivarIndex(*ix) for ix in self.indices))

    def position(self, index: BivarIndex) -> int:
        return self.indices.index(BivarIndex(*index))

    def monomial_coeffs(self, index: BivarIndex) -> np.ndarray:
        """Coefficient row of one basis polynomial over the graded monomials."""
        return self.coeffs[self.position(index)]

    def eval(self, index: BivarIndex, state: Tuple[float, float]) -> float:
        mono = _monomial_vector(self.indices, state)
        return float(np.dot(self.monomial_coeffs(index), mono))


def _monomial_vector(indices, state) -> np.ndarray:
    x1, x2 = state
    return np.array([x1 ** (i - j) * x2 ** j for (i, j) in indices])


def _require_moments(m2: MomentHierarchy2D, n: int) -> None:
    if n < 0:
        raise ValueError("order must be non-negative")
    if m2.max_total_degree < 2 * n:
        raise ValueError(f"need 2-d moments through total degree {2 * n}, "
                         f"have {m2.max_total_degree}")


def poly_system_2d(m2: MomentHierarchy2D, n: int,
                   threshold: float = CONDITION_THRESHOLD) -> OrthoPolySystem2D:
    """Sound construction: factorize the graded bivariate moment Gram matrix."""
    _require_moments(m2, n)
    idx = graded_indices(n)
    d = len(idx)
    scale = max(m2[2 * (i - j), 2 * j] for (i, j) in idx)
    with workdps():
        gram = [[mpf(m2[(i - j) + (h - k), j + k]) for (h, k) in idx]
                for (i, j) in idx]

        def pivot_check(pos: int, pivot) -> None:
            if pivot <= threshold * max(scale, _FLOOR):
                ij = idx[pos]
                raise IllConditioned((ij.i, ij.j),
                                     f"factorization pivot {float(pivot):.3e}")

        low = cholesky_lower(gram, pivot_check)
        inv = invert_lower(low)
        table = np.zeros((d, d))
        for r in range(d):
            for c in range(r + 1):
                table[r, c] = float(inv[r][c])
        norms = {idx[r]: float(low[r][r] ** 2) for r in range(d)}
    return OrthoPolySystem2D(n, tuple(idx), table, norms)


def _gram_pivots(m2: MomentHierarchy2D, n: int) -> Dict[BivarIndex, float]:
    """All Gram pivots without raising; NaN once the factorization breaks."""
    idx = graded_indices(n)
    d = len(idx)
    out: Dict[BivarIndex, float] = {}
    with workdps():
        gram = [[mpf(m2[(i - j) + (h - k), j + k]) for (h, k) in idx]
                for (i, j) in idx]
        low = [[mpf(0)] * d for _ in range(d)]
        broken = False
        for r in range(d):
            if broken:
                out[idx[r]] = float("nan")
                continue
            pivot = gram[r][r] - sum(low[r][m] ** 2 for m in range(r))
            out[idx[r]] = float(pivot)
            if pivot <= 0:
                broken = True
                continue
            low[r][r] = pivot ** mpf("0.5")
            for q in range(r + 1, d):
                low[q][r] = (gram[q][r] - sum(low[q][m] * low[r][m] for m in range(r))) / low[r][r]
    return out


# ---------------------------------------------------------------------------
# Legacy recursion
# ---------------------------------------------------------------------------

def poly_system_2d_legacy(m2: MomentHierarchy2D, n: int,
                          eta_subscript: str = "k",
                          threshold: float = CONDITION_THRESHOLD) -> OrthoPolySystem2D:
    """Defective recursive construction, preserved for diagnosis.

    For each index (i, j) in graded order the projection coefficients onto
    the earlier polynomials are accumulated from the stored coefficient
    tables against the moment hierarchy.  Two behaviours distinguish it from
    the sound path:

    * moment offsets in the lower-degree (A) projections follow each
      projected row's own index pair (h, k) whenever h >= 1; only the
      constant row uses the target pair (i - j, j).  Identical at linear
      order, wrong above it; on strongly non-product data the squared norm
      at (2, 0) comes out negative.
    * the subscript of one eta reference in the coefficient carry-forward is
      ambiguous; ``eta_subscript`` selects the reading ("h", "k" or "i").
      "k" is the default; "h" gives the same results up to the first norm
      failure; "i" makes every such eta reference fall out of range and
      read as zero.  Out-of-range table references are zero throughout.

    Raises :class:`NegativeNorm` (trace attached) when a squared norm goes
    negative beyond rounding, :class:`IllConditioned` when it merely
    collapses to the rounding floor.  Every A, B and N intermediate is
    recorded in ``construction_trace``.
    """
    if eta_subscript not in ETA_SUBSCRIPT_READINGS:
        raise ValueError(f"eta_subscript must be one of {ETA_SUBSCRIPT_READINGS}")
    _require_moments(m2, n)
    idx = graded_indices(n)
    # alpha[(i,j)]: coefficients on monomials of degree < i, keyed (k2, degree);
    # eta[(i,j)]: coefficients on degree-i monomials, keyed by x2 power.
    alpha: Dict[BivarIndex, Dict[Tuple[int, int], float]] = {}
    eta: Dict[BivarIndex, Dict[int, float]] = {}
    norms: Dict[BivarIndex, float] = {}
    trace: List[TraceStep] = []

    first = BivarIndex(0, 0)
    alpha[first] = {}
    eta[first] = {0: 1.0}
    norms[first] = m2[0, 0]

    for ij in idx[1:]:
        i, j = ij
        a_proj: Dict[BivarIndex, float] = {}
        for h in range(i):
            for k in range(h + 1):
                hk = BivarIndex(h, k)
                off = (h - k, k) if h >= 1 else (i - j, j)
                acc = 0.0
                tab_a = alpha[hk]
                for l in range(h):
                    for mm in range(l + 1):
                        acc += tab_a.get((mm, l), 0.0) * m2[l - mm + off[0], mm + off[1]]
                tab_e = eta[hk]
                for mm in range(k + 1):
                    acc += tab_e.get(mm, 0.0) * m2[h - mm + off[0], mm + off[1]]
                a_proj[hk] = -acc

        b_proj: Dict[int, float] = {}
        for k in range(j):
            ik = BivarIndex(i, k)
            acc = 0.0
            tab_a = alpha[ik]
            for l in range(i):
                for mm in range(l + 1):
                    acc += tab_a.get((mm, l), 0.0) * m2[l - mm + i - j, mm + j]
            tab_e = eta[ik]
            for mm in range(k + 1):
                acc += tab_e.get(mm, 0.0) * m2[2 * i - mm - j, mm + j]
            b_proj[k] = -acc

        lead = m2[2 * (i - j), 2 * j]
        nij = lead - math.fsum(v * v for v in a_proj.values()) \
                   - math.fsum(v * v for v in b_proj.values())
        trace.append(TraceStep(ij, dict(a_proj), dict(b_proj), nij))

        tol = threshold * max(lead, _FLOOR)
        if nij < -tol:
            raise NegativeNorm(i, j, nij, trace=tuple(trace))
        if nij <= tol:
            err = IllConditioned((i, j), f"N={nij:.3e}")
            err.trace = tuple(trace)
            raise err

        sq = math.sqrt(nij)
        new_alpha: Dict[Tuple[int, int], float] = {}
        for k in range(i):
            for h in range(k + 1):
                acc = 0.0
                for r in range(k + 1, i):
                    for q in range(r + 1):
                        acc += a_proj[BivarIndex(r, q)] * alpha[BivarIndex(r, q)].get((h, k), 0.0)
                for q in range(h, k + 1):
                    sub = {"h": h, "k": k, "i": i}[eta_subscript]
                    acc += a_proj[BivarIndex(k, q)] * eta[BivarIndex(k, q)].get(sub, 0.0)
                for q in range(j):
                    acc += b_proj[q] * alpha[BivarIndex(i, q)].get((h, k), 0.0)
                new_alpha[(h, k)] = acc / sq
        new_eta: Dict[int, float] = {}
        for k in range(j):
            acc = 0.0
            for q in range(k, j):
                acc += b_proj[q] * eta[BivarIndex(i, q)].get(k, 0.0)
            new_eta[k] = acc / sq
        new_eta[j] = 1.0 / sq

        alpha[ij] = new_alpha
        eta[ij] = new_eta
        norms[ij] = nij

    # Assemble the unified monomial-coefficient table.
    d = len(idx)
    pos = {ix: p for p, ix in enumerate(idx)}
    table = np.zeros((d, d))
    for ij in idx:
        r = pos[ij]
        for (h, k), v in alpha[ij].items():
            table[r, pos[BivarIndex(k, h)]] = v
        for k, v in eta[ij].items():
            table[r, pos[BivarIndex(ij.i, k)]] = v
    return OrthoPolySystem2D(n, tuple(idx), table, norms, tuple(trace))


def n20_closed_form(m2: MomentHierarchy2D,
                    threshold: float = CONDITION_THRESHOLD) -> float:
    """Hand expansion of the (2, 0) squared norm straight from raw moments.

    Evaluates, term for term, the same defective projection values the
    legacy recursion reaches at index (2, 0), so its sign (negative on
    strongly non-product data) matches the recursion's trace entry there,
    though the magnitudes differ.  Raises :class:`IllConditioned` when the
    linear-stage norms it divides by are not safely positive.
    """
    if m2.max_total_degree < 4:
        raise ValueError("need 2-d moments through total degree 4")
    n10 = m2[2, 0] - m2[1, 0] ** 2
    if n10 <= threshold * max(m2[2, 0], _FLOOR):
        raise IllConditioned((1, 0), f"N={n10:.3e}")
    s10 = math.sqrt(n10)
    a00_10 = -m2[1, 0] / s10            # constant coefficient of the (1,0) polynomial
    eta0_10 = 1.0 / s10
    b0_11 = -a00_10 * m2[0, 1] - eta0_10 * m2[1, 1]
    n11 = m2[0, 2] - m2[0, 1] ** 2 - b0_11 ** 2
    if n11 <= threshold * max(m2[0, 2], _FLOOR):
        raise IllConditioned((1, 1), f"N={n11:.3e}")
    s11 = math.sqrt(n11)
    a00 = -m2[2, 0]
    a10 = -m2[1, 0] / s10 - m2[3, 0] / s10
    a11 = (m2[0, 1] / s10
           - (m2[0, 1] * m2[1, 0]) ** 2 / n10 ** 1.5
           + m2[0, 1] * m2[1, 1] * m2[1, 0] / n10 ** 1.5
           - m2[1, 0] * m2[0, 1] * m2[1, 1] / (n10 * s11)
           + m2[1, 1] ** 2 / (n10 * s11)
           - m2[0, 2] / s11)
    return m2[4, 0] - a00 ** 2 - a10 ** 2 - a11 ** 2


# ---------------------------------------------------------------------------
# Fitting and prediction (sound path)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReconstructedMap2D:
    """Two-component polynomial model sharing one orthonormal basis."""

    order: int
    c: np.ndarray                  # shape (2, d): coefficients per component
    basis: OrthoPolySystem2D
    training_samples: int

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.float64)
        if c.shape != (2, len(self.basis.indices)):
            raise ValueError("coefficient table must be (2, basis size)")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def eval(self, state: Tuple[float, float]) -> Tuple[float, float]:
        mono = _monomial_vector(self.basis.indices, state)
        vals = self.basis.coeffs @ mono
        f = self.c @ vals
        return float(f[0]), float(f[1])

    def predict(self, start: Tuple[float, float], steps: int) -> TimeSeries2D:
        if steps < 1:
            raise ValueError("steps must be at least 1")
        out = np.empty((steps, 2))
        state = (float(start[0]), float(start[1]))
        for t in range(steps):
            state = self.eval(state)
            if abs(state[0]) > PREDICTION_BOUND or abs(state[1]) > PREDICTION_BOUND:
                raise PredictionDiverged(out[:t].copy(), t, state)
            out[t] = state
        return TimeSeries2D(out, label="predicted")

    def to_monomial(self) -> np.ndarray:
        """Graded monomial coefficients of both components, shape (2, d)."""
        return np.asarray(self.c @ self.basis.coeffs, dtype=np.float64)

    def to_text(self) -> str:
        lines = [f"mbr2 n={self.order} N={self.training_samples}"]
        for s in (0, 1):
            for p, (i, j) in enumerate(self.basis.indices):
                lines.append(f"c{s + 1} {i} {j} {float(self.c[s, p])!r}")
        for p, (i, j) in enumerate(self.basis.indices):
            row = " ".join(repr(float(v)) for v in self.basis.coeffs[p, :p + 1])
            lines.append(f"a {i} {j} {row}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ReconstructedMap2D":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "mbr2":
            raise ValueError("not a 2-d model file")
        fields = dict(part.split("=", 1) for part in head[1:])
        n = int(fields["n"])
        samples = int(fields["N"])
        idx = graded_indices(n)
        d = len(idx)
        c = np.zeros((2, d))
        table = np.zeros((d, d))
        norms: Dict[BivarIndex, float] = {}
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] in ("c1", "c2"):
                s = int(parts[0][1]) - 1
                p = idx.index(BivarIndex(int(parts[1]), int(parts[2])))
                c[s, p] = float(parts[3])
            elif parts[0] == "a":
                p = idx.index(BivarIndex(int(parts[1]), int(parts[2])))
                vals = [float(v) for v in parts[3:]]
                table[p, :len(vals)] = vals
                norms[idx[p]] = 1.0 / vals[-1] ** 2
        basis = OrthoPolySystem2D(n, tuple(idx), table, norms)
        return cls(n, c, basis, samples)


def fit2d(series: TimeSeries2D, n: int,
          threshold: float = CONDITION_THRESHOLD) -> ReconstructedMap2D:
    """Fit both component maps at order ``n`` with the sound basis.

    As in one dimension, moments are taken over the transition source
    points so that basis and projection share one empirical measure; an
    exactly quadratic system (the planar Henon map, say) is recovered to
    rounding at n = 2.
    """
    if n < 0:
        raise ValueError("order must be non-negative")
    d = len(graded_indices(n))
    if len(series) < 2 * d:
        raise SeriesTooShort(f"order {n} needs at least {2 * d} samples")
    src = TimeSeries2D(series.values[:-1])
    m2 = moment_hierarchy_2d(src, 2 * n)
    basis = poly_system_2d(m2, n, threshold)
    gamma = functional_moments_2d(series, n)
    c = np.zeros((2, d))
    for s in (1, 2):
        g = np.array([gamma[s, i - j, j] for (i, j) in basis.indices])
        c[s - 1] = basis.coeffs @ g
    return ReconstructedMap2D(n, c, basis, len(series))


def eval2d(model: ReconstructedMap2D, state: Tuple[float, float]) -> Tuple[float, float]:
    return model.eval(state)


def predict2d(model: ReconstructedMap2D, start: Tuple[float, float],
              steps: int) -> TimeSeries2D:
    return model.predict(start, steps)


# ---------------------------------------------------------------------------
# Diagnosis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosisRow:
    index: BivarIndex
    n_legacy: Optional[float]
    n_oracle: Optional[float]
    status: str


@dataclass(frozen=True)
class Diagnosis2D:
    rows: Tuple[DiagnosisRow, ...]
    first_failure: Optional[BivarIndex]
    n20_closed: Optional[float]
    eta_subscript: str


def diagnose2d(series: TimeSeries2D, n: int,
               eta_subscript: str = "k",
               threshold: float = CONDITION_THRESHOLD) -> Diagnosis2D:
    """Run legacy and sound constructions side by side and tabulate norms.

    Failures along either path are recorded as data in the report, never
    raised.
    """
    src = TimeSeries2D(series.values[:-1]) if len(series) > 2 else series
    m2 = moment_hierarchy_2d(src, max(2 * n, 4))
    pivots = _gram_pivots(m2, n)

    legacy_norms: Dict[BivarIndex, float] = {}
    legacy_status: Dict[BivarIndex, str] = {}
    first_failure: Optional[BivarIndex] = None
    try:
        system = poly_system_2d_legacy(m2, n, eta_subscript, threshold)
        for ix, v in system.norms.items():
            legacy_norms[ix] = v
            legacy_status[ix] = "ok"
    except (NegativeNorm, IllConditioned) as err:
        if isinstance(err, NegativeNorm):
            first_failure = BivarIndex(err.i, err.j)
            fail_status = "negative-norm"
        else:
            first_failure = BivarIndex(*err.index)
            fail_status = "ill-conditioned"
        for st in getattr(err, "trace", None) or ():
            legacy_norms[st.index] = st.norm
            legacy_status[st.index] = "ok"
        legacy_status[first_failure] = fail_status
        legacy_norms.setdefault(BivarIndex(0, 0), m2[0, 0])
        legacy_status.setdefault(BivarIndex(0, 0), "ok")

    rows = []
    for ix in graded_indices(n):
        piv = pivots.get(ix)
        rows.append(DiagnosisRow(
            index=ix,
            n_legacy=legacy_norms.get(ix),
            n_oracle=None if piv is None or math.isnan(piv) else piv,
            status=legacy_status.get(ix, "not-reached"),
        ))

    try:
        closed = n20_closed_form(m2, threshold)
    except IllConditioned:
        closed = None
    return Diagnosis2D(tuple(rows), first_failure, closed, eta_subscript)
