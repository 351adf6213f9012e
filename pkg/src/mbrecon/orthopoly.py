"""Polynomials orthonormal to an empirical measure, built from its moments.

Two independent constructions of the same object:

``natural_poly_system``
    The iterative recursion.  Degree k is obtained by projecting x**k off
    the degrees below it: with ``beta_j = -sum_i a[j][i] * M[k+i]`` the
    unnormalized polynomial is ``x**k + sum_j beta_j * pi_j``, its squared
    norm is ``N_k = M[2k] - sum_j beta_j**2``, and dividing by sqrt(N_k)
    yields the coefficient row ``a[k]``.

``gram_oracle``
    Triangular (Cholesky) factorization of the Hankel moment matrix
    ``H[i][j] = M[i+j]``; the rows of the inverse factor are the same
    coefficients.  Used as a cross-check on the recursion, never as its
    replacement.

Both keep leading coefficients positive (``a[k][k] = 1/sqrt(N_k)``), so the
systems are identical, not merely identical up to sign.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np
from mpmath import mpf, sqrt as mp_sqrt

from ._mputil import cholesky_lower, invert_lower, workdps
from .errors import IllConditioned
from .moments import MomentHierarchy

# A degree passes only while its squared norm stays above this fraction of
# the matching even moment.  Healthy bounded-interval measures sit near
# 16^-k (about 1e-11 relative by degree 10); exact degeneracy collapses to
# accumulated rounding, below 1e-15.  1e-12 separates the two.
CONDITION_THRESHOLD = 1e-12

DEFAULT_ORDER_CAP = 12

_FLOOR = sys.float_info.min


@dataclass(frozen=True)
class OrthoPolySystem:
    """Triangular coefficient table of an orthonormal polynomial family.

    ``coeffs[k, j]`` is the coefficient of x**j in the degree-k polynomial
    (zero above the diagonal).  ``norms[k]`` is the squared norm of the
    unnormalized degree-k polynomial; ``norms[0] == 1``.
    """

    order: int
    coeffs: np.ndarray
    norms: np.ndarray
    source_moments: Optional[MomentHierarchy] = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        n = np.asarray(self.norms, dtype=np.float64)
        c.setflags(write=False)
        n.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "norms", n)

    def eval(self, k: int, x: float) -> float:
        """Value of the degree-k polynomial at x, by Horner's scheme."""
        if not 0 <= k <= self.order:
            raise IndexError(f"degree {k} outside 0..{self.order}")
        row = self.coeffs[k]
        acc = 0.0
        for j in range(k, -1, -1):
            acc = acc * x + row[j]
        return acc


def eval_poly(system: OrthoPolySystem, k: int, x: float) -> float:
    return system.eval(k, x)


def _require_order(moments: MomentHierarchy, n: int) -> None:
    if n < 0:
        raise ValueError("order must be non-negative")
    if n > DEFAULT_ORDER_CAP:
        raise ValueError(f"order {n} above the cap {DEFAULT_ORDER_CAP}; "
                         "moment matrices this deep are hopelessly conditioned")
    if moments.order < 2 * n:
        raise ValueError(f"need moments through order {2 * n}, have {moments.order}")


def _natural_tables(moment_values, n: int, threshold: float):
    """Extended-precision coefficient rows and norms of the recursion.

    Shared with the fitting code, which must project against the
    full-precision rows: rounding the table first and projecting second
    loses a factor 1/N_k twice on nearly degenerate measures.
    ``moment_values`` may hold floats or mpf values.  Callers hold a
    ``workdps`` context.
    """
    m = [mpf(v) for v in moment_values]
    a = [[mpf(0)] * (n + 1) for _ in range(n + 1)]
    a[0][0] = mpf(1)
    norms = [mpf(1)]
    for k in range(1, n + 1):
        beta = [-sum(a[j][i] * m[k + i] for i in range(j + 1)) for j in range(k)]
        nk = m[2 * k] - sum(b * b for b in beta)
        if nk <= threshold * max(m[2 * k], mpf(_FLOOR)):
            raise IllConditioned(k, f"N={float(nk):.3e} against M_{2*k}={float(m[2*k]):.3e}")
        s = mp_sqrt(nk)
        for i in range(k):
            a[k][i] = sum(beta[h] * a[h][i] for h in range(i, k)) / s
        a[k][k] = 1 / s
        norms.append(nk)
    return a, norms


def _float_system(a, norms, moments: MomentHierarchy, n: int) -> OrthoPolySystem:
    table = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        for j in range(k + 1):
            table[k, j] = float(a[k][j])
    return OrthoPolySystem(n, table, np.array([float(v) for v in norms]),
                           source_moments=moments)


def natural_poly_system(moments: MomentHierarchy, n: int,
                        threshold: float = CONDITION_THRESHOLD) -> OrthoPolySystem:
    """Build the orthonormal system of order ``n`` by the moment recursion.

    Raises :class:`IllConditioned` with the failing degree when the measure
    cannot support that degree at this sample size (``N_k`` at or below
    ``threshold * max(M_2k, tiny)``).
    """
    _require_order(moments, n)
    with workdps():
        a, norms = _natural_tables(moments.values, n, threshold)
        return _float_system(a, norms, moments, n)


def gram_oracle(moments: MomentHierarchy, n: int,
                threshold: float = CONDITION_THRESHOLD) -> OrthoPolySystem:
    """Same system via triangular factorization of the Hankel moment matrix."""
    _require_order(moments, n)
    with workdps():
        hank = [[mpf(moments[i + j]) for j in range(n + 1)] for i in range(n + 1)]
        scale = max(moments[2 * k] for k in range(n + 1))

        def pivot_check(k: int, pivot) -> None:
            if pivot <= threshold * max(scale, _FLOOR):
                raise IllConditioned(k, f"factorization pivot {float(pivot):.3e}")

        low = cholesky_lower(hank, pivot_check)
        inv = invert_lower(low)
        table = np.zeros((n + 1, n + 1))
        for k in range(n + 1):
            for j in range(k + 1):
                table[k, j] = float(inv[k][j])
        norms = np.array([float(low[k][k] ** 2) for k in range(n + 1)])
        return OrthoPolySystem(n, table, norms, source_moments=moments)
