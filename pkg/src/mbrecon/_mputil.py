"""Small extended-precision linear-algebra helpers.

The orthonormalization steps subtract quantities that agree to many leading
digits (a squared norm at degree k cancels down to roughly 16^-k of the
moment scale), so the coefficient tables are assembled in extended precision
and rounded to float64 once, at the end.  Matrices here never exceed
~15 x 15, so cost is negligible.
"""

from __future__ import annotations

from typing import Callable, List, Sequence

from mpmath import mp, mpf, sqrt as mp_sqrt

WORKING_DPS = 50


def to_mpf(value: float) -> mpf:
    return mpf(value)


def cholesky_lower(gram: Sequence[Sequence[mpf]],
                   pivot_check: Callable[[int, mpf], None]) -> List[List[mpf]]:
    """Lower-triangular factor of a symmetric matrix.

    ``pivot_check(index, pivot)`` is called with each diagonal pivot before
    its square root is taken and must raise to reject the factorization.
    """
    d = len(gram)
    low = [[mpf(0)] * d for _ in range(d)]
    for i in range(d):
        pivot = gram[i][i] - sum(low[i][m] ** 2 for m in range(i))
        pivot_check(i, pivot)
        low[i][i] = mp_sqrt(pivot)
        for r in range(i + 1, d):
            low[r][i] = (gram[r][i] - sum(low[r][m] * low[i][m] for m in range(i))) / low[i][i]
    return low


def invert_lower(low: Sequence[Sequence[mpf]]) -> List[List[mpf]]:
    """Inverse of a lower-triangular matrix by forward substitution."""
    d = len(low)
    inv = [[mpf(0)] * d for _ in range(d)]
    for i in range(d):
        inv[i][i] = 1 / low[i][i]
        for r in range(i + 1, d):
            inv[r][i] = -sum(low[r][m] * inv[m][i] for m in range(i, r)) / low[r][r]
    return inv


def workdps():
    """Context manager pinning the working precision for table construction."""
    return mp.workdps(WORKING_DPS)
