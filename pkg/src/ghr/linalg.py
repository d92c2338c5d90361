"""Small dense determinants and semidefiniteness tests on both backends."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from . import _kernels

# relative eigenvalue floor for the real-backend PSD test
PSD_EPS = 1e-10


def bareiss_det(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Entries may be ints or Fractions. Integer matrices stay integral at every
    step; rational entries are cleared to a common denominator first.
    """
    rows = [[Fraction(x) for x in row] for row in matrix]
    n = len(rows)
    if n == 0:
        return Fraction(1)
    denom = lcm(*(x.denominator for row in rows for x in row))
    a = [[int(x * denom) for x in row] for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return Fraction(sign * a[n - 1][n - 1], denom**n)


def det(matrix, exact: bool):
    if exact:
        return bareiss_det(matrix)
    m = np.asarray(matrix, dtype=np.float64)
    if m.size == 0:
        return 1.0
    return _kernels.lu_det(m)


def psd_exact(matrix: Sequence[Sequence]) -> bool:
    """Exact positive-semidefiniteness of a symmetric rational matrix.

    Symmetric elimination: a negative pivot fails; a zero pivot requires its
    whole remaining row to vanish.
    """
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    for k in range(n):
        p = a[k][k]
        if p < 0:
            return False
        if p == 0:
            if any(a[k][j] != 0 for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for j in range(k + 1, n):
                    a[i][j] -= f * a[k][j]
    return True


def psd_real(matrix, eps: float = PSD_EPS) -> tuple[bool, bool]:
    """(is_psd, is_singular) using the relative eigenvalue threshold."""
    m = np.asarray(matrix, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        return False, False
    w = np.linalg.eigvalsh(m)
    top = max(abs(w[-1]), abs(w[0]))
    if top == 0.0:
        return True, True
    return bool(w[0] >= -eps * top), bool(w[0] <= eps * top)


def condition_number(matrix) -> float:
    m = np.asarray(matrix, dtype=np.float64)
    return float(np.linalg.cond(m))
