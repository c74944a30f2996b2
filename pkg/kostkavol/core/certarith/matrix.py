"""
Exact linear algebra over the rationals.

Determinants use fraction-free (Bareiss) elimination on an integer matrix obtained by
clearing each row's denominators; rank, solve and null-space helpers use ordinary
row reduction on ``Fraction`` entries.
"""
from fractions import Fraction
from math import factorial, lcm
from typing import List, Optional, Sequence

from ..base.errors import InputError, PreconditionError
from .certified import MULTIPLICATIVE, CertifiedValue, Rational, as_fraction

RationalMatrix = Sequence[Sequence[Rational]]


def _check_square(matrix: RationalMatrix) -> int:
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise InputError("matrix must be square")
    return n


def det_integer(matrix: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    n = _check_square(matrix)
    if n == 0:
        return 1
    m = [list(row) for row in matrix]
    sign, previous = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i, row_k = m[i], m[k]
            factor = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // previous
            row_i[k] = 0
        previous = pivot
    return sign * m[n - 1][n - 1]


def det_exact(matrix: RationalMatrix) -> Fraction:
    """
    Exact determinant of a square rational matrix.

    Parameters:
    - matrix (sequence of sequences): Square matrix of ints or Fractions.

    Returns:
    - Fraction: det(matrix).
    """
    n = _check_square(matrix)
    if n == 0:
        return Fraction(1)
    scaled, scale = [], 1
    for row in matrix:
        row = [as_fraction(v) for v in row]
        d = lcm(*(v.denominator for v in row))
        scaled.append([v.numerator * (d // v.denominator) for v in row])
        scale *= d
    return Fraction(det_integer(scaled), scale)


def det_certified(matrix: RationalMatrix, entry_rel_err: Rational, tau: Rational, v: Rational) -> CertifiedValue:
    """
    Determinant of approximate entries, certified relative to the exact matrix.

    If every entry of `matrix` is within relative error `entry_rel_err` (or absolute
    error tau*entry_rel_err) of an exact matrix M whose entries are bounded by `tau`,
    and |det M| >= v > 0, then det(matrix) approximates det M within the relative
    error n! * 2n * tau**n * entry_rel_err / v.

    Returns:
    - CertifiedValue: multiplicative certificate around det_exact(matrix).
    """
    n = _check_square(matrix)
    entry_rel_err, tau, v = as_fraction(entry_rel_err), as_fraction(tau), as_fraction(v)
    if n == 0:
        return CertifiedValue(Fraction(1), Fraction(0), MULTIPLICATIVE)
    if entry_rel_err < 0 or entry_rel_err >= Fraction(1, 2 * n):
        raise PreconditionError(f"entry error {entry_rel_err} must lie in [0, 1/(2n)) for n = {n}")
    if v <= 0 or tau <= 0:
        raise PreconditionError("determinant floor v and entry bound tau must be positive")
    value = det_exact(matrix)
    error = factorial(n) * 2 * n * tau ** n * entry_rel_err / v
    if value == 0 or error >= 1:
        raise PreconditionError(
            f"determinant floor too weak to certify: det = {value}, relative error bound = {float(error):.3g}"
        )
    return CertifiedValue(value, error, MULTIPLICATIVE)


def row_reduce(matrix: Sequence[Sequence[Rational]], rhs: Optional[Sequence[Rational]] = None):
    """
    Gauss-Jordan elimination on a copy.

    Returns:
    - (rows, rhs, pivot_columns): reduced rows, transformed right-hand side (or None)
      and the list of pivot columns, in order.
    """
    m = [[as_fraction(v) for v in row] for row in matrix]
    t = None if rhs is None else [as_fraction(v) for v in rhs]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots: List[int] = []
    piv_r = 0
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            break
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c] != 0:
                break
        else:
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
            if t is not None:
                t[piv_r], t[i_row] = t[i_row], t[piv_r]
        fp = m[piv_r][piv_c]
        m[piv_r] = [v / fp for v in m[piv_r]]
        if t is not None:
            t[piv_r] /= fp
        for r in range(n_rows):
            if r == piv_r:
                continue
            fr = m[r][piv_c]
            if fr == 0:
                continue
            m[r] = [a - fr * b for a, b in zip(m[r], m[piv_r])]
            if t is not None:
                t[r] -= fr * t[piv_r]
        pivots.append(piv_c)
        piv_r += 1
    return m, t, pivots


def rank(matrix: Sequence[Sequence[Rational]]) -> int:
    if not matrix:
        return 0
    return len(row_reduce(matrix)[2])


def solve(matrix: RationalMatrix, rhs: Sequence[Rational]) -> Optional[List[Fraction]]:
    """Unique solution of a square system, or None when the matrix is singular."""
    n = _check_square(matrix)
    m, t, pivots = row_reduce(matrix, rhs)
    if len(pivots) < n:
        return None
    return [t[i] for i in range(n)]


def null_vector(matrix: Sequence[Sequence[Rational]], n_cols: int) -> Optional[List[Fraction]]:
    """A non-zero vector of a one-dimensional kernel, or None when the kernel dimension differs from 1."""
    if not matrix:
        return [Fraction(1)] if n_cols == 1 else None
    m, _, pivots = row_reduce(matrix)
    free = [c for c in range(n_cols) if c not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    vector = [Fraction(0)] * n_cols
    vector[f] = Fraction(1)
    for r, c in enumerate(pivots):
        vector[c] = -m[r][f]
    return vector
