from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from ..base.errors import InputError
from ..certarith.certified import Rational, as_fraction
from .partition import Instance, Partition, Weight, _as_partition, _as_weight

# Constraint families of the projected Kostka polytope.
ROW_SUM_TOP = "row-sum-top"          # lambda_n <= x_{n-1,n-1} <= lambda_{n-1}, written on the row sum
TOP_INTERLACE = "top-interlace"      # lambda_{j+1} <= x_{n-1,j} <= lambda_j
INTERLACE = "interlace"              # x_{i+1,j+1} <= x_{i,j} <= x_{i+1,j}
DIAGONAL_LOWER = "diagonal-lower"    # x_{i+1,i+1} <= x_{i,i}
DIAGONAL_UPPER = "diagonal-upper"    # x_{i,i} <= x_{i+1,i}


@dataclass(frozen=True)
class HalfspaceRow:
    coefficients: Tuple[Fraction, ...]
    rhs: Fraction
    source: str = ""

    def slack(self, point: Sequence[Rational]) -> Fraction:
        return self.rhs - sum((a * as_fraction(p) for a, p in zip(self.coefficients, point)), Fraction(0))


@dataclass(frozen=True)
class HalfspacePolytope:
    """
    {x in Q^dim : a . x <= b for every row (a, b)} with exact rational coefficients.
    """

    dim: int
    rows: Tuple[HalfspaceRow, ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row.coefficients) != self.dim:
                raise InputError(f"row of length {len(row.coefficients)} in a polytope of dimension {self.dim}")

    @classmethod
    def from_inequalities(cls, dim: int, rows: Sequence[Tuple[Sequence[Rational], Rational]]) -> "HalfspacePolytope":
        return cls(dim, tuple(HalfspaceRow(tuple(as_fraction(a) for a in coeffs), as_fraction(b)) for coeffs, b in rows))

    @classmethod
    def box(cls, lower: Sequence[Rational], upper: Sequence[Rational]) -> "HalfspacePolytope":
        dim = len(lower)
        rows = []
        for k in range(dim):
            unit = [0] * dim
            unit[k] = 1
            rows.append((unit, upper[k]))
            rows.append(([-u for u in unit], -as_fraction(lower[k])))
        return cls.from_inequalities(dim, rows)

    def contains(self, point: Sequence[Rational]) -> bool:
        return all(row.slack(point) >= 0 for row in self.rows)

    def sources(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for row in self.rows:
            counts[row.source] = counts.get(row.source, 0) + 1
        return counts


def ptilde_variables(n: int) -> List[Tuple[int, int]]:
    """Free coordinates x_{i,j}, 2 <= i <= n-1, 1 <= j <= i-1, in row-major order (1-based)."""
    return [(i, j) for i in range(2, n) for j in range(1, i)]


def ptilde_polytope(lam, mu) -> HalfspacePolytope:
    """
    H-representation of the projected Kostka polytope for any lambda, mu of equal length n >= 3.

    Pattern entries are affine in the free coordinates: row n is lambda, and the diagonal
    entry x_{i,i} = mu_1 + ... + mu_i - sum_{j<i} x_{i,j} carries the row-sum condition.
    Every interlacing inequality x_{i+1,j+1} <= x_{i,j} <= x_{i+1,j} becomes one row.
    """
    lam, mu = _as_partition(lam), _as_weight(mu)
    n = lam.n
    if mu.n != n:
        raise InputError(f"length mismatch: lambda has {n} parts, mu has {mu.n}")
    if n < 3:
        raise InputError("the projected Kostka polytope is defined for n >= 3")
    variables = ptilde_variables(n)
    index = {v: k for k, v in enumerate(variables)}
    dim = len(variables)
    prefix = [Fraction(0)]
    for m in mu.entries:
        prefix.append(prefix[-1] + m)

    def entry(i: int, j: int) -> Tuple[List[Fraction], Fraction]:
        coeffs = [Fraction(0)] * dim
        if i == n:
            return coeffs, lam.parts[j - 1]
        if j < i:
            coeffs[index[(i, j)]] = Fraction(1)
            return coeffs, Fraction(0)
        for jj in range(1, i):
            coeffs[index[(i, jj)]] = Fraction(-1)
        return coeffs, prefix[i]

    rows: List[HalfspaceRow] = []

    def at_most(small, large, source):
        (a, c), (b, d) = small, large
        rows.append(HalfspaceRow(tuple(x - y for x, y in zip(a, b)), d - c, source))

    for i in range(n - 1, 0, -1):
        for j in range(1, i + 1):
            if i == n - 1:
                family = ROW_SUM_TOP if j == i else TOP_INTERLACE
                lower_family = upper_family = family
            elif j == i:
                lower_family, upper_family = DIAGONAL_LOWER, DIAGONAL_UPPER
            else:
                lower_family = upper_family = INTERLACE
            at_most(entry(i + 1, j + 1), entry(i, j), lower_family)
            at_most(entry(i, j), entry(i + 1, j), upper_family)
    return HalfspacePolytope(dim, tuple(rows))


def build_ptilde(instance: Instance) -> HalfspacePolytope:
    """
    H-representation of the projected Kostka polytope of a normalized instance.

    Parameters:
    - instance (Instance): The normalized (lambda, mu) pair.

    Returns:
    - HalfspacePolytope: dim = (n-1)(n-2)/2, rows tagged with their constraint family.
    """
    return ptilde_polytope(instance.lam, instance.mu)


def pattern_from_point(lam: Partition, mu: Weight, point: Sequence[Rational]) -> List[List[Fraction]]:
    """Rebuild the full triangular pattern (row 1 first) from projected coordinates."""
    n = lam.n
    variables = ptilde_variables(n)
    values = dict(zip(variables, (as_fraction(p) for p in point)))
    pattern, prefix = [], Fraction(0)
    for i in range(1, n):
        prefix += mu.entries[i - 1]
        row = [values[(i, j)] for j in range(1, i)]
        row.append(prefix - sum(row, Fraction(0)))
        pattern.append(row)
    pattern.append(list(lam.parts))
    return pattern
