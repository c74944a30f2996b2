"""
Exact volumes of small rational polytopes.

Vertices come from exhaustive facet-subset intersection; the volume is the sum of the
simplices of a pulling triangulation built on the face lattice that the tight
inequalities induce.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Dict, FrozenSet, List, Sequence, Tuple

from ..base.errors import DegenerateInstanceError, InputError, ResourceLimitError
from ..base.log import GlobalLogger
from ..certarith.certified import CertifiedValue, sqrt_bounds
from ..certarith.matrix import det_exact, null_vector, rank, solve
from ..domain.partition import Instance, _as_partition, _as_weight, normalize
from ..domain.polytope import HalfspacePolytope, ptilde_polytope

Point = Tuple[Fraction, ...]
DEFAULT_DIM_CAP = 6
_SQRT_BITS = 96


@dataclass(frozen=True)
class VertexPolytope:
    dim: int
    vertices: Tuple[Point, ...]

    @property
    def affine_dim(self) -> int:
        return _affine_dim(self.vertices)


@dataclass(frozen=True)
class KostkaVolume:
    """
    Parameters:
    - tilde (Fraction): Volume of the projected Kostka polytope.
    - volume (CertifiedValue): tilde * sqrt((n-1)!), the volume of the Kostka polytope.
    - volume_squared (Fraction): Exact square of `volume`.
    - n (int): Number of parts.
    """

    tilde: Fraction
    volume: CertifiedValue
    volume_squared: Fraction
    n: int


def _affine_dim(points: Sequence[Point]) -> int:
    if not points:
        return -1
    base = points[0]
    return rank([[a - b for a, b in zip(p, base)] for p in points[1:]])


def _check_bounded(poly: HalfspacePolytope) -> None:
    d = poly.dim
    matrix = [row.coefficients for row in poly.rows]
    if rank(matrix) < d:
        raise InputError("polytope is unbounded: the constraint matrix has a non-trivial kernel")
    # Extreme rays of {A r <= 0} are one-dimensional kernels of (d-1)-subsets of rows.
    for subset in combinations(matrix, d - 1):
        ray = null_vector(list(subset), d)
        if ray is None:
            continue
        for sign in (1, -1):
            if all(sum((a * sign * r for a, r in zip(coeffs, ray)), Fraction(0)) <= 0 for coeffs in matrix):
                raise InputError(f"polytope is unbounded along {[str(sign * r) for r in ray]}")


def enumerate_vertices(poly: HalfspacePolytope) -> VertexPolytope:
    """All vertices of a bounded H-polytope, by solving every d-subset of rows and keeping feasible points."""
    d = poly.dim
    seen = set()
    for subset in combinations(poly.rows, d):
        point = solve([row.coefficients for row in subset], [row.rhs for row in subset])
        if point is None:
            continue
        point = tuple(point)
        if point not in seen and poly.contains(point):
            seen.add(point)
    return VertexPolytope(d, tuple(sorted(seen)))


class _PullingTriangulation:
    def __init__(self, poly: HalfspacePolytope, vertices: Tuple[Point, ...]):
        self.vertices = vertices
        self.tight: List[FrozenSet[int]] = [
            frozenset(k for k, v in enumerate(vertices) if row.slack(v) == 0) for row in poly.rows
        ]
        self._cache: Dict[FrozenSet[int], List[Tuple[int, ...]]] = {}

    def facets(self, face: FrozenSet[int], k: int) -> List[FrozenSet[int]]:
        found = set()
        for tight in self.tight:
            sub = face & tight
            if sub == face or len(sub) < k:
                continue
            if _affine_dim([self.vertices[i] for i in sorted(sub)]) == k - 1:
                found.add(sub)
        return sorted(found, key=sorted)

    def simplices(self, face: FrozenSet[int], k: int) -> List[Tuple[int, ...]]:
        if k == 0:
            return [tuple(face)]
        cached = self._cache.get(face)
        if cached is not None:
            return cached
        apex = min(face)
        result = []
        for facet in self.facets(face, k):
            if apex in facet:
                continue
            result.extend((apex,) + simplex for simplex in self.simplices(facet, k - 1))
        self._cache[face] = result
        return result


def exact_volume(poly: HalfspacePolytope, dim_cap: int = DEFAULT_DIM_CAP) -> Fraction:
    """
    Exact Lebesgue volume of a bounded H-polytope.

    Parameters:
    - poly (HalfspacePolytope): The polytope.
    - dim_cap (int): Largest dimension handled.

    Returns:
    - Fraction: The volume; 0 for empty or lower-dimensional polytopes.

    Raises:
    - ResourceLimitError: dim exceeds dim_cap.
    - InputError: the polytope is unbounded.
    """
    d = poly.dim
    if d > dim_cap:
        raise ResourceLimitError(
            f"exact volume in dimension {d} exceeds the cap {dim_cap}", {"dim": d, "dim_cap": dim_cap}
        )
    if d == 0:
        return Fraction(1) if poly.contains(()) else Fraction(0)
    _check_bounded(poly)
    vpoly = enumerate_vertices(poly)
    if not vpoly.vertices:
        return Fraction(0)
    if vpoly.affine_dim < d:
        return Fraction(0)
    triangulation = _PullingTriangulation(poly, vpoly.vertices)
    simplices = triangulation.simplices(frozenset(range(len(vpoly.vertices))), d)
    total = Fraction(0)
    for simplex in simplices:
        base = vpoly.vertices[simplex[0]]
        total += abs(det_exact([[a - b for a, b in zip(vpoly.vertices[i], base)] for i in simplex[1:]]))
    GlobalLogger.log(
        "exact volume",
        level="debug",
        metadata={"dim": d, "vertices": len(vpoly.vertices), "simplices": len(simplices)},
    )
    return total / factorial(d)


def exact_kostka_volume(lam, mu=None, dim_cap: int = DEFAULT_DIM_CAP) -> KostkaVolume:
    """
    Volume of the Kostka polytope of (lambda, mu), through its projection.

    An Instance may be passed as `lam`; the volume is then taken on the original,
    un-normalized pair. Repeated parts in lambda give volume 0.

    Raises:
    - InputError: n < 3 or mismatched lengths.
    - PreconditionError: lambda does not majorize mu (see `majorizes`).
    """
    if isinstance(lam, Instance):
        lam, mu = lam.original_lam, lam.original_mu
    if mu is None:
        raise InputError("exact_kostka_volume needs mu")
    lam, mu = _as_partition(lam), _as_weight(mu)
    n = lam.n
    try:
        normalize(lam, mu)
        tilde = exact_volume(ptilde_polytope(lam, mu), dim_cap)
    except DegenerateInstanceError:
        if n < 3:
            raise InputError("the projected Kostka polytope is defined for n >= 3")
        tilde = Fraction(0)
    square = tilde * tilde * factorial(n - 1)
    lo, hi = sqrt_bounds(square, _SQRT_BITS)
    return KostkaVolume(tilde=tilde, volume=CertifiedValue.from_bounds(lo, hi), volume_squared=square, n=n)

