"""
Conditioning quantities of a (lambda, mu) pair and the radius of the optimization domain.

Every irrational quantity here is the square root of an exact rational, so the record
keeps the exact squares and derives certified roots from them. Comparisons against the
a-priori floors are done on the squares, exactly.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from ..base.errors import BoundaryInstanceError, PreconditionError
from ..certarith.certified import CertifiedValue, Rational, as_fraction, sqrt_bounds
from ..certarith.series import log_approx
from ..domain.partition import (
    Instance,
    _as_partition,
    _as_weight,
    centroid_slacks,
    gt_volume,
    majorization_slacks,
    majorizes,
)

SQRT_BITS = 96
# Absolute constant of the domain radius.
RADIUS_CONSTANT = 64
_LOG_SLACK = Fraction(1, 1 << 20)


def _root(square: Fraction, bits: int = SQRT_BITS) -> CertifiedValue:
    return CertifiedValue.from_bounds(*sqrt_bounds(square, bits))


@dataclass(frozen=True)
class ConditioningRecord:
    """
    Conditioning of a normalized instance.

    Parameters:
    - n (int): Number of parts.
    - lambda_gap (Fraction): Smallest gap between consecutive parts of lambda.
    - lambda1 (Fraction): Largest part of lambda.
    - tau (Fraction): Dilation margin of mu inside the permutohedron, in [0, 1].
    - d_mu (CertifiedValue): Distance from mu to the nearest facet hyperplane.
    - r0 (CertifiedValue): In-hyperplane inradius of the permutohedron at its centroid.
    - r (Fraction): tau * lambda_gap / 4.
    - delta_prime (CertifiedValue): r / (4 n^(3/2)).
    - epsilon (CertifiedValue): Composite condition number.
    - epsilon_squared (Fraction): Exact square of epsilon.
    - domain_radius (Optional[CertifiedValue]): Radius R of the optimization ball; None when epsilon = 0.
    - floors (Dict[str, bool]): Which a-priori lower bounds were verified on this record.
    """

    n: int
    lambda_gap: Fraction
    lambda1: Fraction
    tau: Fraction
    d_mu: CertifiedValue
    r0: CertifiedValue
    r: Fraction
    delta_prime: CertifiedValue
    epsilon: CertifiedValue
    epsilon_squared: Fraction
    domain_radius: Optional[CertifiedValue] = None
    floors: Dict[str, bool] = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return (self.n - 1) * (self.n - 2) // 2

    @property
    def is_boundary(self) -> bool:
        return self.epsilon_squared == 0


def _check_inside(lam, mu):
    lam, mu = _as_partition(lam), _as_weight(mu)
    if not majorizes(lam, mu):
        raise PreconditionError("mu lies outside the permutohedron of lambda")
    return lam, mu


def compute_tau(lam, mu) -> Fraction:
    """
    tau = min(1, min_k s_k / c_k): dilating mu away from the centroid by 1/(1 - t) keeps
    the sorted order, so each prefix constraint is linear in the dilation.
    """
    lam, mu = _check_inside(lam, mu)
    tau = Fraction(1)
    for s, c in zip(majorization_slacks(lam, mu), centroid_slacks(lam)):
        if c > 0:
            tau = min(tau, s / c)
    return tau


def r0_squared(lam) -> Fraction:
    lam = _as_partition(lam)
    n = lam.n
    return min(c * c * Fraction(n, k * (n - k)) for k, c in enumerate(centroid_slacks(lam), start=1))


def compute_r0(lam) -> CertifiedValue:
    """r0 = min_k c_k * sqrt(n / (k (n - k)))."""
    return _root(r0_squared(lam))


def d_mu_squared(lam, mu) -> Fraction:
    lam, mu = _check_inside(lam, mu)
    return min(s * s / k for k, s in enumerate(majorization_slacks(lam, mu), start=1))


def compute_d_mu(lam, mu) -> CertifiedValue:
    """Distance from mu to the closest hyperplane sum_{i in S} x_i = P_|S|(lambda)."""
    return _root(d_mu_squared(lam, mu))


def epsilon_squared(lam, mu, tau: Optional[Rational] = None) -> Fraction:
    """
    eps^2 = tau^2 * min(min_k c_k^2 / (k (n - k)), (lambda_gap / (16 n^2))^2), which is
    ((tau / sqrt(n)) * min(r0, lambda_gap / (16 n^(3/2))))^2.
    """
    lam = _as_partition(lam)
    tau = compute_tau(lam, mu) if tau is None else as_fraction(tau)
    n = lam.n
    facet = min(c * c / (k * (n - k)) for k, c in enumerate(centroid_slacks(lam), start=1))
    gap_term = lam.lambda_gap / (16 * n * n)
    return tau * tau * min(facet, gap_term * gap_term)


def compute_epsilon(lam, mu, tau: Optional[Rational] = None) -> CertifiedValue:
    square = epsilon_squared(lam, mu, tau)
    return CertifiedValue.exact(0) if square == 0 else _root(square)


def compute_domain_radius(lam, epsilon: CertifiedValue) -> CertifiedValue:
    """
    R = (1/eps) * max(sqrt(n) * max(0, log vol pGT(lambda)), 64 n^3 max(1, log(1/eps))),
    bracketed with eps rounded down for the upper end.

    Raises:
    - BoundaryInstanceError: epsilon = 0.
    """
    lam = _as_partition(lam)
    n = lam.n
    eps_lo, eps_hi = epsilon.bounds()
    if eps_lo <= 0:
        raise BoundaryInstanceError("epsilon = 0: mu lies on the boundary and the optimization domain is unbounded")
    log_volume = log_approx(gt_volume(lam), _LOG_SLACK)
    sqrt_n_lo, sqrt_n_hi = sqrt_bounds(n, SQRT_BITS)
    volume_lo = sqrt_n_lo * max(Fraction(0), log_volume - _LOG_SLACK)
    volume_hi = sqrt_n_hi * max(Fraction(0), log_volume + _LOG_SLACK)
    cube = RADIUS_CONSTANT * n ** 3
    coercive_lo = cube * max(Fraction(1), log_approx(1 / eps_hi, _LOG_SLACK) - _LOG_SLACK)
    coercive_hi = cube * max(Fraction(1), log_approx(1 / eps_lo, _LOG_SLACK) + _LOG_SLACK)
    return CertifiedValue.from_bounds(max(volume_lo, coercive_lo) / eps_hi, max(volume_hi, coercive_hi) / eps_lo)


def check_floors(lam, mu, tau: Fraction, eps_sq: Fraction, original_lam=None, original_mu=None) -> Dict[str, bool]:
    """
    Exact checks of the a-priori floors:
    - r0 >= lambda_gap * sqrt(n - 1) / 2,
    - tau >= d_mu / (lambda_1 sqrt(n)) (for lambda_n >= 0),
    - eps >= lambda_gap / (16 lambda_1 n^3) (integral lambda, mu with mu strictly inside).

    The epsilon floor is stated for the input: lambda_1 is taken from `original_lam` when it
    is given, which must be integral with lambda_n >= 0 (then the normalization is a pure shift).
    """
    lam, mu = _as_partition(lam), _as_weight(mu)
    n, gap, lambda1 = lam.n, lam.lambda_gap, lam.parts[0]
    floors = {"r0": r0_squared(lam) >= gap * gap * (n - 1) / 4}
    if lam.parts[-1] >= 0:
        floors["tau"] = tau * tau * lambda1 * lambda1 * n >= d_mu_squared(lam, mu)
    reference_lam = lam if original_lam is None else _as_partition(original_lam)
    reference_mu = mu if original_mu is None else _as_weight(original_mu)
    if reference_lam.is_integral and reference_mu.is_integral and reference_lam.parts[-1] >= 0 and tau > 0:
        floor = gap / (16 * reference_lam.parts[0] * n ** 3)
        floors["epsilon"] = eps_sq >= floor * floor
    return floors


def condition(instance: Instance) -> ConditioningRecord:
    """
    Build the conditioning record of a normalized instance.

    Parameters:
    - instance (Instance): The normalized (lambda, mu) pair.

    Returns:
    - ConditioningRecord: All conditioning quantities; domain_radius is None when epsilon = 0.
    """
    lam, mu, n = instance.lam, instance.mu, instance.n
    tau = compute_tau(lam, mu)
    gap = lam.lambda_gap
    r = tau * gap / 4
    eps_sq = epsilon_squared(lam, mu, tau)
    epsilon = CertifiedValue.exact(0) if eps_sq == 0 else _root(eps_sq)
    radius = None if eps_sq == 0 else compute_domain_radius(lam, epsilon)
    return ConditioningRecord(
        n=n,
        lambda_gap=gap,
        lambda1=lam.parts[0],
        tau=tau,
        d_mu=compute_d_mu(lam, mu),
        r0=compute_r0(lam),
        r=r,
        delta_prime=_root(r * r / (16 * n ** 3)) if r > 0 else CertifiedValue.exact(0),
        epsilon=epsilon,
        epsilon_squared=eps_sq,
        domain_radius=radius,
        floors=check_floors(lam, mu, tau, eps_sq, instance.original_lam, instance.original_mu),
    )


def perturbation_floor(record: ConditioningRecord, delta: Rational) -> CertifiedValue:
    """
    Lower bound (1 - 2 delta sqrt(n - 1) / r)^d on V(lambda, mu') / V(lambda, mu) for
    ||mu - mu'|| < delta, with d = (n - 1)(n - 2)/2.

    Raises:
    - PreconditionError: delta outside (0, r / (2 sqrt(n - 1))) or n < 3.
    """
    delta = as_fraction(delta)
    n, r = record.n, record.r
    if n < 3:
        raise PreconditionError("perturbation_floor needs n >= 3")
    if delta <= 0 or 4 * delta * delta * (n - 1) >= r * r:
        raise PreconditionError(f"delta = {delta} must lie in (0, r / (2 sqrt(n - 1))) with r = {r}")
    root_lo, root_hi = sqrt_bounds(n - 1, SQRT_BITS)
    low = max(Fraction(0), 1 - 2 * delta * root_hi / r)
    high = 1 - 2 * delta * root_lo / r
    return CertifiedValue.from_bounds(low ** record.dim, high ** record.dim)
