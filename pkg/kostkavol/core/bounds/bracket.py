"""
Certified two-sided bounds on the volume V of the Kostka polytope:

    sqrt((n-1)!) e^-n / vol(pSH(lambda))  <=  V / exp(g*)  <=  sqrt((n-1)!) e^(n/2) / (b_(n-1) eps^(n-1)),

where g* is the infimum of the reduced objective, pSH(lambda) the projected permutohedron
and b_k the volume of the unit k-ball. Lower ends are rounded down, upper ends up.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Optional, Tuple

from ..base.config import RunConfig
from ..base.errors import InputError, PreconditionError
from ..certarith.certified import CertifiedValue, pi_bracket, sqrt_bounds
from ..certarith.series import exp_bounds, log_bounds
from ..conditioning.record import ConditioningRecord
from ..domain.partition import Instance, _as_partition
from ..optimization.ellipsoid import OptimizationResult

_EXP_DELTA = Fraction(1, 1 << 48)
_SQRT_BITS = 96


@dataclass(frozen=True)
class VolumeBracket:
    """
    Parameters:
    - g_star (CertifiedValue): Certified value of the reduced objective at the returned minimizer.
    - lower (Fraction): Certified lower bound on V.
    - upper (Optional[Fraction]): Certified upper bound on V; None stands for +infinity (epsilon = 0).
    - F_estimate (Optional[CertifiedValue]): The estimate F, which satisfies F >= V.
    - psh_volume (Fraction): Exact volume of pSH(lambda) for the input lambda, or an upper bound
      when psh_exact is False.
    - psh_exact (bool): Whether psh_volume is exact.
    - approximation_ratio_log (Optional[CertifiedValue]): log(upper / lower).
    - estimate_ratio_log (Optional[Fraction]): Upper bound on log(F / V).
    - ball_floor (CertifiedValue): Inscribed-ball lower bound on V, independent of the minimizer.
    - volume_factor (Fraction): beta^(-dim), already applied to the bounds on V above.
    """

    g_star: CertifiedValue
    lower: Fraction
    upper: Optional[Fraction]
    F_estimate: Optional[CertifiedValue]
    psh_volume: Fraction
    psh_exact: bool
    approximation_ratio_log: Optional[CertifiedValue]
    estimate_ratio_log: Optional[Fraction]
    ball_floor: CertifiedValue
    volume_factor: Fraction = Fraction(1)

    @property
    def is_finite(self) -> bool:
        return self.upper is not None

    def contains(self, volume: CertifiedValue) -> bool:
        """True when the certified interval of `volume` lies inside [lower, upper]."""
        lo, hi = volume.bounds()
        return self.lower <= lo and (self.upper is None or hi <= self.upper)


def ball_volume(k: int, pi_digits: int = 60) -> CertifiedValue:
    """
    b_k = pi^(k/2) / Gamma(k/2 + 1): pi^m / m! for k = 2m and 2^k m! pi^m / k! for k = 2m + 1.
    """
    if k < 1:
        raise InputError(f"ball dimension must be at least 1, got {k}")
    pi_lo, pi_hi = pi_bracket(pi_digits)
    m = k // 2
    if k % 2 == 0:
        factor = Fraction(1, factorial(m))
    else:
        factor = Fraction((1 << k) * factorial(m), factorial(k))
    return CertifiedValue.from_bounds(factor * pi_lo ** m, factor * pi_hi ** m)


def postnikov_volume(lam) -> Fraction:
    """
    Exact volume of the projected permutohedron:
    (1/(n-1)!) sum_sigma (sum_i lambda_i sigma(i))^(n-1) / prod_j (sigma(j) - sigma(j+1)).
    """
    lam = _as_partition(lam)
    n = lam.n
    total = Fraction(0)
    for sigma in permutations(range(1, n + 1)):
        numerator = sum((p * s for p, s in zip(lam.parts, sigma)), Fraction(0)) ** (n - 1)
        denominator = 1
        for j in range(n - 1):
            denominator *= sigma[j] - sigma[j + 1]
        total += numerator / denominator
    return total / factorial(n - 1)


def psh_volume(lam, threshold: int = 8) -> Tuple[Fraction, bool]:
    """
    vol(pSH(lambda)): exact for n <= threshold, else the bound lambda_1^(n-1) n^(2n).

    Returns:
    - (Fraction, bool): the value and whether it is exact.
    """
    lam = _as_partition(lam)
    n = lam.n
    if n <= threshold:
        return postnikov_volume(lam), True
    return lam.parts[0] ** (n - 1) * Fraction(n) ** (2 * n), False


def _exp(q: Fraction) -> Tuple[Fraction, Fraction]:
    return exp_bounds(q, _EXP_DELTA)


def _sqrt_factorial(n: int) -> Tuple[Fraction, Fraction]:
    return sqrt_bounds(factorial(n - 1), _SQRT_BITS)


def inscribed_ball_floor(instance: Instance, record: ConditioningRecord, pi_digits: int = 60) -> CertifiedValue:
    """
    V >= sqrt((n-1)!) (r / sqrt(n-1))^d b_d with d = (n-1)(n-2)/2 and r = tau lambda_gap / 4,
    scaled back to the input by beta^(-d).
    """
    n, d = instance.n, instance.dim
    if d == 0 or record.r == 0:
        return CertifiedValue.exact(0)
    root_lo, root_hi = _sqrt_factorial(n)
    side_lo, side_hi = sqrt_bounds(record.r * record.r / (n - 1), _SQRT_BITS)
    ball = ball_volume(d, pi_digits)
    factor = instance.volume_factor
    return CertifiedValue.from_bounds(
        root_lo * side_lo ** d * ball.lower * factor, root_hi * side_hi ** d * ball.upper * factor
    )


def _epsilon_power(record: ConditioningRecord, n: int) -> Tuple[Fraction, Fraction]:
    eps_lo, eps_hi = record.epsilon.bounds()
    return eps_lo ** (n - 1), eps_hi ** (n - 1)


def assemble_bracket(instance: Instance, record: ConditioningRecord, opt: OptimizationResult,
                     config: Optional[RunConfig] = None) -> VolumeBracket:
    """
    Certified bracket on V from the minimizer's output.

    The lower bound takes the certified floor of inf g_hat (opt.min_lower); the upper bound
    takes the upper end of g*. Both are scaled back by beta^(-dim).

    Parameters:
    - instance (Instance): Normalized instance.
    - record (ConditioningRecord): Its conditioning.
    - opt (OptimizationResult): Output of the minimizer.
    - config (RunConfig): Supplies postnikov_threshold and pi_digits.

    Returns:
    - VolumeBracket
    """
    config = config or RunConfig()
    n = instance.n
    factor = instance.volume_factor
    root_lo, root_hi = _sqrt_factorial(n)
    psh, exact = psh_volume(instance.lam, config.postnikov_threshold)
    ball = ball_volume(n - 1, config.pi_digits)
    g_lo, g_hi = opt.g_star.bounds()

    lower = root_lo * _exp(Fraction(-n))[0] * _exp(opt.min_lower)[0] / psh * factor

    upper = estimate = ratio = estimate_ratio = None
    if not record.is_boundary:
        eps_pow_lo, eps_pow_hi = _epsilon_power(record, n)
        half_lo, half_hi = _exp(Fraction(n, 2))
        upper = root_hi * half_hi * _exp(g_hi)[1] / (ball.lower * eps_pow_lo) * factor
        estimate = CertifiedValue.from_bounds(
            root_lo * half_lo * _exp(g_lo)[0] / (ball.upper * eps_pow_hi) * factor,
            root_hi * half_hi * _exp(g_hi)[1] / (ball.lower * eps_pow_lo) * factor,
        )
        if lower > 0:
            ratio = CertifiedValue.from_bounds(*_log_interval(upper / lower))
        estimate_ratio = (
            Fraction(3 * n, 2) + log_bounds(psh)[1] - log_bounds(ball.lower)[0] - log_bounds(eps_pow_lo)[0]
        )
    return VolumeBracket(
        g_star=opt.g_star,
        lower=lower,
        upper=upper,
        F_estimate=estimate,
        psh_volume=psh / instance.scale ** (n - 1),
        psh_exact=exact,
        approximation_ratio_log=ratio,
        estimate_ratio_log=estimate_ratio,
        ball_floor=inscribed_ball_floor(instance, record, config.pi_digits),
        volume_factor=factor,
    )


def _log_interval(q: Fraction) -> Tuple[Fraction, Fraction]:
    return log_bounds(q, Fraction(1, 1 << 32))


def closed_form_bracket(instance: Instance, record: ConditioningRecord, opt: OptimizationResult,
                        pi_digits: int = 60) -> Tuple[Fraction, Fraction]:
    """
    The bracket obtained by substituting eps >= 1/(16 lambda_1 n^3) and
    vol(pSH(lambda)) <= lambda_1^(n-1) n^(2n): valid for integral lambda with distinct parts
    and integral mu strictly inside the permutohedron.

    Raises:
    - PreconditionError: the instance is not integral or mu is on the boundary.
    """
    if not (instance.is_integral and instance.lam.is_integral and instance.mu.is_integral):
        raise PreconditionError("the closed-form bracket needs integral lambda and mu")
    if record.is_boundary:
        raise PreconditionError("the closed-form bracket needs mu strictly inside the permutohedron")
    n = instance.n
    lambda1 = instance.lam.parts[0]
    factor = instance.volume_factor
    root_lo, root_hi = _sqrt_factorial(n)
    ball = ball_volume(n - 1, pi_digits)
    psh_bound = lambda1 ** (n - 1) * Fraction(n) ** (2 * n)
    eps_floor = Fraction(1, 16 * n ** 3) / lambda1
    lower = root_lo * _exp(Fraction(-n))[0] * _exp(opt.min_lower)[0] / psh_bound * factor
    upper = (
        root_hi * _exp(Fraction(n, 2))[1] * _exp(opt.g_star.upper)[1] / (ball.lower * eps_floor ** (n - 1)) * factor
    )
    return lower, upper


def ratio_envelope(bracket: VolumeBracket, n: int, lambda1: Fraction, k0: Fraction = Fraction(12)):
    """
    Implied constant K = log(upper/lower)/n - 5.5 log n - 2 log lambda_1, rounded up.

    Returns:
    - (Optional[Fraction], bool): K (None for an infinite bracket) and whether K <= k0.
    """
    if bracket.approximation_ratio_log is None:
        return None, False
    if lambda1 <= 0:
        raise InputError("the ratio envelope needs lambda_1 > 0")
    k = (
        bracket.approximation_ratio_log.upper / n
        - Fraction(11, 2) * log_bounds(Fraction(n))[0]
        - 2 * _log_interval(Fraction(lambda1))[0]
    )
    return k, k <= k0
