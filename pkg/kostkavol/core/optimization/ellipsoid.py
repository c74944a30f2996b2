"""
Minimization of the reduced objective

    g_hat(y) = log S_lambda((y, 0)) - (y, 0) . mu

over the ball of radius R + 3/2, with a certified ellipsoid method.

Every ellipsoid E = {y : (y - c)^T P^-1 (y - c) <= 1} carried by the loop contains the
exact ellipsoid of the textbook update: the irrational sqrt(a^T P a) in the centre step
and the dyadic rounding of P and c are both absorbed by inflating P. Objective cuts use
the midpoint of a certified gradient box and are made shallow enough to stay valid for
every gradient in that box.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from ..base.config import RunConfig
from ..base.errors import BoundaryInstanceError, ConditioningError, InputError, ResourceLimitError
from ..certarith.certified import CertifiedValue, Rational, as_fraction, ceil_log2, sqrt_bounds
from ..certarith.matrix import det_exact
from ..certarith.series import log_approx
from ..conditioning.record import ConditioningRecord, condition
from ..domain.partition import Instance, gt_volume, lift_q
from ..schur.evaluator import SchurEvaluator
from ..wrappers.logging_mixin import LoggingMixin

_SQRT_BITS = 64
_DIRECTION_BITS = 48


@dataclass(frozen=True)
class OptimizationResult:
    """
    Parameters:
    - y_star (tuple): Best point found, exact rationals.
    - g_star (CertifiedValue): Certified g_hat(y_star).
    - iterations (int): Ellipsoid iterations over all restarts.
    - stationarity_residual (CertifiedValue): ||grad log S(x*) - mu|| at x* = (y_star, 0).
    - domain_doublings (int): How many times the domain radius was doubled.
    - lower_certificate (Fraction): Certified lower bound on the minimum of g_hat over the final ball.
    - eps_opt (Fraction): Requested accuracy.
    - domain_radius (Fraction): Upper end of the radius R that the final run used.
    - f_star (CertifiedValue): Extended objective at y_star.
    - best_history (tuple): Best certified upper value after each improvement (non-increasing).
    """

    y_star: Tuple[Fraction, ...]
    g_star: CertifiedValue
    iterations: int
    stationarity_residual: CertifiedValue
    domain_doublings: int
    lower_certificate: Fraction
    eps_opt: Fraction
    domain_radius: Fraction
    f_star: Optional[CertifiedValue] = None
    best_history: Tuple[Fraction, ...] = field(default=(), compare=False)

    @property
    def x_star(self) -> Tuple[Fraction, ...]:
        return lift_q(self.y_star)

    @property
    def min_lower(self) -> Fraction:
        """A certified lower bound on inf g_hat: the better of the cut certificate and g*_lo - eps_opt."""
        return max(self.lower_certificate, self.g_star.lower - self.eps_opt)


def _evaluator(instance: Instance, bit_cap: int, evaluator: Optional[SchurEvaluator]) -> SchurEvaluator:
    if evaluator is not None:
        return evaluator
    return SchurEvaluator(instance.lam, bit_cap)


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _check_point(instance: Instance, y: Sequence[Rational]) -> Tuple[Fraction, ...]:
    if len(y) != instance.n - 1:
        raise InputError(f"point has {len(y)} coordinates; the reduced objective takes {instance.n - 1}")
    return lift_q(y)


def ghat(instance: Instance, y: Sequence[Rational], delta: Rational, bit_cap: int = 4096,
         evaluator: Optional[SchurEvaluator] = None) -> CertifiedValue:
    """
    Certified g_hat(y): log S_lambda is evaluated to delta/2 and x . mu is exact.

    Parameters:
    - instance (Instance): Normalized instance.
    - y (sequence): Point of Q^(n-1).
    - delta (Fraction): Additive accuracy.

    Returns:
    - CertifiedValue: Interval of radius at most delta/2 around g_hat(y).
    """
    x = _check_point(instance, y)
    value = _evaluator(instance, bit_cap, evaluator).log_schur(x, as_fraction(delta) / 2)
    return value - _dot(x, instance.mu.entries)


def grad_ghat(instance: Instance, y: Sequence[Rational], delta: Rational, bit_cap: int = 4096,
              evaluator: Optional[SchurEvaluator] = None) -> List[CertifiedValue]:
    """d g_hat / d y_i = d_i log S_lambda((y, 0)) - mu_i for i < n, each within delta."""
    x = _check_point(instance, y)
    gradient = _evaluator(instance, bit_cap, evaluator).grad_log_schur(x, delta)
    return [g - m for g, m in zip(gradient[:-1], instance.mu.entries[:-1])]


def origin_floor(instance: Instance) -> Fraction:
    """v0 with v0 <= g_hat(0) <= v0 + 1."""
    return log_approx(gt_volume(instance.lam), Fraction(1, 2)) - Fraction(1, 2)


def _norm(y: Sequence[Fraction]) -> Tuple[Fraction, Fraction]:
    return sqrt_bounds(_dot(y, y), _SQRT_BITS)


def extended_objective(instance: Instance, y: Sequence[Rational], delta: Rational, domain_radius: Rational,
                       bit_cap: int = 4096, evaluator: Optional[SchurEvaluator] = None) -> CertifiedValue:
    """
    f(y) = max(g_hat(y), v0 - C1 + C2 ||y||) with C1 = 3(R + 2) and C2 = 2 ceil(||lambda||).

    Parameters:
    - domain_radius (Fraction): R, as an upper bound.
    """
    evaluator = _evaluator(instance, bit_cap, evaluator)
    y = [as_fraction(v) for v in y]
    inner = ghat(instance, y, delta, evaluator=evaluator)
    c1 = 3 * (as_fraction(domain_radius) + 2)
    c2 = 2 * evaluator.L
    norm_lo, norm_hi = _norm(y)
    v0 = origin_floor(instance)
    lo, hi = inner.bounds()
    return CertifiedValue.from_bounds(max(lo, v0 - c1 + c2 * norm_lo), max(hi, v0 - c1 + c2 * norm_hi))


def _round_to(q: Fraction, exponent: int) -> Fraction:
    """Nearest multiple of 2**exponent."""
    unit = Fraction(1 << exponent) if exponent >= 0 else Fraction(1, 1 << -exponent)
    scaled = q / unit
    return Fraction((2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)) * unit


def _floor_log2(q: Fraction) -> int:
    return -ceil_log2(1 / q)


class Ellipsoid:
    """
    {y : (y - c)^T P^-1 (y - c) <= 1} with dyadic c and P.
    """

    def __init__(self, center: List[Fraction], matrix: List[List[Fraction]], slack: Fraction):
        self.center = center
        self.matrix = matrix
        self.d = len(center)
        # inflation rate of each rounding step
        self.slack = slack

    @classmethod
    def ball(cls, d: int, radius: Fraction, slack: Fraction) -> "Ellipsoid":
        r2 = radius * radius
        return cls([Fraction(0)] * d, [[r2 if i == j else Fraction(0) for j in range(d)] for i in range(d)], slack)

    def apply(self, a: Sequence[Fraction]) -> List[Fraction]:
        return [_dot(row, a) for row in self.matrix]

    def width(self, a: Sequence[Fraction]) -> Tuple[Fraction, Fraction, Fraction]:
        """(a^T P a, lower and upper bounds of its square root)."""
        s2 = _dot(a, self.apply(a))
        lo, hi = sqrt_bounds(s2, _SQRT_BITS)
        return s2, lo, hi

    def error_width(self, radii: Sequence[Fraction]) -> Fraction:
        """Upper bound on max_{y in E} e . (y - c) over |e_i| <= radii_i."""
        total = sum(
            (radii[i] * radii[j] * abs(self.matrix[i][j]) for i in range(self.d) for j in range(self.d)),
            Fraction(0),
        )
        return sqrt_bounds(total, _SQRT_BITS)[1]

    def cut(self, a: Sequence[Fraction], alpha: Fraction) -> None:
        """
        Replace E by an ellipsoid containing E ∩ {y : a . (y - c) <= -alpha sqrt(a^T P a)},
        for -1/d < alpha <= 0.
        """
        d = self.d
        pa = self.apply(a)
        s2, s_lo, s_hi = self.width(a)
        step = (1 + d * alpha) / (d + 1)
        sigma = 2 * (1 + d * alpha) / ((d + 1) * (1 + alpha))
        factor = Fraction(d * d, d * d - 1) * (1 - alpha * alpha)
        updated = [
            [factor * (self.matrix[i][j] - sigma * pa[i] * pa[j] / s2) for j in range(d)] for i in range(d)
        ]
        center = [c - step * p / s_lo for c, p in zip(self.center, pa)]
        # the centre used s_lo instead of sqrt(s2); its offset in the metric of the update is at most eta1
        eta1 = step * (s_hi / s_lo - 1) * Fraction(d + 1, d) / (1 - alpha)
        inflate = (1 + eta1) ** 2
        self._round(center, [[inflate * v for v in row] for row in updated])

    def _round(self, center: List[Fraction], matrix: List[List[Fraction]]) -> None:
        d, eta = self.d, self.slack
        trace = sum((matrix[i][i] for i in range(d)), Fraction(0))
        lambda_min = det_exact(matrix) / trace ** (d - 1)
        if lambda_min <= 0:
            raise ResourceLimitError("ellipsoid matrix lost positive definiteness", diagnostics={"d": d})
        # centre onto a grid fine enough to move it by at most eta in the metric of `matrix`
        grid_c = _floor_log2(2 * eta * sqrt_bounds(lambda_min / d, _SQRT_BITS)[0])
        self.center = [_round_to(c, grid_c) for c in center]
        grown = (1 + eta) ** 2
        matrix = [[grown * v for v in row] for row in matrix]
        grid_p = _floor_log2(eta * grown * lambda_min / d)
        rounded = [[Fraction(0)] * d for _ in range(d)]
        for i in range(d):
            for j in range(i, d):
                rounded[i][j] = rounded[j][i] = _round_to(matrix[i][j], grid_p)
        shift = Fraction(d, 2) * (Fraction(1 << grid_p) if grid_p >= 0 else Fraction(1, 1 << -grid_p))
        for i in range(d):
            rounded[i][i] += shift
        self.matrix = rounded


class EllipsoidMinimizer(LoggingMixin):
    """
    Certified minimizer of g_hat over the ball of radius R + 3/2, restarting with R doubled
    whenever the best point leaves the ball of radius R + 1.

    Parameters:
    - instance (Instance): Normalized instance with mu strictly inside the permutohedron.
    - eps_opt (Fraction): Additive accuracy of the returned minimum value.
    - config (RunConfig): Caps and the precision limit.
    - record (ConditioningRecord): Conditioning of the instance (computed if omitted).
    """

    def __init__(self, instance: Instance, eps_opt: Rational, config: Optional[RunConfig] = None,
                 record: Optional[ConditioningRecord] = None):
        self.instance = instance
        self.eps_opt = as_fraction(eps_opt)
        if not 0 < self.eps_opt < 1:
            raise InputError(f"eps_opt must lie in (0, 1), got {self.eps_opt}")
        if instance.n < 3:
            raise InputError("estimation needs n >= 3; for n = 2 the Kostka polytope is a point")
        self.config = config or RunConfig()
        self.record = record or condition(instance)
        if self.record.domain_radius is None:
            raise BoundaryInstanceError("epsilon = 0: mu lies on the boundary of the permutohedron")
        self.d = instance.n - 1
        self.evaluator = SchurEvaluator(instance.lam, self.config.precision_bit_cap)
        self.iterations = 0
        self.best_point: Optional[Tuple[Fraction, ...]] = None
        self.best_upper: Optional[Fraction] = None
        self.best_history: List[Fraction] = []
        self._initialize_logger("ellipsoid", self.config.log_level)

    def _schedule(self, t: int) -> Fraction:
        """eps_opt / (8 * 2**ceil(log2 t))."""
        return self.eps_opt / (8 * (1 << max(0, ceil_log2(t))))

    def _offer(self, point: Tuple[Fraction, ...], upper: Fraction) -> None:
        if self.best_upper is None or upper < self.best_upper:
            self.best_point, self.best_upper = point, upper
            self.best_history.append(upper)

    def _run(self, radius: Fraction) -> Fraction:
        """One ellipsoid run over the ball of radius `radius`; returns the certified lower bound."""
        d, mu = self.d, self.instance.mu.entries
        rho = radius + Fraction(3, 2)
        rho2 = rho * rho
        ellipsoid = Ellipsoid.ball(d, rho, Fraction(1, 32 * d * (d + 1)))
        cut_bound: Optional[Fraction] = None
        value_floor: Optional[Fraction] = None
        min_gradient_delta = self.eps_opt / (1 << 48)
        for _ in range(self.config.max_iterations):
            self.iterations += 1
            center = tuple(ellipsoid.center)
            if _dot(center, center) > rho2:
                ellipsoid.cut(list(center), Fraction(0))
                continue
            delta = self._schedule(self.iterations)
            value = ghat(self.instance, center, delta, evaluator=self.evaluator)
            f_lo, f_hi = value.bounds()
            self._offer(center, f_hi)
            value_floor = f_lo if value_floor is None else min(value_floor, f_lo)
            gradient_delta = delta
            while True:
                gradient = self.evaluator.grad_log_schur(lift_q(center), gradient_delta)
                direction, radii = [], []
                for g, m in zip(gradient[:-1], mu[:-1]):
                    mid = g.value - m
                    exponent = _floor_log2(max(abs(mid), gradient_delta)) - _DIRECTION_BITS
                    rounded = _round_to(mid, exponent)
                    direction.append(rounded)
                    radii.append(g.error + abs(rounded - mid))
                eps_k = ellipsoid.error_width(radii)
                s2, s_lo, s_hi = ellipsoid.width(direction)
                local = f_lo - s_hi - eps_k
                cut_bound = local if cut_bound is None else max(cut_bound, local)
                lower = min(cut_bound, value_floor)
                if self.best_upper - lower <= self.eps_opt:
                    self.log_event(
                        "ellipsoid converged",
                        level="debug",
                        metadata={"iterations": self.iterations, "gap": float(self.best_upper - lower)},
                    )
                    return lower
                if s2 > 0 and 8 * d * eps_k <= s_lo:
                    break
                gradient_delta /= 16
                if gradient_delta < min_gradient_delta:
                    raise ResourceLimitError(
                        "gradient precision exhausted before a valid cut",
                        diagnostics={"iterations": self.iterations, "gap": float(self.best_upper - lower)},
                    )
            ellipsoid.cut(direction, -eps_k / s_lo)
            if self.iterations % 50 == 0:
                self.log_event(
                    "ellipsoid progress",
                    level="debug",
                    metadata={"iterations": self.iterations, "best": float(self.best_upper), "lower": float(lower)},
                )
        raise ResourceLimitError(
            f"ellipsoid method did not converge within {self.config.max_iterations} iterations",
            diagnostics={"iterations": self.iterations, "best": float(self.best_upper)},
        )

    def stationarity_residual(self, y: Sequence[Fraction], delta: Fraction) -> CertifiedValue:
        """Certified ||grad log S((y, 0)) - mu|| over all n coordinates."""
        gradient = self.evaluator.grad_log_schur(lift_q(y), delta)
        low, high = Fraction(0), Fraction(0)
        for g, m in zip(gradient, self.instance.mu.entries):
            lo, hi = (g - m).bounds()
            high += max(lo * lo, hi * hi)
            if lo > 0 or hi < 0:
                low += min(lo * lo, hi * hi)
        return CertifiedValue.from_bounds(sqrt_bounds(low, _SQRT_BITS)[0], sqrt_bounds(high, _SQRT_BITS)[1])

    def minimize(self) -> OptimizationResult:
        """
        Run the ellipsoid method, doubling the domain radius while the best point sits
        outside the ball of radius R + 1.

        Raises:
        - ConditioningError: the radius was doubled max_domain_doublings times.
        - ResourceLimitError: iteration or precision caps were hit.
        """
        radius = self.record.domain_radius.upper
        doublings = 0
        while True:
            lower = self._run(radius)
            y_star = self.best_point
            norm_hi = _norm(y_star)[1]
            if norm_hi <= radius + 1:
                break
            doublings += 1
            self.log_event("domain radius doubled", level="info", metadata={"doublings": doublings})
            if doublings > self.config.max_domain_doublings:
                raise ConditioningError(
                    f"minimizer left the domain after {self.config.max_domain_doublings} radius doublings"
                )
            radius *= 2
        g_star = ghat(self.instance, y_star, self.eps_opt / 4, evaluator=self.evaluator)
        f_star = extended_objective(self.instance, y_star, self.eps_opt / 4, radius, evaluator=self.evaluator)
        residual = self.stationarity_residual(y_star, self.eps_opt)
        self.log_event(
            "minimization finished",
            level="info",
            metadata={"iterations": self.iterations, "g_star": float(g_star.value), "doublings": doublings},
        )
        return OptimizationResult(
            y_star=y_star,
            g_star=g_star,
            iterations=self.iterations,
            stationarity_residual=residual,
            domain_doublings=doublings,
            lower_certificate=lower,
            eps_opt=self.eps_opt,
            domain_radius=radius,
            f_star=f_star,
            best_history=tuple(self.best_history),
        )


def minimize(instance: Instance, eps_opt: Rational, config: Optional[RunConfig] = None,
             record: Optional[ConditioningRecord] = None) -> OptimizationResult:
    """
    Certified approximate minimum of g_hat.

    Parameters:
    - instance (Instance): Normalized instance, n >= 3.
    - eps_opt (Fraction): Additive accuracy.
    - config (RunConfig): Caps; defaults are used when omitted.
    - record (ConditioningRecord): Precomputed conditioning, if available.

    Returns:
    - OptimizationResult: y*, certified g*, and the certificates of the run.
    """
    return EllipsoidMinimizer(instance, eps_opt, config, record).minimize()
