"""
Certified evaluation of the continuous Schur function

    S_lambda(x) = det[exp(x_i lambda_j)] / V(x),    V(x) = prod_{i<j} (x_i - x_j),

and of the gradient of its logarithm.

x is sorted and nudged apart so the Vandermonde is non-zero. Rows and columns of the
exponential matrix are rescaled by exp(-u_i) and exp(-w_j) so that every entry is
exp(-a_ij) with a_ij >= 0 and a unit diagonal; then log det M = x.lambda + log det E and
the entries of E are approximated in fixed point with an absolute error of 2**-p.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lcm
from typing import List, Optional, Sequence, Tuple

from ..base.errors import IndeterminateError, PreconditionError, ResourceLimitError
from ..certarith.certified import CertifiedValue, Rational, as_fraction, ceil_log2, ceil_sqrt
from ..certarith.matrix import det_exact, det_integer
from ..certarith.series import exp_neg_approx, log1m_exp_bound, log_approx
from ..domain.partition import Partition, _as_partition
from ..wrappers.logging_mixin import LoggingMixin

DEFAULT_BIT_CAP = 4096
# Upper bound on 1/log(2).
_INV_LN2 = Fraction(14427, 10000)
# Lower bound on log(2): entries exp(-a) with a >= (p + 1) * 7/10 are below 2**-(p+1).
_CLIP = Fraction(7, 10)


def _ceil_log2_e(q: Fraction) -> int:
    """An integer k >= q / log(2)."""
    scaled = q * _INV_LN2
    return -((-scaled.numerator) // scaled.denominator)


@dataclass(frozen=True)
class SchurEvalPlan:
    """
    Everything fixed before the determinant is evaluated.

    Parameters:
    - x_hat (tuple): Perturbed point, strictly decreasing.
    - permutation (tuple): permutation[k] is the input index of x_hat[k].
    - L (int): ceil(||lambda||), a Lipschitz bound of log S_lambda.
    - T (int): 2n(n-1) times the lcm of the denominators of lambda.
    - lambda_hat (tuple): Integer partition T (lambda - lambda_n) - staircase, gaps of at least 1;
      the determinant floor is the leading monomial of its Schur polynomial at exp(x_hat / T).
    - v_log_floor (Fraction): Lower bound on log v, v being the determinant floor.
    - D_prime_bits (int): log2 of the per-entry precision denominator D' that suffices a priori;
      the precision ladder never starts above it.
    - tau_entry (Fraction): max |x_hat_i lambda_j|.
    - entry_bits (int): Fixed-point precision that the floor guarantees to be sufficient.
    - potential (Fraction): x_hat . lambda, the exact part of log det M.
    """

    x_hat: Tuple[Fraction, ...]
    permutation: Tuple[int, ...]
    L: int
    T: int
    lambda_hat: Tuple[int, ...]
    v_log_floor: Fraction
    D_prime_bits: int
    tau_entry: Fraction
    entry_bits: int
    potential: Fraction

    @property
    def D_prime(self) -> int:
        return 1 << self.D_prime_bits


def perturb_distinct(x: Sequence[Rational], delta: Rational, L: int) -> Tuple[Fraction, ...]:
    """
    x_hat_i = x_i + (n - i) * delta / (2 n^2 L) for x sorted non-increasing.

    Consecutive gaps of x_hat are at least delta / (2 n^2 L) and ||x - x_hat|| < delta / (4L).
    """
    x = [as_fraction(v) for v in x]
    delta = as_fraction(delta)
    n = len(x)
    if any(x[i] < x[i + 1] for i in range(n - 1)):
        raise PreconditionError("perturb_distinct needs x sorted in non-increasing order")
    if not 0 < delta < 1 or L < 1:
        raise PreconditionError("perturb_distinct needs 0 < delta < 1 and L >= 1")
    step = delta / (2 * n * n * L)
    return tuple(v + (n - 1 - i) * step for i, v in enumerate(x))


def _check_delta(delta: Rational) -> Fraction:
    delta = as_fraction(delta)
    if not 0 < delta < 1:
        raise PreconditionError(f"accuracy must lie in (0, 1), got {delta}")
    return delta


class SchurEvaluator(LoggingMixin):
    """
    Evaluates log S_lambda and its gradient for one lambda with distinct parts.

    Parameters:
    - lam (Partition): Partition with distinct parts.
    - bit_cap (int): Largest fixed-point precision tried before giving up.
    """

    def __init__(self, lam, bit_cap: int = DEFAULT_BIT_CAP):
        self.lam: Partition = _as_partition(lam)
        if self.lam.lambda_gap == 0:
            raise PreconditionError("the determinantal formula needs lambda with distinct parts")
        self.n = self.lam.n
        self.bit_cap = bit_cap
        self.L = ceil_sqrt(sum((p * p for p in self.lam.parts), Fraction(0)))
        self.T = 2 * self.n * (self.n - 1) * lcm(*(p.denominator for p in self.lam.parts))
        self._initialize_logger("schur")

    # -- planning ----------------------------------------------------------------------

    def plan(self, x: Sequence[Rational], perturbation: Rational) -> SchurEvalPlan:
        """
        Sort x, perturb it by `perturbation` and derive the determinant floor and the
        precision it guarantees.
        """
        x = [as_fraction(v) for v in x]
        if len(x) != self.n:
            raise PreconditionError(f"point has {len(x)} coordinates, lambda has {self.n} parts")
        n, lam, T = self.n, self.lam.parts, self.T
        permutation = tuple(sorted(range(n), key=lambda k: x[k], reverse=True))
        x_hat = perturb_distinct([x[k] for k in permutation], perturbation, self.L)
        potential = sum((a * b for a, b in zip(x_hat, lam)), Fraction(0))
        lambda_hat = self._lambda_hat()
        leading = sum(
            (v * (p + n - 1 - i) for i, (v, p) in enumerate(zip(x_hat, lambda_hat))), Fraction(0)
        ) / T + lam[-1] * sum(x_hat, Fraction(0))
        # log det E >= sum_{i<j} log(1 - exp(-(x_hat_i - x_hat_j)/T)) from the Schur bridge.
        pair_bounds = sum(
            (log1m_exp_bound((x_hat[i] - x_hat[j]) / T) for i in range(n) for j in range(i + 1, n)),
            Fraction(0),
        )
        v_log_floor = leading - pair_bounds
        tau_entry = max(abs(a * b) for a in x_hat for b in lam)
        inverse_v_bits = max(0, _ceil_log2_e(-v_log_floor))
        budget = (
            5 + ceil_log2(factorial(n)) + n * max(0, ceil_log2(tau_entry) if tau_entry > 0 else 0)
            + inverse_v_bits + ceil_log2(1 / as_fraction(perturbation))
        )
        D_prime_bits = 1 + ceil_log2(2 * n) + max(0, budget)
        entry_bits = ceil_log2(factorial(n) * 2 * n * 64 / as_fraction(perturbation)) + max(0, _ceil_log2_e(pair_bounds))
        return SchurEvalPlan(
            x_hat=x_hat,
            permutation=permutation,
            L=self.L,
            T=T,
            lambda_hat=lambda_hat,
            v_log_floor=v_log_floor,
            D_prime_bits=D_prime_bits,
            tau_entry=tau_entry,
            entry_bits=entry_bits,
            potential=potential,
        )

    def _lambda_hat(self) -> Tuple[int, ...]:
        n, lam = self.n, self.lam.parts
        scaled = [self.T * (p - lam[-1]) for p in lam]
        lambda_hat = tuple(int(s) - (n - 1 - i) for i, s in enumerate(scaled))
        if lambda_hat[-1] < 0 or any(lambda_hat[i] - lambda_hat[i + 1] < 1 for i in range(n - 1)):
            raise PreconditionError(f"no integral bridge partition for lambda {lam}")
        return lambda_hat

    def _exponents(self, x_hat: Sequence[Fraction]) -> List[List[Fraction]]:
        """a_ij = u_i + w_j - x_hat_i lambda_j, non-negative with a zero diagonal."""
        lam, n = self.lam.parts, self.n
        w = [Fraction(0)]
        for k in range(1, n):
            w.append(w[-1] + x_hat[k] * (lam[k] - lam[k - 1]))
        u = [x_hat[i] * lam[i] - w[i] for i in range(n)]
        return [[u[i] + w[j] - x_hat[i] * lam[j] for j in range(n)] for i in range(n)]

    @staticmethod
    def _fixed_point_entries(exponents: List[List[Fraction]], bits: int) -> List[List[int]]:
        """floor(2**(bits+1) * exp(-a)) up to a relative error 2**-(bits+1); 0 once exp(-a) < 2**-(bits+1)."""
        scale = 1 << (bits + 1)
        rho = Fraction(1, scale)
        threshold = _CLIP * (bits + 1)
        rows = []
        for row in exponents:
            out = []
            for a in row:
                if a >= threshold:
                    out.append(0)
                else:
                    t = exp_neg_approx(a, rho)
                    out.append((t.numerator * scale) // t.denominator)
            rows.append(out)
        return rows

    def _precisions(self, start: int):
        bits = max(start, ceil_log2(2 * self.n) + 2)
        while True:
            if bits > self.bit_cap:
                return
            yield bits
            if bits == self.bit_cap:
                return
            bits = min(2 * bits, self.bit_cap)

    # -- evaluation --------------------------------------------------------------------

    def log_schur(self, x: Sequence[Rational], delta: Rational) -> CertifiedValue:
        """
        Certified additive-delta approximation of log S_lambda(x).

        Raises:
        - ResourceLimitError: the requested accuracy was not reached below the bit cap.
        """
        delta = _check_delta(delta)
        n = self.n
        plan = self.plan(x, delta)
        log_vandermonde = log_approx(_vandermonde(plan.x_hat), delta / 8)
        exponents = self._exponents(plan.x_hat)
        delta1 = delta / 16
        start = ceil_log2(factorial(n) * 2 * n * 64 / delta) + 8
        last = None
        for bits in self._precisions(min(start, plan.entry_bits, plan.D_prime_bits)):
            ints = self._fixed_point_entries(exponents, bits)
            det_e = Fraction(det_integer(ints), 1 << ((bits + 1) * n))
            slack = Fraction(factorial(n) * 2 * n, 1 << bits)
            last = (bits, det_e, slack)
            self.log_event("log_schur precision", level="debug", metadata={"bits": bits, "n": n})
            if det_e <= slack:
                continue
            low = log_approx(det_e - slack, delta1) - delta1
            high = log_approx(det_e + slack, delta1) + delta1
            if high - low > delta / 2:
                continue
            # perturbation bias < delta/4, Vandermonde log within delta/8
            low = plan.potential + low - (log_vandermonde + delta / 8) - delta / 4
            high = plan.potential + high - (log_vandermonde - delta / 8) + delta / 4
            return CertifiedValue.from_bounds(low, high)
        raise ResourceLimitError(
            f"log_schur did not reach accuracy {delta} below {self.bit_cap} bits",
            diagnostics=_diagnostics(plan, last),
        )

    def grad_log_schur(self, x: Sequence[Rational], delta: Rational) -> List[CertifiedValue]:
        """
        Certified gradient of log S_lambda at x, each coordinate within radius delta.

        d_i log S = det(E with row i scaled by lambda_j) / det E - sum_{j != i} 1/(x_hat_i - x_hat_j),
        evaluated at a point perturbed by delta/(16 n L) so the bias stays below delta/16.
        """
        delta = _check_delta(delta)
        n, lam = self.n, self.lam.parts
        plan = self.plan(x, delta / (16 * n * self.L))
        x_hat = plan.x_hat
        vandermonde_terms = [
            sum((1 / (x_hat[i] - x_hat[j]) for j in range(n) if j != i), Fraction(0)) for i in range(n)
        ]
        exponents = self._exponents(x_hat)
        row_bound = max(Fraction(1), max(abs(p) for p in lam))
        bias = delta / 16
        start = ceil_log2(factorial(n) * 2 * n * row_bound * 64 / delta) + 16
        last = None
        row_bits = ceil_log2(row_bound * 16 * n * self.L)
        for bits in self._precisions(min(start, plan.entry_bits + row_bits, plan.D_prime_bits + row_bits)):
            ints = self._fixed_point_entries(exponents, bits)
            denominator = 1 << ((bits + 1) * n)
            det_e = Fraction(det_integer(ints), denominator)
            slack = Fraction(factorial(n) * 2 * n, 1 << bits)
            last = (bits, det_e, slack)
            self.log_event("grad_log_schur precision", level="debug", metadata={"bits": bits, "n": n})
            if det_e <= slack:
                continue
            det_interval = CertifiedValue.from_bounds(det_e - slack, det_e + slack)
            numerator_slack = slack * row_bound
            sorted_gradient = []
            for i in range(n):
                scaled = [list(r) for r in ints]
                scaled[i] = [lam[j] * ints[i][j] for j in range(n)]
                numerator = det_exact(scaled) / denominator
                ratio = CertifiedValue.from_bounds(numerator - numerator_slack, numerator + numerator_slack) / det_interval
                lo, hi = ratio.bounds()
                sorted_gradient.append(
                    CertifiedValue.from_bounds(lo - vandermonde_terms[i] - bias, hi - vandermonde_terms[i] + bias)
                )
            if all(g.error <= delta for g in sorted_gradient):
                gradient: List[Optional[CertifiedValue]] = [None] * n
                for k, index in enumerate(plan.permutation):
                    gradient[index] = sorted_gradient[k]
                return gradient
        raise ResourceLimitError(
            f"grad_log_schur did not reach accuracy {delta} below {self.bit_cap} bits",
            diagnostics=_diagnostics(plan, last),
        )


def _vandermonde(x_hat: Sequence[Fraction]) -> Fraction:
    n = len(x_hat)
    return det_exact([[v ** (n - 1 - j) for j in range(n)] for v in x_hat])


def _diagnostics(plan: SchurEvalPlan, last) -> dict:
    diagnostics = {
        "n": len(plan.x_hat),
        "entry_bits_planned": plan.entry_bits,
        "D_prime_bits": plan.D_prime_bits,
        "v_log_floor": float(plan.v_log_floor),
    }
    if last is not None:
        bits, det_e, slack = last
        diagnostics.update({"bits_tried": bits, "det_floor_margin": float(det_e - slack)})
    return diagnostics


def log_schur(lam, x: Sequence[Rational], delta: Rational, bit_cap: int = DEFAULT_BIT_CAP) -> CertifiedValue:
    """
    Certified approximation of log S_lambda(x).

    Parameters:
    - lam (Partition or sequence): Partition with distinct parts.
    - x (sequence): Rational point.
    - delta (Fraction): Additive accuracy in (0, 1).
    - bit_cap (int): Precision cap of the fixed-point entries.

    Returns:
    - CertifiedValue: Additive certificate of radius at most delta.
    """
    return SchurEvaluator(lam, bit_cap).log_schur(x, delta)


def grad_log_schur(lam, x: Sequence[Rational], delta: Rational, bit_cap: int = DEFAULT_BIT_CAP) -> List[CertifiedValue]:
    return SchurEvaluator(lam, bit_cap).grad_log_schur(x, delta)


def schur_monotonicity_check(
    lam,
    mu_partition,
    x: Sequence[Rational],
    delta: Rational = Fraction(1, 1000),
    bit_cap: int = DEFAULT_BIT_CAP,
    max_refinements: int = 24,
) -> bool:
    """
    Certified comparison log S_lambda(x) >= log S_mu(x) for lambda = mu + d with d
    non-increasing and summing to zero.

    Raises:
    - PreconditionError: lambda - mu is not such a shift.
    - IndeterminateError: the intervals still overlap after `max_refinements` halvings of delta.
    """
    lam, mu = _as_partition(lam), _as_partition(mu_partition)
    if lam.n != mu.n:
        raise PreconditionError("lambda and mu must have the same length")
    shift = [a - b for a, b in zip(lam.parts, mu.parts)]
    if sum(shift) != 0 or any(shift[i] < shift[i + 1] for i in range(len(shift) - 1)):
        raise PreconditionError("lambda - mu must be non-increasing and sum to zero")
    if lam == mu:
        return True
    delta = _check_delta(delta)
    big, small = SchurEvaluator(lam, bit_cap), SchurEvaluator(mu, bit_cap)
    for _ in range(max_refinements):
        a, b = big.log_schur(x, delta), small.log_schur(x, delta)
        if b.certainly_le(a):
            return True
        if a.certainly_lt(b):
            return False
        delta /= 2
    raise IndeterminateError(
        "log S_lambda(x) and log S_mu(x) could not be separated",
        diagnostics={"delta": float(delta)},
    )
