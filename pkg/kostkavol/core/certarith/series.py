"""
Relative-error exponentials and additive-error logarithms on exact rationals.

Both kernels evaluate their truncated series in integer fixed point with floor
rounding after every step, so the bit length of intermediates is set by the
requested accuracy rather than by the size of the input's representation.
"""
from fractions import Fraction
from typing import Tuple

from ..base.errors import InputError, PreconditionError
from .certified import Rational, as_fraction, ceil_log2

_EIGHTH = Fraction(1, 8)
_TWO_THIRDS = Fraction(2, 3)
_THREE_HALVES = Fraction(3, 2)


def _check_delta(delta: Fraction) -> Fraction:
    delta = as_fraction(delta)
    if not 0 < delta < 1:
        raise InputError(f"accuracy must lie in (0, 1), got {delta}")
    return delta


def series_length(x: Rational, delta: Rational) -> int:
    """Number of series terms used by exp_neg_approx: at least 2*ceil(log2(1/delta) + x)."""
    x, delta = as_fraction(x), _check_delta(delta)
    b = max(3, ceil_log2(1 / delta))
    return 2 * (b + -((-x.numerator) // x.denominator))


def exp_neg_approx(x: Rational, delta: Rational) -> Fraction:
    """
    Approximate exp(-x) for rational x >= 0 to relative accuracy delta.

    The result t satisfies |exp(-x) - t| <= delta*exp(-x) and |exp(x) - 1/t| <= delta*exp(x).
    It is 1/S, where S is the truncated Taylor series of exp(x) evaluated by Horner's
    scheme in fixed point; S never exceeds the exact truncated sum.

    Parameters:
    - x (Fraction): Non-negative exponent.
    - delta (Fraction): Relative accuracy in (0, 1).

    Returns:
    - Fraction: The approximation t.
    """
    x, delta = as_fraction(x), _check_delta(delta)
    if x < 0:
        raise PreconditionError("exp_neg_approx needs x >= 0; use the reciprocal of exp_neg_approx(-x)")
    if x == 0:
        return Fraction(1)
    terms = series_length(x, delta)
    scale_bits = max(3, ceil_log2(1 / delta)) + 4
    one = 1 << scale_bits
    xn, xd = x.numerator, x.denominator
    acc = one
    for i in range(terms, 0, -1):
        acc = one + (acc * xn) // (i * xd)
    return Fraction(one, acc)


def exp_bounds(q: Rational, delta: Rational = Fraction(1, 1 << 40)) -> Tuple[Fraction, Fraction]:
    """Rational (lower, upper) around exp(q) for rational q of either sign."""
    q, delta = as_fraction(q), _check_delta(delta)
    if q >= 0:
        t = exp_neg_approx(q, delta)
        return (1 - delta) / t, (1 + delta) / t
    t = exp_neg_approx(-q, delta)
    return t / (1 + delta), t / (1 - delta)


def _log1m_series(z: Fraction, eps: Fraction) -> Fraction:
    """
    -log(1 - z) = sum z**m / m for 0 <= z <= 1/3, to additive accuracy eps.
    """
    if z == 0:
        return Fraction(0)
    # tail after M terms is at most (1/3)**(M+1) * 3/2 / (M+1) <= eps/6
    terms = max(1, -((-3 * eps.denominator) // eps.numerator)).bit_length()
    # fixed-point rounding contributes at most (5M + 1) ulps
    scale_bits = max(1, -((-(10 * terms + 2) * eps.denominator) // eps.numerator)).bit_length()
    zf = (z.numerator << scale_bits) // z.denominator
    power, acc = zf, 0
    for m in range(1, terms + 1):
        acc += power // m
        power = (power * zf) >> scale_bits
    return Fraction(acc, 1 << scale_bits)


def _reduce_three_halves(x: Fraction) -> Tuple[Fraction, int]:
    """Return (y, k) with x = y * (3/2)**k and 2/3 <= y <= 1."""
    bits = x.numerator.bit_length() - x.denominator.bit_length()
    k = (bits * 17095) // 10000
    y = x / _THREE_HALVES ** k if k >= 0 else x * _THREE_HALVES ** (-k)
    while y > 1:
        y /= _THREE_HALVES
        k += 1
    while y < _TWO_THIRDS:
        y *= _THREE_HALVES
        k -= 1
    return y, k


def log_approx(x: Rational, delta: Rational) -> Fraction:
    """
    Approximate log(x) for rational x > 0 to additive accuracy delta.

    x is written as y * (3/2)**k with 2/3 <= y <= 1, and both log(y) and log(3/2)
    come from the series of log(1 - z) with |z| <= 1/3.

    Parameters:
    - x (Fraction): Positive argument.
    - delta (Fraction): Additive accuracy in (0, 1).

    Returns:
    - Fraction: t with |log(x) - t| <= delta.
    """
    x, delta = as_fraction(x), _check_delta(delta)
    if x <= 0:
        raise InputError(f"log_approx needs x > 0, got {x}")
    if x == 1:
        return Fraction(0)
    y, k = _reduce_three_halves(x)
    log_y = -_log1m_series(1 - y, delta / 2)
    if k == 0:
        return log_y
    log_three_halves = _log1m_series(Fraction(1, 3), delta / (2 * abs(k)))
    return log_y + k * log_three_halves


def log_bounds(x: Rational, delta: Rational = Fraction(1, 1 << 40)) -> Tuple[Fraction, Fraction]:
    """Rational (lower, upper) around log(x)."""
    t = log_approx(x, delta)
    delta = as_fraction(delta)
    return t - delta, t + delta


def log1m_exp_bound(z: Rational) -> Fraction:
    """
    Upper bound on |log(1 - exp(-z))| for z > 0, namely max{1, log(2/z)} rounded up.
    """
    z = as_fraction(z)
    if z <= 0:
        raise InputError(f"log1m_exp_bound needs z > 0, got {z}")
    if z >= 1:
        return Fraction(1)
    eps = Fraction(1, 64)
    return max(Fraction(1), log_approx(2 / z, eps) + eps)
