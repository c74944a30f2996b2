"""
Certified real numbers: an exact rational approximation plus an exact error radius.

All arithmetic here is on ``fractions.Fraction``; floats never enter a certified value.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Tuple, Union

from ..base.errors import InputError

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"

Rational = Union[int, Fraction]


def as_fraction(value: Rational) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    raise InputError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class CertifiedValue:
    """
    A real number known to lie in an interval described by (value, error, mode).

    - additive: the true quantity lies in [value - error, value + error].
    - multiplicative: the true quantity lies within a relative factor (1 ± error) of value.
      ``bounds()`` returns [value/(1+error), value/(1-error)] (for value > 0), which
      encloses the interval whether the error is measured relative to the
      approximation or to the true quantity.
    """

    value: Fraction
    error: Fraction = Fraction(0)
    mode: str = ADDITIVE

    def __post_init__(self):
        object.__setattr__(self, "value", as_fraction(self.value))
        object.__setattr__(self, "error", as_fraction(self.error))
        if self.error < 0:
            raise InputError("certified error radius must be non-negative")
        if self.mode not in (ADDITIVE, MULTIPLICATIVE):
            raise InputError(f"unknown certification mode {self.mode!r}")
        if self.mode == MULTIPLICATIVE and (self.value == 0 or self.error >= 1):
            raise InputError("multiplicative certificates need a non-zero value and error < 1")

    # -- constructors ------------------------------------------------------------------

    @classmethod
    def exact(cls, value: Rational) -> "CertifiedValue":
        return cls(as_fraction(value), Fraction(0))

    @classmethod
    def from_bounds(cls, lower: Rational, upper: Rational) -> "CertifiedValue":
        lower, upper = as_fraction(lower), as_fraction(upper)
        if lower > upper:
            raise InputError(f"empty interval [{lower}, {upper}]")
        return cls((lower + upper) / 2, (upper - lower) / 2)

    # -- views -------------------------------------------------------------------------

    def bounds(self) -> Tuple[Fraction, Fraction]:
        if self.mode == ADDITIVE:
            return self.value - self.error, self.value + self.error
        a, b = self.value / (1 + self.error), self.value / (1 - self.error)
        return (a, b) if a <= b else (b, a)

    @property
    def lower(self) -> Fraction:
        return self.bounds()[0]

    @property
    def upper(self) -> Fraction:
        return self.bounds()[1]

    @property
    def width(self) -> Fraction:
        lo, hi = self.bounds()
        return hi - lo

    def to_additive(self) -> "CertifiedValue":
        if self.mode == ADDITIVE:
            return self
        return CertifiedValue.from_bounds(*self.bounds())

    def contains(self, x: Rational) -> bool:
        lo, hi = self.bounds()
        return lo <= x <= hi

    def overlaps(self, other: "CertifiedValue") -> bool:
        a_lo, a_hi = self.bounds()
        b_lo, b_hi = other.bounds()
        return a_lo <= b_hi and b_lo <= a_hi

    def certainly_le(self, other: Union["CertifiedValue", Rational]) -> bool:
        return self.upper <= _lift(other).lower

    def certainly_lt(self, other: Union["CertifiedValue", Rational]) -> bool:
        return self.upper < _lift(other).lower

    # -- arithmetic (results are additive) -----------------------------------------------

    def __neg__(self) -> "CertifiedValue":
        lo, hi = self.bounds()
        return CertifiedValue.from_bounds(-hi, -lo)

    def __add__(self, other) -> "CertifiedValue":
        other = _lift(other)
        a_lo, a_hi = self.bounds()
        b_lo, b_hi = other.bounds()
        return CertifiedValue.from_bounds(a_lo + b_lo, a_hi + b_hi)

    __radd__ = __add__

    def __sub__(self, other) -> "CertifiedValue":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "CertifiedValue":
        return _lift(other) + (-self)

    def __mul__(self, other) -> "CertifiedValue":
        other = _lift(other)
        a_lo, a_hi = self.bounds()
        b_lo, b_hi = other.bounds()
        corners = (a_lo * b_lo, a_lo * b_hi, a_hi * b_lo, a_hi * b_hi)
        return CertifiedValue.from_bounds(min(corners), max(corners))

    __rmul__ = __mul__

    def reciprocal(self) -> "CertifiedValue":
        lo, hi = self.bounds()
        if lo <= 0 <= hi:
            raise InputError("cannot invert an interval that contains 0")
        return CertifiedValue.from_bounds(1 / hi, 1 / lo)

    def __truediv__(self, other) -> "CertifiedValue":
        return self * _lift(other).reciprocal()

    def __str__(self) -> str:
        lo, hi = self.bounds()
        return f"[{float(lo):.6g}, {float(hi):.6g}]"


def _lift(value) -> CertifiedValue:
    return value if isinstance(value, CertifiedValue) else CertifiedValue.exact(value)


def ceil_log2(q: Rational) -> int:
    """Smallest integer k with 2**k >= q, for q > 0."""
    q = as_fraction(q)
    if q <= 0:
        raise InputError("ceil_log2 needs a positive argument")
    if q >= 1:
        ceiling = -((-q.numerator) // q.denominator)
        return (ceiling - 1).bit_length()
    # q < 1: 2**-m >= q  <=>  2**m <= 1/q
    return -((q.denominator // q.numerator).bit_length() - 1)


def sqrt_bounds(q: Rational, bits: int = 64) -> Tuple[Fraction, Fraction]:
    """
    Rational (lower, upper) with lower <= sqrt(q) <= upper and relative width <= 2**-bits.
    """
    q = as_fraction(q)
    if q < 0:
        raise InputError("square root of a negative number")
    if q == 0:
        return Fraction(0), Fraction(0)
    a, b = q.numerator, q.denominator
    radicand = a * b
    shift = max(0, bits + 1 - radicand.bit_length() // 2)
    scaled = radicand << (2 * shift)
    root = isqrt(scaled)
    scale = b << shift
    lower = Fraction(root, scale)
    upper = lower if root * root == scaled else Fraction(root + 1, scale)
    return lower, upper


def certified_sqrt(q: Rational, bits: int = 64) -> CertifiedValue:
    return CertifiedValue.from_bounds(*sqrt_bounds(q, bits))


def ceil_sqrt(q: Rational) -> int:
    """Smallest integer L with L*L >= q."""
    q = as_fraction(q)
    if q <= 0:
        return 0
    ceiling = -((-q.numerator) // q.denominator)
    root = isqrt(ceiling)
    return root if root * root >= ceiling else root + 1


def _arctan_inv_fixed(x: int, scale_bits: int) -> Tuple[int, int]:
    """floor-based fixed-point arctan(1/x) * 2**scale_bits and its error bound in ulps."""
    one = 1 << scale_bits
    total, k = 0, 0
    power = one // x
    while power:
        term = power // (2 * k + 1)
        total += -term if k % 2 else term
        k += 1
        power //= x * x
    # each term is off by < 2 ulps and the first omitted term is < 2 ulps
    return total, 2 * k + 2


@lru_cache(maxsize=16)
def pi_bracket(digits: int = 60) -> Tuple[Fraction, Fraction]:
    """
    Rational bracket (lower, upper) around pi of width below 10**-digits, from Machin's formula.
    """
    scale_bits = (digits * 3322) // 1000 + 16
    a, err_a = _arctan_inv_fixed(5, scale_bits)
    b, err_b = _arctan_inv_fixed(239, scale_bits)
    approx = 16 * a - 4 * b
    slack = 16 * err_a + 4 * err_b
    return Fraction(approx - slack, 1 << scale_bits), Fraction(approx + slack, 1 << scale_bits)


def certified_pi(digits: int = 60) -> CertifiedValue:
    return CertifiedValue.from_bounds(*pi_bracket(digits))
