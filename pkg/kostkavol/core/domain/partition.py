from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from math import ceil
from typing import Iterable, List, Sequence, Tuple

from ..base.errors import DegenerateInstanceError, InputError, PreconditionError
from ..certarith.certified import Rational, as_fraction


def _fractions(values: Iterable[Rational], what: str) -> Tuple[Fraction, ...]:
    try:
        return tuple(as_fraction(v) for v in values)
    except InputError as exc:
        raise InputError(f"{what}: {exc}") from exc


@dataclass(frozen=True)
class Partition:
    """
    Non-increasing tuple of exact rationals: the top row of a Gelfand-Tsetlin pattern.
    """

    parts: Tuple[Fraction, ...]

    def __post_init__(self):
        parts = _fractions(self.parts, "partition")
        if len(parts) < 2:
            raise InputError("a partition needs at least 2 parts")
        for i in range(len(parts) - 1):
            if parts[i] < parts[i + 1]:
                raise InputError(f"partition parts must be non-increasing: {parts[i]} < {parts[i + 1]} at index {i}")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return len(self.parts)

    @property
    def total(self) -> Fraction:
        return sum(self.parts, Fraction(0))

    @property
    def mean(self) -> Fraction:
        return self.total / self.n

    @property
    def lambda_gap(self) -> Fraction:
        return min(self.parts[i] - self.parts[i + 1] for i in range(self.n - 1))

    @property
    def is_integral(self) -> bool:
        return all(p.denominator == 1 for p in self.parts)

    def prefix_sums(self) -> List[Fraction]:
        return list(accumulate(self.parts))

    def scaled(self, beta: Rational, alpha: Rational = 0) -> "Partition":
        return Partition(tuple(as_fraction(beta) * p + alpha for p in self.parts))

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class Weight:
    """
    Tuple of exact rationals: the row-sum increments of a pattern (any order).
    """

    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        entries = _fractions(self.entries, "weight")
        if not entries:
            raise InputError("a weight needs at least one entry")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def total(self) -> Fraction:
        return sum(self.entries, Fraction(0))

    @property
    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    def sorted_prefix_sums(self) -> List[Fraction]:
        """Prefix sums of the entries sorted in non-increasing order."""
        return list(accumulate(sorted(self.entries, reverse=True)))

    def scaled(self, beta: Rational, alpha: Rational = 0) -> "Weight":
        return Weight(tuple(as_fraction(beta) * e + alpha for e in self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return self.n


def _as_partition(value) -> Partition:
    return value if isinstance(value, Partition) else Partition(tuple(value))


def _as_weight(value) -> Weight:
    return value if isinstance(value, Weight) else Weight(tuple(value))


def majorizes(lam, mu) -> bool:
    """
    True iff every prefix sum of mu sorted descending is at most the matching prefix
    sum of lambda, and the totals agree.

    Parameters:
    - lam (Partition or sequence): The dominating partition.
    - mu (Weight or sequence): The weight, in any order.
    """
    lam, mu = _as_partition(lam), _as_weight(mu)
    if lam.n != mu.n:
        raise InputError(f"length mismatch: lambda has {lam.n} parts, mu has {mu.n}")
    lam_prefix, mu_prefix = lam.prefix_sums(), mu.sorted_prefix_sums()
    if lam_prefix[-1] != mu_prefix[-1]:
        return False
    return all(m <= l for l, m in zip(lam_prefix, mu_prefix))


def majorization_slacks(lam, mu) -> List[Fraction]:
    """s_k = P_k(lambda) - P_k(mu) for k = 1..n-1 (P_k = sum of the k largest entries)."""
    lam, mu = _as_partition(lam), _as_weight(mu)
    return [l - m for l, m in zip(lam.prefix_sums()[:-1], mu.sorted_prefix_sums()[:-1])]


def centroid_slacks(lam) -> List[Fraction]:
    """c_k = P_k(lambda) - k * mean(lambda) for k = 1..n-1."""
    lam = _as_partition(lam)
    mean = lam.mean
    return [p - (k + 1) * mean for k, p in enumerate(lam.prefix_sums()[:-1])]


@dataclass(frozen=True)
class Instance:
    """
    A normalized (lambda, mu) pair: lambda_n >= 1, all gaps >= 1, lambda majorizes mu.

    `shift` (alpha) and `scale` (beta) record the affine map applied to the input, so that
    V(original) = beta**(-(n-1)(n-2)/2) * V(normalized).
    """

    lam: Partition
    mu: Weight
    shift: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)
    original_lam: Partition = field(default=None, compare=False)
    original_mu: Weight = field(default=None, compare=False)

    def __post_init__(self):
        if self.lam.n != self.mu.n:
            raise InputError(f"length mismatch: lambda has {self.lam.n} parts, mu has {self.mu.n}")
        if self.lam.total != self.mu.total:
            raise PreconditionError(f"|lambda| = {self.lam.total} differs from |mu| = {self.mu.total}")
        if not majorizes(self.lam, self.mu):
            raise PreconditionError("lambda does not majorize mu (mu lies outside the permutohedron of lambda)")
        if self.lam.parts[-1] < 1 or self.lam.lambda_gap < 1:
            raise PreconditionError("instance is not normalized: need lambda_n >= 1 and gaps >= 1")
        if self.original_lam is None:
            object.__setattr__(self, "original_lam", self.lam.scaled(1 / self.scale, -self.shift / self.scale))
        if self.original_mu is None:
            object.__setattr__(self, "original_mu", self.mu.scaled(1 / self.scale, -self.shift / self.scale))

    @property
    def n(self) -> int:
        return self.lam.n

    @property
    def dim(self) -> int:
        """Dimension (n-1)(n-2)/2 of the projected Kostka polytope."""
        return (self.n - 1) * (self.n - 2) // 2

    @property
    def volume_factor(self) -> Fraction:
        """beta**(-dim): converts volumes of the normalized instance back to the input."""
        return Fraction(1) / self.scale ** self.dim

    @property
    def is_integral(self) -> bool:
        return self.original_lam.is_integral and self.original_mu.is_integral


def normalize(lam, mu) -> Instance:
    """
    Shift and rescale (lambda, mu) to satisfy lambda_n >= 1 and gaps >= 1.

    beta = ceil(1/lambda_gap) and alpha = 1 - beta*lambda_n, so the normalized smallest
    part is exactly 1.

    Raises:
    - DegenerateInstanceError: lambda has a repeated part (volume 0).
    - PreconditionError: |lambda| != |mu| or lambda does not majorize mu.
    """
    lam, mu = _as_partition(lam), _as_weight(mu)
    if lam.n != mu.n:
        raise InputError(f"length mismatch: lambda has {lam.n} parts, mu has {mu.n}")
    if lam.total != mu.total:
        raise PreconditionError(f"|lambda| = {lam.total} differs from |mu| = {mu.total}")
    if not majorizes(lam, mu):
        raise PreconditionError("lambda does not majorize mu (mu lies outside the permutohedron of lambda)")
    gap = lam.lambda_gap
    if gap == 0:
        raise DegenerateInstanceError("lambda has repeated parts: the Kostka polytope has volume 0")
    beta = Fraction(ceil(1 / gap))
    alpha = 1 - beta * lam.parts[-1]
    return Instance(
        lam=lam.scaled(beta, alpha),
        mu=mu.scaled(beta, alpha),
        shift=alpha,
        scale=beta,
        original_lam=lam,
        original_mu=mu,
    )


def project_q(x: Sequence[Rational]) -> Tuple[Fraction, ...]:
    """q(x) = (x_1 - x_n, ..., x_{n-1} - x_n)."""
    x = _fractions(x, "vector")
    return tuple(v - x[-1] for v in x[:-1])


def lift_q(y: Sequence[Rational]) -> Tuple[Fraction, ...]:
    """The section of q that appends a zero coordinate."""
    return _fractions(y, "vector") + (Fraction(0),)


def gt_volume(lam) -> Fraction:
    """Volume of the projected GT polytope of lambda: prod_{i<j} (lambda_i - lambda_j)/(j - i)."""
    lam = _as_partition(lam)
    volume = Fraction(1)
    for i in range(lam.n):
        for j in range(i + 1, lam.n):
            volume *= (lam.parts[i] - lam.parts[j]) / (j - i)
    return volume
