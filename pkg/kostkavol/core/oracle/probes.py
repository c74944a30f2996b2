from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple

from ..base.errors import InputError, PreconditionError
from ..base.log import GlobalLogger
from ..certarith.certified import as_fraction
from ..domain.partition import _as_partition, _as_weight, majorizes
from .volume import DEFAULT_DIM_CAP, exact_kostka_volume


@dataclass(frozen=True)
class LogConcavityReport:
    """
    Exact log-concavity checks of mu -> V(lambda, mu) along a segment.

    Parameters:
    - points (List[Tuple[Fraction, ...]]): mu_a + (t/steps)(mu_b - mu_a) for t = 0..steps.
    - volumes (List[Fraction]): Projected volumes at the points.
    - triples (List[bool]): V(t)^2 >= V(t-1) V(t+1) for every interior t.
    - midpoint (bool): V((mu_a + mu_b)/2)^2 >= V(mu_a) V(mu_b).
    - midpoint_volume (Fraction): Projected volume at the midpoint.
    """

    points: List[Tuple[Fraction, ...]]
    volumes: List[Fraction]
    triples: List[bool] = field(default_factory=list)
    midpoint: bool = True
    midpoint_volume: Fraction = Fraction(0)

    @property
    def holds(self) -> bool:
        return self.midpoint and all(self.triples)


def _blend(a, b, t: Fraction) -> Tuple[Fraction, ...]:
    return tuple(x + t * (y - x) for x, y in zip(a, b))


def logconcavity_probe(lam, mu_a, mu_b, steps: int = 4, dim_cap: int = DEFAULT_DIM_CAP) -> LogConcavityReport:
    """
    Check log-concavity of the Kostka volume on the segment [mu_a, mu_b] with exact rationals.

    The constant sqrt((n-1)!) between the projected and the true volume cancels from every
    inequality, so the checks run on projected volumes.

    Raises:
    - PreconditionError: an endpoint lies outside the permutohedron of lambda.
    - InputError: steps < 2.
    """
    lam = _as_partition(lam)
    mu_a, mu_b = _as_weight(mu_a), _as_weight(mu_b)
    if steps < 2:
        raise InputError(f"steps must be at least 2, got {steps}")
    for name, mu in (("mu_a", mu_a), ("mu_b", mu_b)):
        if not majorizes(lam, mu):
            raise PreconditionError(f"{name} lies outside the permutohedron of lambda")

    points = [_blend(mu_a.entries, mu_b.entries, Fraction(t, steps)) for t in range(steps + 1)]
    volumes = [exact_kostka_volume(lam, p, dim_cap).tilde for p in points]
    triples = [volumes[t] ** 2 >= volumes[t - 1] * volumes[t + 1] for t in range(1, steps)]
    middle = exact_kostka_volume(lam, _blend(mu_a.entries, mu_b.entries, Fraction(1, 2)), dim_cap).tilde
    midpoint = middle ** 2 >= volumes[0] * volumes[-1]
    GlobalLogger.log(
        "log-concavity probe",
        level="debug",
        metadata={"steps": steps, "midpoint": midpoint, "failed_triples": triples.count(False)},
    )
    return LogConcavityReport(
        points=points,
        volumes=volumes,
        triples=triples,
        midpoint=midpoint,
        midpoint_volume=as_fraction(middle),
    )
