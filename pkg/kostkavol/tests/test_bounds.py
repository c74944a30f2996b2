from fractions import Fraction
from itertools import product

import mpmath
import pytest

from kostkavol.core.base.errors import InputError, PreconditionError
from kostkavol.core.certarith.certified import CertifiedValue, sqrt_bounds
from kostkavol.core.bounds.bracket import (
    assemble_bracket,
    ball_volume,
    closed_form_bracket,
    inscribed_ball_floor,
    postnikov_volume,
    psh_volume,
    ratio_envelope,
)
from kostkavol.core.conditioning.record import condition
from kostkavol.core.domain.partition import normalize
from kostkavol.core.optimization.ellipsoid import OptimizationResult, minimize
from kostkavol.core.oracle.volume import exact_kostka_volume

mpmath.mp.dps = 90


@pytest.fixture(autouse=True)
def _module_precision():
    # other test modules set mpmath.mp.dps at import time; keep this module's precision while it runs
    with mpmath.workdps(90):
        yield


def mp(q):
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def near_zero_result(instance, radius=Fraction(10 ** 7)):
    """An optimizer result around g* = 0, the exact minimum for a centroid weight."""
    spread = Fraction(1, 1000)
    return OptimizationResult(
        y_star=(Fraction(0),) * (instance.n - 1),
        g_star=CertifiedValue.from_bounds(-spread, spread),
        iterations=0,
        stationarity_residual=CertifiedValue.exact(0),
        domain_doublings=0,
        lower_certificate=-spread,
        eps_opt=Fraction(1, 100),
        domain_radius=radius,
    )


@pytest.mark.parametrize("k, exact", [(2, mpmath.pi), (3, 4 * mpmath.pi / 3), (4, mpmath.pi ** 2 / 2), (5, 8 * mpmath.pi ** 2 / 15)])
def test_ball_volume(k, exact):
    ball = ball_volume(k)
    assert mp(ball.lower) <= exact <= mp(ball.upper)
    assert ball.width < Fraction(1, 10 ** 50)


def test_ball_volume_edges():
    assert ball_volume(1).bounds() == (Fraction(2), Fraction(2))
    with pytest.raises(InputError):
        ball_volume(0)


@pytest.mark.parametrize(
    "lam, expected",
    [((1, 0), 1), ((2, 1, 0), 3), ((3, 2, 1), 3), ((4, 2, 0), 12), ((Fraction(1, 2), 0), Fraction(1, 2))],
)
def test_postnikov_volume(lam, expected):
    assert postnikov_volume(lam) == expected


def test_psh_volume_threshold():
    assert psh_volume((2, 1, 0)) == (3, True)
    bound, exact = psh_volume((2, 1, 0), threshold=2)
    assert not exact
    assert bound == 4 * 3 ** 6
    assert bound >= postnikov_volume((2, 1, 0))


def test_inscribed_ball_floor_canonical():
    instance = normalize((2, 1, 0), (1, 1, 1))
    floor = inscribed_ball_floor(instance, condition(instance))
    # sqrt(2) * (1/4) / sqrt(2) * 2
    assert floor.lower <= Fraction(1, 2) <= floor.upper
    assert floor.upper ** 2 <= 2


def test_bracket_contains_canonical_volume():
    instance = normalize((2, 1, 0), (1, 1, 1))
    record = condition(instance)
    bracket = assemble_bracket(instance, record, near_zero_result(instance))
    assert bracket.is_finite
    assert bracket.lower ** 2 <= 2 <= bracket.upper ** 2
    assert bracket.psh_volume == 3 and bracket.psh_exact
    assert bracket.contains(CertifiedValue.from_bounds(*sqrt_bounds(2)))
    assert bracket.F_estimate.upper >= bracket.upper - Fraction(1, 10 ** 6)
    assert bracket.approximation_ratio_log.lower > 0
    assert bracket.estimate_ratio_log > 0


def test_closed_form_bracket_is_looser():
    instance = normalize((2, 1, 0), (1, 1, 1))
    record = condition(instance)
    opt = near_zero_result(instance)
    bracket = assemble_bracket(instance, record, opt)
    lower, upper = closed_form_bracket(instance, record, opt)
    assert lower <= bracket.lower
    assert upper >= bracket.upper


def test_closed_form_bracket_preconditions():
    scaled = normalize((1, Fraction(1, 2), 0), (Fraction(1, 2),) * 3)
    with pytest.raises(PreconditionError):
        closed_form_bracket(scaled, condition(scaled), near_zero_result(scaled))
    boundary = normalize((2, 1, 0), (2, 1, 0))
    with pytest.raises(PreconditionError):
        closed_form_bracket(boundary, condition(boundary), near_zero_result(boundary))


def test_boundary_bracket_is_unbounded_above():
    instance = normalize((2, 1, 0), (2, 1, 0))
    bracket = assemble_bracket(instance, condition(instance), near_zero_result(instance))
    assert not bracket.is_finite
    assert bracket.lower > 0
    assert bracket.ball_floor == CertifiedValue.exact(0)
    assert ratio_envelope(bracket, 3, Fraction(2)) == (None, False)


def test_ratio_envelope():
    instance = normalize((2, 1, 0), (1, 1, 1))
    bracket = assemble_bracket(instance, condition(instance), near_zero_result(instance))
    k, ok = ratio_envelope(bracket, 3, Fraction(2))
    assert k is not None
    assert ok is (k <= 12)
    loose_k, loose_ok = ratio_envelope(bracket, 3, Fraction(2), k0=Fraction(10 ** 6))
    assert loose_k == k and loose_ok
    with pytest.raises(InputError):
        ratio_envelope(bracket, 3, Fraction(0))


@pytest.mark.slow
def test_bracket_from_minimizer_contains_canonical_volume():
    instance = normalize((2, 1, 0), (1, 1, 1))
    record = condition(instance)
    opt = minimize(instance, Fraction(1, 100), record=record)
    bracket = assemble_bracket(instance, record, opt)
    assert bracket.lower ** 2 <= 2 <= bracket.upper ** 2
    lower, upper = closed_form_bracket(instance, record, opt)
    assert lower <= bracket.lower and upper >= bracket.upper


def test_psh_volume_is_reported_for_the_input_lambda():
    instance = normalize((1, Fraction(1, 2), 0), (Fraction(1, 2),) * 3)
    assert instance.scale == 2
    bracket = assemble_bracket(instance, condition(instance), near_zero_result(instance))
    assert bracket.psh_volume == postnikov_volume((1, Fraction(1, 2), 0)) == Fraction(3, 4)


SWEEP_LAMBDAS = [(3, 1, 0), (4, 2, 1), (5, 2, 0), (6, 3, 1), (8, 4, 0), (4, 3, 2, 0), (5, 3, 1, 0), (6, 4, 1, 0)]


def interior_weights(lam):
    """Integral, sorted mu with every prefix sum strictly below lambda's."""
    n, total = len(lam), sum(lam)
    for mu in product(range(lam[0] + 1), repeat=n):
        if sum(mu) != total or any(mu[i] < mu[i + 1] for i in range(n - 1)):
            continue
        if all(sum(mu[:k]) < sum(lam[:k]) for k in range(1, n)):
            yield mu


SWEEP = [(lam, mu) for lam in SWEEP_LAMBDAS for mu in interior_weights(lam)]


def test_sweep_covers_enough_instances():
    assert len(SWEEP) >= 25
    assert sum(len(lam) == 4 for lam, _ in SWEEP) >= 10
    assert ((3, 1, 0), (2, 1, 1)) in SWEEP and ((8, 4, 0), (4, 4, 4)) in SWEEP


@pytest.mark.slow
@pytest.mark.parametrize("lam, mu", SWEEP, ids=[f"{lam}-{mu}" for lam, mu in SWEEP])
def test_bracket_contains_exact_volume_across_instances(lam, mu):
    instance = normalize(lam, mu)
    record = condition(instance)
    opt = minimize(instance, Fraction(1, 100), record=record)
    bracket = assemble_bracket(instance, record, opt)
    volume_squared = exact_kostka_volume(lam, mu).volume_squared
    assert bracket.lower ** 2 <= volume_squared <= bracket.upper ** 2
    _, within = ratio_envelope(bracket, len(lam), Fraction(lam[0]))
    assert within
