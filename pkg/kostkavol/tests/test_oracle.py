from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from kostkavol.core.base.errors import InputError, PreconditionError, ResourceLimitError
from kostkavol.core.domain.partition import normalize
from kostkavol.core.domain.polytope import HalfspacePolytope
from kostkavol.core.oracle.kostka import (
    enumerate_patterns,
    interlacing_rows,
    kostka_count,
    pattern_weight,
    scaling_limit,
)
from kostkavol.core.oracle.probes import logconcavity_probe
from kostkavol.core.oracle.volume import enumerate_vertices, exact_kostka_volume, exact_volume


def partitions(total, n, largest=None):
    largest = total if largest is None else largest
    if n == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, largest), -1, -1):
        for rest in partitions(total - first, n - 1, first):
            yield (first,) + rest


def compositions(total, n):
    return [c for c in product(range(total + 1), repeat=n) if sum(c) == total]


@pytest.mark.parametrize(
    "lam, mu, expected",
    [
        ((2, 1, 0), (1, 1, 1), 2),
        ((3, 2, 1), (2, 2, 2), 2),
        ((3, 1, 0), (2, 1, 1), 2),
        ((4, 2, 0), (2, 2, 2), 3),
        ((2, 2, 0, 0), (1, 1, 1, 1), 2),
        ((3, 1, 0, 0), (1, 1, 1, 1), 3),
        ((2, 1, 1, 0), (1, 1, 1, 1), 3),
        ((3, 2, 1), (3, 2, 1), 1),
        ((2, 1, 0), (3, 0, 0), 0),
        ((2, 1, 0), (1, 1, 0), 0),
        ((5,), (5,), 1),
    ],
)
def test_kostka_examples(lam, mu, expected):
    assert kostka_count(lam, mu) == expected


def test_kostka_accepts_instances():
    assert kostka_count(normalize((2, 1, 0), (1, 1, 1))) == 2


def test_kostka_rejects_bad_input():
    with pytest.raises(InputError):
        kostka_count((1, 2), (1, 2))
    with pytest.raises(InputError):
        kostka_count((Fraction(3, 2), 0), (1, Fraction(1, 2)))
    with pytest.raises(InputError):
        kostka_count((2, 1, 0), (1, 2))
    with pytest.raises(InputError):
        kostka_count((2, 1, 0))


def test_interlacing_rows():
    assert sorted(interlacing_rows((3, 1, 0), 3)) == [(2, 1), (3, 0)]
    assert list(interlacing_rows((3, 1, 0), 5)) == []


@pytest.mark.parametrize("n", [2, 3, 4])
def test_counting_matches_enumeration(n):
    for total in range(0, 7):
        for lam in partitions(total, n):
            for mu in compositions(total, n):
                patterns = list(enumerate_patterns(lam, mu))
                assert kostka_count(lam, mu) == len(patterns), (lam, mu)
                for pattern in patterns:
                    assert pattern[-1] == lam
                    assert pattern_weight(pattern) == tuple(Fraction(m) for m in mu)


@st.composite
def weight_permutations(draw):
    n = draw(st.integers(min_value=3, max_value=5))
    mu = draw(st.lists(st.integers(min_value=0, max_value=4), min_size=n, max_size=n))
    lam = list(mu)
    for source, target in draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8)):
        if lam[source] > 0:
            lam[source] -= 1
            lam[target] += 1
    return tuple(sorted(lam, reverse=True)), tuple(mu), tuple(draw(st.permutations(mu)))


@settings(max_examples=60, deadline=None)
@given(weight_permutations())
def test_kostka_is_symmetric_in_mu(case):
    lam, mu, shuffled = case
    assert kostka_count(lam, mu) == kostka_count(lam, shuffled)


def test_pattern_weight():
    assert pattern_weight([[1], [Fraction(3, 2), Fraction(1, 2)], [2, 1, 0]]) == (1, 1, 1)


def test_scaling_limit():
    assert scaling_limit((3, 1, 0), (2, 1, 1), N=16) == Fraction(17, 16)
    assert scaling_limit((3, 1, 0), (2, 1, 1)) == 2
    assert scaling_limit(normalize((2, 1, 0), (1, 1, 1)), N=4) == Fraction(5, 4)
    with pytest.raises(InputError):
        scaling_limit((3, 1, 0), (2, 1, 1), N=0)
    with pytest.raises(InputError):
        scaling_limit((3, 1, 0))


def test_scaling_limit_converges_to_projected_volume():
    lam, mu = (3, 2, 1, 0), (2, 2, 1, 1)
    tilde = exact_kostka_volume(lam, mu).tilde
    coarse = abs(scaling_limit(lam, mu, N=2) - tilde)
    fine = abs(scaling_limit(lam, mu, N=16) - tilde)
    assert fine < coarse
    assert abs(scaling_limit((3, 1, 0), (2, 1, 1), N=64) - exact_kostka_volume((3, 1, 0), (2, 1, 1)).tilde) == Fraction(1, 64)


@pytest.mark.slow
@pytest.mark.parametrize(
    "lam, mu",
    [
        ((3, 1, 0), (2, 1, 1)),
        ((4, 2, 0), (2, 2, 2)),
        ((5, 2, 0), (3, 2, 2)),
        ((6, 3, 1), (4, 3, 3)),
        ((6, 4, 1, 0), (4, 3, 2, 2)),
    ],
)
def test_scaling_limit_error_shrinks_with_N(lam, mu):
    tilde = exact_kostka_volume(lam, mu).tilde
    errors = [abs(scaling_limit(lam, mu, N=N) - tilde) for N in (8, 16, 32, 64)]
    assert all(a > b for a, b in zip(errors, errors[1:]))
    assert errors[-1] <= tilde / 10
    if len(lam) == 3:
        # K_{N lambda, N mu} = N * tilde + 1 for n = 3
        assert errors == [Fraction(1, N) for N in (8, 16, 32, 64)]


# -- exact volumes ---------------------------------------------------------------------


def test_exact_volume_simple_shapes():
    assert exact_volume(HalfspacePolytope.box([0, 0, 0], [1, 1, 1])) == 1
    assert exact_volume(HalfspacePolytope.box([0, 0], [2, 3])) == 6
    triangle = HalfspacePolytope.from_inequalities(2, [([-1, 0], 0), ([0, -1], 0), ([1, 1], 1)])
    assert exact_volume(triangle) == Fraction(1, 2)
    assert len(enumerate_vertices(triangle).vertices) == 3
    assert exact_volume(HalfspacePolytope.box([1, 1], [1, 1])) == 0


def test_exact_volume_errors():
    quadrant = HalfspacePolytope.from_inequalities(2, [([-1, 0], 0), ([0, -1], 0)])
    with pytest.raises(InputError):
        exact_volume(quadrant)
    with pytest.raises(ResourceLimitError):
        exact_volume(HalfspacePolytope.box([0, 0, 0], [1, 1, 1]), dim_cap=2)


def test_exact_kostka_volume_canonical():
    result = exact_kostka_volume((2, 1, 0), (1, 1, 1))
    assert result.tilde == 1
    assert result.volume_squared == 2
    lo, hi = result.volume.bounds()
    assert lo * lo <= 2 <= hi * hi
    assert exact_kostka_volume(normalize((2, 1, 0), (1, 1, 1))).tilde == 1


def test_exact_kostka_volume_degenerate_cases():
    assert exact_kostka_volume((2, 2, 0), (2, 1, 1)).tilde == 0
    with pytest.raises(InputError):
        exact_kostka_volume((1, 1), (1, 1))
    with pytest.raises(PreconditionError):
        exact_kostka_volume((2, 1, 0), (3, 0, 0))
    with pytest.raises(ResourceLimitError):
        exact_kostka_volume((3, 2, 1, 0), (2, 2, 1, 1), dim_cap=2)


# -- log-concavity ----------------------------------------------------------------------


def test_logconcavity_probe_holds():
    third = Fraction(4, 3)
    report = logconcavity_probe((3, 1, 0), (2, 1, 1), (third, third, third))
    assert report.holds
    assert len(report.points) == 5 and len(report.triples) == 3
    assert report.volumes[0] == 1
    assert report.midpoint_volume > 0


def test_logconcavity_probe_constant_segment():
    report = logconcavity_probe((2, 1, 0), (1, 1, 1), (1, 1, 1), steps=2)
    assert report.holds
    assert len(set(report.volumes)) == 1


def test_logconcavity_probe_rejects_outside_weights():
    with pytest.raises(PreconditionError):
        logconcavity_probe((3, 1, 0), (2, 1, 1), (4, 0, 0))
    with pytest.raises(InputError):
        logconcavity_probe((3, 1, 0), (2, 1, 1), (2, 1, 1), steps=1)


@st.composite
def centroid_segments(draw, n):
    parts = draw(st.lists(st.integers(min_value=0, max_value=6), min_size=n, max_size=n, unique=True))
    lam = tuple(sorted(parts, reverse=True))
    centroid = Fraction(sum(lam), n)
    ends = []
    for _ in range(2):
        vertex = draw(st.permutations(lam))
        t = draw(st.fractions(min_value=0, max_value=Fraction(9, 10), max_denominator=10))
        ends.append(tuple(centroid + t * (v - centroid) for v in vertex))
    return lam, ends[0], ends[1]


@pytest.mark.parametrize("n", [3, 4])
@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_logconcavity_on_random_segments(n, data):
    lam, mu_a, mu_b = data.draw(centroid_segments(n))
    report = logconcavity_probe(lam, mu_a, mu_b, steps=2)
    assert report.holds
    assert all(v > 0 for v in report.volumes)
