from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kostkavol.core.base.errors import DegenerateInstanceError, InputError, PreconditionError
from kostkavol.core.domain.partition import (
    Instance,
    Partition,
    Weight,
    centroid_slacks,
    gt_volume,
    lift_q,
    majorization_slacks,
    majorizes,
    normalize,
    project_q,
)
from kostkavol.core.domain.polytope import (
    DIAGONAL_LOWER,
    DIAGONAL_UPPER,
    ROW_SUM_TOP,
    TOP_INTERLACE,
    HalfspacePolytope,
    build_ptilde,
    pattern_from_point,
    ptilde_polytope,
    ptilde_variables,
)


def test_partition_validation():
    assert Partition((3, 1, 0)).n == 3
    with pytest.raises(InputError):
        Partition((1, 2))
    with pytest.raises(InputError):
        Partition((1,))
    with pytest.raises(InputError):
        Partition((1.5, 0))


def test_partition_properties():
    lam = Partition((Fraction(5, 2), 1, 0))
    assert lam.total == Fraction(7, 2)
    assert lam.lambda_gap == 1
    assert not lam.is_integral
    assert lam.prefix_sums() == [Fraction(5, 2), Fraction(7, 2), Fraction(7, 2)]


@pytest.mark.parametrize(
    "lam, mu, expected",
    [
        ((2, 1, 0), (1, 1, 1), True),
        ((2, 1, 0), (0, 1, 2), True),
        ((2, 1, 0), (3, 0, 0), False),
        ((2, 1, 0), (1, 1, 0), False),
        ((3, 1, 0), (2, 1, 1), True),
    ],
)
def test_majorizes(lam, mu, expected):
    assert majorizes(lam, mu) is expected


def test_majorizes_length_mismatch():
    with pytest.raises(InputError):
        majorizes((2, 1, 0), (1, 2))


def test_slacks():
    assert majorization_slacks((3, 1, 0), (2, 1, 1)) == [1, 1]
    assert centroid_slacks((3, 1, 0)) == [Fraction(5, 3), Fraction(4, 3)]


@st.composite
def weights_in_permutohedron(draw):
    n = draw(st.integers(min_value=2, max_value=5))
    parts = sorted(draw(st.lists(st.integers(min_value=0, max_value=20), min_size=n, max_size=n)), reverse=True)
    # convex combination of lambda and its reversal lies inside the permutohedron
    t = draw(st.fractions(min_value=0, max_value=1, max_denominator=50))
    mu = [t * a + (1 - t) * b for a, b in zip(parts, reversed(parts))]
    return parts, mu


@given(weights_in_permutohedron())
def test_convex_combinations_are_majorized(pair):
    lam, mu = pair
    assert majorizes(lam, mu)
    assert all(s >= 0 for s in majorization_slacks(lam, mu))


def test_normalize_integral_shift():
    instance = normalize((2, 1, 0), (1, 1, 1))
    assert instance.lam.parts == (3, 2, 1)
    assert instance.mu.entries == (2, 2, 2)
    assert instance.shift == 1 and instance.scale == 1
    assert instance.volume_factor == 1
    assert instance.is_integral
    assert instance.original_lam.parts == (2, 1, 0)


def test_normalize_rescales_small_gaps():
    instance = normalize((1, Fraction(1, 2), 0), (Fraction(1, 2),) * 3)
    assert instance.scale == 2
    assert instance.lam.parts == (3, 2, 1)
    assert instance.mu.entries == (2, 2, 2)
    assert instance.volume_factor == Fraction(1, 2)
    assert not instance.is_integral


def test_normalize_errors():
    with pytest.raises(DegenerateInstanceError):
        normalize((1, 1, 0), (1, 1, 0))
    with pytest.raises(PreconditionError):
        normalize((2, 1, 0), (1, 1, 2))
    with pytest.raises(PreconditionError):
        normalize((2, 1, 0), (3, 0, 0))
    with pytest.raises(InputError):
        normalize((2, 1, 0), (3, 0))


def test_instance_rejects_unnormalized_pairs():
    with pytest.raises(PreconditionError):
        Instance(Partition((2, 1, 0)), Weight((1, 1, 1)))


def test_project_and_lift():
    assert project_q((3, 2, 1)) == (2, 1)
    assert lift_q((2, 1)) == (2, 1, 0)
    assert project_q(lift_q((Fraction(1, 3), 5))) == (Fraction(1, 3), 5)


@pytest.mark.parametrize(
    "lam, expected",
    [((2, 1, 0), 1), ((3, 1, 0), 3), ((3, 2, 1), 1), ((4, 2, 0), 8), ((3, 2, 1, 0), 1)],
)
def test_gt_volume(lam, expected):
    assert gt_volume(lam) == expected


# -- projected Kostka polytope ------------------------------------------------------------


def test_ptilde_canonical_interval():
    poly = ptilde_polytope((2, 1, 0), (1, 1, 1))
    assert poly.dim == 1
    assert poly.contains((1,)) and poly.contains((2,)) and poly.contains((Fraction(3, 2),))
    assert not poly.contains((0,)) and not poly.contains((Fraction(5, 2),))
    assert poly.sources() == {TOP_INTERLACE: 2, ROW_SUM_TOP: 2, DIAGONAL_LOWER: 1, DIAGONAL_UPPER: 1}


def test_ptilde_dimensions():
    assert ptilde_variables(4) == [(2, 1), (3, 1), (3, 2)]
    assert build_ptilde(normalize((3, 2, 1, 0), (2, 2, 1, 1))).dim == 3
    with pytest.raises(InputError):
        ptilde_polytope((1, 0), (1, 0))
    with pytest.raises(InputError):
        ptilde_polytope((2, 1, 0), (1, 2))


def test_pattern_from_point():
    pattern = pattern_from_point(Partition((2, 1, 0)), Weight((1, 1, 1)), (Fraction(3, 2),))
    assert pattern == [[1], [Fraction(3, 2), Fraction(1, 2)], [2, 1, 0]]


def test_box_polytope():
    cube = HalfspacePolytope.box([0, 0], [1, 2])
    assert cube.contains((1, 2))
    assert not cube.contains((Fraction(-1, 10), 0))
    with pytest.raises(InputError):
        HalfspacePolytope.from_inequalities(2, [([1], 0)])
