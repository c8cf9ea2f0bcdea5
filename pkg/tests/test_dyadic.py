import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dyadlab.dyadic import (
    MAX_PRECISION,
    Direction,
    DyadicPoint,
    DyadicScalar,
    direction_between,
    floor_r,
    project,
    refine_floor,
)
from dyadlab.errors import DegenerateDirectionError, PrecisionError, PrecisionOverflowError

coords = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False)
precisions = st.integers(min_value=0, max_value=MAX_PRECISION)


@pytest.mark.parametrize(
    "x, r, expected",
    [
        ((0.3, 0.0), 2, (0.25, 0.0)),
        ((0.0, 0.0), 17, (0.0, 0.0)),
        ((1.0, -0.3), 2, (1.0, -0.5)),
    ],
)
def test_floor_r_examples(x, r, expected):
    assert floor_r(x, r).as_tuple() == expected


@pytest.mark.parametrize(
    "p, s, expected",
    [
        ((0.75, 0.25), 1, (0.5, 0.0)),
        ((0.25, 0.25), 2, (0.25, 0.25)),
        ((-0.25, 0.0), 0, (-1.0, 0.0)),
    ],
)
def test_refine_floor_examples(p, s, expected):
    assert refine_floor(floor_r(p, 2), s).as_tuple() == expected


def test_refine_floor_rejects_finer_target():
    with pytest.raises(PrecisionError):
        refine_floor(floor_r((0.5, 0.5), 3), 4)


def test_precision_limits():
    with pytest.raises(PrecisionError):
        DyadicScalar.floor(0.5, MAX_PRECISION + 1)
    with pytest.raises(PrecisionError):
        DyadicScalar.floor(0.5, -1)
    with pytest.raises(PrecisionOverflowError):
        DyadicScalar(2**63, 10)
    with pytest.raises(ValueError):
        DyadicScalar.floor(math.inf, 4)


def test_mixed_precision_point_rejected():
    with pytest.raises(PrecisionError):
        DyadicPoint(DyadicScalar(1, 2), DyadicScalar(1, 3))


@pytest.mark.parametrize(
    "u, v, angle",
    [((0, 0), (1, 0), 0.0), ((0, 0), (0, 2), 0.25), ((1, 1), (0, 0), 0.625)],
)
def test_direction_between_examples(u, v, angle):
    assert direction_between(u, v).angle == pytest.approx(angle, abs=1e-15)


def test_direction_between_coincident_points():
    with pytest.raises(DegenerateDirectionError):
        direction_between((0.5, 0.5), (0.5, 0.5))


def test_project_examples():
    assert project((3, 4), Direction(0.0)) == 3.0
    assert project((3, 4), Direction(0.125)) == pytest.approx(7 / math.sqrt(2), abs=1e-12)
    assert project((0, 0), Direction(0.377)) == 0.0


def test_direction_normalization():
    assert Direction(1.25).angle == 0.25
    assert Direction(-0.25).angle == 0.75
    assert Direction(-1e-300).angle == 0.0
    assert Direction(0.5).vector == (-1.0, 0.0)


@given(coords, coords, precisions, precisions)
def test_nesting_is_exact(x, y, r, s):
    r, s = max(r, s), min(r, s)
    assert refine_floor(floor_r((x, y), r), s) == floor_r((x, y), s)


@given(coords, coords, st.integers(min_value=0, max_value=50))
def test_truncation_error_bound(x, y, r):
    px, py = floor_r((x, y), r).as_fractions()
    err2 = (Fraction(x) - px) ** 2 + (Fraction(y) - py) ** 2
    # |x - floor_r(x)| < 2^(1/2 - r), squared to stay exact
    assert err2 < Fraction(2, 4**r)


@given(precisions, st.integers(min_value=-(2**40), max_value=2**40), st.integers(min_value=0, max_value=20))
def test_refinement_preserves_value(r, m, extra):
    a = DyadicScalar(m, r)
    if r + extra <= MAX_PRECISION:
        b = a.at_precision(r + extra)
        assert b.fraction == a.fraction
        assert b.mantissa == m * 2**extra


@given(coords, coords, coords, coords, st.floats(min_value=0, max_value=1, allow_nan=False))
def test_projection_is_a_contraction(x1, x2, y1, y2, a):
    e = Direction(a)
    lhs = abs(project((x1, x2), e) - project((y1, y2), e))
    assert lhs <= math.hypot(x1 - y1, x2 - y2) * (1 + 1e-12) + 1e-15


@given(st.floats(min_value=0, max_value=1, exclude_max=True, allow_nan=False))
def test_unit_vectors(a):
    c, s = Direction(a).vector
    assert abs(math.hypot(c, s) - 1.0) < 1e-12
    assert 0.0 <= Direction(a).angle < 1.0


@given(
    st.floats(min_value=-0.5, max_value=0.5, allow_nan=False),
    st.floats(min_value=-0.5, max_value=0.5, allow_nan=False),
    st.floats(min_value=0, max_value=1, exclude_max=True, allow_nan=False),
    st.integers(min_value=0, max_value=40),
)
def test_direction_round_trip(ux, uy, a, k):
    e = Direction(a)
    t = 2.0**-k
    c, s = e.vector
    got = direction_between((ux, uy), (ux + t * c, uy + t * s))
    gap = abs(got.angle - e.angle)
    # rounding u + t e costs about ulp(|u|) / t radians
    slack = 4 * 2.0**-52 * (abs(ux) + abs(uy) + t) / t
    assert min(gap, 1.0 - gap) < 1e-10 + slack


@given(
    st.floats(min_value=0, max_value=1, exclude_max=True, allow_nan=False),
    st.integers(min_value=0, max_value=40),
)
def test_direction_round_trip_from_origin(a, k):
    e = Direction(a)
    t = 2.0**-k
    c, s = e.vector
    gap = abs(direction_between((0.0, 0.0), (t * c, t * s)).angle - e.angle)
    assert min(gap, 1.0 - gap) < 1e-10
