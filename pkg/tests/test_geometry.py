"""Hyperboloid model and the right-angled pentagon."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pentlab.hyperboloid import (DomainError, GeometryError, HIsometry, HPoint, Kind, Line,
                                  SpacelikeVector, axis, classify, dist, dist_to_line,
                                  fixed_points_at_infinity, lorentz_cross, mink, reflect,
                                  safe_arccosh, translation_length)
from pentlab.pentagon import LT, MIDPOINTS, POLARS, REFLECTIONS, RHO, VERTICES

ORIGIN = np.array([0.0, 0.0, 1.0])


def boost(t):
    return np.array([[math.cosh(t), 0, math.sinh(t)], [0, 1, 0], [math.sinh(t), 0, math.cosh(t)]])


def rot(th):
    c, s = math.cos(th), math.sin(th)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])


def d(p, q):
    return math.acosh(max(1.0, -mink(p, q)))


# -- pentagon lengths against right-triangle trigonometry ---------------------------

def test_half_side_from_triangle():
    # centre/midpoint/vertex triangle: angles pi/5 at the centre, pi/4 at the vertex
    assert LT.a == pytest.approx(math.acosh(math.cos(math.pi / 5) / math.sin(math.pi / 4)), abs=1e-12)
    assert LT.b == pytest.approx(math.acosh(math.cos(math.pi / 4) / math.sin(math.pi / 5)), abs=1e-12)


def test_lengths_match_model_distances():
    M, V = MIDPOINTS, VERTICES
    assert d(V[0], V[1]) == pytest.approx(2 * LT.a, abs=1e-12)
    assert d(ORIGIN, M[0]) == pytest.approx(LT.b, abs=1e-12)
    assert d(M[0], M[1]) == pytest.approx(LT.c, abs=1e-12)
    assert d(M[0], M[2]) == pytest.approx(LT.d, abs=1e-12)
    assert d(V[0], V[2]) == pytest.approx(LT.f, abs=1e-12)
    assert min(d(M[0], V[i]) for i in (1, 2, 3) if d(M[0], V[i]) > 1) == pytest.approx(LT.e, abs=1e-12)
    assert d(ORIGIN, V[0]) == pytest.approx(RHO, abs=1e-12)


def test_golden_ratio_and_lambda():
    assert math.cosh(2 * LT.a) == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-12)
    assert LT.lam == LT.d / LT.c


def test_polars_right_angles():
    for i in range(5):
        e, f = POLARS[i], POLARS[(i + 1) % 5]
        assert mink(e, e) == pytest.approx(1.0, abs=1e-14)
        assert mink(e, f) == pytest.approx(0.0, abs=1e-14)
        # non-adjacent sides are ultraparallel
        assert abs(mink(e, POLARS[(i + 2) % 5])) > 1


def test_reflections_are_involutions_fixing_sides():
    for i, R in enumerate(REFLECTIONS):
        assert np.allclose(R @ R, np.eye(3), atol=1e-13)
        assert np.allclose(R @ POLARS[i], -POLARS[i], atol=1e-13)
        for v in (VERTICES[i], VERTICES[(i + 1) % 5]):
            if abs(mink(v, POLARS[i])) < 1e-12:
                assert np.allclose(R @ v, v, atol=1e-12)


# -- primitives ----------------------------------------------------------------------

def test_point_validation():
    with pytest.raises(GeometryError):
        HPoint((0.0, 0.0, 2.0))
    p = HPoint.normalized([0.3, 0.1, 1.2])
    assert mink(p.array, p.array) == pytest.approx(-1.0)


def test_spacelike_validation():
    with pytest.raises(GeometryError):
        SpacelikeVector.normalized([0.0, 0.0, 1.0])


def test_safe_arccosh_clamps_roundoff_only():
    assert safe_arccosh(1 - 1e-14) == 0.0
    with pytest.raises(GeometryError):
        safe_arccosh(0.5)


@given(st.floats(-6, 6), st.floats(0, 2 * math.pi))
def test_boost_distance(t, th):
    M = rot(th) @ boost(t)
    p = HPoint.from_array(M @ ORIGIN)
    assert dist(HPoint.from_array(ORIGIN), p) == pytest.approx(abs(t), abs=1e-9)


@given(st.floats(-4, 4), st.floats(0.05, 4))
def test_distance_to_line_closed_form(x, y):
    # line x = 0 has polar (1, 0, 0); sinh(dist) = |<q, e>|
    q = boost(x) @ np.array([0, math.sinh(y), math.cosh(y)])
    q = rot(0) @ q
    e = SpacelikeVector((1.0, 0.0, 0.0))
    assert math.sinh(dist_to_line(HPoint.from_array(q), e)) == pytest.approx(abs(q[0]), rel=1e-9)


def test_lorentz_cross_is_orthogonal():
    u, v = np.array([0.2, 0.4, 1.3]), np.array([1.0, -0.5, 0.2])
    w = lorentz_cross(u, v)
    assert mink(w, u) == pytest.approx(0, abs=1e-12)
    assert mink(w, v) == pytest.approx(0, abs=1e-12)


@given(st.floats(0.1, 5), st.floats(0, 2 * math.pi))
def test_hyperbolic_translation_length(t, th):
    M = HIsometry(rot(th) @ boost(t) @ rot(-th))
    assert classify(M) is Kind.HYPERBOLIC
    assert translation_length(M) == pytest.approx(t, abs=1e-9)
    L = axis(M)
    # the axis is invariant and oriented towards the attracting end
    q = M.matrix @ L.at(0.3)
    assert q == pytest.approx(L.at(0.3 + t), abs=1e-7)


def test_elliptic_and_parabolic():
    assert classify(HIsometry(rot(1.0))) is Kind.ELLIPTIC
    with pytest.raises(DomainError):
        axis(HIsometry(rot(0.7)))


def test_reflection_fixes_its_line():
    e = SpacelikeVector.normalized([1.0, 0.3, 0.2])
    R = reflect(e)
    L = Line.from_polar(e.array)
    for t in (-1.0, 0.0, 2.0):
        assert R.matrix @ L.at(t) == pytest.approx(L.at(t), abs=1e-10)


def test_line_from_polar_nearest_point():
    e = np.array([1.3, 0.0, 0.8])
    L = Line.from_polar(e)
    assert mink(L.p, e) == pytest.approx(0, abs=1e-12)
    assert mink(L.v, e) == pytest.approx(0, abs=1e-12)
    assert L.foot(ORIGIN) == pytest.approx(0, abs=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 2))
def test_foot_of_perpendicular(t, s, h):
    L = Line((0.0, 0.0, 1.0), (1.0, 0.0, 0.0))
    # walk distance h off the line at parameter t
    q = boost(t) @ np.array([0, math.sinh(h), math.cosh(h)])
    assert L.foot(q) == pytest.approx(t, abs=1e-9)


def test_fixed_points_are_null():
    M = HIsometry(boost(1.2))
    for x in fixed_points_at_infinity(M):
        assert mink(x, x) == pytest.approx(0, abs=1e-9)
