"""Walls, combinatorial distance, medians and hulls."""
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import words
from pentlab.census import build_census
from pentlab.coxeter import normal_form, parse_word
from pentlab.davis import (Ball, Chamber, GeodesicError, ScopeError, Wall, axis_segment, cube_dist,
                           hull_constant, hull_window, median, star)
from pentlab.hyperboloid import mink
from pentlab.pentagon import POLARS


@pytest.fixture(scope="module")
def ball4():
    return Ball(4)


def geometric_separation(ball, i, j):
    """Walls separating two chamber centres, counted by sign changes of polars."""
    polars = {}
    T = ball.table
    for g in range(ball.size):
        M = T.matrices(ball.radius)[g]
        for s in range(5):
            e = M @ POLARS[s]
            k = tuple(np.round(e * np.sign(e[np.argmax(np.abs(e) > 1e-9)]), 6))
            polars[k] = e
    ci, cj = T.centers(ball.radius)[i], T.centers(ball.radius)[j]
    return sum(1 for e in polars.values() if mink(ci, e) * mink(cj, e) < 0)


def test_distance_counts_separating_lines(ball4):
    rng = np.random.default_rng(5)
    for _ in range(25):
        i, j = rng.integers(0, int(ball4.table.offsets[3]), 2)
        wi, wj = ball4.table.word(i), ball4.table.word(j)
        assert cube_dist(wi, wj) == geometric_separation(ball4, i, j)


def test_wall_sets_give_distance(ball4):
    A = ball4.wall_sets()
    rng = np.random.default_rng(2)
    for _ in range(100):
        i, j = rng.integers(0, ball4.size, 2)
        sym = len(set(A[i].indices) ^ set(A[j].indices))
        assert sym == cube_dist(ball4.table.word(i), ball4.table.word(j))


def test_wall_ids_agree_with_reflections(ball4):
    rng = np.random.default_rng(3)
    T = ball4.table
    for i in rng.integers(0, int(T.offsets[3]), 60):
        for s in range(5):
            wid = ball4.wall_id(int(i), s)
            refl = Wall.between(normal_form(T.word(i)), s).reflection
            # the same wall is reached from g s, with the same reflection
            j = T.right[i, s]
            if j >= 0 and j < ball4.size:
                assert ball4.wall_id(int(j), s) == wid
                assert Wall.between(normal_form(T.word(j)), s).reflection == refl


def test_star_and_scope(ball4):
    assert star(0) == (4, 0, 1)
    with pytest.raises(ScopeError):
        ball4.index("0202020")


@given(words, words, words)
def test_median_lies_between(a, b, c):
    m = median(a, b, c).element.normal
    for x, y in ((a, b), (b, c), (a, c)):
        assert cube_dist(x, m) + cube_dist(m, y) == cube_dist(x, y)


def test_median_brute_force_uniqueness():
    # exhaustive over a small ball: the median is the unique chamber between all three pairs
    B = Ball(2)
    ws = [B.table.word(i) for i in range(B.size)]
    B4 = Ball(4)
    cands = [B4.table.word(i) for i in range(B4.size)]
    rng = np.random.default_rng(0)
    for _ in range(30):
        a, b, c = (ws[k] for k in rng.integers(0, len(ws), 3))
        between = [m for m in cands
                   if all(cube_dist(x, m) + cube_dist(m, y) == cube_dist(x, y)
                          for x, y in ((a, b), (b, c), (a, c)))]
        assert between == [median(a, b, c).element.normal]


def test_hull_window_contains_segment_and_is_thin():
    seg = axis_segment(normal_form("0213"), periods=3)
    hull, K = hull_window(seg)
    assert set(seg) <= hull
    assert K <= 2


def test_hull_window_rejects_non_geodesic():
    with pytest.raises(GeodesicError):
        hull_window([Chamber(normal_form("")), Chamber(normal_form("02"))])


def test_hull_constant_on_census():
    C = build_census(8)
    reps = [C.conj_class(k).rep for k in np.nonzero(C.hyperbolic & (C.len_cube <= 8))[0]]
    assert hull_constant(reps) == 2
