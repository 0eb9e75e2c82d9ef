"""Words, normal forms, element tables and the conjugacy census."""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import words
from pentlab.census import build_census, cube_cap_for, root_search
from pentlab.coxeter import (IDENTITY, WordError, commute, conj_min, hyp_length, is_primitive,
                             normal_form, parse_word, reduce_word, word_str)
from pentlab.hyperboloid import translation_length
from pentlab.pentagon import LT, REFLECTIONS
from pentlab.tables import ElementTable, ResourceError, sphere_sizes


def matrix_of(w):
    M = np.eye(3)
    for s in parse_word(w):
        M = M @ REFLECTIONS[s]
    return M


def bfs_spheres(nmax):
    """Sphere sizes by breadth-first search over matrices (no automaton)."""
    key = lambda M: tuple(np.round(M, 6).ravel())
    seen = {key(np.eye(3))}
    frontier = [np.eye(3)]
    sizes = [1]
    for _ in range(nmax):
        nxt = []
        for M in frontier:
            for R in REFLECTIONS:
                N = M @ R
                k = key(N)
                if k not in seen:
                    seen.add(k)
                    nxt.append(N)
        sizes.append(len(nxt))
        frontier = nxt
    return sizes


def series_spheres(nmax):
    # 1/W(t) = 1 - 5x + 5x^2 with x = t/(1+t) (nerve: 5 vertices, 5 edges)
    from fractions import Fraction
    # expand W(t) = (1+t)^2 / (1 - 3t + t^2)
    num = [1, 2, 1]
    out = []
    for n in range(nmax + 1):
        v = (num[n] if n < 3 else 0) + 3 * (out[n - 1] if n >= 1 else 0) - (out[n - 2] if n >= 2 else 0)
        out.append(v)
    return out


def test_sphere_sizes_three_ways():
    assert sphere_sizes(6) == bfs_spheres(6) == series_spheres(6)
    assert sphere_sizes(20) == series_spheres(20)


def test_commutation_graph_is_a_pentagon():
    for a, b in itertools.combinations(range(5), 2):
        assert commute(a, b) == ((b - a) % 5 in (1, 4))


def test_parse_word_rejects_bad_letters():
    with pytest.raises(WordError):
        parse_word("0152")
    assert parse_word([0, 2]) == (0, 2) == parse_word("02")


@given(words)
def test_normal_form_represents_same_isometry(w):
    g = normal_form(w)
    assert np.allclose(g.isometry.matrix, matrix_of(w), atol=1e-8)


@given(words)
def test_normal_form_is_idempotent_and_geodesic(w):
    r = reduce_word(w)
    assert reduce_word(r) == r
    # ShortLex least: no adjacent commuting pair out of order
    assert all(not (commute(a, b) and a > b) for a, b in zip(r, r[1:]))
    assert len(r) <= len(parse_word(w))
    assert len(r) % 2 == len(parse_word(w)) % 2


@given(words, words, words)
def test_group_axioms(a, b, c):
    A, B, C = normal_form(a), normal_form(b), normal_form(c)
    assert (A * B) * C == A * (B * C)
    assert A * A.inverse() == IDENTITY


def test_small_ball_lengths_match_bfs():
    # exhaustive: every word of length <= 6 reduces to a geodesic of the matrix BFS
    dist = {}
    key = lambda M: tuple(np.round(M, 6).ravel())
    for n in range(7):
        for w in itertools.product(range(5), repeat=n):
            k = key(matrix_of(w))
            dist[k] = min(dist.get(k, 99), n)
    for w in itertools.product(range(5), repeat=5):
        assert len(reduce_word(w)) == dist[key(matrix_of(w))]


def test_element_table_consistency():
    T = ElementTable(6)
    assert [len(T.level(n)) for n in range(7)] == sphere_sizes(6)
    rng = np.random.default_rng(1)
    for i in rng.integers(0, len(T.length), 200):
        w = T.word(i)
        assert T.index(w) == i
        for s in range(5):
            j = T.right[i, s]
            if j >= 0:
                assert T.word(j) == reduce_word(w + (s,))
            j = T.left[i, s]
            if j >= 0:
                assert T.word(j) == reduce_word((s,) + w)
        assert T.word(T.inverse()[i]) == reduce_word(w[::-1])


def test_element_table_budget():
    with pytest.raises(ResourceError):
        ElementTable(40, max_elements=1000)


@given(words, st.integers(0, 4))
def test_conjugacy_invariants(w, x):
    c1 = conj_min(w)
    c2 = conj_min((x,) + parse_word(w) + (x,))
    assert c1.rep == c2.rep and c1.len_cube == c2.len_cube
    if c1.hyperbolic:
        assert c2.len_hyp == pytest.approx(c1.len_hyp, abs=1e-8)


def test_hyperbolic_length_bounds_on_small_classes():
    for w in ["02", "13", "0213", "012", "01324"]:
        c = conj_min(w)
        assert LT.c - 1e-9 <= c.len_hyp / c.len_cube <= LT.d + 1e-9


def test_wall_glide_is_one_shorter():
    # s1 (s0 s2): glide along the wall of side 1, even cubical length
    c = conj_min("012")
    assert c.min_len == 3 and c.len_cube == 2
    assert c.len_hyp == pytest.approx(translation_length(normal_form("012").isometry), abs=1e-12)
    assert normal_form("012").isometry.orientation < 0


def test_census_small_cap_classes():
    C = build_census(2)
    cat = C.catalog()
    hyp = sorted(w for w, h, n in zip(cat.words, cat.hyperbolic, cat.len_cube) if h and n <= 2)
    assert hyp == ["012", "014", "02", "03", "034", "123", "13", "14", "234", "24"]
    # identity, five reflections, five rotations of order 2
    ell = sorted(w for w, h in zip(cat.words, cat.hyperbolic) if not h)
    assert ell[:11] == sorted(["", "0", "1", "2", "3", "4", "01", "04", "12", "23", "34"])


def test_census_classes_agree_with_conj_min():
    C = build_census(6)
    rng = np.random.default_rng(0)
    T = C.table
    for i in rng.integers(0, len(T.length), 300):
        w = T.word(i)
        k = C.class_of[i]
        if C.len_cube[k] <= 5:
            assert conj_min(w).rep == normal_form(T.word(C.reps[k]))


def test_cube_cap_for():
    assert cube_cap_for(12) == 15
    assert cube_cap_for(10) == 13
    assert cube_cap_for(LT.c * 4) == 4


def test_powers_and_roots():
    c = conj_min("0202", with_primitive=True)
    assert c.primitive is False
    h, n = root_search(c.rep, c.len_hyp)
    assert n == 2
    assert is_primitive(conj_min("0213", with_primitive=True))
