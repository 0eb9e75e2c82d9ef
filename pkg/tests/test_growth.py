"""Growth tables, exponent fits and the sandwich ratio."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pentlab.coxeter import conj_min, reduce_word
from pentlab.growth import (GrowthTable, InputError, fit_exponent, growth, nonprimitive_fraction,
                            sandwich_onset, stabilizer_elements)
from pentlab.pentagon import REFLECTIONS
from pentlab.tables import ElementTable, ResourceError


def test_group_cube_small():
    assert growth("group", "cube", 2).rows == [(0, 1), (1, 6), (2, 21)]


def test_group_hyp_matches_table_scan():
    T = ElementTable(12)
    C = T.centers(12)
    d = np.arccosh(np.maximum(C[:, 2], 1.0))
    t = growth("group", "hyp", 3.0)
    # every element within 3 of the origin has word length <= 3 / c < 4
    for n, count in t.rows:
        assert count == int(np.sum(d <= n + 1e-9))


def test_stabilizer_against_commuting_elements():
    T = ElementTable(7)
    M = T.matrices(7)
    s0 = REFLECTIONS[0]
    comm = [i for i in range(len(M)) if np.allclose(M[i] @ s0, s0 @ M[i], atol=1e-8)]
    ours = sorted(reduce_word(w) for w, _, _ in stabilizer_elements(7))
    assert ours == sorted(T.word(i) for i in comm)


def conj_counts_by_brute_force(nmax):
    T = ElementTable(nmax + 1)
    reps = {}
    for i in range(len(T.length)):
        c = conj_min(T.word(i))
        if c.hyperbolic and c.len_cube <= nmax:
            reps[c.rep] = c.len_cube
    lens = np.array(list(reps.values()))
    return [int(np.sum(lens <= n)) for n in range(nmax + 1)]


def test_conjugacy_counts_oracle():
    oracle = conj_counts_by_brute_force(6)
    assert oracle == [0, 0, 10, 15, 35, 59, 124]
    assert [c for _, c in growth("conjugacy", "cube", 6).rows] == oracle


def test_primitive_never_exceeds_all():
    p = growth("primitive-conjugacy", "cube", 9)
    a = growth("conjugacy", "cube", 9)
    assert all(x <= y for x, y in zip(p.counts, a.counts))
    frac = nonprimitive_fraction(9)
    assert all(0 <= f < 1 for _, f in frac)


def test_bad_inputs():
    with pytest.raises(InputError):
        growth("cosets", "cube", 3)
    with pytest.raises(InputError):
        growth("group", "word", 3)
    with pytest.raises(ResourceError):
        growth("group", "cube", 99)


@given(st.floats(0.2, 2.0), st.floats(0.5, 50))
def test_fit_recovers_exact_exponential(b, A):
    rows = [(n, max(1, int(round(A * math.exp(b * n) * 1e6)))) for n in range(12)]
    fit = fit_exponent(GrowthTable("group", "cube", rows), (2, 11))
    assert fit.b_hat == pytest.approx(b, rel=1e-4)
    assert fit.ratio == pytest.approx(1.0, rel=1e-3)


def test_fit_needs_four_rows():
    t = growth("group", "cube", 5)
    with pytest.raises(InputError):
        fit_exponent(t, (3, 5))
    with pytest.raises(InputError):
        fit_exponent(t, (5, 3))


def test_sandwich_onset_on_transient():
    # exponential with a decaying transient: the onset is after the bump
    rows = [(n, int(1000 * math.exp(n) * (1 + 5 * math.exp(-2 * n)))) for n in range(14)]
    t = GrowthTable("group", "cube", rows)
    n0 = sandwich_onset(t, 1.0, 13)
    assert 1 <= n0 <= 4


@given(st.sampled_from(["group", "wall-stabilizer"]), st.sampled_from(["cube", "hyp"]))
def test_tables_are_cumulative(subject, metric):
    t = growth(subject, metric, 6)
    assert np.all(np.diff(t.counts) >= 0)
    assert t.counts[0] == 1


def test_csv_shape():
    text = growth("group", "cube", 2).to_csv().splitlines()
    assert text[0] == "subject,metric,n,count"
    assert text[-1] == "group,cube,2,21"
