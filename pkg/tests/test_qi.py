"""Metric comparison, tiling certificates and crossing types."""
import math

import numpy as np
import pytest

from pentlab.coxeter import normal_form, reduce_word
from pentlab.davis import Ball, cube_dist
from pentlab.hyperboloid import Line, mink
from pentlab.pentagon import LT
from pentlab.qi import (TYPE_MIN, claims_check, crossing_type, fenchel_residual,
                        geometric_lengths, sharpness, tiling_certificates, verify_two_sided,
                        walk_line)


def test_geometric_lengths_match_closed_forms():
    g = geometric_lengths()
    for k in "abcdef":
        assert g[k] == pytest.approx(getattr(LT, k), abs=1e-12)
    assert g["two_g"] == pytest.approx(2 * LT.g, abs=1e-10)
    assert fenchel_residual() == pytest.approx(0.0, abs=1e-9)


def test_certificates_small_ball():
    cert = tiling_certificates(3)
    assert cert["chambers"] == 1 + 5 + 15 + 40
    assert max(cert["right_angle_max"], cert["closure_max"], cert["side_length_err"],
               cert["dual_edge_err"]) <= 1e-12


def brute_two_sided(radius):
    """Pairwise scan with word reduction and float distances, no sparse tricks."""
    B = Ball(radius)
    ws = [B.table.word(i) for i in range(B.size)]
    C = B.centers
    lo_v = hi_v = 0
    best_hi = -math.inf
    for i in range(len(ws)):
        for j in range(i + 1):
            dx = len(reduce_word(ws[i][::-1] + ws[j]))
            dh = math.acosh(max(1.0, -mink(C[i], C[j])))
            lo_v += dh < LT.c * dx - 4 * LT.c - 1e-9
            hi_v += dh > LT.d * dx + 2 * LT.b + 1e-9
            if dx:
                best_hi = max(best_hi, (dh - 2 * LT.b) / dx)
    return len(ws), lo_v, hi_v, best_hi


def test_two_sided_matches_brute_force():
    n, lo_v, hi_v, best_hi = brute_two_sided(3)
    rep = verify_two_sided(3)
    assert rep.pairs == n * (n + 1) // 2
    assert (rep.violations_lower, rep.violations_upper) == (lo_v, hi_v) == (0, 0)
    assert rep.max_ratio == pytest.approx(best_hi, abs=1e-9)


def test_two_sided_detects_tight_constants():
    # with no additive slack the lower bound must fail somewhere (adjacent chambers)
    rep = verify_two_sided(3, eps_lower=0.0, eps_upper=0.0)
    assert rep.violations_upper > 0


def test_sharpness_small():
    sh = sharpness(6)
    assert LT.c - 1e-9 <= sh.inf_ratio <= sh.sup_ratio <= LT.d + 1e-9
    c_ratio = [normal_form(sh.inf_witness), normal_form(sh.sup_witness)]
    assert all(g.length > 0 for g in c_ratio)


def test_crossing_types():
    assert crossing_type(2, 0, 3) == "III"
    assert crossing_type(1, 0, 4) == "V"
    with pytest.raises(ValueError):
        crossing_type(0, 0, 2)
    with pytest.raises(ValueError):
        crossing_type(1, 0, 1)


def test_walk_line_visits_adjacent_chambers():
    L = Line((0.0, 0.0, 1.0), (math.cos(0.37), math.sin(0.37), 0.0))
    w = walk_line(L, -4, 4)
    for x, y in zip(w.words, w.words[1:]):
        assert cube_dist(x, y) == 1
    for r in w.crossings():
        assert r.length >= TYPE_MIN[r.type] - 1e-6


def test_claims_small_sample():
    out = claims_check(400, seed=3)
    assert out["pair_margin"] > 0.05 and out["triple_margin"] > 0.15
    assert out["type_ok"] and out["ok"]
