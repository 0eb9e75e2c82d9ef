"""Random presentations: k arithmetic, uniform sampling, determinism."""
import json
import math
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from pentlab.quotient import (DensityParams, enumerate_classes, k_of, rows_to_csv, run_trials,
                              sample, threshold_experiment, trial_seeds)


def test_k_independent_evaluation():
    # series for exp on exact rationals, no Decimal
    def floor_exp(q: Fraction) -> int:
        term, total = Fraction(1), Fraction(1)
        for n in range(1, 60):
            term = term * q / n
            total += term
        return math.floor(total)
    for ell, k in zip((20, 63, 127, 200), (1, 2, 7, 23)):
        assert floor_exp(Fraction(ell) / Fraction("63.51")) == k
        assert k_of("1/63.51", ell) == k
        assert DensityParams(ell, "1/63.51").k == k


def test_thresholds():
    p = DensityParams(10, 0.001, "cube", b_hat=0.96, a_hat=0.1)
    t = p.thresholds()
    assert t["c1"] == pytest.approx(0.86 / 20) and t["c2"] == pytest.approx(0.96 / 41)
    assert t["below"]
    h = DensityParams(10, 0.001, "hyp").thresholds()
    assert h["c_star"] == pytest.approx(min(1 / (20 * 1.5627191), 1 / (40 * 1.5627191 + 1)), rel=1e-6)
    with pytest.raises(ValueError):
        DensityParams(10, -1)


def test_small_census_classes():
    c = enumerate_classes(2, "cube")
    assert sorted(c.words) == ["012", "014", "02", "03", "034", "123", "13", "14", "234", "24"]
    assert c.elliptic_excluded == 10


def test_sampler_is_uniform():
    census = enumerate_classes(5, "cube")
    n = len(census)
    params = DensityParams(5, 1.0, "cube")       # k = floor(e^5) = 148
    counts = np.zeros(n)
    index = {w: i for i, w in enumerate(census.words)}
    for s in trial_seeds(11, 40):
        rng = np.random.default_rng(s)
        for i in rng.integers(0, n, size=params.k):
            counts[i] += 1
    p = stats.chisquare(counts).pvalue
    assert p > 1e-3
    # and sample() draws exactly these classes
    run = sample(params, trial_seeds(11, 1)[0], census)
    rng = np.random.default_rng(trial_seeds(11, 1)[0])
    assert run.classes == [census.words[i] for i in rng.integers(0, n, size=params.k)]


def test_duplicates_are_violations():
    census = enumerate_classes(2, "cube")
    run = sample(DensityParams(2, 1.5, "cube"), 0, census)      # k = 20 > 10 classes
    assert run.status == "violated" and run.diagnostics["reason"] == "duplicate class"


def test_trials_deterministic_across_workers():
    params = DensityParams(8.0, 0.05, "hyp")
    census = enumerate_classes(8.0, "hyp")
    a = [r.to_json() for r in run_trials(params, 6, 42, workers=1, census=census)]
    b = [r.to_json() for r in run_trials(params, 6, 42, workers=2, census=census)]
    assert a == b
    assert len(set(trial_seeds(42, 6))) == 6


def test_threshold_experiment_csv():
    rows = threshold_experiment([4.0, 6.0], ["0.02"], trials=3, seed=1, metric="hyp")
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == "ell,c,k,trials,satisfied,violated,unknown,primitive_fraction"
    assert all(r.satisfied + r.violated + r.unknown == 3 for r in rows)
    assert threshold_experiment([4.0], ["0.02"], trials=0, seed=1) == []
