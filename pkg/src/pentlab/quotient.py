"""Random presentations drawn uniformly from the class census.

k = floor(exp(c * ell)) classes are drawn with replacement from the
hyperbolic classes of length <= ell.  Each trial gets its own generator,
spawned from the master seed by trial index, so results do not depend on
how trials are scheduled across workers.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, getcontext
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .coxeter import ConjClass, GroupElement, parse_word
from .pentagon import LT
from .presentation import Presentation, cprime_verdict

CSV_COLUMNS = ("ell", "c", "k", "trials", "satisfied", "violated", "unknown", "primitive_fraction")
BUDGET = {"cube": 15, "hyp": 12.0}


def _decimal(x) -> Decimal:
    """Exact-ish decimal from a float, int, Fraction or a string like '1/63.51'."""
    if isinstance(x, Decimal):
        return x
    if isinstance(x, Fraction):
        return Decimal(x.numerator) / Decimal(x.denominator)
    if isinstance(x, str) and "/" in x:
        num, den = x.split("/")
        return Decimal(num.strip()) / Decimal(den.strip())
    if isinstance(x, float):
        return Decimal(repr(x))
    return Decimal(x)


def k_of(c, ell) -> int:
    """floor(exp(c * ell)) evaluated with 50 significant digits."""
    getcontext().prec = 50
    return int((_decimal(c) * _decimal(ell)).exp().to_integral_value(rounding="ROUND_FLOOR"))


@dataclass
class DensityParams:
    ell: float
    c: Union[float, str]
    metric: str = "hyp"
    b_hat: float = 1.0
    a_hat: float = 0.0
    lam: float = LT.lam

    def __post_init__(self):
        if self.metric not in ("cube", "hyp"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if not float(_decimal(self.c)) > 0:
            raise ValueError("c must be positive")

    @property
    def k(self) -> int:
        return max(1, k_of(self.c, self.ell))

    @property
    def c_value(self) -> float:
        return float(_decimal(self.c))

    def thresholds(self) -> dict:
        b, a = self.b_hat, self.a_hat
        if self.metric == "cube":
            t1, t2 = (b - a) / 20, b / 41
        else:
            t1, t2 = (b - a) / (20 * self.lam), b / (40 * self.lam + 1)
        return {"c1": t1, "c2": t2, "c_star": min(t1, t2), "below": self.c_value < min(t1, t2)}

    def to_dict(self) -> dict:
        return {"ell": self.ell, "c": str(self.c), "metric": self.metric, "b_hat": self.b_hat,
                "a_hat": self.a_hat, "lambda": self.lam, "k": self.k, **self.thresholds()}


@dataclass
class ClassCensus:
    """Hyperbolic classes of length <= ell, as plain lists (cheap to ship to workers)."""
    ell: float
    metric: str
    words: list
    len_cube: np.ndarray
    len_hyp: np.ndarray
    primitive: np.ndarray
    elliptic_excluded: int

    def __len__(self) -> int:
        return len(self.words)

    def conj_class(self, k: int) -> ConjClass:
        return ConjClass(GroupElement(parse_word(self.words[k])), int(self.len_cube[k]),
                         float(self.len_hyp[k]), bool(self.primitive[k]))


def enumerate_classes(ell: float, metric: str = "hyp", catalog=None,
                      cache_dir: Optional[str] = None) -> ClassCensus:
    from .census import cube_cap_for
    from .tables import ResourceError
    if ell > BUDGET[metric]:
        raise ResourceError(f"{metric} census budget is {BUDGET[metric]}, asked for {ell}")
    cap = int(ell) if metric == "cube" else cube_cap_for(ell)
    if catalog is None or catalog.cap < cap:
        from .cache import load_catalog
        catalog = load_catalog(max(cap, 1), cache_dir)
    ids = catalog.hyperbolic_ids(metric, ell)
    if metric == "cube":
        ell_ids = np.nonzero((catalog.len_cube <= ell) & (catalog.len_cube > 0))[0]
    else:
        # elliptic classes have translation length 0 and would all qualify
        ell_ids = np.nonzero(catalog.len_cube > 0)[0]
    n_ell = int(np.sum(~catalog.hyperbolic[ell_ids]))
    return ClassCensus(ell, metric, [catalog.words[i] for i in ids], catalog.len_cube[ids].copy(),
                       catalog.len_hyp[ids].copy(), catalog.primitive[ids].copy(), n_ell)


@dataclass
class SampleRun:
    trial: int
    seed: int
    params: DensityParams
    classes: list
    verdict: Optional[dict]
    diagnostics: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return self.diagnostics["status"]

    def to_dict(self) -> dict:
        return {"trial": self.trial, "seed": self.seed, "params": self.params.to_dict(),
                "classes": self.classes, "status": self.status,
                "diagnostics": self.diagnostics, "verdict": self.verdict}

    def to_json(self) -> str:
        from .presentation import _jsonable
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)


def trial_seeds(seed: int, trials: int) -> list:
    """Per-trial integer seeds spawned from the master seed by index."""
    ss = np.random.SeedSequence(seed)
    return [int(s.generate_state(1, dtype=np.uint64)[0]) for s in ss.spawn(trials)]


def sample(params: DensityParams, seed: int, census: Optional[ClassCensus] = None,
           alpha: float = 1 / 20, trial: int = 0, early_exit: bool = True) -> SampleRun:
    """One random presentation and its C'(alpha) verdict."""
    if census is None:
        census = enumerate_classes(params.ell, params.metric)
    k = params.k
    diag = {"census_size": len(census), "alpha": alpha}
    if len(census) == 0:
        diag.update(status="unknown", reason="empty census")
        return SampleRun(trial, seed, params, [], None, diag)
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(census), size=k)
    classes = [census.words[i] for i in picks]
    sys_h = census.len_hyp[picks]
    q = alpha / (alpha + 2)
    lens = sys_h if params.metric == "hyp" else census.len_cube[picks]
    diag.update(
        min_systole=float(np.min(sys_h)),
        systole_ok=bool(np.min(lens) >= (1 - q) * params.ell),
        primitive=[bool(x) for x in census.primitive[picks]],
    )
    if len(set(picks.tolist())) < k:
        diag.update(status="violated", reason="duplicate class")
        return SampleRun(trial, seed, params, classes, None, diag)
    p = Presentation([census.conj_class(i) for i in picks], alpha,
                     {"seed": seed, "trial": trial})
    v = cprime_verdict(p, early_exit=early_exit, premises=False)
    diag["status"] = v.status
    ww = v.worst_wall
    diag["wall_piece_large"] = bool(ww is not None and _num(ww["diameter"]) >= ww["bound"])
    return SampleRun(trial, seed, params, classes, v.to_dict(), diag)


def _num(x) -> float:
    return float(x) if not isinstance(x, str) else float(x.replace("inf", "Infinity"))


def _run_one(args):
    params, seed, census, alpha, trial = args
    return sample(params, seed, census, alpha, trial)


def run_trials(params: DensityParams, trials: int, seed: int, alpha: float = 1 / 20,
               workers: int = 1, census: Optional[ClassCensus] = None) -> list:
    if trials <= 0:
        return []
    if census is None:
        census = enumerate_classes(params.ell, params.metric)
    seeds = trial_seeds(seed, trials)
    jobs = [(params, s, census, alpha, t) for t, s in enumerate(seeds)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


@dataclass
class ThresholdRow:
    ell: float
    c: str
    k: int
    trials: int
    satisfied: int
    violated: int
    unknown: int
    primitive_fraction: float
    systole_ok_fraction: float = 0.0
    wall_piece_fraction: float = 0.0

    @property
    def success(self) -> float:
        return self.satisfied / self.trials if self.trials else 0.0


def threshold_experiment(ell_grid: Sequence[float], c_grid: Sequence, trials: int, seed: int,
                         metric: str = "hyp", alpha: float = 1 / 20, workers: int = 1,
                         b_hat: float = 1.0, a_hat: float = 0.0) -> list:
    """Success counts of C'(alpha) over an (ell, c) grid.

    Every grid cell derives its seed from the master seed and its position,
    so adding cells does not change existing ones.
    """
    if trials <= 0:
        return []
    rows = []
    cell_seeds = trial_seeds(seed, len(ell_grid) * len(c_grid))
    for i, ell in enumerate(ell_grid):
        census = enumerate_classes(ell, metric)
        for j, c in enumerate(c_grid):
            params = DensityParams(ell, c, metric, b_hat, a_hat)
            runs = run_trials(params, trials, cell_seeds[i * len(c_grid) + j], alpha, workers, census)
            st = [r.status for r in runs]
            prim = [x for r in runs for x in r.diagnostics.get("primitive", [])]
            rows.append(ThresholdRow(
                ell, str(c), params.k, trials, st.count("satisfied"), st.count("violated"),
                st.count("unknown"), float(np.mean(prim)) if prim else 0.0,
                float(np.mean([r.diagnostics.get("systole_ok", False) for r in runs])),
                float(np.mean([r.diagnostics.get("wall_piece_large", False) for r in runs])),
            ))
    return rows


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.ell, r.c, r.k, r.trials, r.satisfied, r.violated, r.unknown,
                    f"{r.primitive_fraction:.6f}"])
    return buf.getvalue()
