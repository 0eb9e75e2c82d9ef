"""Growth tables and exponent fits.

Tables are cumulative: row (n, count) counts everything of length <= n.
Cubical lengths are integers; hyperbolic lengths are real, so hyperbolic
tables are sampled on a grid of width HYP_BUCKET.

Conjugacy counts only hyperbolic classes.  Elliptic classes are the finitely
many conjugacy classes of finite subgroups and have translation length 0.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .pentagon import REFLECTIONS
from .tables import ResourceError, sphere_sizes

HYP_BUCKET = 0.25
CUBE_BUDGET = 15
HYP_BUDGET = 12.0
STAB_BUDGET = 400.0

SUBJECTS = ("group", "wall-stabilizer", "conjugacy", "primitive-conjugacy")
METRICS = ("cube", "hyp")


class InputError(ValueError):
    pass


@dataclass
class GrowthTable:
    subject: str
    metric: str
    rows: list  # (n, cumulative count)
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> np.ndarray:
        return np.array([r[0] for r in self.rows], dtype=float)

    @property
    def counts(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows], dtype=float)

    def count_at(self, n: float) -> int:
        best = 0
        for x, c in self.rows:
            if x <= n + 1e-9:
                best = c
        return best

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["subject", "metric", "n", "count"])
        for x, c in self.rows:
            w.writerow([self.subject, self.metric, _fmt_n(x), c])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"subject": self.subject, "metric": self.metric,
                "rows": [[_fmt_n(x), c] for x, c in self.rows], **self.meta}


def _fmt_n(x):
    return int(x) if float(x).is_integer() else round(float(x), 6)


def _hyp_grid(n_max: float) -> np.ndarray:
    return np.arange(int(round(n_max / HYP_BUCKET)) + 1) * HYP_BUCKET


def _cumulative(values: np.ndarray, grid: np.ndarray) -> list:
    v = np.sort(values)
    counts = np.searchsorted(v, grid + 1e-9, side="right")
    return [(float(x), int(c)) for x, c in zip(grid, counts)]


# -- wall stabilizer ---------------------------------------------------------

def stabilizer_elements(max_len: int):
    """Stabilizer of the wall of s0: the centralizer <s0> x <s4, s1>.

    Yields (word, cube length, hyperbolic displacement d(o, h o)) for all
    elements of word length <= max_len.  Words are alternating s1/s4 strings
    optionally prefixed by s0, which are already reduced.
    """
    out = []
    for eps in (0, 1):
        for m in range(0, max_len - eps + 1):
            starts = (1, 4) if m else (None,)
            for a in starts:
                w = [0] * eps
                if a is not None:
                    b = 5 - a
                    w += [a if k % 2 == 0 else b for k in range(m)]
                M = np.eye(3)
                for x in w:
                    M = M @ REFLECTIONS[x]
                out.append((tuple(w), len(w), float(np.arccosh(max(M[2, 2], 1.0)))))
    return out


def _stab_table(metric: str, n_max: float) -> list:
    if metric == "cube":
        if n_max > STAB_BUDGET:
            raise ResourceError(f"stabilizer budget is {STAB_BUDGET}")
        els = stabilizer_elements(int(n_max))
        lens = np.array([e[1] for e in els])
        return [(n, int(np.sum(lens <= n))) for n in range(int(n_max) + 1)]
    if n_max > STAB_BUDGET:
        raise ResourceError(f"stabilizer budget is {STAB_BUDGET}")
    from .pentagon import LT
    # each s1/s4 letter moves the base point by at least 2a along the wall
    max_len = int(math.ceil(n_max / (2 * LT.a))) + 2
    d = np.array([e[2] for e in stabilizer_elements(max_len)])
    return _cumulative(d, _hyp_grid(n_max))


# -- public API ----------------------------------------------------------------

def growth(subject: str, metric: str, n_max: float, catalog=None,
           cache_dir: Optional[str] = None) -> GrowthTable:
    """Exact cumulative growth table for one subject in one metric."""
    if subject not in SUBJECTS:
        raise InputError(f"unknown subject {subject!r}")
    if metric not in METRICS:
        raise InputError(f"unknown metric {metric!r}")
    if n_max < 0:
        raise InputError("n_max must be non-negative")
    if subject == "wall-stabilizer":
        return GrowthTable(subject, metric, _stab_table(metric, n_max))
    budget = CUBE_BUDGET if metric == "cube" else HYP_BUDGET
    if n_max > budget:
        raise ResourceError(f"{metric} budget is {budget}, asked for {n_max}")
    if subject == "group":
        if metric == "cube":
            cum = np.cumsum(sphere_sizes(int(n_max)))
            return GrowthTable(subject, metric, [(n, int(c)) for n, c in enumerate(cum)])
        from .hyperbolic_ball import build_hyp_ball
        B = build_hyp_ball(n_max)
        return GrowthTable(subject, metric, _cumulative(B.dist, _hyp_grid(n_max)))
    from .census import cube_cap_for
    cap = int(n_max) if metric == "cube" else cube_cap_for(n_max)
    if catalog is None or catalog.cap < cap:
        from .cache import load_catalog
        catalog = load_catalog(max(cap, 1), cache_dir)
    ids = catalog.hyperbolic_ids()
    if subject == "primitive-conjugacy":
        ids = ids[catalog.primitive[ids]]
    if metric == "cube":
        lens = catalog.len_cube[ids]
        rows = [(n, int(np.sum(lens <= n))) for n in range(int(n_max) + 1)]
    else:
        rows = _cumulative(catalog.len_hyp[ids], _hyp_grid(n_max))
    return GrowthTable(subject, metric, rows, {"census_cap": int(catalog.cap)})


@dataclass
class ExponentFit:
    b_hat: float
    window: tuple
    residual: float
    sandwich: tuple  # (A_hat, B_hat)

    @property
    def ratio(self) -> float:
        return self.sandwich[1] / self.sandwich[0]

    def to_dict(self) -> dict:
        return {"b_hat": self.b_hat, "window": list(self.window), "residual": self.residual,
                "A_hat": self.sandwich[0], "B_hat": self.sandwich[1], "ratio": self.ratio}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def fit_exponent(t: GrowthTable, window: Sequence[float]) -> ExponentFit:
    """Least-squares slope of log count against n over the window."""
    lo, hi = float(window[0]), float(window[1])
    if lo > hi:
        raise InputError("empty window")
    n, f = t.n, t.counts
    sel = (n >= lo - 1e-9) & (n <= hi + 1e-9) & (f > 0)
    if sel.sum() < 4:
        raise InputError(f"need 4 positive rows in [{lo}, {hi}], have {int(sel.sum())}")
    x, y = n[sel], np.log(f[sel])
    b, c0 = np.polyfit(x, y, 1)
    res = float(np.sqrt(np.mean((y - (b * x + c0)) ** 2)))
    scaled = f[sel] * np.exp(-b * x)
    return ExponentFit(float(b), (lo, hi), res, (float(scaled.min()), float(scaled.max())))


def sandwich_onset(t: GrowthTable, b_hat: float, top: float, rel: float = 0.1,
                   tail: int = 4) -> float:
    """Smallest window start whose sandwich ratio is within rel of the tail's.

    Stands in for the unspecified threshold beyond which the two-sided
    exponential bound holds.
    """
    n, f = t.n, t.counts
    sel = (f > 0) & (n <= top + 1e-9)
    n, s = n[sel], f[sel] * np.exp(-b_hat * n[sel])

    def ratio(i):
        return s[i:].max() / s[i:].min()
    ref = ratio(max(0, len(n) - tail))
    for i in range(len(n)):
        if ratio(i) <= (1 + rel) * ref:
            return float(n[i])
    return float(n[-1])


def nonprimitive_fraction(n_max: int, catalog=None, metric: str = "cube",
                          cache_dir: Optional[str] = None) -> list:
    """(n, fraction of non-primitive among hyperbolic classes of length <= n)."""
    prim = growth("primitive-conjugacy", metric, n_max, catalog, cache_dir)
    allc = growth("conjugacy", metric, n_max, catalog, cache_dir)
    out = []
    for (x, p), (_, a) in zip(prim.rows, allc.rows):
        out.append((x, 0.0 if a == 0 else (a - p) / a))
    return out
