"""Numerical checks of the quasi-isometry between the square complex and H^2.

* the closed-form length table against explicit hyperboloid constructions;
* tiling certificates (right angles, edge lengths) over a ball;
* the two-sided comparison c d_X - eps_lo <= d_H <= d d_X + eps_hi over all
  chamber pairs of a ball;
* extremal ratios len_hyp / len_cube over a conjugacy census;
* crossing types of a geodesic through two adjacent pentagons and the length
  bounds between consecutive altitudes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .hyperboloid import Line, lorentz_cross, mink
from .pentagon import LT, MIDPOINTS, POLARS, REFLECTIONS, VERTICES, extended_frame, length_table

TYPE_MIN = {"I": LT.a, "II": 2 * LT.a, "III": LT.d, "IV": LT.f / 2, "V": LT.c}
O3 = np.array([0.0, 0.0, 1.0])


def _d(p, q) -> float:
    return float(np.arccosh(max(-mink(p, q), 1.0)))


def _point_towards(p, q, t) -> np.ndarray:
    """Point at distance t from p towards q."""
    L = _line_through(p, q)
    return L.at(t)


def _line_through(p, q) -> Line:
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    ch = -mink(p, q)
    v = (q - ch * p) / math.sqrt(ch * ch - 1)
    return Line(tuple(p), tuple(v))


def geometric_lengths() -> dict:
    """Measure every table entry on the explicit base pentagon."""
    a = _d(VERTICES[0], MIDPOINTS[1])
    b = _d(O3, MIDPOINTS[0])
    c = _d(MIDPOINTS[0], MIDPOINTS[1])
    d = _d(MIDPOINTS[0], MIDPOINTS[2])
    # right angle at the vertex between sides 1 and 2, legs 2a and a
    e = _d(VERTICES[0], MIDPOINTS[2])
    f = _d(VERTICES[0], VERTICES[2])
    # quadrilateral on side 0 with perpendicular legs of length 4a along the
    # walls through sides 1 and 4
    x = _point_towards(VERTICES[0], VERTICES[1], 4 * a)
    y = _point_towards(VERTICES[4], VERTICES[3], 4 * a)
    two_g = _d(x, y)
    return {"a": a, "b": b, "c": c, "d": d, "e": e, "f": f, "two_g": two_g}


def fenchel_residual() -> float:
    a, g = LT.a, LT.g
    return math.cosh(2 * g) - (-math.sinh(4 * a) ** 2 + math.cosh(4 * a) ** 2 * math.cosh(2 * a))


# -- tiling certificates --------------------------------------------------------

def tiling_certificates(radius: int = 6) -> dict:
    """Right angles, tiling edge lengths 2a and dual edge lengths 2b over a ball."""
    from .tables import ElementTable
    T = ElementTable(radius)
    # extended precision: entries grow like cosh(radius * d), and products of
    # two such points lose that many digits in the Minkowski pairing
    M = np.empty((T.size, 3, 3), dtype=np.longdouble)
    M[0] = np.eye(3)
    _, R, VL = extended_frame()
    for n in range(1, radius + 1):
        w = T.level(n)
        M[w] = M[T.parent[w]] @ R[T.last[w]]
    right = max(abs(mink(POLARS[i], POLARS[(i + 1) % 5])) for i in range(5))
    # closing up: (s_i s_{i+1})^2 = 1 and the five vertex rotations compose to 1
    close = 0.0
    for i in range(5):
        r = REFLECTIONS[i] @ REFLECTIONS[(i + 1) % 5]
        close = max(close, float(np.abs(r @ r - np.eye(3)).max()))
    V = np.einsum("nij,kj->nki", M, VL)          # all vertices of all chambers
    side = np.arccosh(np.maximum(-_mink_ld(V, np.roll(V, -1, axis=1)), 1.0))
    C = M[:, :, 2]
    idx = np.arange(1, T.size)
    dual = np.arccosh(np.maximum(-_mink_ld(C[idx], C[T.parent[idx]]), 1.0))
    return {
        "radius": radius,
        "chambers": int(T.size),
        "right_angle_max": float(right),
        "closure_max": close,
        "side_length_err": float(np.abs(side.astype(float) - 2 * LT.a).max()),
        "dual_edge_err": float(np.abs(dual.astype(float) - 2 * LT.b).max()),
    }


def _mink_ld(u, v):
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


# -- two-sided comparison ---------------------------------------------------------

@dataclass
class TwoSidedReport:
    ball_radius: int
    pairs: int
    violations_lower: int
    violations_upper: int
    eps_lower: float
    eps_upper: float
    max_ratio: float          # max over d_X > 0 of (d_H - eps_upper) / d_X
    min_ratio: float          # min over d_X > 0 of (d_H + eps_lower) / d_X

    @property
    def violations(self) -> int:
        return self.violations_lower + self.violations_upper


def verify_two_sided(ball_radius: int = 10, eps_lower: float = 4 * LT.c,
                     eps_upper: float = 2 * LT.b, chunk: int = 512, ball=None) -> TwoSidedReport:
    """Scan all unordered chamber pairs of a ball (both metrics are symmetric).

    d_X comes from wall incidence counts (sparse products), d_H from the
    Minkowski Gram matrix.  Violations are counted in cosh space against a
    per-d_X threshold lookup; only the extreme ratios are converted back.
    """
    from .davis import Ball
    B = ball if ball is not None else Ball(ball_radius)
    A = B.wall_sets(ball_radius).tocsr()
    N = A.shape[0]
    L = B.table.length[:N].astype(np.float32)
    C = B.centers[:N]
    top = 2 * ball_radius + 1
    n = np.arange(top + 1, dtype=np.float64)
    lo_arg = LT.c * n - eps_lower
    # cosh d_H must stay >= cosh(lower) where the lower bound is positive
    thr_lo = np.where(lo_arg > 0, np.cosh(np.maximum(lo_arg - 1e-12, 0)), -np.inf)
    thr_hi = np.cosh(LT.d * n + eps_upper + 1e-12)
    viol_lo = viol_hi = 0
    best_hi, best_lo = -np.inf, np.inf
    for j0 in range(0, N, chunk):
        j1 = min(N, j0 + chunk)
        # rows i >= j0 only; the block below the diagonal is the transpose
        G = (A[j0:] @ A[j0:j1].T).toarray()
        dx = (L[j0:, None] + L[None, j0:j1] - 2 * G).astype(np.int16)
        X = np.outer(C[j0:, 2], C[j0:j1, 2]) - C[j0:, :2] @ C[j0:j1, :2].T
        keep = np.arange(j0, N)[:, None] >= np.arange(j0, j1)[None, :]
        viol_lo += int(np.count_nonzero((X < thr_lo[dx]) & keep))
        viol_hi += int(np.count_nonzero((X > thr_hi[dx]) & keep))
        pos = dx > 0
        dh = np.arccosh(np.maximum(X[pos], 1.0))
        d = dx[pos]
        best_hi = max(best_hi, float(np.max((dh - eps_upper) / d)))
        best_lo = min(best_lo, float(np.min((dh + eps_lower) / d)))
    return TwoSidedReport(
        ball_radius, N * (N + 1) // 2, viol_lo, viol_hi, eps_lower, eps_upper,
        best_hi, best_lo,
    )


# -- sharpness ------------------------------------------------------------------

@dataclass
class Sharpness:
    n_max: int
    sup_ratio: float
    inf_ratio: float
    sup_witness: str
    inf_witness: str
    classes: int


def sharpness(n_max: int = 12, census=None) -> Sharpness:
    """Extreme len_hyp / len_cube ratios; census may be a Census or a ClassCatalog."""
    from .census import build_census
    from .coxeter import word_str
    C = census if census is not None and census.cap >= n_max else build_census(n_max)
    sel = np.nonzero(C.hyperbolic & (C.len_cube <= n_max) & (C.len_cube > 0))[0]
    r = C.len_hyp[sel] / C.len_cube[sel]
    i_max, i_min = int(np.argmax(r)), int(np.argmin(r))
    if hasattr(C, "words"):
        name = lambda k: C.words[k]
    else:
        name = lambda k: word_str(C.table.word(C.reps[k]))
    return Sharpness(n_max, float(r[i_max]), float(r[i_min]),
                     name(sel[i_max]), name(sel[i_min]), len(sel))


# -- crossing types ----------------------------------------------------------------

def altitude_vertex(e1: int, e2: int) -> int:
    """Index j of the vertex (between sides j, j+1) whose altitude swaps sides e1, e2."""
    return (3 * (e1 + e2 - 1)) % 5


def altitude_polar(e1: int, e2: int) -> np.ndarray:
    """Polar of the line carrying the altitude associated to sides e1, e2 (local frame)."""
    j = altitude_vertex(e1, e2)
    w = lorentz_cross(VERTICES[j], MIDPOINTS[(j + 3) % 5])
    return w / math.sqrt(mink(w, w))


def crossing_type(entry: int, shared: int, exit_: int) -> str:
    """Type of a geodesic entering P through `entry`, crossing the shared side,
    and leaving the neighbour through `exit_` (labels in each pentagon's frame;
    the shared side carries the same label in both)."""
    r1 = (entry - shared) % 5
    r2 = (exit_ - shared) % 5
    if r1 == 0 or r2 == 0:
        raise ValueError("entry/exit cannot be the shared side")
    adj1, adj2 = r1 in (1, 4), r2 in (1, 4)
    end1, end2 = r1 in (1, 2), r2 in (1, 2)
    if adj1 and adj2:
        if end1 == end2:
            raise ValueError("a geodesic cannot cross one wall twice")
        return "V"
    if adj1:            # read it backwards: enter through the non-adjacent side
        adj1, adj2 = adj2, adj1
    same = end1 == end2
    if adj2:
        return "I" if same else "IV"
    return "II" if same else "III"


@dataclass
class CrossingRecord:
    chambers: tuple           # (g, g s) as digit strings
    entry: int
    shared: int
    exit: int
    type: str
    length: float             # length between the two associated altitudes
    perturbed: bool = False


@dataclass
class LineWalk:
    """Chambers crossed by a geodesic, with entry/exit sides and altitude hits."""
    words: list
    entries: list
    exits: list
    t_alt: list
    perturbed: bool

    def crossings(self) -> list:
        out = []
        for k in range(1, len(self.words) - 2):
            typ = crossing_type(self.entries[k], self.exits[k], self.exits[k + 1])
            out.append(CrossingRecord((self.words[k], self.words[k + 1]), self.entries[k],
                                      self.exits[k], self.exits[k + 1], typ,
                                      self.t_alt[k + 1] - self.t_alt[k], self.perturbed))
        return out


def walk_line(line: Line, t0: float, t1: float, vertex_eps: float = 1e-7) -> LineWalk:
    """Follow line(t) for t in [t0, t1] through the tiling.

    The starting chamber is found by greedy descent (reflect across any side
    whose far side contains the point).  If the line passes within vertex_eps
    of a tiling vertex it is rotated slightly about line(t0) and flagged.
    """
    from .coxeter import word_str
    perturbed = False
    for attempt in range(8):
        try:
            return _walk(line, t0, t1, vertex_eps, perturbed)
        except _NearVertex:
            perturbed = True
            th = 1e-7 * (attempt + 1)
            p, v = line.at(t0), np.sinh(t0) * line.p + np.cosh(t0) * line.v
            w = lorentz_cross(p, v)
            w = w / math.sqrt(mink(w, w))
            v2 = math.cos(th) * v + math.sin(th) * w
            line = Line(tuple(p), tuple(v2))
            t1, t0 = t1 - t0, 0.0
    raise RuntimeError("could not perturb the line off the vertices")


class _NearVertex(Exception):
    pass


def _locate(p: np.ndarray):
    M = np.eye(3)
    word = []
    for _ in range(10_000):
        q = np.linalg.solve(M, p)          # local coordinates
        s = mink(POLARS, q)
        i = int(np.argmax(s))
        if s[i] <= 0:
            return M, word
        M = M @ REFLECTIONS[i]
        word.append(i)
    raise RuntimeError("point location did not terminate")


def _walk(line: Line, t0: float, t1: float, vertex_eps: float, perturbed: bool) -> LineWalk:
    from .coxeter import reduce_word, word_str
    M, word = _locate(line.at(t0))
    words, entries, exits, t_alt = [], [], [], []
    t = t0
    entry = -1
    Jm = np.diag([1.0, 1.0, -1.0])
    while True:
        Minv = Jm @ M.T @ Jm
        p = Minv @ line.p
        v = Minv @ line.v
        # <gamma(t), e_i> = alpha cosh t + beta sinh t vanishes at tanh t = -alpha / beta
        al = mink(POLARS, p)
        be = mink(POLARS, v)
        best, side = math.inf, -1
        for i in range(5):
            if i == entry or abs(be[i]) <= abs(al[i]):
                continue
            ti = math.atanh(-al[i] / be[i])
            if t - 1e-12 < ti < best:
                best, side = ti, i
        words.append(word_str(reduce_word(word)))
        entries.append(entry)
        exits.append(side)
        if entry >= 0 and side >= 0:
            a = altitude_polar(entry, side)
            aa, bb = mink(a, p), mink(a, v)
            t_alt.append(math.atanh(-aa / bb) if abs(bb) > abs(aa) else math.nan)
        else:
            t_alt.append(math.nan)
        if side < 0 or best > t1:
            break
        x = np.cosh(best) * p + np.sinh(best) * v
        if np.min(np.arccosh(np.maximum(-mink(VERTICES, x), 1.0))) < vertex_eps:
            raise _NearVertex
        t = best
        M = M @ REFLECTIONS[side]
        word.append(side)
        entry = side
    return LineWalk(words, entries, exits, t_alt, perturbed)


def classify_crossing(p, q, chamber="") -> CrossingRecord:
    """Type and altitude-to-altitude length of the chord through p and q.

    The chord's line is followed on both sides; the record describes the
    crossing out of the given chamber (default: the one containing p)
    into its neighbour.
    """
    from .coxeter import reduce_word, word_str
    L = _line_through(p, q)
    span = _d(p, q)
    walk = walk_line(L, -span - 30 * LT.d, span + 30 * LT.d)
    recs = walk.crossings()
    target = word_str(reduce_word(chamber)) if chamber else _locate_word(np.asarray(p, float))
    for r in recs:
        if r.chambers[0] == target:
            return r
    raise ValueError("chord does not leave the given chamber inside the window")


def _locate_word(p):
    from .coxeter import reduce_word, word_str
    return word_str(reduce_word(_locate(p)[1]))


def random_lines(n: int, rng: np.random.Generator, spread: float = 0.2) -> list:
    """Lines through points near random vertices of the base pentagon with random
    directions; vertex-biased so the extremal configurations are sampled."""
    out = []
    for _ in range(n):
        k = rng.integers(5)
        base = VERTICES[k] if rng.random() < 0.7 else MIDPOINTS[k]
        r = spread * rng.random() ** 2
        th = rng.uniform(0, 2 * math.pi)
        # tangent frame at base
        e1 = POLARS[k]
        e2 = lorentz_cross(base, e1)
        e2 = e2 / math.sqrt(mink(e2, e2))
        u = math.cos(th) * e1 + math.sin(th) * e2
        p = math.cosh(r) * base + math.sinh(r) * u
        phi = rng.uniform(0, math.pi)
        f1 = lorentz_cross(p, e2)
        f1 = f1 / math.sqrt(mink(f1, f1))
        f2 = lorentz_cross(p, f1)
        f2 = f2 / math.sqrt(mink(f2, f2))
        out.append(Line(tuple(p), tuple(math.cos(phi) * f1 + math.sin(phi) * f2)))
    return out


def crossing_census(samples: int = 10_000, seed: int = 0, half_span: float = 6.0) -> dict:
    """Monte Carlo over random geodesics: per-type minimal lengths and the
    chain sums used to average type-I segments against their neighbours."""
    rng = np.random.default_rng(seed)
    mins = {k: math.inf for k in TYPE_MIN}
    counts = {k: 0 for k in TYPE_MIN}
    pair_min = {k: math.inf for k in ("II", "III", "IV")}
    triple_min = math.inf
    n_seen = 0
    perturbed = 0
    while n_seen < samples:
        L = random_lines(1, rng)[0]
        w = walk_line(L, -half_span, half_span)
        perturbed += w.perturbed
        recs = w.crossings()
        for k, r in enumerate(recs):
            mins[r.type] = min(mins[r.type], r.length)
            counts[r.type] += 1
            n_seen += 1
            if r.type != "I":
                continue
            for j in (k - 1, k + 1):
                if 0 <= j < len(recs) and recs[j].type in pair_min:
                    pair_min[recs[j].type] = min(pair_min[recs[j].type], r.length + recs[j].length)
            if k + 2 < len(recs) and recs[k + 1].type == "III" and recs[k + 2].type == "I":
                triple_min = min(triple_min, r.length + recs[k + 1].length + recs[k + 2].length)
    return {"samples": n_seen, "min_by_type": mins, "count_by_type": counts,
            "pair_min": pair_min, "triple_min": triple_min, "perturbed_lines": perturbed}


def claims_check(samples: int = 10_000, seed: int = 0) -> dict:
    t = LT
    pair_bound = min(3 * t.a, t.g)
    mc = crossing_census(samples, seed)
    type_ok = all(mc["min_by_type"][k] >= TYPE_MIN[k] - 1e-6 for k in TYPE_MIN
                  if mc["count_by_type"][k])
    pair_ok = all(v >= pair_bound - 1e-6 for v in mc["pair_min"].values())
    triple_ok = mc["triple_min"] >= 2 * t.e - 1e-6
    return {
        "three_a": 3 * t.a, "g": t.g, "two_c": 2 * t.c,
        "pair_margin": pair_bound - 2 * t.c,
        "triple_margin": 2 * t.e - 3 * t.c,
        "type_minima": TYPE_MIN,
        "monte_carlo": mc,
        "type_ok": type_ok, "pair_ok": pair_ok, "triple_ok": triple_ok,
        "ok": type_ok and pair_ok and triple_ok and pair_bound - 2 * t.c > 0 and 2 * t.e - 3 * t.c > 0,
    }
