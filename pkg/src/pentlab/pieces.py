"""Loose pieces between geodesic axes in the hyperbolic plane.

Along gamma(t) = cosh t p + sinh t v the distance to the line with unit polar
e satisfies sinh d = |alpha cosh t + beta sinh t| with alpha = <p, e> and
beta = <v, e>.  Writing that combination as R cosh(t + phi) (disjoint lines)
or R sinh(t + phi) (crossing lines) turns "within J" into an interval with
closed-form endpoints.  Everything else here is bookkeeping around that.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .coxeter import ConjClass, GroupElement, normal_form, parse_word, word_str
from .hyperboloid import J as JM, DomainError, HIsometry, Line, axis, lorentz_cross, mink
from .pentagon import LT, RHO
from .tables import ResourceError

DELTA = math.log(1.0 + math.sqrt(2.0))
MAX_FRAME_RADIUS = 13.0
# |alpha|, |beta| below this mean a fellow-travelling stretch of 20+ units,
# which only coincident axes produce at census scale
SUSPECT = 1e-4


class PieceError(ValueError):
    pass


class ExcludedCase(PieceError):
    """The two lines coincide."""


class DegenerateInput(PieceError):
    """The two lines share an ideal endpoint, or the axis lies on the wall."""


class PreconditionError(PieceError):
    pass


@dataclass(frozen=True)
class AxisLine:
    """Axis of a hyperbolic element with g.gamma(t) = gamma(t + period)."""
    line: Line
    carrier: GroupElement
    period: float

    @classmethod
    def of(cls, g: Union[GroupElement, ConjClass, str]) -> "AxisLine":
        if isinstance(g, ConjClass):
            g = g.rep
        elif not isinstance(g, GroupElement):
            g = normal_form(g)
        from .hyperboloid import translation_length
        M = g.isometry
        return cls(axis(M), g, float(translation_length(M)))

    @property
    def polar(self) -> np.ndarray:
        return lorentz_cross(self.line.p, self.line.v)

    def at(self, t):
        return self.line.at(t)

    def moved(self, M: np.ndarray) -> Line:
        p, v = _rebase(M @ self.line.p, M @ self.line.v)
        return Line(tuple(map(float, p)), tuple(map(float, v)))

    def translate(self, h: GroupElement) -> "AxisLine":
        M = h.isometry.matrix
        return AxisLine(self.moved(M), h * self.carrier * h.inverse(), self.period)


@dataclass
class PieceConfig:
    J_cone: float = 2 * DELTA
    kappa_wall: float = 2 * DELTA
    J_cubical: float = 6.0        # 3 K with the census hull constant K = 2
    R_cap: Optional[float] = None

    def __post_init__(self):
        for k in ("J_cone", "kappa_wall", "J_cubical"):
            if not getattr(self, k) > 0:
                raise ValueError(f"{k} must be positive")
        if self.R_cap is not None and not self.R_cap > 0:
            raise ValueError("R_cap must be positive")


@dataclass
class LoosePieceReport:
    kind: str
    J: float
    segment: tuple
    companion: tuple
    diameter: float
    orientation_preserved: Optional[bool] = None
    overlap_len: Optional[float] = None
    translate: Optional[GroupElement] = None
    boundary: bool = False
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "J": self.J, "segment": list(self.segment),
                "companion": list(self.companion), "diameter": self.diameter,
                "orientation_preserved": self.orientation_preserved,
                "overlap_len": self.overlap_len,
                "translate": None if self.translate is None else word_str(self.translate.normal),
                "boundary": self.boundary, **self.notes}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# -- closed form -----------------------------------------------------------------

def _intervals(alpha, beta, J: float, tol: float = 1e-10, same_tol: float = 1e-8):
    """Vectorized solution of |alpha cosh t + beta sinh t| <= sinh J.

    Returns (t0, t1, min_dist, kind) where kind is 0 for a proper interval,
    1 for empty, 2 for coincident lines and 3 for a shared ideal endpoint.
    Lines with |alpha|, |beta| below same_tol count as coincident; a genuine
    pair that close would fellow-travel for about 35 units, far beyond any
    axis handled here.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    sJ = math.sinh(J)
    a2, b2 = alpha * alpha, beta * beta
    t0 = np.full(alpha.shape, np.nan)
    t1 = np.full(alpha.shape, np.nan)
    mind = np.zeros(alpha.shape)
    kind = np.zeros(alpha.shape, dtype=np.int8)
    same = a2 + b2 < same_tol * same_tol
    asym = ~same & (np.abs(a2 - b2) <= tol * (a2 + b2))
    kind[same], kind[asym] = 2, 3
    far = ~same & ~asym & (a2 > b2)
    cross = ~same & ~asym & (a2 < b2)
    with np.errstate(invalid="ignore", divide="ignore"):
        R = np.sqrt(np.abs(a2 - b2))
        phi = np.where(far, np.arctanh(np.clip(beta / np.where(far, alpha, 1), -1, 1)),
                       np.arctanh(np.clip(alpha / np.where(cross, beta, 1), -1, 1)))
        w_far = np.arccosh(np.maximum(sJ / np.where(far, R, 1), 1.0))
        w_cross = np.arcsinh(sJ / np.where(cross, R, 1))
    mind[far] = np.arcsinh(R[far])
    empty = far & (R > sJ)
    kind[empty] = 1
    ok_far = far & ~empty
    t0[ok_far] = -phi[ok_far] - w_far[ok_far]
    t1[ok_far] = -phi[ok_far] + w_far[ok_far]
    t0[cross] = -phi[cross] - w_cross[cross]
    t1[cross] = -phi[cross] + w_cross[cross]
    return t0, t1, mind, kind


def _rebase(p, v):
    """Re-base lines (stacked along the first axis) at their foot from the origin.

    Far translates have huge coordinates; going through the ideal endpoints
    keeps the base point and direction well conditioned near the origin.
    """
    a, r = p + v, p - v
    a = a / a[..., 2:3]
    r = r / r[..., 2:3]
    s = np.sqrt(-2.0 * mink(a, r))[..., None]
    return (a + r) / s, (a - r) / s


def _foot(p, v, q):
    A = -mink(q, p)
    B = mink(q, v)
    with np.errstate(invalid="ignore", divide="ignore"):
        return 0.5 * np.log((A + B) / (A - B))


def _piece(kind: str, line: Line, other: Line, e: np.ndarray, J: float,
           tol: float) -> Optional[LoosePieceReport]:
    al, be = mink(line.p, e), mink(line.v, e)
    t0, t1, mind, k = _intervals(al, be, J)
    k = int(k)
    if k == 2:
        if kind == "wall":
            raise DegenerateInput("the axis lies on the wall")
        raise ExcludedCase("identical lines")
    if k == 3:
        raise DegenerateInput("lines share an ideal endpoint")
    boundary = abs(float(mind) - J) < tol
    if k == 1:
        if boundary:
            # within tolerance of touching: report the single point
            t = float(-np.arctanh(be / al))
            u = float(_foot(other.p, other.v, line.at(t)))
            return LoosePieceReport(kind, J, (t, t), (u, u), 0.0, boundary=True)
        return None
    t0, t1 = float(t0), float(t1)
    u0 = float(_foot(other.p, other.v, line.at(t0)))
    u1 = float(_foot(other.p, other.v, line.at(t1)))
    return LoosePieceReport(kind, J, (t0, t1), (u0, u1), t1 - t0, boundary=boundary)


def cone_piece(g: AxisLine, h: Union[AxisLine, Line], J: float = 2 * DELTA,
               tol: float = 1e-9) -> Optional[LoosePieceReport]:
    """Maximal segment of g's axis whose endpoints lie within J of the other line."""
    other = h.line if isinstance(h, AxisLine) else h
    e = lorentz_cross(other.p, other.v)
    return _piece("cone", g.line, other, e, J, tol)


def wall_piece(g: AxisLine, wall, kappa: float = 2 * DELTA,
               tol: float = 1e-9) -> Optional[LoosePieceReport]:
    """Same closed form against a wall (a davis.Wall or a polar vector)."""
    e = getattr(wall, "line", wall)
    e = np.asarray(getattr(e, "array", e), dtype=float)
    other = Line.from_polar(e)
    return _piece("wall", g.line, other, e, kappa, tol)


def overlap_orientation(g: AxisLine, h, piece: LoosePieceReport) -> tuple:
    """(orientation_preserved, overlap_len) for a self-piece between g and h g.

    The companion lies on h.gamma, parameterized as h.gamma(u); pulling it
    back by h gives an interval on gamma itself.
    """
    if piece.diameter <= 2 * piece.J:
        raise PreconditionError(f"piece diameter {piece.diameter:.4f} <= 2J")
    M = h.isometry.matrix if isinstance(h, GroupElement) else getattr(h, "matrix", h)
    other = g.moved(np.asarray(M))
    t0, t1 = piece.segment
    u0 = float(_foot(other.p, other.v, g.at(t0)))
    u1 = float(_foot(other.p, other.v, g.at(t1)))
    lo, hi = min(u0, u1), max(u0, u1)
    overlap = max(0.0, min(t1, hi) - max(t0, lo))
    return u1 > u0, overlap


# -- translate census ----------------------------------------------------------

@lru_cache(maxsize=2)
def _frame(radius: float):
    from .hyperbolic_ball import build_hyp_ball
    B = build_hyp_ball(radius)
    centers = B.matrices[:, :, 2].copy()
    return B, centers


def _frame_for(radius: float):
    if radius > MAX_FRAME_RADIUS:
        raise ResourceError(f"translate census needs hyperbolic ball radius {radius:.2f} "
                            f"(budget {MAX_FRAME_RADIUS})")
    return _frame(max(8.0, math.ceil(radius * 2) / 2))


def _tube(line: Line, t0: float, t1: float, r: float, centers: np.ndarray) -> np.ndarray:
    """Ids of frame elements whose chamber center is within r of gamma([t0, t1])."""
    tau = np.clip(_foot(line.p, line.v, centers), t0, t1)
    pts = np.cosh(tau)[:, None] * line.p + np.sinh(tau)[:, None] * line.v
    ch = -mink(centers, pts)
    return np.nonzero(ch <= math.cosh(r))[0]


def _inv(M):
    return JM @ np.swapaxes(M, -1, -2) @ JM


@dataclass
class _Candidates:
    """All translates h = a c b^-1 of the second axis near one period of the first."""
    a: np.ndarray
    c: np.ndarray
    b: np.ndarray
    frame: object
    t0: np.ndarray
    t1: np.ndarray
    kind: np.ndarray
    u0: np.ndarray
    u1: np.ndarray

    def element(self, k: int) -> GroupElement:
        B = self.frame
        ia, ic, ib = np.unravel_index(k, (len(self.a), len(self.c), len(self.b)))
        w = B.word(self.a[ia]) + B.word(self.c[ic]) + B.word(self.b[ib])[::-1]
        return normal_form(w)

    @property
    def diameter(self) -> np.ndarray:
        return np.where(self.kind == 0, self.t1 - self.t0, -np.inf)


def _candidates(g: AxisLine, g2: AxisLine, J: float) -> _Candidates:
    eps = 1e-6
    d1 = float(np.arcsinh(abs(mink(np.array([0.0, 0.0, 1.0]), g.polar))))
    d2 = float(np.arcsinh(abs(mink(np.array([0.0, 0.0, 1.0]), g2.polar))))
    reach = max(d1 + g.period / 2, d2 + g2.period / 2) + RHO + eps
    creach = J + 2 * RHO + eps
    B, centers = _frame_for(max(reach, creach))
    # the base points of both axes are their feet from the origin
    A = _tube(g.line, -g.period / 2, g.period / 2, RHO + eps, centers)
    Bs = _tube(g2.line, -g2.period / 2, g2.period / 2, RHO + eps, centers)
    C = np.nonzero(B.dist <= creach)[0]
    frame2 = np.stack([g2.line.p, g2.line.v, g2.polar], axis=1)       # columns
    X = _inv(B.matrices[Bs]) @ frame2                                   # (nb, 3, 3)
    X = np.einsum("cij,bjk->cbik", B.matrices[C], X)
    X = np.einsum("aij,cbjk->acbik", B.matrices[A], X).reshape(-1, 3, 3)
    ph, vh = _rebase(X[:, :, 0], X[:, :, 1])
    eh = lorentz_cross(ph, vh)
    al, be = mink(g.line.p, eh), mink(g.line.v, eh)
    t0, t1, _, kind = _intervals(al, be, J)
    cand = _Candidates(A, C, Bs, B, t0, t1, kind, None, None)
    # Far translates lose digits, so nearly coincident lines are settled
    # exactly: h axis(g2) = axis(g) iff h g2 h^-1 commutes with g.
    close = np.nonzero(np.hypot(al, be) < SUSPECT)[0]
    x, y = g.carrier, g2.carrier
    for k in close:
        h = cand.element(int(k))
        z = h * y * h.inverse()
        if z * x == x * z:
            kind[k] = 2
        elif kind[k] != 0:
            raise DegenerateInput(f"translate {h} nearly shares an endpoint with the axis")
    ok = kind == 0
    u0 = np.full(len(X), np.nan)
    u1 = np.full(len(X), np.nan)
    if ok.any():
        u0[ok] = _foot(ph[ok], vh[ok], g.line.at(t0[ok]))
        u1[ok] = _foot(ph[ok], vh[ok], g.line.at(t1[ok]))
    cand.u0, cand.u1 = u0, u1
    return cand


def _as_axis(x) -> AxisLine:
    return x if isinstance(x, AxisLine) else AxisLine.of(x)


def max_piece_census(g, g2, J: float = 2 * DELTA,
                     window_radius: Optional[int] = None) -> Optional[LoosePieceReport]:
    """Largest J-loose cone piece between axis(g) and any translate h axis(g2).

    Translates whose line equals axis(g) are excluded (this removes the
    setwise stabilizer of the axis when g2 = g).  With window_radius set,
    only h of word length <= window_radius count.  Ties are broken by
    candidate order, which is deterministic.
    """
    ga, gb = _as_axis(g), _as_axis(g2)
    cand = _candidates(ga, gb, J)
    diam = cand.diameter
    order = np.argsort(-diam, kind="stable")
    for k in order:
        if not np.isfinite(diam[k]):
            return None
        h = cand.element(int(k))
        if window_radius is not None and h.length > window_radius:
            continue
        rep = cone_piece(ga, gb.translate(h), J)
        if rep is None:     # cannot happen off the boundary; keep the guard
            continue
        rep.translate = h
        rep.notes = {"candidates": int(len(diam)), "nonempty": int(np.isfinite(diam).sum())}
        return rep
    return None


def reversing_overlaps(g, J: float = 2 * DELTA, window_radius: Optional[int] = None) -> list:
    """(h, overlap_len, diameter) for orientation-reversing self-pieces of g.

    Only pieces longer than 2J qualify, as the overlap is defined only there.
    """
    ga = _as_axis(g)
    cand = _candidates(ga, ga, J)
    diam = cand.diameter
    rev = np.nonzero(np.isfinite(diam) & (diam > 2 * J) & (cand.u1 < cand.u0))[0]
    out = []
    seen = set()
    for k in rev:
        lo, hi = cand.u1[k], cand.u0[k]
        ov = max(0.0, min(cand.t1[k], hi) - max(cand.t0[k], lo))
        h = cand.element(int(k))
        if h in seen:
            continue
        seen.add(h)
        if window_radius is not None and h.length > window_radius:
            continue
        out.append((h, float(ov), float(diam[k])))
    return out


def reversing_cap(classes: Sequence, window_radius: Optional[int], J: float = 2 * DELTA) -> float:
    """Largest reversing overlap over a list of classes (0 if there are none)."""
    best = 0.0
    for c in classes:
        for _, ov, _ in reversing_overlaps(c, J, window_radius):
            best = max(best, ov)
    return best


def max_wall_piece(g, kappa: float = 2 * DELTA) -> Optional[LoosePieceReport]:
    """Largest kappa-loose wall piece of axis(g) over all walls of the tiling.

    A wall within kappa of a point q bounds a chamber whose center is within
    kappa + RHO of q, so the sides of chambers in that tube around one period
    are a complete candidate set.  If the axis lies on a wall the piece is
    the whole axis: the report has infinite diameter.
    """
    from .pentagon import POLARS
    ga = _as_axis(g)
    eps = 1e-6
    d1 = float(np.arcsinh(abs(mink(np.array([0.0, 0.0, 1.0]), ga.polar))))
    B, centers = _frame_for(d1 + ga.period / 2 + kappa + RHO + eps)
    A = _tube(ga.line, -ga.period / 2, ga.period / 2, kappa + RHO + eps, centers)
    E = np.einsum("aij,sj->asi", B.matrices[A], POLARS).reshape(-1, 3)
    al, be = mink(ga.line.p, E), mink(ga.line.v, E)
    t0, t1, _, kind = _intervals(al, be, kappa)
    if np.any(kind == 2):
        k = int(np.nonzero(kind == 2)[0][0])
        wall = _wall_name(B, A, k)
        return LoosePieceReport("wall", kappa, (-math.inf, math.inf), (-math.inf, math.inf),
                                math.inf, notes={"wall": wall, "axis_on_wall": True})
    if np.any(kind == 3):
        raise DegenerateInput("axis shares an ideal endpoint with a wall")
    diam = np.where(kind == 0, t1 - t0, -np.inf)
    k = int(np.argmax(diam))
    if not np.isfinite(diam[k]):
        return None
    rep = wall_piece(ga, E[k], kappa)
    rep.notes = {"wall": _wall_name(B, A, k), "axis_on_wall": False}
    return rep


def _wall_name(B, A, k: int) -> str:
    """Reflection word of the k-th candidate wall (chamber a, side s)."""
    ia, s = divmod(k, 5)
    a = B.word(A[ia])
    return word_str(normal_form(a + (s,) + a[::-1]).normal)


# -- sampling and survival -------------------------------------------------------

def sample_pairs(catalog, n_pairs: int, ell_hyp: float, seed: int) -> np.ndarray:
    """Uniform ordered pairs of hyperbolic classes with len_hyp <= ell_hyp."""
    ids = catalog.hyperbolic_ids("hyp", ell_hyp)
    if len(ids) == 0:
        raise PieceError(f"no hyperbolic classes with len_hyp <= {ell_hyp}")
    rng = np.random.default_rng(seed)
    return ids[rng.integers(0, len(ids), size=(n_pairs, 2))]


def pair_diameters(catalog, pairs: np.ndarray, J: float = 2 * DELTA, workers: int = 1) -> np.ndarray:
    """Max cone-piece diameter for each pair (0 when there is no piece)."""
    words = [(catalog.words[i], catalog.words[j]) for i, j in pairs]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            out = list(ex.map(_pair_diameter, words, [J] * len(words), chunksize=16))
    else:
        out = [_pair_diameter(w, J) for w in words]
    return np.array(out)


def _pair_diameter(words, J):
    a, b = words
    rep = max_piece_census(GroupElement(parse_word(a)), GroupElement(parse_word(b)), J)
    return 0.0 if rep is None else rep.diameter


@dataclass
class Survival:
    grid: np.ndarray
    log_survival: np.ndarray
    slope: float
    section: tuple
    samples: int

    def to_csv(self) -> str:
        lines = ["d,log_survival"]
        lines += [f"{d:.6g},{s:.9g}" for d, s in zip(self.grid, self.log_survival)]
        return "\n".join(lines) + "\n"


def survival(diams: np.ndarray, step: float = 0.25, lo_p: float = 0.5,
             min_count: int = 20) -> Survival:
    """Empirical log P(D >= d) and its slope on the straight section.

    The straight section starts once survival drops below lo_p (the bulk of
    the distribution is not exponential) and stops while at least min_count
    samples remain above d (beyond that the curve is counting noise).
    """
    diams = np.sort(np.asarray(diams, dtype=float))
    n = len(diams)
    grid = np.arange(0.0, diams.max() + step, step)
    above = n - np.searchsorted(diams, grid - 1e-12, side="left")
    keep = above > 0
    grid, above = grid[keep], above[keep]
    logs = np.log(above / n)
    sel = (above / n <= lo_p) & (above >= min_count)
    if sel.sum() < 3:
        return Survival(grid, logs, float("nan"), (float("nan"), float("nan")), n)
    slope = float(np.polyfit(grid[sel], logs[sel], 1)[0])
    return Survival(grid, logs, slope, (float(grid[sel][0]), float(grid[sel][-1])), n)


# -- combinatorial window check ---------------------------------------------------

def _axis_chambers(w: tuple, count: int) -> list:
    """Chambers w^q u for prefixes u of w, indexed from -count to count."""
    n = len(w)
    out = []
    for k in range(-count, count + 1):
        q, r = divmod(k, n)
        if q >= 0:
            word = w * q + w[:r]
        else:
            word = tuple(reversed(w)) * (-q) + w[:r]
        out.append(tuple(word))
    return out


def cubical_piece_window(g, g2, window_radius: int, J: Optional[float] = None,
                         ball_radius: Optional[int] = None) -> int:
    """Largest combinatorial J-loose piece between the combinatorial axes.

    Axis chambers of a cyclically reduced rep w are w^q u, u a prefix of w;
    consecutive ones are adjacent, and they minimize d(C, wC).  Translates
    h of word length <= window_radius are scanned and distances inside a
    ball of radius ball_radius (default 2 window_radius) are exact.
    Returns the largest (last - first) index span of axis chambers within J
    of the translated axis; 0 if there is none.
    """
    from .davis import Ball
    if J is None:
        J = PieceConfig().J_cubical
    ga, gb = _as_axis(g), _as_axis(g2)
    w1, w2 = ga.carrier.normal, gb.carrier.normal
    R = ball_radius if ball_radius is not None else 2 * window_radius
    if R > 11:
        raise ResourceError(f"cubical window needs ball radius {R} (budget 11)")
    ball = _ball(R)
    T = ball.table
    A = ball.wall_sets(R).tocsr()
    L = T.length[:A.shape[0]].astype(np.int64)
    xs = [T.index(x) for x in _axis_chambers(w1, R)]
    xs = np.array([x for x in xs if 0 <= x < A.shape[0]])
    ys = _axis_chambers(w2, R)
    hs = np.arange(T.offsets[window_radius + 1])
    # exclude translates whose line coincides with axis(g)
    Mh = T.matrices(window_radius)[hs]
    eh = Mh @ gb.polar
    same = (np.abs(mink(ga.line.p, eh)) < 1e-8) & (np.abs(mink(ga.line.v, eh)) < 1e-8)
    best_near = np.full((len(hs), len(xs)), False)
    for y in ys:
        z = hs.copy()
        for x in y:
            ok = z >= 0
            z[ok] = T.right[z[ok], x]
        z = np.where((z >= 0) & (z < A.shape[0]), z, -1)
        okz = np.nonzero(z >= 0)[0]
        if len(okz) == 0:
            continue
        G = (A[xs] @ A[z[okz]].T).toarray()
        d = L[xs][:, None] + L[z[okz]][None, :] - 2 * G
        best_near[okz] |= (d <= J + 1e-9).T
    best_near[same] = False
    spans = np.where(best_near.any(axis=1),
                     len(xs) - 1 - np.argmax(best_near[:, ::-1], axis=1) - np.argmax(best_near, axis=1), 0)
    return int(spans.max()) if len(spans) else 0


@lru_cache(maxsize=2)
def _ball(R: int):
    from .davis import Ball
    return Ball(R)
