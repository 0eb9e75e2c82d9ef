"""Small-cancellation verdicts for finite sets of relator classes.

Each relator class g stands for the quasi-circle with fundamental group <g>;
its systole is the translation length.  A presentation satisfies C'(alpha)
when every cone piece between relator axes and every wall piece of a
relator axis is shorter than alpha times that relator's systole.  Piece
diameters are measured in the hyperbolic plane; the cubical window check
in pieces.py is corroboration only.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .coxeter import ConjClass, GroupElement, normal_form, word_str
from .hyperboloid import DomainError
from .pentagon import LT
from .pieces import (AxisLine, PieceConfig, max_piece_census, max_wall_piece, _as_axis)
from .tables import ResourceError

THRESHOLDS = {"1/20": 1 / 20, "1/14": 1 / 14, "1/12": 1 / 12}


class PresentationError(ValueError):
    pass


@dataclass
class Presentation:
    relators: list
    alpha: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.relators:
            raise PresentationError("a presentation needs at least one relator")
        if not 0 < self.alpha < 1:
            raise PresentationError("alpha must lie in (0, 1)")
        seen = set()
        for c in self.relators:
            if not c.hyperbolic:
                raise PresentationError(f"relator {c.rep} is elliptic")
            if c.rep in seen:
                raise PresentationError(f"class {c.rep} appears twice")
            seen.add(c.rep)


@dataclass
class Systole:
    value: float
    metric: str
    primitive: bool
    root: Optional[str] = None
    power: int = 1


def systole(c: ConjClass, metric: str = "hyp") -> Systole:
    """Translation length of the class, or of its root if it is a proper power."""
    if not c.hyperbolic:
        raise DomainError("systole of an elliptic class")
    from .census import root_search
    base = c.len_hyp if metric == "hyp" else c.len_cube
    prim = c.primitive
    if prim is None:
        found = root_search(c.rep, c.len_hyp)
        prim = found is None
    if prim:
        return Systole(float(base), metric, True)
    found = root_search(c.rep, c.len_hyp)
    h, n = found
    return Systole(float(base) / n, metric, False, word_str(h.normal), n)


@dataclass
class Verdict:
    status: str                  # satisfied / violated / unknown
    alpha: float
    threshold_report: dict
    worst_cone: Optional[dict]
    worst_wall: Optional[dict]
    carrier_check: list
    wallspace_check: list
    unchecked: list = field(default_factory=list)
    complete: bool = True

    @property
    def satisfied(self) -> bool:
        return self.status == "satisfied"

    def to_dict(self) -> dict:
        return {**asdict(self), "satisfied": self.satisfied}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return str(x)


def _finite(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def cprime_verdict(p: Presentation, config: Optional[PieceConfig] = None,
                   early_exit: bool = False, premises: bool = True) -> Verdict:
    """C'(alpha) verdict, with the premise checks of the properness theorem.

    With early_exit the scan stops at the first violation (the worst-piece
    fields then describe that violation, not the global maximum).  A
    ResourceError on any pair makes the verdict "unknown"; it is never
    promoted to "satisfied".
    """
    cfg = config or PieceConfig()
    axes = [AxisLine.of(c) for c in p.relators]
    sys_h = [systole(c, "hyp").value for c in p.relators]
    worst_ratio = 0.0      # largest diameter / systole seen
    worst_cone = worst_wall = None
    unchecked = []
    violated = False

    def ratio(d, s):
        return d / s

    for i, gi in enumerate(axes):
        rep = None
        try:
            rep = max_wall_piece(gi, cfg.kappa_wall)
        except ResourceError as exc:
            unchecked.append({"wall": i, "reason": str(exc)})
        if rep is not None:
            r = ratio(rep.diameter, sys_h[i])
            if worst_wall is None or r > worst_wall["ratio"]:
                worst_wall = {"relator": i, "wall": rep.notes.get("wall"),
                              "diameter": _finite(rep.diameter), "bound": p.alpha * sys_h[i],
                              "ratio": r}
            worst_ratio = max(worst_ratio, r)
            if rep.diameter >= p.alpha * sys_h[i]:
                violated = True
                if early_exit:
                    break
        for j, gj in enumerate(axes):
            try:
                rep = max_piece_census(gi, gj, cfg.J_cone)
            except ResourceError as exc:
                unchecked.append({"pair": [i, j], "reason": str(exc)})
                continue
            if rep is None:
                continue
            r = ratio(rep.diameter, sys_h[i])
            if worst_cone is None or r > worst_cone["ratio"]:
                worst_cone = {"pair": [i, j], "diameter": rep.diameter, "bound": p.alpha * sys_h[i],
                              "translate": word_str(rep.translate.normal), "ratio": r}
            worst_ratio = max(worst_ratio, r)
            if rep.diameter >= p.alpha * sys_h[i]:
                violated = True
                if early_exit:
                    break
        if violated and early_exit:
            break
    complete = not (violated and early_exit)
    if violated:
        status = "violated"
    elif unchecked:
        status = "unknown"
    else:
        status = "satisfied"
    # C'(beta) holds iff every diameter/systole ratio is below beta
    thr = {}
    for name, beta in THRESHOLDS.items():
        if worst_ratio >= beta:
            thr[name] = False
        else:
            thr[name] = None if (unchecked or not complete) else True
    carrier = []
    wallspace = []
    if premises:
        for i, c in enumerate(p.relators):
            d = carrier_diameter(c)
            carrier.append({"relator": i, "diameter": d, "bound": p.alpha * c.len_cube,
                            "ok": d < p.alpha * c.len_cube})
            ws = wallspace_premises(c, p.alpha)
            wallspace.append({"relator": i, **ws})
    return Verdict(status, p.alpha, thr, worst_cone, worst_wall, carrier, wallspace,
                   unchecked, complete)


# -- premise checks --------------------------------------------------------------

def carrier_diameter(c: ConjClass, periods: int = 3) -> int:
    """Largest combinatorial diameter of a wall carrier inside the axis hull.

    Hull chambers are order ideals of the heap of w^periods; the carrier of
    the wall at heap position j is every ideal I with I xor {j} also an
    ideal.  Only walls of the middle period are measured.
    """
    from .davis import _ideals
    w = c.rep.normal * periods
    n = len(c.rep.normal)
    ideals = set(_ideals(w))
    best = 0
    for j in range(n, 2 * n):
        bit = 1 << j
        side = [I for I in ideals if (I ^ bit) in ideals]
        for a in range(len(side)):
            for b in range(a + 1, len(side)):
                best = max(best, bin(side[a] ^ side[b]).count("1"))
    return best


def _crossing_lines(c: ConjClass):
    """Walls crossed by the combinatorial axis over one period, in heap order.

    Returns (polars, params) where params are the crossing parameters along
    the hyperbolic axis (nan when the axis lies on that wall).
    """
    from .pentagon import POLARS
    ga = AxisLine.of(c)
    w = c.rep.normal
    polars, params = [], []
    for k, s in enumerate(w):
        g = GroupElement(w[:k]) if k else GroupElement(())
        e = g.isometry.matrix @ POLARS[s]
        al, be = float(np.dot(ga.line.p[:2], e[:2]) - ga.line.p[2] * e[2]), \
            float(np.dot(ga.line.v[:2], e[:2]) - ga.line.v[2] * e[2])
        # alpha cosh t + beta sinh t = 0 at the crossing
        if abs(al) < 1e-9 and abs(be) < 1e-9:
            t = math.nan
        elif abs(al) < abs(be):
            t = -math.atanh(al / be)
        else:
            t = math.nan     # disjoint: cannot happen for a crossed wall
        polars.append(e)
        params.append(t)
    return ga, np.array(polars), np.array(params)


def _line_gap(e1, e2) -> float:
    q = abs(float(e1[0] * e2[0] + e1[1] * e2[1] - e1[2] * e2[2]))
    return math.acosh(q) if q > 1 else 0.0


def wallspace_premises(c: ConjClass, alpha: float, m_margin: int = 4) -> dict:
    """Antipodal pairing and far-hyperplane margin along one period.

    The word metric is doubled once, so each period carries 2n hyperplane
    positions: the n crossed walls and, between consecutive crossings, the
    perpendicular to the axis at the midpoint.  Position k is paired with
    k + n.  The gap of a pair is the distance between its two lines minus
    both carrier widths; after m_margin subdivisions a carrier is 2^-m_margin
    of a dual edge (2b) wide.  The margin is min gap - 8 alpha systole.
    """
    if not c.hyperbolic:
        raise DomainError("wallspace premises need a hyperbolic class")
    n = len(c.rep.normal)
    odd = n % 2 == 1
    report = {"crossings": n, "odd_before_doubling": odd, "positions": 2 * n,
              "pairs": [[k, k + n] for k in range(n)], "m_margin": m_margin}
    ga, pol, t = _crossing_lines(c)
    target = 8 * alpha * c.len_hyp
    if np.any(np.isnan(t)):
        report.update(margin=-math.inf, min_gap=0.0, target=target, ok=False,
                      note="axis lies on a crossed wall")
        return report
    order = np.argsort(t)
    t, pol = t[order], pol[order]
    P = ga.period
    lines = []
    for k in range(n):
        lines.append(pol[k])
        nxt = t[k + 1] if k + 1 < n else t[0] + P
        m = 0.5 * (t[k] + nxt)
        # polar of the perpendicular at gamma(m) is the unit tangent there
        lines.append(math.sinh(m) * ga.line.p + math.cosh(m) * ga.line.v)
    width = 2.0 ** (-m_margin) * 2 * LT.b
    gaps = [_line_gap(lines[k], lines[k + n]) - 2 * width for k in range(n)]
    g = min(gaps)
    report.update(margin=g - target, min_gap=g, target=target, ok=g - target > 0)
    return report
