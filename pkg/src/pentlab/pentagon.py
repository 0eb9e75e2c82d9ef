"""The regular right-angled pentagon and its closed-form length table.

All lengths live in Q(sqrt 5): with K = cos(2 pi / 5) = (sqrt 5 - 1) / 4 every
constant is an arccosh of an algebraic expression in K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .hyperboloid import lorentz_cross, mink, reflection_matrix

K = (math.sqrt(5.0) - 1.0) / 4.0
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class LengthTable:
    """a: half side; b: center to side; c, d: extremal crossing lengths;
    e, f, g: auxiliary lengths used in the chain estimates; lam = d / c."""
    K: float
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    g: float
    lam: float

    def as_dict(self) -> dict:
        out = asdict(self)
        out["two_g"] = 2 * self.g
        return out


def length_table() -> LengthTable:
    a = math.acosh(math.sqrt(K + 1))
    b = math.acosh(1 / math.sqrt(1 - K))
    c = math.acosh(K + 1)
    d = math.acosh(2 * K * K + 2 * K + 1)
    e = math.acosh((2 * K + 1) * math.sqrt(K + 1))
    f = math.acosh(4 * K * K + 4 * K + 1)
    g = math.acosh(1 + 2 * K * (8 * K * K + 8 * K + 1) ** 2) / 2
    return LengthTable(K, a, b, c, d, e, f, g, d / c)


LT = length_table()
# circumradius: center to vertex, from the right triangle (center, midpoint, vertex)
RHO = math.acosh(math.cosh(LT.a) * math.cosh(LT.b))


def side_polar(i: int) -> np.ndarray:
    """Unit spacelike polar of side i of the base pentagon, pointing away from
    the center (so <o, e_i> < 0 on the pentagon's side)."""
    th = 2 * math.pi * i / 5
    ch, sh = math.cosh(LT.b), math.sinh(LT.b)
    return np.array([ch * math.cos(th), ch * math.sin(th), sh])


POLARS = np.array([side_polar(i) for i in range(5)])
REFLECTIONS = np.array([reflection_matrix(v) for v in POLARS])


def vertex(i: int) -> np.ndarray:
    """Vertex shared by sides i and i+1."""
    w = lorentz_cross(POLARS[i], POLARS[(i + 1) % 5])
    w = w / math.sqrt(-mink(w, w))
    return w if w[2] > 0 else -w


VERTICES = np.array([vertex(i) for i in range(5)])


def side_midpoint(i: int) -> np.ndarray:
    """Foot of the perpendicular from the center onto side i."""
    o = np.array([0.0, 0.0, 1.0])
    e = POLARS[i]
    p = o - mink(o, e) * e
    return p / math.sqrt(-mink(p, p))


MIDPOINTS = np.array([side_midpoint(i) for i in range(5)])


def extended_frame():
    """Side polars, reflections and vertices in long double precision."""
    ld = np.longdouble
    k = (np.sqrt(ld(5)) - 1) / 4
    b = np.arccosh(1 / np.sqrt(1 - k))
    ch, sh = np.cosh(b), np.sinh(b)
    th = 2 * np.pi * np.arange(5, dtype=ld) / 5
    pol = np.stack([ch * np.cos(th), ch * np.sin(th), np.full(5, sh)], axis=1)
    Jl = np.diag(np.array([1, 1, -1], dtype=ld))
    refl = np.stack([np.eye(3, dtype=ld) - 2 * np.outer(v, v) @ Jl for v in pol])
    verts = []
    for i in range(5):
        u, v = pol[i], pol[(i + 1) % 5]
        w = np.array([u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                      -(u[0] * v[1] - u[1] * v[0])], dtype=ld)
        w = w / np.sqrt(-(w[0] ** 2 + w[1] ** 2 - w[2] ** 2))
        verts.append(w if w[2] > 0 else -w)
    return pol, refl, np.stack(verts)
