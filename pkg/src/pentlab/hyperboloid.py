"""Hyperbolic plane primitives in the hyperboloid model.

Points live on the upper sheet of x^2 + y^2 - z^2 = -1.  Geodesic lines are
represented by unit spacelike polar vectors e (the line is {p : <p, e> = 0}),
and the sign of e fixes an orientation.  Isometries are 3x3 matrices M with
M^T J M = J that preserve the upper sheet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

J = np.diag([1.0, 1.0, -1.0])
ORIGIN = np.array([0.0, 0.0, 1.0])


class GeometryError(ValueError):
    """Raised when an input violates a geometric invariant beyond roundoff."""


class DomainError(ValueError):
    """Raised when an operation is applied outside its domain."""


@dataclass(frozen=True)
class GeometryConfig:
    delta: float = math.log(1.0 + math.sqrt(2.0))
    tol: float = 1e-9
    clamp_eps: float = 1e-12

    def __post_init__(self):
        if min(self.delta, self.tol, self.clamp_eps) <= 0:
            raise ValueError("geometry constants must be positive")


DEFAULT = GeometryConfig()


def mink(u, v):
    """Minkowski form <u, v> = u0 v0 + u1 v1 - u2 v2, broadcasting over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def safe_arccosh(x, clamp_eps: float = DEFAULT.clamp_eps):
    """arccosh with arguments in [1 - clamp_eps, 1) clamped to 1.

    Anything further below 1 signals a logic error rather than roundoff.
    """
    x = np.asarray(x, dtype=float)
    # relative clamp: large arguments carry proportionally larger roundoff
    if np.any(x < 1.0 - clamp_eps):
        raise GeometryError(f"arccosh argument {float(np.min(x))!r} below 1")
    return np.arccosh(np.maximum(x, 1.0))


@dataclass(frozen=True)
class HPoint:
    coords: tuple

    def __post_init__(self):
        x, y, z = self.coords
        if z <= 0:
            raise GeometryError("point not on the upper sheet")
        q = x * x + y * y - z * z
        if abs(q + 1.0) > 1e-10 * max(1.0, z * z):
            raise GeometryError(f"point off the hyperboloid: <p,p> = {q}")

    @classmethod
    def from_array(cls, v) -> "HPoint":
        return cls(tuple(float(t) for t in v))

    @classmethod
    def normalized(cls, v) -> "HPoint":
        """Rescale a timelike vector onto the upper sheet."""
        v = np.asarray(v, dtype=float)
        q = -mink(v, v)
        if q <= 0:
            raise GeometryError("vector is not timelike")
        v = v / math.sqrt(q)
        if v[2] < 0:
            v = -v
        return cls.from_array(v)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)


O = HPoint((0.0, 0.0, 1.0))


@dataclass(frozen=True)
class SpacelikeVector:
    coords: tuple

    def __post_init__(self):
        q = mink(self.coords, self.coords)
        if abs(q - 1.0) > 1e-10 * max(1.0, abs(self.coords[2]) ** 2):
            raise GeometryError(f"polar vector not unit spacelike: <e,e> = {q}")

    @classmethod
    def normalized(cls, v) -> "SpacelikeVector":
        v = np.asarray(v, dtype=float)
        q = mink(v, v)
        if q <= 0:
            raise GeometryError("vector is not spacelike")
        return cls(tuple(float(t) for t in v / math.sqrt(q)))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    def __neg__(self) -> "SpacelikeVector":
        return SpacelikeVector(tuple(-t for t in self.coords))


def dist(p: HPoint, q: HPoint, cfg: GeometryConfig = DEFAULT) -> float:
    x = -mink(p.coords, q.coords)
    if x < 1.5:
        # chord form: arccosh loses half the digits near 1
        diff = np.asarray(p.coords) - np.asarray(q.coords)
        return float(2.0 * np.arcsinh(0.5 * math.sqrt(max(mink(diff, diff), 0.0))))
    return float(safe_arccosh(-mink(p.coords, q.coords), cfg.clamp_eps * max(1.0, p.coords[2] * q.coords[2])))


def dist_to_line(p: HPoint, e: SpacelikeVector) -> float:
    return float(np.arcsinh(abs(mink(p.coords, e.coords))))


def lorentz_cross(u, v) -> np.ndarray:
    """Vector w with <w, x> = det(u, v, x) in the Minkowski form.

    For two spacelike polars of crossing lines this is timelike and points
    at the crossing point; for a point and a direction it is the polar of
    the line they span.
    """
    c = np.cross(np.asarray(u, float), np.asarray(v, float))
    return c * np.array([1.0, 1.0, -1.0])


@dataclass(frozen=True)
class HIsometry:
    """A Lorentz matrix preserving the upper sheet.

    `orientation` is +1 for orientation preserving maps (det = +1).
    """
    matrix: np.ndarray = field(compare=False)
    orientation: int = 1

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "orientation", 1 if np.linalg.det(m) > 0 else -1)

    @classmethod
    def identity(cls) -> "HIsometry":
        return cls(np.eye(3))

    def __matmul__(self, other: "HIsometry") -> "HIsometry":
        return HIsometry(self.matrix @ other.matrix)

    def inverse(self) -> "HIsometry":
        return HIsometry(J @ self.matrix.T @ J)

    def apply(self, p: HPoint) -> HPoint:
        return HPoint.from_array(self.matrix @ p.array)

    def apply_line(self, e: SpacelikeVector) -> SpacelikeVector:
        return SpacelikeVector(tuple(float(t) for t in self.matrix @ e.array))

    def defect(self) -> float:
        """Largest entry of |M^T J M - J|."""
        return float(np.max(np.abs(self.matrix.T @ J @ self.matrix - J)))

    def allclose(self, other: "HIsometry", tol: float = 1e-8) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, atol=tol, rtol=0))


def reorthonormalize(m: np.ndarray) -> np.ndarray:
    """Gram-Schmidt the columns of m against J, keeping the last column timelike."""
    m = np.array(m, dtype=float)
    t = m[:, 2] / math.sqrt(-mink(m[:, 2], m[:, 2]))
    u = m[:, 0] + mink(m[:, 0], t) * t
    u = u / math.sqrt(mink(u, u))
    v = m[:, 1] + mink(m[:, 1], t) * t - mink(m[:, 1], u) * u
    v = v / math.sqrt(mink(v, v))
    return np.column_stack([u, v, t])


def compose(mats, renorm_every: int = 32) -> HIsometry:
    """Product of a sequence of matrices, re-orthonormalized every 32 factors."""
    m = np.eye(3)
    for i, a in enumerate(mats, 1):
        m = m @ np.asarray(a, dtype=float)
        if i % renorm_every == 0:
            m = reorthonormalize(m)
    return HIsometry(m)


def reflect(e: SpacelikeVector) -> HIsometry:
    """Reflection in the line with polar e: x -> x - 2<x,e> e."""
    v = e.array
    return HIsometry(np.eye(3) - 2.0 * np.outer(v, v) @ J)


def reflection_matrix(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.eye(3) - 2.0 * np.outer(v, v) @ J


class Kind(str, Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    DEGENERATE = "boundary-degenerate"


def spectral_radius(m: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def _cosh_translation(m: np.ndarray) -> float:
    # trace = det + 2 cosh(l) for hyperbolic elements of O(2,1)
    det = 1.0 if np.linalg.det(m) > 0 else -1.0
    return (float(np.trace(m)) - det) / 2.0


def classify(M: HIsometry, cfg: GeometryConfig = DEFAULT) -> Kind:
    rho = spectral_radius(M.matrix)
    if rho > 1.0 + cfg.tol:
        return Kind.HYPERBOLIC
    if abs(rho - 1.0) <= cfg.tol:
        # an elliptic map fixes a point: look for a timelike fixed vector
        w, vecs = np.linalg.eig(M.matrix)
        for lam, v in zip(w, vecs.T):
            if abs(lam - 1.0) < 1e-6 and np.allclose(v.imag, 0, atol=1e-9):
                v = v.real
                if mink(v, v) < -cfg.tol:
                    return Kind.ELLIPTIC
        # orientation reversing maps with a fixed line: a reflection
        if M.orientation < 0:
            for lam, v in zip(w, vecs.T):
                if abs(lam + 1.0) < 1e-6 and np.allclose(v.imag, 0, atol=1e-9):
                    if mink(v.real, v.real) > cfg.tol:
                        return Kind.ELLIPTIC
        return Kind.DEGENERATE
    return Kind.DEGENERATE


def translation_length(M: HIsometry, cfg: GeometryConfig = DEFAULT) -> float:
    if classify(M, cfg) is not Kind.HYPERBOLIC:
        raise DomainError("translation length requires a hyperbolic isometry")
    ch = _cosh_translation(M.matrix)
    if ch > 1e3:
        return math.log(spectral_radius(M.matrix))
    return float(math.acosh(max(ch, 1.0)))


def fixed_points_at_infinity(M: HIsometry):
    """Null eigenvectors (attracting, repelling) of a hyperbolic isometry."""
    w, vecs = np.linalg.eig(M.matrix)
    order = np.argsort(np.abs(w))
    rep = np.real(vecs[:, order[0]])
    att = np.real(vecs[:, order[-1]])
    rep = rep if rep[2] > 0 else -rep
    att = att if att[2] > 0 else -att
    return att / att[2], rep / rep[2]


@dataclass(frozen=True)
class Line:
    """Oriented unit-speed geodesic gamma(t) = cosh(t) p + sinh(t) v."""
    point: tuple
    direction: tuple

    @property
    def p(self) -> np.ndarray:
        return np.array(self.point)

    @property
    def v(self) -> np.ndarray:
        return np.array(self.direction)

    def at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.cosh(t)[..., None] * self.p + np.sinh(t)[..., None] * self.v

    @property
    def polar(self) -> SpacelikeVector:
        return SpacelikeVector.normalized(lorentz_cross(self.p, self.v))

    @classmethod
    def through_ideal(cls, att, rep) -> "Line":
        """Line from the repelling to the attracting null vector, based at the
        point closest to the origin."""
        a = np.asarray(att, float) / att[2]
        r = np.asarray(rep, float) / rep[2]
        s = -mink(a, r)
        p = (a + r) / math.sqrt(2.0 * s)
        v = (a - r) / math.sqrt(2.0 * s)
        return cls(tuple(map(float, p)), tuple(map(float, v)))

    @classmethod
    def from_polar(cls, e) -> "Line":
        """The line e-perp, based at its point nearest the origin."""
        e = np.asarray(e, dtype=float)
        e = e / math.sqrt(mink(e, e))
        p = ORIGIN - mink(ORIGIN, e) * e
        p = p / math.sqrt(-mink(p, p))
        v = lorentz_cross(e, p)
        v = v / math.sqrt(mink(v, v))
        return cls(tuple(map(float, p)), tuple(map(float, v)))

    def foot(self, q) -> float:
        """Parameter of the orthogonal projection of a point onto the line."""
        q = np.asarray(q, dtype=float)
        A = -mink(q, self.p)
        B = mink(q, self.v)
        return float(0.5 * math.log((A + B) / (A - B)))

    def shifted(self, t0: float) -> "Line":
        return Line(tuple(map(float, self.at(t0))),
                    tuple(map(float, np.sinh(t0) * self.p + np.cosh(t0) * self.v)))


def axis(M: HIsometry, cfg: GeometryConfig = DEFAULT) -> Line:
    """Oriented axis of a hyperbolic isometry, pointing to the attracting end.

    For glide reflections the axis is still the unique invariant line.
    """
    if classify(M, cfg) is not Kind.HYPERBOLIC:
        raise DomainError("axis requires a hyperbolic isometry")
    att, rep = fixed_points_at_infinity(M)
    return Line.through_ideal(att, rep)
