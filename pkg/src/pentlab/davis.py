"""The dual square complex of the pentagon tiling, seen as the Davis complex.

Chambers are group elements (chamber g is the pentagon g P0).  The wall
between adjacent chambers g and g s is the fixed line of g s g^-1; two
pairs (g, s), (h, s') give the same wall iff s = s' and g^-1 h lies in the
centralizer of s, the parabolic subgroup on the star {s-1, s, s+1}.  Walls
are therefore keyed exactly by (s, least element of the coset g C(s)).

Combinatorial distance is the number of separating walls:
d(g, h) = |S(g) ^ S(h)| with S(g) the walls between e and g.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import sparse

from .coxeter import GroupElement, commute, normal_form, parse_word, reduce_word, NGEN
from .hyperboloid import HPoint, SpacelikeVector, mink
from .pentagon import POLARS
from .tables import ElementTable, ResourceError


class ScopeError(ValueError):
    """A chamber lies outside the precomputed ball."""


class GeodesicError(ValueError):
    """Input is not a combinatorial geodesic."""


def star(s: int) -> tuple:
    return ((s - 1) % 5, s, (s + 1) % 5)


@dataclass(frozen=True)
class Chamber:
    element: GroupElement

    @cached_property
    def center(self) -> HPoint:
        return HPoint.from_array(self.element.isometry.matrix[:, 2])


@dataclass(frozen=True)
class Wall:
    reflection: GroupElement
    line: SpacelikeVector

    @classmethod
    def between(cls, g: GroupElement, s: int) -> "Wall":
        refl = normal_form(g.normal + (s,) + g.normal[::-1])
        line = SpacelikeVector.normalized(g.isometry.matrix @ POLARS[s])
        return cls(refl, line)


class Ball:
    """Frozen ball of chambers with exact wall bookkeeping."""

    def __init__(self, radius: int, table: Optional[ElementTable] = None):
        self.radius = radius
        self.table = table if table is not None and table.radius >= radius else ElementTable(radius)
        self.size = int(self.table.offsets[radius + 1])
        self._walls()

    # -- walls ---------------------------------------------------------------
    def _coset_min(self, g: np.ndarray, s: np.ndarray) -> np.ndarray:
        """Least element of g <s-1, s, s+1>: strip right descents in the star."""
        T = self.table
        g = g.copy()
        while True:
            moved = False
            for k in (-1, 0, 1):
                x = (s + k) % 5
                r = T.right[g, x]
                down = (r >= 0) & (T.length[np.maximum(r, 0)] < T.length[g])
                if down.any():
                    g[down] = r[down]
                    moved = True
            if not moved:
                return g

    def _walls(self):
        """new_wall[i]: id of the wall crossed entering chamber i from its parent."""
        T = self.table
        idx = np.arange(1, self.size)
        p = T.parent[idx].astype(np.int64)
        s = T.last[idx].astype(np.int64)
        key = s * self.size + self._coset_min(p, s)
        uniq, wid = np.unique(key, return_inverse=True)
        self.wall_keys = uniq
        self.n_walls = len(uniq)
        self.new_wall = np.concatenate([[-1], wid]).astype(np.int64)

    def wall_id(self, g: int, s: int) -> int:
        """Wall between chamber g and g s, or -1 if it has not been crossed in the ball."""
        m = int(self._coset_min(np.array([g]), np.array([s]))[0])
        k = s * self.size + m
        j = np.searchsorted(self.wall_keys, k)
        return int(j) if j < len(self.wall_keys) and self.wall_keys[j] == k else -1

    def wall_sets(self, upto: Optional[int] = None) -> sparse.csr_matrix:
        """Incidence matrix A[g, w] = 1 iff wall w separates e from chamber g."""
        upto = self.radius if upto is None else upto
        T = self.table
        n_el = int(T.offsets[upto + 1])
        rows = [np.zeros(0, dtype=np.int64)]
        cols = [np.zeros(0, dtype=np.int64)]
        prev = np.zeros((1, 0), dtype=np.int64)
        for n in range(1, upto + 1):
            w = T.level(n)
            cur = np.concatenate([prev[T.parent[w] - T.offsets[n - 1]], self.new_wall[w][:, None]], axis=1)
            rows.append(np.repeat(w, n))
            cols.append(cur.ravel())
            prev = cur
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        return sparse.csr_matrix((np.ones(len(r), dtype=np.float32), (r, c)), shape=(n_el, self.n_walls))

    # -- chamber queries -----------------------------------------------------
    def index(self, g) -> int:
        i = self.table.index(parse_word(g))
        if i < 0 or i >= self.size:
            raise ScopeError(f"chamber {g} outside ball({self.radius})")
        return i

    def chamber(self, i: int) -> Chamber:
        return Chamber(GroupElement(self.table.word(i)))

    @cached_property
    def centers(self) -> np.ndarray:
        return self.table.centers(self.radius)

    def edges(self) -> np.ndarray:
        """Pairs (g, g s) with both ends in the ball, each edge once."""
        src = np.arange(1, self.size)
        return np.column_stack([self.table.parent[src], src])

    def separating(self, i: int) -> set:
        out = set()
        T = self.table
        while i > 0:
            out.add(int(self.new_wall[i]))
            i = int(T.parent[i])
        return out


def cube_dist(g, h) -> int:
    """Number of walls separating chambers g and h = word length of g^-1 h."""
    g = parse_word(g.element if isinstance(g, Chamber) else g)
    h = parse_word(h.element if isinstance(h, Chamber) else h)
    return len(reduce_word(g[::-1] + h))


def _median_from_identity(x: tuple, y: tuple) -> tuple:
    """Element whose separating walls are S(x) & S(y): greedy walk from e
    along generators that keep lengthening both x and y's prefixes."""
    cur: tuple = ()
    while True:
        for s in range(NGEN):
            nxt = reduce_word(cur + (s,))
            if len(nxt) <= len(cur):
                continue
            # wall crossed lies in S(x) iff nxt is a prefix (weak order) of x
            if len(reduce_word(nxt[::-1] + x)) == len(x) - len(nxt) and \
               len(reduce_word(nxt[::-1] + y)) == len(y) - len(nxt):
                cur = nxt
                break
        else:
            return cur


def median(a, b, c, ball: Optional[Ball] = None) -> Chamber:
    """Median of three chambers: a . median(e, a^-1 b, a^-1 c)."""
    words = [parse_word(t.element if isinstance(t, Chamber) else t) for t in (a, b, c)]
    if ball is not None:
        for w in words:
            ball.index(w)
    a, b, c = words
    ia = a[::-1]
    m = _median_from_identity(reduce_word(ia + b), reduce_word(ia + c))
    return Chamber(normal_form(a + m))


# -- hulls -----------------------------------------------------------------------

def _heap_order(letters: Sequence[int]) -> list:
    """pred[j]: bitmask of earlier positions that must precede position j."""
    pred = []
    for j, t in enumerate(letters):
        m = 0
        for i in range(j):
            if not commute(letters[i], t):
                m |= 1 << i | pred[i]
        pred.append(m)
    return pred


def _ideals(letters: Sequence[int]) -> list:
    """All order ideals (as bitmasks) of the heap of a reduced word."""
    n = len(letters)
    pred = _heap_order(letters)
    seen = {0}
    stack = [0]
    while stack:
        I = stack.pop()
        for j in range(n):
            if not I >> j & 1 and pred[j] & ~I == 0:
                J = I | 1 << j
                if J not in seen:
                    seen.add(J)
                    stack.append(J)
    return sorted(seen, key=lambda m: (bin(m).count("1"), m))


def hull_window(chambers: Sequence) -> tuple:
    """Convex hull of a combinatorial geodesic segment, and its thickness.

    In a median graph the hull of a geodesic from p to q is the interval
    I(p, q).  For a right-angled Coxeter group the interval below u = p^-1 q
    is the lattice of order ideals of the heap of a reduced word for u; the
    segment is the chain of prefix ideals.  Walls correspond to heap
    positions, so distances inside the interval are symmetric differences.

    Returns (set of Chambers, K_empirical).
    """
    elems = [parse_word(c.element if isinstance(c, Chamber) else c) for c in chambers]
    if not elems:
        return set(), 0
    p = reduce_word(elems[0])
    letters = []
    for x, y in zip(elems, elems[1:]):
        step = reduce_word(x[::-1] + y)
        if len(step) != 1:
            raise GeodesicError("consecutive chambers are not adjacent")
        letters.append(step[0])
    if len(reduce_word(letters)) != len(letters):
        raise GeodesicError("segment is not distance-realizing")
    ideals = _ideals(letters)
    prefixes = [(1 << j) - 1 for j in range(len(letters) + 1)]
    K = 0
    out = set()
    for I in ideals:
        K = max(K, min(bin(I ^ P).count("1") for P in prefixes))
        word = tuple(t for j, t in enumerate(letters) if I >> j & 1)
        out.add(Chamber(normal_form(p + word)))
    return out, K


def axis_segment(rep: GroupElement, periods: int = 3) -> list:
    """Chambers along the normal form of rep^periods (a combinatorial geodesic)."""
    w = reduce_word(rep.normal * periods)
    return [Chamber(GroupElement(reduce_word(w[:j]))) for j in range(len(w) + 1)]


def hull_constant(reps: Iterable[GroupElement], periods: int = 3) -> int:
    """Largest hull thickness over axis windows of the given representatives."""
    K = 0
    for g in reps:
        w = reduce_word(g.normal * periods)
        ideals = _ideals(w)
        prefixes = [(1 << j) - 1 for j in range(len(w) + 1)]
        for I in ideals:
            K = max(K, min(bin(I ^ P).count("1") for P in prefixes))
    return K
