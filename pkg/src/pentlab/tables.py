"""Vectorized ShortLex enumeration of balls in the pentagon group.

Normal forms are generated by a finite automaton: the state after reading a
normal form w is the set B(w) of letters t for which w t is *not* a normal
form.  Appending t gives

    B(w t) = {t} | {u ~ t : u < t} | {u ~ t : u > t, u in B(w)}

where u ~ t means u and t commute.  Children of level n are emitted in
(parent, letter) order, so element indices are sorted in ShortLex order.

Right multiplication by a generator is computed exactly from the parent
structure.  Write w = p t (its normal form ends in t).  Then

    w s = p                 if s == t
    w s = child(w, s)       if s, t do not commute (always a valid append)
    w s = (p s) t           otherwise, resolved through already known rows.

Left multiplication follows from x (p t) = (x p) t.
"""
from __future__ import annotations

import numpy as np

from .coxeter import COMMUTE, NGEN, parse_word
from .pentagon import REFLECTIONS

INDEX = np.int32


def _transitions() -> np.ndarray:
    tr = np.zeros((32, NGEN), dtype=np.int8)
    for state in range(32):
        for t in range(NGEN):
            out = 1 << t
            for u in ((t - 1) % 5, (t + 1) % 5):
                if u < t or (state >> u) & 1:
                    out |= 1 << u
            tr[state, t] = out
    return tr


TRANS = _transitions()


def sphere_sizes(nmax: int) -> list:
    sizes = [1, 5, 15]
    while len(sizes) <= nmax:
        sizes.append(3 * sizes[-1] - sizes[-2])
    return sizes[: nmax + 1]


class ResourceError(RuntimeError):
    """A requested computation exceeds the configured budget."""


class ElementTable:
    """All elements of length <= radius with multiplication tables.

    Attributes are flat numpy arrays indexed by element id (ShortLex order):
    parent, last, length, state, child[:, s], right[:, s] (= w s),
    left[:, s] (= s w); -1 marks products outside the ball.
    """

    def __init__(self, radius: int, max_elements: int = 12_000_000):
        total = sum(sphere_sizes(radius))
        if total > max_elements:
            raise ResourceError(f"ball of radius {radius} has {total} elements, budget {max_elements}")
        self.radius = radius
        self._build()

    def _build(self):
        n = self.radius
        parents = [np.array([-1], dtype=INDEX)]
        lasts = [np.array([-1], dtype=np.int8)]
        states = [np.zeros(1, dtype=np.int8)]
        offsets = [0, 1]
        for _ in range(n):
            st = states[-1]
            ok = ((st[:, None].astype(np.int32) >> np.arange(NGEN)) & 1) == 0
            pi, ti = np.nonzero(ok)
            parents.append((pi + offsets[-2]).astype(INDEX))
            lasts.append(ti.astype(np.int8))
            states.append(TRANS[st[pi], ti])
            offsets.append(offsets[-1] + len(pi))
        self.offsets = np.array(offsets)
        self.parent = np.concatenate(parents)
        self.last = np.concatenate(lasts)
        self.state = np.concatenate(states)
        N = len(self.parent)
        self.size = N
        self.length = np.repeat(np.arange(n + 1, dtype=np.int8), np.diff(self.offsets))
        child = np.full((N, NGEN), -1, dtype=INDEX)
        child[self.parent[1:], self.last[1:]] = np.arange(1, N, dtype=INDEX)
        self.child = child
        self.right = self._right_table()
        self.left = self._left_table()

    def level(self, n: int) -> np.ndarray:
        return np.arange(self.offsets[n], self.offsets[n + 1])

    def _right_table(self) -> np.ndarray:
        N = self.size
        R = np.full((N, NGEN), -1, dtype=INDEX)
        R[0] = self.child[0]
        L = self.length
        for n in range(1, self.radius + 1):
            w = self.level(n)
            p = self.parent[w]
            t = self.last[w].astype(np.int64)
            for s in range(NGEN):
                res = np.full(len(w), -1, dtype=INDEX)
                eq = t == s
                res[eq] = p[eq]
                com = COMMUTE[s, t]
                free = ~eq & ~com
                res[free] = self.child[w[free], s]
                ci = np.nonzero(com)[0]
                u = R[p[ci], s]
                down = L[u] < L[p[ci]]
                a = ci[down]
                res[a] = R[u[down], t[a]]
                b = ci[~down]
                ub = u[~down]
                c1 = self.child[w[b], s]
                # ub == -1 only at the boundary, where the product leaves the ball
                c2 = np.where(ub >= 0, self.child[np.maximum(ub, 0), t[b]], -1)
                res[b] = np.where(c1 >= 0, c1, c2)
                R[w, s] = res
        return R

    def _left_table(self) -> np.ndarray:
        N = self.size
        Lt = np.full((N, NGEN), -1, dtype=INDEX)
        Lt[0] = self.child[0]
        for n in range(1, self.radius + 1):
            w = self.level(n)
            p = self.parent[w]
            t = self.last[w]
            for x in range(NGEN):
                lp = Lt[p, x]
                ok = lp >= 0
                r = np.full(len(w), -1, dtype=INDEX)
                r[ok] = self.right[lp[ok], t[ok]]
                Lt[w, x] = r
        return Lt

    # -- lookups -----------------------------------------------------------
    def word(self, i: int) -> tuple:
        out = []
        i = int(i)
        while i > 0:
            out.append(int(self.last[i]))
            i = int(self.parent[i])
        return tuple(out[::-1])

    def index(self, w) -> int:
        """Element id of an arbitrary word (multiplied out), -1 if outside."""
        i = 0
        for x in parse_word(w):
            i = int(self.right[i, x])
            if i < 0:
                return -1
        return i

    def words_as_strings(self, ids) -> list:
        return ["".join(map(str, self.word(i))) for i in ids]

    def inverse(self) -> np.ndarray:
        inv = np.zeros(self.size, dtype=INDEX)
        for n in range(1, self.radius + 1):
            w = self.level(n)
            # (p t)^-1 = t p^-1
            inv[w] = self.left[inv[self.parent[w]], self.last[w]]
        return inv

    def matrices(self, upto: int | None = None) -> np.ndarray:
        """Isometry matrices of all elements of length <= upto (levelwise products)."""
        upto = self.radius if upto is None else upto
        M = np.empty((self.offsets[upto + 1], 3, 3))
        M[0] = np.eye(3)
        for n in range(1, upto + 1):
            w = self.level(n)
            M[w] = M[self.parent[w]] @ REFLECTIONS[self.last[w]]
        return M

    def centers(self, upto: int | None = None) -> np.ndarray:
        return self.matrices(upto)[:, :, 2].copy()
