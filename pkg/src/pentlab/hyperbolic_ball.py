"""Enumerate group elements g with d(o, g o) <= R.

Normal-form prefixes move monotonically away from the base point: if
l(w s) > l(w) then o and w.o lie on the same side of the wall between the
chambers w and w s, and reflecting across that wall cannot bring the point
closer to o.  Hence the automaton BFS can be pruned at exactly R.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coxeter import NGEN
from .pentagon import REFLECTIONS
from .tables import TRANS, ResourceError


@dataclass
class HypBall:
    radius: float
    parent: np.ndarray
    last: np.ndarray
    length: np.ndarray
    matrices: np.ndarray
    dist: np.ndarray

    def word(self, i: int) -> tuple:
        out = []
        i = int(i)
        while i > 0:
            out.append(int(self.last[i]))
            i = int(self.parent[i])
        return tuple(out[::-1])

    def __len__(self) -> int:
        return len(self.parent)


def build_hyp_ball(R: float, max_elements: int = 6_000_000) -> HypBall:
    est = 4 * (np.cosh(R) - 1) + 1
    if est > max_elements:
        raise ResourceError(f"hyperbolic ball of radius {R} holds about {int(est)} elements")
    parents = [np.array([-1])]
    lasts = [np.array([-1], dtype=np.int8)]
    mats = [np.eye(3)[None]]
    states = np.zeros(1, dtype=np.int8)
    lens = [np.zeros(1, dtype=np.int16)]
    base = 0
    n = 0
    while True:
        cur = mats[-1]
        ok = ((states[:, None].astype(np.int32) >> np.arange(NGEN)) & 1) == 0
        pi, ti = np.nonzero(ok)
        if len(pi) == 0:
            break
        M = cur[pi] @ REFLECTIONS[ti]
        keep = np.arccosh(np.maximum(M[:, 2, 2], 1.0)) <= R + 1e-12
        if not keep.any():
            break
        pi, ti, M = pi[keep], ti[keep], M[keep]
        n += 1
        parents.append(pi + base)
        base += len(cur)
        lasts.append(ti.astype(np.int8))
        mats.append(M)
        states = TRANS[states[pi], ti]
        lens.append(np.full(len(pi), n, dtype=np.int16))
    M = np.concatenate(mats)
    return HypBall(R, np.concatenate(parents), np.concatenate(lasts), np.concatenate(lens),
                   M, np.arccosh(np.maximum(M[:, 2, 2], 1.0)))
