"""Exhaustive conjugacy-class census over a ball of the pentagon group.

Every element of length n is linked to its conjugates x w x by left and
right descents x (the only generators whose conjugation does not lengthen
w nontrivially).  Within one level these links are cyclic shifts; a
component of the level-n shift graph either contains a shortening move,
in which case it inherits the class of the shorter element, or it is a
whole class of minimal length n.  Levels are processed upward so every
element receives its class id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .coxeter import ConjClass, GroupElement, NGEN, parse_word
from .tables import ElementTable, ResourceError


def _conjugate_moves(T: ElementTable, w: np.ndarray):
    """Yield (source, target) arrays for descent conjugations of w."""
    n = T.length[w]
    for x in range(NGEN):
        lx = T.left[w, x]
        d = (lx >= 0) & (T.length[np.maximum(lx, 0)] < n)
        yield w[d], T.right[lx[d], x]
        rx = T.right[w, x]
        d = (rx >= 0) & (T.length[np.maximum(rx, 0)] < n)
        yield w[d], T.left[rx[d], x]


@dataclass
class Census:
    """Class ids for every element in a ball, plus per-class data.

    class_of[i]: class id of element i; reps[k]: element id of the class's
    canonical representative; min_len[k]: its word length; len_cube[k]:
    cubical translation length; len_hyp[k] (nan if elliptic); primitive[k]
    (True for elliptic classes by convention, never used).

    The cubical translation length is an infimum over all points of the
    square complex.  It equals min_len except for glide reflections along a
    wall (conjugates of s_i (s_{i-1} s_{i+1})^m), which translate the wall's
    hyperplane by min_len - 1.  Only classes with len_cube <= cap are kept,
    which needs elements of length cap + 1.
    """
    table: ElementTable
    cap: int
    class_of: np.ndarray
    reps: np.ndarray
    min_len: np.ndarray
    len_cube: np.ndarray
    len_hyp: np.ndarray
    det: np.ndarray
    primitive: np.ndarray

    @property
    def hyperbolic(self) -> np.ndarray:
        return ~np.isnan(self.len_hyp)

    def conj_class(self, k: int) -> ConjClass:
        lh = float(self.len_hyp[k])
        hyp = not math.isnan(lh)
        return ConjClass(GroupElement(self.table.word(self.reps[k])), int(self.len_cube[k]),
                         lh if hyp else None, bool(self.primitive[k]) if hyp else None,
                         int(self.min_len[k]))

    def class_id_of_word(self, w) -> int:
        i = self.table.index(w)
        if i < 0:
            raise ResourceError("word outside the census ball")
        return int(self.class_of[i])

    def __len__(self) -> int:
        return len(self.reps)

    def catalog(self) -> "ClassCatalog":
        from .coxeter import word_str
        T = self.table
        return ClassCatalog(self.cap, [word_str(T.word(i)) for i in self.reps],
                            self.min_len.copy(), self.len_cube.copy(), self.len_hyp.copy(),
                            self.det.copy(), self.primitive.copy())


@dataclass
class ClassCatalog:
    """Per-class data of a census without the element table behind it.

    This is what gets cached on disk and what the growth, piece and sampling
    code consume.  Words are stored as digit strings.
    """
    cap: int
    words: list
    min_len: np.ndarray
    len_cube: np.ndarray
    len_hyp: np.ndarray
    det: np.ndarray
    primitive: np.ndarray

    @property
    def hyperbolic(self) -> np.ndarray:
        return ~np.isnan(self.len_hyp)

    def __len__(self) -> int:
        return len(self.words)

    def conj_class(self, k: int) -> ConjClass:
        lh = float(self.len_hyp[k])
        hyp = not math.isnan(lh)
        return ConjClass(GroupElement(parse_word(self.words[k])), int(self.len_cube[k]),
                         lh if hyp else None, bool(self.primitive[k]) if hyp else None,
                         int(self.min_len[k]))

    def hyperbolic_ids(self, metric: str = "cube", ell: float = math.inf) -> np.ndarray:
        """Ids of hyperbolic classes of length <= ell in the given metric."""
        h = self.hyperbolic
        if metric == "cube":
            return np.nonzero(h & (self.len_cube <= ell))[0]
        if metric == "hyp":
            return np.nonzero(h & (np.nan_to_num(self.len_hyp, nan=np.inf) <= ell + 1e-9))[0]
        raise ValueError(f"unknown metric {metric!r}")

    def to_arrays(self) -> dict:
        return {"cap": np.array(self.cap), "words": np.array(self.words, dtype=object).astype(str),
                "min_len": self.min_len, "len_cube": self.len_cube, "len_hyp": self.len_hyp,
                "det": self.det, "primitive": self.primitive}

    @classmethod
    def from_arrays(cls, a: dict) -> "ClassCatalog":
        return cls(int(a["cap"]), [str(w) for w in a["words"]], a["min_len"], a["len_cube"],
                   a["len_hyp"], a["det"], a["primitive"])


def cube_cap_for(ell_hyp: float) -> int:
    """Smallest cubical cap whose census holds every class with len_hyp <= ell_hyp."""
    from .pentagon import LT
    return int(math.floor(ell_hyp / LT.c + 1e-9))


def translation_lengths(M: np.ndarray, tol: float = 1e-9):
    """Hyperbolic translation lengths of a stack of matrices (nan if elliptic)."""
    det = np.sign(np.linalg.det(M))
    ch = (np.trace(M, axis1=1, axis2=2) - det) / 2.0
    out = np.full(len(M), np.nan)
    hyp = ch > 1.0 + tol
    out[hyp] = np.arccosh(ch[hyp])
    big = ch > 1e6
    if big.any():
        out[big] = np.log(np.max(np.abs(np.linalg.eigvals(M[big])), axis=1))
    return out, det.astype(np.int8)


def build_census(cap: int, table: Optional[ElementTable] = None) -> Census:
    """All conjugacy classes with cubical translation length <= cap.

    Wall glides are one shorter than their shortest word and always have even
    cubical length, so an extra level is only needed when cap is even.
    """
    depth = cap + 1 if cap % 2 == 0 else cap
    T = table if table is not None and table.radius >= depth else ElementTable(depth)
    class_of = np.full(T.offsets[depth + 1], -1, dtype=np.int64)
    class_of[0] = 0
    reps = [0]
    lens = [0]
    for n in range(1, depth + 1):
        w = T.level(n)
        lo = T.offsets[n]
        src, dst = [], []
        down_src, down_dst = [], []
        for a, b in _conjugate_moves(T, w):
            keep = T.length[b] == n
            src.append(a[keep]); dst.append(b[keep])
            down_src.append(a[~keep]); down_dst.append(b[~keep])
        src = np.concatenate(src) - lo
        dst = np.concatenate(dst) - lo
        m = len(w)
        g = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(m, m))
        ncomp, lab = connected_components(g, directed=False)
        ds = np.concatenate(down_src) - lo
        dd = class_of[np.concatenate(down_dst)]
        comp_class = np.full(ncomp, -1, dtype=np.int64)
        comp_class[lab[ds]] = dd
        # every shortening move out of one component must land in one class
        if np.any(comp_class[lab[ds]] != dd):
            raise AssertionError("shortening moves disagree on the class")
        new = np.nonzero(comp_class < 0)[0]
        # canonical rep: least element id (ShortLex least) in the component
        first = np.full(ncomp, m, dtype=np.int64)
        np.minimum.at(first, lab, np.arange(m))
        comp_class[new] = len(reps) + np.arange(len(new))
        reps.extend((first[new] + lo).tolist())
        lens.extend([n] * len(new))
        class_of[w] = comp_class[lab]
    reps = np.array(reps, dtype=np.int64)
    min_len = np.array(lens, dtype=np.int16)
    words = [T.word(i) for i in reps]
    M = _word_matrices(words)
    lh, det = translation_lengths(M)
    glide = np.array([_wall_glide(wd) for wd in words]) & (det < 0) & ~np.isnan(lh)
    len_cube = (min_len - glide).astype(np.int16)
    keep = len_cube <= cap
    remap = np.full(len(reps), -1, dtype=np.int64)
    remap[keep] = np.arange(int(keep.sum()))
    class_of = remap[class_of]
    c = Census(T, cap, class_of, reps[keep], min_len[keep], len_cube[keep], lh[keep], det[keep],
               np.ones(int(keep.sum()), dtype=bool))
    _mark_powers(c, [words[i] for i in np.nonzero(keep)[0]])
    return c


def _wall_glide(word) -> bool:
    """Support inside the star {i-1, i, i+1} of a single generator."""
    sup = set(word)
    return any(sup <= {(i - 1) % 5, i, (i + 1) % 5} for i in range(5))


def _word_matrices(words) -> np.ndarray:
    from .pentagon import REFLECTIONS
    out = np.empty((len(words), 3, 3))
    for k, wd in enumerate(words):
        m = np.eye(3)
        for x in wd:
            m = m @ REFLECTIONS[x]
        out[k] = m
    return out


def _mark_powers(c: Census, words) -> None:
    """Mark classes of proper powers r^k (k >= 2) of hyperbolic classes.

    len_cube is multiplicative on powers, so only roots with
    k len_cube(r) <= cap matter.  Powers that leave the ball are first
    conjugated down by cyclic shifts.
    """
    from .coxeter import cyclic_closure
    T = c.table
    for r in np.nonzero(c.hyperbolic & (c.len_cube <= c.cap // 2))[0]:
        for k in range(2, c.cap // int(c.len_cube[r]) + 1):
            i = T.index(words[r] * k)
            if i < 0 or i >= len(c.class_of):
                mins, _ = cyclic_closure(words[r] * k)
                i = T.index(min(mins))
            c.primitive[c.class_of[i]] = False


def root_search(rep: GroupElement, len_hyp: float) -> Optional[tuple]:
    """Find (h, n) with h^n = rep and n >= 2, or None.

    A root may be taken to share rep's axis, so it moves the base point by
    at most 2 dist(o, axis) + len_hyp / n.  All elements that close to the
    identity are enumerated and their n-th powers compared with rep.
    """
    from .hyperboloid import axis, mink
    from .hyperbolic_ball import build_hyp_ball
    M = rep.isometry.matrix
    pol = axis(rep.isometry).polar.array
    d0 = float(np.arcsinh(abs(mink(np.array([0.0, 0.0, 1.0]), pol))))
    B = build_hyp_ball(2 * d0 + len_hyp / 2 + 1e-6)
    scale = max(1.0, float(np.abs(M).max()))
    for n in range(2, rep.length + 1):
        cand = np.nonzero(B.dist <= 2 * d0 + len_hyp / n + 1e-6)[0]
        P = np.linalg.matrix_power(B.matrices[cand], n)
        hit = np.nonzero(np.all(np.abs(P - M) < 1e-7 * scale, axis=(1, 2)))[0]
        if len(hit):
            return GroupElement(B.word(cand[hit[0]])), n
    return None
