"""The right-angled Coxeter group of the pentagon.

Generators s0..s4 are the reflections in the sides of the base pentagon;
s_i and s_j commute exactly when the sides are adjacent, i.e. j = i +- 1
mod 5.  Elements are stored in ShortLex normal form: the lexicographically
least reduced word, with generators ordered by index.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .hyperboloid import HIsometry, compose, Kind, classify, translation_length, DEFAULT
from .pentagon import REFLECTIONS

NGEN = 5


class WordError(ValueError):
    pass


def commute(a: int, b: int) -> bool:
    return (a - b) % 5 in (1, 4)


COMMUTE = np.array([[commute(a, b) for b in range(5)] for a in range(5)])


def parse_word(w: Union[str, Sequence[int]]) -> tuple:
    """Accept "0214", [0, 2, 1, 4] or a GroupElement."""
    if isinstance(w, GroupElement):
        return w.normal
    if isinstance(w, str):
        w = w.strip()
        if w in ("", "e", "()"):
            return ()
        if not w.isdigit():
            raise WordError(f"bad word {w!r}")
        letters = tuple(int(ch) for ch in w)
    else:
        letters = tuple(int(x) for x in w)
    for x in letters:
        if not 0 <= x < NGEN:
            raise WordError(f"generator index {x} out of range")
    return letters


def word_str(w: Iterable[int]) -> str:
    return "".join(str(x) for x in w)


def _reduce(word: Sequence[int]) -> list:
    """Cancel pairs s...s separated only by letters commuting with s."""
    out: list = []
    for t in word:
        j = len(out) - 1
        cancelled = False
        while j >= 0:
            y = out[j]
            if y == t:
                del out[j]
                cancelled = True
                break
            if not commute(y, t):
                break
            j -= 1
        if not cancelled:
            out.append(t)
    return out


def _shortlex(reduced: Sequence[int]) -> tuple:
    # repeatedly pull out the least letter that commutes with everything before it
    w = list(reduced)
    res = []
    while w:
        bi = 0
        for i in range(1, len(w)):
            x = w[i]
            if x < w[bi] and all(commute(y, x) for y in w[:i]):
                bi = i
        res.append(w.pop(bi))
    return tuple(res)


def reduce_word(w) -> tuple:
    """Normal form as a plain tuple of letters."""
    return _shortlex(_reduce(parse_word(w)))


@dataclass(frozen=True)
class GroupElement:
    normal: tuple

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(self.normal))

    @property
    def length(self) -> int:
        return len(self.normal)

    def __len__(self) -> int:
        return len(self.normal)

    def __str__(self) -> str:
        return word_str(self.normal) or "e"

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return normal_form(self.normal + parse_word(other))

    def inverse(self) -> "GroupElement":
        return normal_form(self.normal[::-1])

    def power(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse().power(-n)
        return normal_form(self.normal * n)

    @cached_property
    def isometry(self) -> HIsometry:
        return compose(REFLECTIONS[list(self.normal)]) if self.normal else HIsometry.identity()


def normal_form(w) -> GroupElement:
    return GroupElement(reduce_word(w))


IDENTITY = GroupElement(())


@dataclass(frozen=True)
class ConjClass:
    """A conjugacy class, represented by its ShortLex-least element of
    minimal length.  len_hyp is None for elliptic classes.

    len_cube is the cubical translation length.  It equals the word length
    of rep except for glides along a wall, which move the wall's hyperplane
    by one less than their minimal word length.
    """
    rep: GroupElement
    len_cube: int
    len_hyp: Optional[float]
    primitive: Optional[bool] = None
    min_len: Optional[int] = None

    def __post_init__(self):
        if self.min_len is None:
            object.__setattr__(self, "min_len", self.rep.length)

    @property
    def hyperbolic(self) -> bool:
        return self.len_hyp is not None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        return {"rep": word_str(self.rep.normal), "len_cube": self.len_cube,
                "len_hyp": None if self.len_hyp is None else round(self.len_hyp, 12),
                "primitive": self.primitive}

    @classmethod
    def from_dict(cls, d: dict) -> "ConjClass":
        return cls(normal_form(d["rep"]), int(d["len_cube"]), d["len_hyp"], d.get("primitive"))


def hyp_length(g: GroupElement) -> Optional[float]:
    M = g.isometry
    if classify(M) is Kind.HYPERBOLIC:
        return translation_length(M)
    return None


def cyclic_closure(w) -> tuple:
    """Minimal-length conjugates reachable by cyclic shifts.

    Worklist over conjugation by single generators; length-preserving moves
    are explored exhaustively and the search restarts from any shorter
    conjugate found.  Returns (minimal set, its length).
    """
    cur = reduce_word(w)
    while True:
        seen = {cur}
        stack = [cur]
        shorter = None
        while stack and shorter is None:
            u = stack.pop()
            for x in range(NGEN):
                v = reduce_word((x,) + u + (x,))
                if len(v) < len(u):
                    shorter = v
                    break
                if len(v) == len(u) and v not in seen:
                    seen.add(v)
                    stack.append(v)
        if shorter is None:
            return frozenset(seen), len(cur)
        cur = shorter


def is_wall_glide(rep: GroupElement, len_hyp: Optional[float]) -> bool:
    """Orientation reversing hyperbolic element whose axis is a wall line.

    Such a minimal-length element lives in a wall stabilizer
    <s_{i-1}, s_i, s_{i+1}>.
    """
    if len_hyp is None or rep.isometry.orientation > 0:
        return False
    sup = set(rep.normal)
    return any(sup <= {(i - 1) % 5, i, (i + 1) % 5} for i in range(5))


def conj_min(w, with_primitive: bool = False) -> ConjClass:
    mins, n = cyclic_closure(w)
    rep = GroupElement(min(mins))
    lh = hyp_length(rep)
    n_cube = n - 1 if is_wall_glide(rep, lh) else n
    prim = None
    if with_primitive and lh is not None:
        prim = _primitive_by_roots(rep, lh)
    return ConjClass(rep, n_cube, lh, prim, n)


def _primitive_by_roots(rep: GroupElement, len_hyp: float) -> bool:
    # a root h of a conjugate of rep may be taken to have the same axis as rep;
    # its class then has minimal length len_cube(rep) / n (stable = minimal)
    from .census import root_search
    return root_search(rep, len_hyp) is None


def is_primitive(c: ConjClass) -> bool:
    if not c.hyperbolic:
        raise ValueError("primitivity is defined for hyperbolic classes only")
    if c.primitive is not None:
        return c.primitive
    return _primitive_by_roots(c.rep, c.len_hyp)
