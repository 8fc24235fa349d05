"""The lattice Co(P) of order-convex subsets of a finite poset, and its set algebra.

Convex sets travel as bitmasks; `ConvexSet` is the checked wrapper around one.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

from .errors import SizeError
from .lattice import FiniteLattice
from .poset import Poset, bits, is_order_convex, mask_of
from .terms import Meet, Term, Var

DEFAULT_SUBSET_CAP = 20


@dataclass(frozen=True)
class ConvexSet:
    """An order-convex subset of `poset`, stored as the bitmask `members`."""

    poset: Poset
    members: int

    def __post_init__(self):
        if not is_order_convex(self.poset, self.members):
            raise ValueError(f"{set(bits(self.members))} is not order-convex")

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(bits(self.members))

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.elements)) + "}"


def set_label(mask: int) -> str:
    return "{" + ",".join(str(i) for i in bits(mask)) + "}"


def _as_mask(x) -> int:
    if isinstance(x, ConvexSet):
        return x.members
    if isinstance(x, int):
        return x
    return mask_of(x)


def join_mask(poset: Poset, x: int, y: int) -> int:
    """Join in Co(P): the union plus every z strictly between the two sides."""
    out = x | y
    sup, sdn = poset.strict_up, poset.strict_down
    for z in range(poset.n):
        if (out >> z) & 1:
            continue
        dn, upm = sdn[z], sup[z]
        if (dn & x and upm & y) or (dn & y and upm & x):
            out |= 1 << z
    return out


def convex_join(poset: Poset, x, y) -> ConvexSet:
    """Join of two convex sets; the single pass below lands on a convex set."""
    return ConvexSet(poset, join_mask(poset, _as_mask(x), _as_mask(y)))


def convex_subsets(poset: Poset, cap: int = DEFAULT_SUBSET_CAP) -> tuple[int, ...]:
    """All order-convex subsets as masks, ascending; guarded by the 2^|P| cap."""
    if poset.n > cap:
        raise SizeError(f"poset has {poset.n} elements, enumeration cap is {cap}")
    sup, sdn = poset.strict_up, poset.strict_down
    out = []
    for m in range(1 << poset.n):
        rest = poset.full & ~m
        for z in bits(rest):
            if sdn[z] & m and sup[z] & m:
                break
        else:
            out.append(m)
    return tuple(out)


class CoLattice(FiniteLattice):
    """Co(P) with element i the i-th convex subset in ascending mask order."""

    def __init__(self, poset: Poset, masks: tuple[int, ...], up, join_t, meet_t):
        super().__init__(len(masks), up, join_t, meet_t,
                         labels=tuple(set_label(m) for m in masks))
        self.poset = poset
        self.masks = masks

    @cached_property
    def index(self) -> dict[int, int]:
        return {m: i for i, m in enumerate(self.masks)}

    def index_of(self, x) -> int:
        return self.index[_as_mask(x)]

    def convex(self, i: int) -> ConvexSet:
        return ConvexSet(self.poset, self.masks[i])


@lru_cache(maxsize=1024)
def co_lattice(poset: Poset, cap: int = DEFAULT_SUBSET_CAP) -> CoLattice:
    """The lattice of all order-convex subsets, ordered by inclusion.

    Meets are intersections and joins use the betweenness formula; quadratic in
    |Co(P)|, so meant for desk-scale posets.
    """
    masks = convex_subsets(poset, cap)
    index = {m: i for i, m in enumerate(masks)}
    n = len(masks)
    up = [0] * n
    for i, mi in enumerate(masks):
        for j, mj in enumerate(masks):
            if mi & ~mj == 0:
                up[i] |= 1 << j
    join_t = [[0] * n for _ in range(n)]
    meet_t = [[0] * n for _ in range(n)]
    for i, mi in enumerate(masks):
        for j in range(i, n):
            mj = masks[j]
            jt = index[join_mask(poset, mi, mj)]
            mt = index[mi & mj]
            join_t[i][j] = join_t[j][i] = jt
            meet_t[i][j] = meet_t[j][i] = mt
    return CoLattice(poset, masks, up, join_t, meet_t)


def restrict_eval(
    poset: Poset,
    subset: Iterable[int] | int,
    term: Term,
    assignment: Mapping[str, ConvexSet | int | Iterable[int]],
) -> frozenset[int]:
    """Evaluate `term` in Co(Q) for the induced order on Q, at the sets X_i n Q.

    Returns the value as a set of original element ids (a subset of Q).
    """
    qmask = _as_mask(subset)
    elems = tuple(bits(qmask))
    sub = poset.subposet(elems)
    to_sub = {e: i for i, e in enumerate(elems)}

    def shrink(mask: int) -> int:
        out = 0
        for e in bits(mask & qmask):
            out |= 1 << to_sub[e]
        return out

    local = {name: shrink(_as_mask(val)) for name, val in assignment.items()}

    def ev(t: Term) -> int:
        if isinstance(t, Var):
            return local[t.name]
        left, right = ev(t.left), ev(t.right)
        if isinstance(t, Meet):
            return left & right
        return join_mask(sub, left, right)

    return frozenset(elems[i] for i in bits(ev(term)))


def eval_in_co(poset: Poset, term: Term, assignment: Mapping[str, ConvexSet | int]) -> frozenset[int]:
    """Full evaluation in Co(P) without building the lattice, via the set algebra."""
    return restrict_eval(poset, poset.full, term, assignment)
