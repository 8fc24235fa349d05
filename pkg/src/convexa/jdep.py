"""Join-dependency machinery: minimal nontrivial join-covers, the D relation,
conjugates, C-sets, two-block join partitions, and track predicates."""
from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import NotDRelated, NotInSUB, PartitionViolation, WellDefinednessViolation
from .lattice import FiniteLattice

_STATE: "weakref.WeakKeyDictionary[FiniteLattice, dict]" = weakref.WeakKeyDictionary()


def _state(lattice: FiniteLattice) -> dict:
    st = _STATE.get(lattice)
    if st is None:
        st = {}
        _STATE[lattice] = st
    return st


def _cover_tables(lattice: FiniteLattice, p: int):
    """Per-p tables over element pairs (b, c):

    sat[b, c]   : p <= b v c
    min1[b, c]  : no x < b with p <= x v c
    min2[b, c]  : no y < c with p <= b v y
    """
    st = _state(lattice).setdefault("cover_tables", {})
    hit = st.get(p)
    if hit is not None:
        return hit
    le = lattice.le_np
    sat = le[p][lattice.join_np]
    strict_lt = le.T & ~np.eye(lattice.n, dtype=bool)  # strict_lt[b, x] : x < b
    nm1 = (strict_lt.astype(np.uint8) @ sat.astype(np.uint8)) > 0
    nm2 = (sat.astype(np.uint8) @ strict_lt.T.astype(np.uint8)) > 0
    out = (sat, ~nm1, ~nm2)
    st[p] = out
    return out


@dataclass(frozen=True)
class JoinCover:
    """The inequality p <= b v c with its classification flags."""

    p: int
    b: int
    c: int
    nontrivial: bool
    minimal_in_b: bool
    minimal_in_c: bool

    @property
    def is_minimal_nontrivial(self) -> bool:
        return self.nontrivial and self.minimal_in_b and self.minimal_in_c


def classify_join_cover(lattice: FiniteLattice, p: int, b: int, c: int) -> JoinCover:
    if not lattice.le(p, lattice.join(b, c)):
        raise ValueError(f"{p} <= {b} v {c} does not hold")
    sat, min1, min2 = _cover_tables(lattice, p)
    nontrivial = not (lattice.le(p, b) or lattice.le(p, c))
    return JoinCover(p, b, c, nontrivial, bool(min1[b, c]), bool(min2[b, c]))


def minimal_nontrivial_join_covers(lattice: FiniteLattice, p: int) -> tuple[JoinCover, ...]:
    """All pairs (b, c), in both orders, with p <= b v c nontrivial and minimal
    in each coordinate."""
    st = _state(lattice).setdefault("mnt", {})
    hit = st.get(p)
    if hit is not None:
        return hit
    sat, min1, min2 = _cover_tables(lattice, p)
    nt = ~lattice.le_np[p][:, None] & ~lattice.le_np[p][None, :]
    good = sat & nt & min1 & min2
    covers = tuple(
        JoinCover(p, int(b), int(c), True, True, True) for b, c in np.argwhere(good)
    )
    st[p] = covers
    return covers


def D_sets(lattice: FiniteLattice) -> dict[int, tuple[int, ...]]:
    """For each join-irreducible p, the sorted tuple of q with p D q."""
    st = _state(lattice)
    hit = st.get("D_sets")
    if hit is not None:
        return hit
    jirr = lattice.jirr
    jset = set(jirr)
    out: dict[int, tuple[int, ...]] = {}
    for p in jirr:
        sat, min1, _ = _cover_tables(lattice, p)
        witnessed = (sat & min1).any(axis=1)
        out[p] = tuple(q for q in jirr if q != p and witnessed[q])
    st["D_sets"] = out
    return out


def D_relation(lattice: FiniteLattice) -> frozenset[tuple[int, int]]:
    return frozenset((p, q) for p, qs in D_sets(lattice).items() for q in qs)


def has_D_cycle(lattice: FiniteLattice) -> bool:
    """True iff the directed graph of D has a cycle."""
    graph = D_sets(lattice)
    color: dict[int, int] = {}

    def dfs(v: int) -> bool:
        color[v] = 1
        for w in graph.get(v, ()):
            c = color.get(w, 0)
            if c == 1 or (c == 0 and dfs(w)):
                return True
        color[v] = 2
        return False

    return any(color.get(p, 0) == 0 and dfs(p) for p in graph)


def conjugates(lattice: FiniteLattice, p: int, a: int) -> tuple[int, ...]:
    """All b forming with `a` a coordinatewise-minimal nontrivial cover of p."""
    if (p, a) not in D_relation(lattice):
        raise NotDRelated(f"{p} D {a} does not hold")
    return tuple(sorted(cv.c for cv in minimal_nontrivial_join_covers(lattice, p) if cv.b == a))


def _require_sub(lattice: FiniteLattice) -> None:
    from .identities import satisfies_SUB_fast

    report = satisfies_SUB_fast(lattice)
    if not report.holds:
        raise NotInSUB(report)


def C_set(lattice: FiniteLattice, a: int, b: int) -> frozenset[int]:
    """C(a, b) = {x : b D x and b <= b' v x} for a conjugate b' of b w.r.t. a.

    Independence from the choice of b' is re-verified across all conjugates.
    """
    st = _state(lattice).setdefault("C", {})
    hit = st.get((a, b))
    if hit is not None:
        return hit
    _require_sub(lattice)
    if (a, b) not in D_relation(lattice):
        raise NotDRelated(f"{a} D {b} does not hold")
    conjs = conjugates(lattice, a, b)
    if not conjs:
        raise WellDefinednessViolation(f"{b} has no conjugate with respect to {a}")
    db = D_sets(lattice)[b]
    values = [
        frozenset(x for x in db if lattice.le(b, lattice.join(bp, x))) for bp in conjs
    ]
    if any(v != values[0] for v in values):
        raise WellDefinednessViolation(
            f"C[{b}, -] differs across conjugates {conjs} with respect to {a}"
        )
    st[(a, b)] = values[0]
    return values[0]


@dataclass(frozen=True)
class UdavBondPartition:
    """The two-block split {A, B} of D(p): p <= x v y holds exactly cross-block.

    Canonical labeling: A is the side holding the least element of D(p);
    both sides are empty when D(p) is."""

    p: int
    A: frozenset[int]
    B: frozenset[int]


def udav_bond_partition(lattice: FiniteLattice, p: int) -> UdavBondPartition:
    st = _state(lattice).setdefault("ub", {})
    hit = st.get(p)
    if hit is not None:
        return hit
    dp = D_sets(lattice)[p]
    if not dp:
        result = UdavBondPartition(p, frozenset(), frozenset())
        st[p] = result
        return result
    dset = set(dp)
    seed = next(
        (cv for cv in minimal_nontrivial_join_covers(lattice, p) if cv.b in dset and cv.c in dset),
        None,
    )
    if seed is None:
        raise PartitionViolation(f"{p}: no minimal nontrivial cover inside D({p})")
    a, b = seed.b, seed.c
    A = frozenset(x for x in dp if lattice.le(p, lattice.join(x, b)))
    B = frozenset(y for y in dp if lattice.le(p, lattice.join(a, y)))
    if A & B or (A | B) != dset:
        raise PartitionViolation(f"{p}: blocks {sorted(A)} / {sorted(B)} do not split D({p})")
    for x in dp:
        for y in dp:
            cross = (x in A and y in B) or (x in B and y in A)
            if lattice.le(p, lattice.join(x, y)) != cross:
                raise PartitionViolation(f"{p}: pair ({x}, {y}) breaks the cross-block law")
    if min(dp) not in A:
        A, B = B, A
    result = UdavBondPartition(p, A, B)
    st[p] = result
    return result


@dataclass(frozen=True)
class StirlitzTrack:
    """Sequences a_0..a_n and a'_1..a'_n of join-irreducibles linked by
    minimal nontrivial covers a_i <= a_{i+1} v a'_{i+1}, with
    a_i <= a'_i v a_{i+1} at interior indices. a_0 is the base."""

    a: tuple[int, ...]
    a_prime: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.a) - 1


def is_stirlitz_track(lattice: FiniteLattice, a: Sequence[int], a_prime: Sequence[int]) -> bool:
    if len(a) != len(a_prime) + 1 or not a:
        raise ValueError("need |a| = |a'| + 1 >= 1")
    jset = set(lattice.jirr)
    if any(x not in jset for x in (*a, *a_prime)):
        return False
    n = len(a) - 1
    for i in range(n):
        if not lattice.le(a[i], lattice.join(a[i + 1], a_prime[i])):
            return False
        if not classify_join_cover(lattice, a[i], a[i + 1], a_prime[i]).is_minimal_nontrivial:
            return False
    for i in range(1, n):
        if not lattice.le(a[i], lattice.join(a_prime[i - 1], a[i + 1])):
            return False
    return True


def stirlitz_tracks(lattice: FiniteLattice, max_length: int) -> Iterator[StirlitzTrack]:
    """All tracks of length <= max_length, by bounded extension search."""
    jset = set(lattice.jirr)

    def extensions(track: StirlitzTrack) -> Iterator[StirlitzTrack]:
        last = track.a[-1]
        for cv in minimal_nontrivial_join_covers(lattice, last):
            if cv.b not in jset or cv.c not in jset:
                continue
            if track.a_prime and not lattice.le(
                last, lattice.join(track.a_prime[-1], cv.b)
            ):
                continue
            yield StirlitzTrack(track.a + (cv.b,), track.a_prime + (cv.c,))

    level = [StirlitzTrack((p,), ()) for p in lattice.jirr]
    yield from level
    for _ in range(max_length):
        nxt = []
        for track in level:
            nxt.extend(extensions(track))
        yield from nxt
        level = nxt
