"""Poset enumeration up to isomorphism and the identity/quasi-identity decision
procedure over lattices of order-convex sets."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .convexity import co_lattice
from .errors import BudgetError, SizeError
from .lattice import DEFAULT_BUDGET, check_identity, check_quasi_identity
from .poset import Poset, bits, find_crown
from .terms import QuasiIdentity, Term, node_count

ENUMERATION_CAP = 7

# element counts of posets up to isomorphism, sizes 1..7
POSET_CENSUS = (1, 2, 5, 16, 63, 318, 2045)


def _strict_rows(poset: Poset) -> list[int]:
    return list(poset.strict_up)


def _swap_is_automorphism(rows: list[int], n: int, u: int, v: int) -> bool:
    """True iff transposing u and v fixes the strict relation."""
    bu, bv = 1 << u, 1 << v
    if rows[u] & bv or rows[v] & bu:
        return False
    if (rows[u] & ~(bu | bv)) != (rows[v] & ~(bu | bv)):
        return False
    for w in range(n):
        if w == u or w == v:
            continue
        if bool(rows[w] & bu) != bool(rows[w] & bv):
            return False
    return True


def canonical_form(poset: Poset) -> Poset:
    """Relabeling with the lexicographically least strict-relation bit sequence.

    The sequence lists, for each new position k, the bits row(i, k) then
    row(k, i) for i < k. Branch and bound over placements, pruned against the
    current best and by skipping transposition-equivalent candidates."""
    n = poset.n
    if n <= 1:
        return poset
    rows = _strict_rows(poset)
    swap_auto = [
        [u != v and _swap_is_automorphism(rows, n, u, v) for v in range(n)] for u in range(n)
    ]
    best_seq: Optional[list[int]] = None
    best_perm: Optional[list[int]] = None

    def extend(placed: list[int], seq: list[int]) -> None:
        nonlocal best_seq, best_perm
        k = len(placed)
        if k == n:
            if best_seq is None or seq < best_seq:
                best_seq = list(seq)
                best_perm = list(placed)
            return
        used = set(placed)
        kept: list[int] = []
        for v in range(n):
            if v in used:
                continue
            if any(swap_auto[v][u] for u in kept):
                continue
            kept.append(v)
        for v in kept:
            tail: list[int] = []
            for u in placed:
                tail.append((rows[u] >> v) & 1)
            for u in placed:
                tail.append((rows[v] >> u) & 1)
            cand = seq + tail
            if best_seq is not None and cand > best_seq[: len(cand)]:
                continue
            extend(placed + [v], cand)

    extend([], [])
    perm = [0] * n  # old id -> new position
    for pos, old in enumerate(best_perm):
        perm[old] = pos
    return poset.relabel(perm)


def _canonical_key(poset: Poset) -> tuple:
    return (poset.n, poset.up)


def _downsets(poset: Poset) -> list[int]:
    out = []
    for m in range(1 << poset.n):
        for e in bits(m):
            if poset.strict_down[e] & ~m:
                break
        else:
            out.append(m)
    return out


def _extend_with_max(poset: Poset, downset: int) -> Poset:
    n = poset.n
    up = list(poset.up) + [1 << n]
    for d in bits(downset):
        up[d] |= 1 << n
    return Poset(n + 1, up)


@dataclass(frozen=True)
class PosetCatalog:
    """All posets of one size up to isomorphism, canonical and sorted."""

    size: int
    posets: tuple[Poset, ...]


@lru_cache(maxsize=None)
def enumerate_posets(size: int, cap: int = ENUMERATION_CAP) -> PosetCatalog:
    """Orderly generation: every poset arises by deleting a maximal element,
    so extend each smaller canonical poset by a new maximal element over each
    down-set, then dedupe by canonical form."""
    if size > cap:
        raise SizeError(f"requested size {size} exceeds enumeration cap {cap}")
    if size < 0:
        raise SizeError("size must be nonnegative")
    if size == 0:
        return PosetCatalog(0, (Poset(0, ()),))
    if size == 1:
        return PosetCatalog(1, (Poset(1, (1,)),))
    seen: dict[tuple, Poset] = {}
    for parent in enumerate_posets(size - 1, cap).posets:
        for downset in _downsets(parent):
            cand = canonical_form(_extend_with_max(parent, downset))
            seen.setdefault(_canonical_key(cand), cand)
    posets = tuple(seen[key] for key in sorted(seen))
    return PosetCatalog(size, posets)


@dataclass(frozen=True)
class DecideResult:
    verdict: str  # VALID | INVALID
    bound: int
    checked: int
    witness_poset: Optional[Poset] = None
    witness_assignment: Optional[dict] = None  # variable -> element set of Co(witness)


def decide_identity_in_SUB(
    s: Term,
    t: Term,
    max_size: Optional[int] = None,
    cap: int = ENUMERATION_CAP,
    budget: int = DEFAULT_BUDGET,
) -> DecideResult:
    """Decide s = t across all lattices of order-convex sets by sweeping every
    poset up to the bound.

    The default bound is the node count of the longer term, a deliberately
    loose upper bound for the number of points a failure needs; pass
    `max_size` to override. SizeError reports the required bound when it
    exceeds the enumeration cap."""
    bound = max_size if max_size is not None else max(node_count(s), node_count(t))
    if bound > cap:
        raise SizeError(
            f"decision bound {bound} exceeds enumeration cap {cap}; "
            f"rerun with max_size <= {cap} or a larger cap"
        )
    checked = 0
    for size in range(1, bound + 1):
        for poset in enumerate_posets(size, cap).posets:
            lat = co_lattice(poset)
            res = check_identity(lat, s, t, budget=budget)
            checked += 1
            if res is not True:
                named = {v: frozenset(bits(lat.masks[e])) for v, e in res.items()}
                return DecideResult("INVALID", bound, checked, poset, named)
    return DecideResult("VALID", bound, checked)


@dataclass(frozen=True)
class QuasiSearchResult:
    found: Optional[tuple[Poset, dict]]
    budget_hit: bool
    checked: int


def search_quasi_counterexample(
    q: QuasiIdentity,
    max_size: int,
    budget: int = DEFAULT_BUDGET,
    poset_filter: str = "all",
    cap: int = ENUMERATION_CAP,
) -> QuasiSearchResult:
    """Hunt for a poset whose convex-set lattice violates `q`.

    `poset_filter` restricts the sweep to 'crown-free' or 'has-crown' posets.
    Per-poset sweeps that would exceed `budget` are skipped and reported via
    `budget_hit` rather than aborting the search."""
    if poset_filter not in ("all", "crown-free", "has-crown"):
        raise ValueError(f"unknown filter {poset_filter!r}")
    if max_size > cap:
        raise SizeError(f"max_size {max_size} exceeds enumeration cap {cap}")
    budget_hit = False
    checked = 0
    for size in range(1, max_size + 1):
        for poset in enumerate_posets(size, cap).posets:
            if poset_filter != "all":
                crowned = find_crown(poset) is not None
                if crowned != (poset_filter == "has-crown"):
                    continue
            lat = co_lattice(poset)
            checked += 1
            try:
                res = check_quasi_identity(lat, q, budget=budget)
            except BudgetError:
                budget_hit = True
                continue
            if res is not True:
                named = {v: frozenset(bits(lat.masks[e])) for v, e in res.items()}
                return QuasiSearchResult((poset, named), budget_hit, checked)
    return QuasiSearchResult(None, budget_hit, checked)
