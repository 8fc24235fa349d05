"""Finite posets on {0..n-1}: closure, covers, order-convexity, paths, tree-likeness, crowns.

Relations are stored as per-element bitmasks, which keeps every predicate here a
few integer operations and makes posets cheap to hash and compare.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

from .errors import CycleError, FormatError, RangeError


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of `mask` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def closure_masks(n: int, strict_pairs: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    """Reflexive-transitive closure of `strict_pairs` as up-set masks.

    Raises RangeError on out-of-range ids and CycleError if the closure would
    relate some x strictly below itself.
    """
    up = [1 << i for i in range(n)]
    for lo, hi in strict_pairs:
        if not (0 <= lo < n and 0 <= hi < n):
            raise RangeError(f"pair ({lo}, {hi}) out of range for {n} elements")
        if lo == hi:
            raise CycleError(f"pair ({lo}, {hi}) is a loop")
        up[lo] |= 1 << hi
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = up[i]
            for j in bits(acc):
                acc |= up[j]
            if acc != up[i]:
                up[i] = acc
                changed = True
    for i in range(n):
        for j in bits(up[i] & ~(1 << i)):
            if (up[j] >> i) & 1:
                raise CycleError(f"elements {i} and {j} lie on a directed cycle")
    return tuple(up)


class Poset:
    """Immutable finite poset; `up[i]` is the bitmask of {j : i <= j} (reflexive).

    Construct via `build_poset`, which closes and validates an arbitrary strict
    relation; the raw constructor trusts its input.
    """

    def __init__(self, n: int, up: Sequence[int]):
        self.n = int(n)
        self.up = tuple(up)

    def le(self, i: int, j: int) -> bool:
        return bool((self.up[i] >> j) & 1)

    def lt(self, i: int, j: int) -> bool:
        return i != j and self.le(i, j)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def down(self) -> tuple[int, ...]:
        down = [0] * self.n
        for i in range(self.n):
            for j in bits(self.up[i]):
                down[j] |= 1 << i
        return tuple(down)

    @cached_property
    def strict_up(self) -> tuple[int, ...]:
        return tuple(self.up[i] & ~(1 << i) for i in range(self.n))

    @cached_property
    def strict_down(self) -> tuple[int, ...]:
        return tuple(self.down[i] & ~(1 << i) for i in range(self.n))

    @cached_property
    def covers(self) -> tuple[tuple[int, int], ...]:
        """Transitive reduction of the strict order, as sorted (lo, hi) pairs."""
        out = []
        for i in range(self.n):
            for j in bits(self.strict_up[i]):
                if not (self.strict_up[i] & self.strict_down[j]):
                    out.append((i, j))
        return tuple(sorted(out))

    @cached_property
    def cover_neighbors(self) -> tuple[int, ...]:
        """Undirected cover-graph adjacency as bitmasks."""
        adj = [0] * self.n
        for lo, hi in self.covers:
            adj[lo] |= 1 << hi
            adj[hi] |= 1 << lo
        return tuple(adj)

    def subposet(self, elements: Sequence[int]) -> "Poset":
        """Induced order on `elements` (which become 0..k-1 in the given order)."""
        idx = {e: i for i, e in enumerate(elements)}
        up = [0] * len(elements)
        for e, i in idx.items():
            for f in bits(self.up[e]):
                if f in idx:
                    up[i] |= 1 << idx[f]
        return Poset(len(elements), up)

    def relabel(self, perm: Sequence[int]) -> "Poset":
        """Apply `perm` (old id -> new id) to the carrier."""
        up = [0] * self.n
        for i in range(self.n):
            for j in bits(self.up[i]):
                up[perm[i]] |= 1 << perm[j]
        return Poset(self.n, up)

    def dual(self) -> "Poset":
        return Poset(self.n, self.down)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poset) and self.n == other.n and self.up == other.up

    def __hash__(self) -> int:
        return hash((self.n, self.up))

    def __repr__(self) -> str:
        return f"Poset({self.n}, covers={list(self.covers)})"


def build_poset(n: int, strict_pairs: Iterable[tuple[int, int]]) -> Poset:
    """Poset from an arbitrary strict relation; closure and reduction are internal."""
    if n < 0:
        raise RangeError("negative size")
    return Poset(n, closure_masks(n, strict_pairs))


def is_order_convex(poset: Poset, members: Iterable[int] | int) -> bool:
    """True iff every z with x <= z <= y for x, y in the set is itself a member."""
    m = members if isinstance(members, int) else mask_of(members)
    if m & ~poset.full:
        raise RangeError("member outside the poset")
    for z in range(poset.n):
        if (m >> z) & 1:
            continue
        if (poset.strict_down[z] & m) and (poset.strict_up[z] & m):
            return False
    return True


PathSeq = tuple[int, ...]


def is_path(poset: Poset, seq: Sequence[int]) -> bool:
    """Distinct entries, consecutive ones adjacent in the cover graph."""
    if len(set(seq)) != len(seq):
        return False
    adj = poset.cover_neighbors
    return all((adj[a] >> b) & 1 for a, b in zip(seq, seq[1:]))


def find_path(poset: Poset, a: int, b: int) -> Optional[PathSeq]:
    """One path from a to b in the undirected cover graph (BFS, ties by id)."""
    if not (0 <= a < poset.n and 0 <= b < poset.n):
        raise RangeError(f"endpoints ({a}, {b}) out of range")
    if a == b:
        return (a,)
    adj = poset.cover_neighbors
    parent = {a: None}
    frontier = [a]
    while frontier:
        nxt = []
        for x in frontier:
            for y in bits(adj[x]):
                if y in parent:
                    continue
                parent[y] = x
                if y == b:
                    path = [y]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return tuple(reversed(path))
                nxt.append(y)
        frontier = nxt
    return None


def _components(poset: Poset) -> list[int]:
    """Connected components of the cover graph, as bitmasks."""
    seen = 0
    comps = []
    adj = poset.cover_neighbors
    for s in range(poset.n):
        if (seen >> s) & 1:
            continue
        comp = 1 << s
        frontier = [s]
        while frontier:
            x = frontier.pop()
            for y in bits(adj[x] & ~comp):
                comp |= 1 << y
                frontier.append(y)
        seen |= comp
        comps.append(comp)
    return comps


def is_tree_like(poset: Poset) -> bool:
    """Covers connect every comparable pair and the cover graph is acyclic.

    The first condition holds in every finite poset; it is re-checked here
    rather than assumed.
    """
    reached = closure_masks(poset.n, poset.covers)
    assert reached == poset.up, "cover chains do not generate the order"
    edges = len(poset.covers)
    return edges == poset.n - len(_components(poset))


@dataclass(frozen=True)
class Crown:
    """Cyclic witness ((a_0, b_0), ..., (a_{m-1}, b_{m-1})), m >= 3.

    Valid when a_i <= b_j holds exactly for i in {j, j+1 mod m}.
    """

    pairs: tuple[tuple[int, int], ...]

    def holds_in(self, poset: Poset) -> bool:
        m = len(self.pairs)
        if m < 3:
            return False
        for i in range(m):
            for j in range(m):
                want = i == j or i == (j + 1) % m
                if poset.le(self.pairs[i][0], self.pairs[j][1]) != want:
                    return False
        return True


def _search_crown(poset: Poset, m: int) -> Optional[list[tuple[int, int]]]:
    n = poset.n
    le = poset.le
    chosen: list[tuple[int, int]] = []

    def ok(a_k: int, b_k: int) -> bool:
        k = len(chosen)
        if not le(a_k, b_k):
            return False
        if k == 0:
            return True
        if not le(a_k, chosen[k - 1][1]):
            return False
        for j in range(k - 1):
            if le(a_k, chosen[j][1]):
                return False
        for i in range(1, k):
            if le(chosen[i][0], b_k):
                return False
        if k == m - 1:
            if not le(chosen[0][0], b_k):
                return False
        elif le(chosen[0][0], b_k):
            return False
        return True

    def extend() -> Optional[list[tuple[int, int]]]:
        if len(chosen) == m:
            return list(chosen)
        for a in range(n):
            for b in range(n):
                if ok(a, b):
                    chosen.append((a, b))
                    hit = extend()
                    if hit is not None:
                        return hit
                    chosen.pop()
        return None

    return extend()


def find_crown(poset: Poset) -> Optional[Crown]:
    """Some m-crown with m >= 3, or None; smallest m first, lexicographic tuples."""
    if poset.n < 6:
        return None
    for m in range(3, poset.n // 2 + 1):
        hit = _search_crown(poset, m)
        if hit is not None:
            crown = Crown(tuple(hit))
            assert crown.holds_in(poset), "crown search returned a non-crown"
            return crown
    return None


def is_crown_free(poset: Poset) -> bool:
    return find_crown(poset) is None


def format_poset(poset: Poset, header: str = "poset") -> str:
    lines = [f"{header} {poset.n}"]
    lines.extend(f"{lo} < {hi}" for lo, hi in poset.covers)
    return "\n".join(lines) + "\n"


def parse_poset(text: str, header: str = "poset") -> Poset:
    """Parse the line format: `<header> <n>`, then `<lo> < <hi>` pairs, `#` comments."""
    n = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != header or not parts[1].isdigit():
                raise FormatError(f"expected `{header} <n>`, got {line!r}", line=lineno)
            n = int(parts[1])
            continue
        parts = line.split()
        if len(parts) != 3 or parts[1] != "<":
            raise FormatError(f"expected `<lo> < <hi>`, got {line!r}", line=lineno)
        try:
            lo, hi = int(parts[0]), int(parts[2])
        except ValueError:
            raise FormatError(f"non-integer ids in {line!r}", line=lineno) from None
        pairs.append((lo, hi))
    if n is None:
        raise FormatError(f"missing `{header} <n>` header", line=1)
    try:
        return build_poset(n, pairs)
    except (RangeError, CycleError) as exc:
        raise FormatError(str(exc)) from exc
