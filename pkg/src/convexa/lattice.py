"""Finite lattices as first-class values: tables, join-irreducibles, term evaluation,
and exhaustive identity / quasi-identity checking."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import BudgetError, FormatError, NotALattice, UnboundVariable
from .poset import Poset, bits, closure_masks, parse_poset
from .terms import Join, Meet, QuasiIdentity, Term, Var, variables

DEFAULT_BUDGET = 10**8


class FiniteLattice:
    """Finite lattice on elements 0..n-1 with explicit join/meet tables.

    `up[i]` is the bitmask of {j : i <= j}. Tables are trusted here; use
    `build_lattice` / `FiniteLattice.from_order` to compute and validate them
    from an order, or `validate_lattice` to re-check any instance.
    """

    def __init__(self, n, up, join_table, meet_table, labels=None):
        if n < 1:
            raise NotALattice(0, 0, "a lattice needs at least one element")
        self.n = int(n)
        self.up = tuple(up)
        self.join_table = tuple(tuple(row) for row in join_table)
        self.meet_table = tuple(tuple(row) for row in meet_table)
        self.labels = tuple(labels) if labels is not None else None

    @classmethod
    def from_order(cls, n: int, up: Sequence[int], labels=None) -> "FiniteLattice":
        """Compute lub/glb tables from an order; NotALattice names a failing pair."""
        if n < 1:
            raise NotALattice(0, 0, "a lattice needs at least one element")
        down = [0] * n
        for i in range(n):
            for j in bits(up[i]):
                down[j] |= 1 << i
        join_t = [[0] * n for _ in range(n)]
        meet_t = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                ub = up[i] & up[j]
                lub = [z for z in bits(ub) if (up[z] & ub) == ub]
                if len(lub) != 1:
                    raise NotALattice(i, j, "no unique least upper bound")
                lb = down[i] & down[j]
                glb = [z for z in bits(lb) if (down[z] & lb) == lb]
                if len(glb) != 1:
                    raise NotALattice(i, j, "no unique greatest lower bound")
                join_t[i][j] = join_t[j][i] = lub[0]
                meet_t[i][j] = meet_t[j][i] = glb[0]
        return cls(n, up, join_t, meet_t, labels)

    def le(self, i: int, j: int) -> bool:
        return bool((self.up[i] >> j) & 1)

    def join(self, i: int, j: int) -> int:
        return self.join_table[i][j]

    def meet(self, i: int, j: int) -> int:
        return self.meet_table[i][j]

    @cached_property
    def down(self) -> tuple[int, ...]:
        down = [0] * self.n
        for i in range(self.n):
            for j in bits(self.up[i]):
                down[j] |= 1 << i
        return tuple(down)

    @cached_property
    def strict_down(self) -> tuple[int, ...]:
        return tuple(self.down[i] & ~(1 << i) for i in range(self.n))

    @cached_property
    def strict_up(self) -> tuple[int, ...]:
        return tuple(self.up[i] & ~(1 << i) for i in range(self.n))

    @cached_property
    def bottom(self) -> int:
        for i in range(self.n):
            if self.up[i] == (1 << self.n) - 1:
                return i
        raise NotALattice(0, 0, "no least element")

    @cached_property
    def top(self) -> int:
        for i in range(self.n):
            if self.down[i] == (1 << self.n) - 1:
                return i
        raise NotALattice(0, 0, "no greatest element")

    @cached_property
    def order_poset(self) -> Poset:
        return Poset(self.n, self.up)

    @cached_property
    def jirr(self) -> tuple[int, ...]:
        """Elements with exactly one lower cover (excludes the bottom)."""
        return tuple(sorted(self.lower_cover))

    @cached_property
    def lower_cover(self) -> dict[int, int]:
        out = {}
        covers_of: dict[int, list[int]] = {i: [] for i in range(self.n)}
        for lo, hi in self.order_poset.covers:
            covers_of[hi].append(lo)
        for x, lows in covers_of.items():
            if len(lows) == 1:
                out[x] = lows[0]
        return out

    @cached_property
    def jirr_below(self) -> tuple[int, ...]:
        """Per element, the bitmask of join-irreducibles below it."""
        jmask = 0
        for j in self.jirr:
            jmask |= 1 << j
        return tuple(self.down[x] & jmask for x in range(self.n))

    @cached_property
    def join_np(self) -> np.ndarray:
        dtype = np.uint8 if self.n <= 256 else np.uint32
        return np.array(self.join_table, dtype=dtype)

    @cached_property
    def meet_np(self) -> np.ndarray:
        dtype = np.uint8 if self.n <= 256 else np.uint32
        return np.array(self.meet_table, dtype=dtype)

    @cached_property
    def le_np(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=bool)
        for i in range(self.n):
            for j in bits(self.up[i]):
                out[i, j] = True
        return out

    def key(self):
        """Structural identity for memo tables."""
        return (self.n, self.join_table, self.meet_table)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def __repr__(self) -> str:
        return f"FiniteLattice(n={self.n})"


def build_lattice(n: int, strict_pairs: Iterable[tuple[int, int]], labels=None) -> FiniteLattice:
    """Validated lattice from a strict relation (closure computed internally)."""
    return FiniteLattice.from_order(n, closure_masks(n, strict_pairs), labels)


@dataclass(frozen=True)
class JirrInfo:
    jirr: tuple[int, ...]
    lower_cover: dict[int, int]


def join_irreducibles(lattice: FiniteLattice) -> JirrInfo:
    return JirrInfo(lattice.jirr, dict(lattice.lower_cover))


def validate_lattice(lattice: FiniteLattice) -> None:
    """Re-check tables against the order (lub/glb) and the algebraic laws.

    Raises NotALattice or AssertionError on the first defect.
    """
    n = lattice.n
    recomputed = FiniteLattice.from_order(n, lattice.up)
    if recomputed.join_table != lattice.join_table:
        raise NotALattice(0, 0, "join table disagrees with least upper bounds")
    if recomputed.meet_table != lattice.meet_table:
        raise NotALattice(0, 0, "meet table disagrees with greatest lower bounds")
    jn, mt = lattice.join_np, lattice.meet_np
    idx = np.arange(n)
    assert (jn == jn.T).all() and (mt == mt.T).all(), "commutativity fails"
    assert (jn[idx, idx] == idx).all() and (mt[idx, idx] == idx).all(), "idempotence fails"
    assert (mt[idx[:, None], jn] == idx[:, None]).all(), "absorption x^(xvy) fails"
    assert (jn[idx[:, None], mt] == idx[:, None]).all(), "absorption xv(x^y) fails"
    assert (jn[jn[:, :, None], idx[None, None, :]] == jn[idx[:, None, None], jn[None, :, :]]).all(), (
        "join associativity fails"
    )
    assert (mt[mt[:, :, None], idx[None, None, :]] == mt[idx[:, None, None], mt[None, :, :]]).all(), (
        "meet associativity fails"
    )
    # property access raises NotALattice when 0 or 1 is missing
    lattice.bottom, lattice.top


def eval_term(lattice: FiniteLattice, term: Term, assignment: Mapping[str, int]) -> int:
    if isinstance(term, Var):
        try:
            return assignment[term.name]
        except KeyError:
            raise UnboundVariable(term.name) from None
    left = eval_term(lattice, term.left, assignment)
    right = eval_term(lattice, term.right, assignment)
    if isinstance(term, Meet):
        return lattice.meet_table[left][right]
    return lattice.join_table[left][right]


_CHUNK_CELLS = 4_000_000


def _grid_eval(lattice, term, axis_of, k, memo, fixed):
    """Evaluate `term` over the assignment grid as a broadcastable ndarray."""
    hit = memo.get(term)
    if hit is not None:
        return hit
    if isinstance(term, Var):
        if term.name in fixed:
            val = lattice.join_np.dtype.type(fixed[term.name])
        else:
            i = axis_of[term.name]
            shape = [1] * k
            shape[i] = lattice.n
            val = np.arange(lattice.n, dtype=lattice.join_np.dtype).reshape(shape)
    else:
        left = _grid_eval(lattice, term.left, axis_of, k, memo, fixed)
        right = _grid_eval(lattice, term.right, axis_of, k, memo, fixed)
        table = lattice.meet_np if isinstance(term, Meet) else lattice.join_np
        val = table[left, right]
    memo[term] = val
    return val


def check_identity(lattice, s: Term, t: Term, budget: int = DEFAULT_BUDGET):
    """True iff s = t under every assignment; else the lexicographically first
    counter-assignment (dict variable -> element), ordered by sorted variable names."""
    names = tuple(sorted(set(variables(s)) | set(variables(t))))
    k = len(names)
    n = lattice.n
    if n**k > budget:
        raise BudgetError(f"{n}^{k} assignments exceed budget {budget}")
    if k == 0:
        return True

    def sweep(fixed, axis_names):
        kk = len(axis_names)
        axis_of = {name: i for i, name in enumerate(axis_names)}
        memo: dict = {}
        sv = _grid_eval(lattice, s, axis_of, kk, memo, fixed)
        tv = _grid_eval(lattice, t, axis_of, kk, memo, fixed)
        neq = sv != tv
        if not neq.any():
            return None
        neq = np.broadcast_to(neq, (n,) * kk)
        flat = int(np.argmax(neq))
        idx = np.unravel_index(flat, neq.shape)
        out = dict(fixed)
        out.update({name: int(i) for name, i in zip(axis_names, idx)})
        return out

    if n**k <= _CHUNK_CELLS or k == 1:
        hit = sweep({}, names)
        return True if hit is None else hit
    for v0 in range(n):
        hit = sweep({names[0]: v0}, names[1:])
        if hit is not None:
            return hit
    return True


def check_quasi_identity(lattice, q: QuasiIdentity | tuple, budget: int = DEFAULT_BUDGET,
                         stats: Optional[dict] = None):
    """True iff every assignment satisfying all premises satisfies the conclusion;
    else the lexicographically first violating assignment (sorted variable
    names). Later premises are evaluated only where the earlier ones survive.
    When `stats` is given, its 'satisfying' slot receives the number of
    premise-satisfying assignments."""
    if not isinstance(q, QuasiIdentity):
        premises, conclusion = q
        q = QuasiIdentity(tuple(premises), tuple(conclusion))
    names = q.variable_names()
    k = len(names)
    n = lattice.n
    if n**k > budget:
        raise BudgetError(f"{n}^{k} assignments exceed budget {budget}")
    le = lattice.le_np

    # prefix variables are looped in python, the rest gridded in numpy
    prefix_len = 0
    while prefix_len < k and n ** (k - prefix_len) > _CHUNK_CELLS:
        prefix_len += 1
    axis_names = names[prefix_len:]
    kk = len(axis_names)
    axis_of = {name: i for i, name in enumerate(axis_names)}
    satisfying = 0
    witness = None

    for prefix in itertools.product(range(n), repeat=prefix_len):
        fixed = dict(zip(names[:prefix_len], prefix))
        memo: dict = {}
        mask = None
        dead = False
        for s, t in q.premises:
            sv = _grid_eval(lattice, s, axis_of, kk, memo, fixed)
            tv = _grid_eval(lattice, t, axis_of, kk, memo, fixed)
            pm = np.broadcast_to(le[sv, tv], (n,) * kk)
            mask = pm if mask is None else (mask & pm)
            if not mask.any():
                dead = True
                break
        if dead:
            continue
        if mask is None:  # no premises
            mask = np.ones((n,) * kk, dtype=bool)
        satisfying += int(mask.sum())
        if witness is None:
            cv = _grid_eval(lattice, q.conclusion[0], axis_of, kk, memo, fixed)
            dv = _grid_eval(lattice, q.conclusion[1], axis_of, kk, memo, fixed)
            viol = mask & ~np.broadcast_to(le[cv, dv], (n,) * kk)
            if viol.any():
                idx = np.unravel_index(int(np.argmax(viol)), viol.shape)
                witness = dict(fixed)
                witness.update({name: int(i) for name, i in zip(axis_names, idx)})
                if stats is None:
                    break
    if stats is not None:
        stats["satisfying"] = satisfying
    return True if witness is None else witness


def generated_sublattice(lattice: FiniteLattice, generators: Iterable[int]):
    """Sublattice closure of `generators`; returns (sublattice, element_map) where
    element_map[i] is the original element carried by sublattice element i."""
    closed = set(generators)
    frontier = list(closed)
    while frontier:
        nxt = []
        for x in frontier:
            for y in list(closed):
                for z in (lattice.join_table[x][y], lattice.meet_table[x][y]):
                    if z not in closed:
                        closed.add(z)
                        nxt.append(z)
        frontier = nxt
    elems = tuple(sorted(closed))
    index = {e: i for i, e in enumerate(elems)}
    m = len(elems)
    up = [0] * m
    for e, i in index.items():
        for f in elems:
            if lattice.le(e, f):
                up[i] |= 1 << index[f]
    join_t = [[index[lattice.join_table[a][b]] for b in elems] for a in elems]
    meet_t = [[index[lattice.meet_table[a][b]] for b in elems] for a in elems]
    labels = tuple(lattice.label(e) for e in elems) if lattice.labels else None
    return FiniteLattice(m, up, join_t, meet_t, labels), elems


def format_lattice(lattice: FiniteLattice) -> str:
    lines = [f"lattice {lattice.n}"]
    if lattice.labels is not None:
        lines.extend(f"# element {i} {lattice.labels[i]}" for i in range(lattice.n))
    lines.extend(f"{lo} < {hi}" for lo, hi in lattice.order_poset.covers)
    return "\n".join(lines) + "\n"


def parse_lattice(text: str) -> FiniteLattice:
    """Parse the poset line format with a `lattice <n>` header; validates lattice-ness."""
    poset = parse_poset(text, header="lattice")
    try:
        return FiniteLattice.from_order(poset.n, poset.up)
    except NotALattice as exc:
        raise FormatError(f"not a lattice: {exc}") from exc
