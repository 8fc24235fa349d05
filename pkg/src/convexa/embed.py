"""Embedding constructions: the small poset R with the map phi, and the
tree-like poset Gamma of D-increasing sequences with the map psi."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .convexity import join_mask, set_label
from .errors import (
    AcyclicityViolation,
    ConvexityViolation,
    DCycleError,
    DepthCapExceeded,
    HomomorphismViolation,
    NotInSUB,
    TreeLikenessViolation,
)
from .identities import satisfies_SUB_fast
from .jdep import C_set, D_sets, has_D_cycle, udav_bond_partition
from .lattice import FiniteLattice
from .poset import Poset, bits, closure_masks, find_crown, is_order_convex, is_tree_like


@dataclass(frozen=True, order=True)
class RPoint:
    """A point of R: ('0', p, p) for the singleton of p, or ('+'/'-', a, b)
    for the signed copies of a D-pair a D b. The carried value e is `b`."""

    kind: str
    a: int
    b: int

    @property
    def e(self) -> int:
        return self.b

    def label(self) -> str:
        if self.kind == "0":
            return f"<{self.a}>"
        return f"<{self.a},{self.b},{self.kind}>"


GammaSeq = tuple[int, ...]


def gamma_label(seq: GammaSeq) -> str:
    return "[" + ".".join(map(str, seq)) + "]"


@dataclass(frozen=True)
class EmbeddingResult:
    """A verified 0,1-embedding of a lattice into Co(target).

    `masks[x]` is the image of lattice element x as a bitmask over target
    points; `verified` records that the full pairwise check ran."""

    target: Poset
    labels: tuple[str, ...]
    masks: tuple[int, ...]
    verified: bool
    stats: dict

    def image_elements(self, x: int) -> tuple[int, ...]:
        return tuple(bits(self.masks[x]))


def _partition_sides(lattice, flip: frozenset[int]):
    sides = {}
    for p in lattice.jirr:
        part = udav_bond_partition(lattice, p)
        if p in flip:
            sides[p] = (part.B, part.A)
        else:
            sides[p] = (part.A, part.B)
    return sides


def _close_and_check(points, edges, context: str) -> Poset:
    index = {pt: i for i, pt in enumerate(points)}
    pairs = [(index[u], index[v]) for u, v in edges]
    try:
        up = closure_masks(len(points), pairs)
    except Exception as exc:
        raise AcyclicityViolation(f"{context}: generated relation has a cycle: {exc}") from exc
    poset = Poset(len(points), up)
    if set(poset.covers) != set(pairs):
        raise AcyclicityViolation(f"{context}: generating relation is not the predecessor relation")
    return poset


@dataclass(frozen=True)
class RBuild:
    poset: Poset
    points: tuple[RPoint, ...]
    e: tuple[int, ...]

    def labels(self) -> tuple[str, ...]:
        return tuple(pt.label() for pt in self.points)


def build_R(lattice: FiniteLattice, flip: Iterable[int] = ()) -> RBuild:
    """The finite poset R on singleton and signed D-pair points.

    Predecessor rules: below <p> sit <p,a,-> for a in A_p and above it
    <p,b,+> for b in B_p; a signed point <a,b,s> sits between <b,x,-> and
    <b,y,+> with the sides chosen by C(a,b), crossing over when s is '-'.
    `flip` swaps the two blocks of the listed join-irreducibles."""
    report = satisfies_SUB_fast(lattice)
    if not report.holds:
        raise NotInSUB(report)
    flip = frozenset(flip)
    dsets = D_sets(lattice)
    sides = _partition_sides(lattice, flip)
    zeros = [RPoint("0", p, p) for p in lattice.jirr]
    plus = [RPoint("+", a, b) for a in lattice.jirr for b in dsets[a]]
    minus = [RPoint("-", a, b) for a in lattice.jirr for b in dsets[a]]
    points = tuple(zeros + sorted(plus) + sorted(minus))
    edges = []
    for p in lattice.jirr:
        A, B = sides[p]
        for a in sorted(A):
            edges.append((RPoint("-", p, a), RPoint("0", p, p)))
        for b in sorted(B):
            edges.append((RPoint("0", p, p), RPoint("+", p, b)))
    for a in lattice.jirr:
        for b in dsets[a]:
            inside = C_set(lattice, a, b)
            outside = [c for c in dsets[b] if c not in inside]
            for c in outside:
                edges.append((RPoint("-", b, c), RPoint("+", a, b)))
                edges.append((RPoint("-", a, b), RPoint("+", b, c)))
            for d in sorted(inside):
                edges.append((RPoint("+", a, b), RPoint("+", b, d)))
                edges.append((RPoint("-", b, d), RPoint("-", a, b)))
    poset = _close_and_check(points, edges, "R")
    return RBuild(poset, points, tuple(pt.e for pt in points))


def size_bound(njirr: int) -> int:
    """Guaranteed upper bound for |R| in terms of the join-irreducible count."""
    if njirr <= 1:
        return 1
    return 2 * njirr * njirr - 5 * njirr + 4


def _verify_embedding(lattice: FiniteLattice, target: Poset, masks: list[int], context: str):
    for x, m in enumerate(masks):
        if not is_order_convex(target, m):
            raise ConvexityViolation(f"{context}: image of element {x} is not convex")
    if len(set(masks)) != lattice.n:
        raise HomomorphismViolation(f"{context}: image map is not injective")
    if masks[lattice.bottom] != 0 or masks[lattice.top] != target.full:
        raise HomomorphismViolation(f"{context}: bounds are not preserved")
    for x in range(lattice.n):
        for y in range(x, lattice.n):
            if masks[lattice.meet(x, y)] != masks[x] & masks[y]:
                raise HomomorphismViolation(f"{context}: meet fails at ({x}, {y})")
            if masks[lattice.join(x, y)] != join_mask(target, masks[x], masks[y]):
                raise HomomorphismViolation(f"{context}: join fails at ({x}, {y})")


def phi(lattice: FiniteLattice, rb: RBuild) -> EmbeddingResult:
    """phi(x) = the points of R whose carried value lies below x; fully verified."""
    masks = []
    for x in range(lattice.n):
        m = 0
        for i, e in enumerate(rb.e):
            if lattice.le(e, x):
                m |= 1 << i
        masks.append(m)
    _verify_embedding(lattice, rb.poset, masks, "phi")
    stats = {
        "source_size": lattice.n,
        "jirr": len(lattice.jirr),
        "target_size": rb.poset.n,
        "bound": size_bound(len(lattice.jirr)),
    }
    return EmbeddingResult(rb.poset, rb.labels(), tuple(masks), True, stats)


@dataclass(frozen=True)
class GammaBuild:
    poset: Poset
    seqs: tuple[GammaSeq, ...]
    e: tuple[int, ...]
    above_parent: dict[GammaSeq, bool]
    sides: dict[GammaSeq, tuple[frozenset[int], frozenset[int]]]

    def labels(self) -> tuple[str, ...]:
        return tuple(gamma_label(s) for s in self.seqs)


def build_Gamma(
    lattice: FiniteLattice,
    depth_cap: Optional[int] = None,
    flip: Iterable[int] = (),
) -> GammaBuild:
    """The tree-like poset of D-increasing sequences of join-irreducibles.

    Level 0 uses the same two-block choice as build_R; at deeper levels the
    blocks come from C(previous, last), oriented by the direction of the
    parent edge. Fails with DCycleError when D has a cycle (the construction
    would not terminate)."""
    report = satisfies_SUB_fast(lattice)
    if not report.holds:
        raise NotInSUB(report)
    if has_D_cycle(lattice):
        raise DCycleError("join-dependency relation has a cycle")
    flip = frozenset(flip)
    dsets = D_sets(lattice)
    cap = depth_cap if depth_cap is not None else len(lattice.jirr) + 1
    sides0 = _partition_sides(lattice, flip)

    seqs: list[GammaSeq] = [(p,) for p in lattice.jirr]
    above_parent: dict[GammaSeq, bool] = {}
    sides: dict[GammaSeq, tuple[frozenset[int], frozenset[int]]] = {}
    edges: list[tuple[GammaSeq, GammaSeq]] = []

    level: list[GammaSeq] = list(seqs)
    for alpha in level:
        sides[alpha] = (frozenset(sides0[alpha[0]][0]), frozenset(sides0[alpha[0]][1]))
    while level:
        nxt: list[GammaSeq] = []
        for alpha in level:
            A, B = sides[alpha]
            if (A or B) and len(alpha) >= cap:
                raise DepthCapExceeded(f"extending {alpha} would exceed depth cap {cap}")
            for x in sorted(A):
                child = alpha + (x,)
                edges.append((child, alpha))
                above_parent[child] = False
                nxt.append(child)
            for y in sorted(B):
                child = alpha + (y,)
                edges.append((alpha, child))
                above_parent[child] = True
                nxt.append(child)
        for child in nxt:
            e, pe = child[-1], child[-2]
            inside = C_set(lattice, pe, e)
            outside = frozenset(dsets[e]) - inside
            if above_parent[child]:
                sides[child] = (outside, inside)
            else:
                sides[child] = (inside, outside)
        seqs.extend(nxt)
        level = nxt

    order = tuple(sorted(seqs))
    poset = _close_and_check(order, edges, "Gamma")
    if not is_tree_like(poset):
        raise TreeLikenessViolation("Gamma is not tree-like")
    return GammaBuild(poset, order, tuple(s[-1] for s in order), above_parent, sides)


def psi(lattice: FiniteLattice, gb: GammaBuild) -> EmbeddingResult:
    """psi(x) = the sequences whose extremity lies below x; fully verified,
    with the target re-checked to be tree-like and crown-free."""
    masks = []
    for x in range(lattice.n):
        m = 0
        for i, e in enumerate(gb.e):
            if lattice.le(e, x):
                m |= 1 << i
        masks.append(m)
    _verify_embedding(lattice, gb.poset, masks, "psi")
    if not is_tree_like(gb.poset):
        raise TreeLikenessViolation("psi target is not tree-like")
    crown = find_crown(gb.poset)
    if crown is not None:
        raise TreeLikenessViolation(f"psi target contains a crown: {crown.pairs}")
    stats = {
        "source_size": lattice.n,
        "jirr": len(lattice.jirr),
        "target_size": gb.poset.n,
    }
    return EmbeddingResult(gb.poset, gb.labels(), tuple(masks), True, stats)


def project_to_r(gb: GammaBuild, rb: RBuild) -> tuple[int, ...]:
    """The point map Gamma -> R: singletons to singleton points, longer
    sequences to the signed pair of their last step. Checks that every
    predecessor edge of Gamma maps to a predecessor edge of R."""
    r_index = {pt: i for i, pt in enumerate(rb.points)}
    out = []
    for seq in gb.seqs:
        if len(seq) == 1:
            out.append(r_index[RPoint("0", seq[0], seq[0])])
        else:
            sign = "+" if gb.above_parent[seq] else "-"
            out.append(r_index[RPoint(sign, seq[-2], seq[-1])])
    rcov = set(rb.poset.covers)
    for lo, hi in gb.poset.covers:
        if (out[lo], out[hi]) not in rcov:
            raise AcyclicityViolation(
                f"projection does not send edge {gb.seqs[lo]} < {gb.seqs[hi]} to an R edge"
            )
    return tuple(out)
