"""Built-in identities and axioms: S, U, B, SD2, D2D, their join-irreducible forms,
the quasi-identity theta, and fast/brute-force membership tests for the variety SUB."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnknownTag
from .lattice import (
    DEFAULT_BUDGET,
    FiniteLattice,
    check_identity,
    check_quasi_identity,
    eval_term,
)
from .poset import bits
from .terms import QuasiIdentity, Term, Var, join, meet

IDENTITY_TAGS = ("S", "U", "B", "SD2", "D2D")
JIRR_TAGS = ("Sj", "Uj", "Bj", "D2Dj")
QUASI_TAGS = ("theta",)

_brute_memo: dict = {}
_fast_memo: dict = {}


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of one axiom check; `witness` re-evaluates to a violation when set."""

    tag: str
    holds: bool
    witness: Optional[dict] = None

    def __post_init__(self):
        assert self.holds == (self.witness is None)


def builtin_identity(tag: str) -> tuple[Term, Term]:
    a, b, c, x, y, z = (Var(n) for n in "abcxyz")
    if tag == "S":
        a_, b_, b0, b1, c_ = Var("a"), Var("b"), Var("b0"), Var("b1"), Var("c")
        bp = b_ & (b0 | b1)
        lhs = a_ & (bp | c_)
        rhs = join(
            a_ & bp,
            meet(a_, b0 | c_, (bp & (a_ | b0)) | c_),
            meet(a_, b1 | c_, (bp & (a_ | b1)) | c_),
        )
        return lhs, rhs
    if tag == "U":
        x_, x0, x1, x2 = Var("x"), Var("x0"), Var("x1"), Var("x2")
        lhs = meet(x_, x0 | x1, x1 | x2, x0 | x2)
        rhs = join(
            meet(x_, x0, x1 | x2),
            meet(x_, x1, x0 | x2),
            meet(x_, x2, x0 | x1),
        )
        return lhs, rhs
    if tag == "B":
        x_, a0, a1, b0, b1 = Var("x"), Var("a0"), Var("a1"), Var("b0"), Var("b1")
        core = meet(x_, a0 | a1, b0 | b1)
        lhs = core
        rhs = join(
            meet(x_, a0, b0 | b1),
            meet(x_, b0, a0 | a1),
            meet(x_, a1, b0 | b1),
            meet(x_, b1, a0 | a1),
            meet(core, a0 | b0, a1 | b1),
            meet(core, a0 | b1, a1 | b0),
        )
        return lhs, rhs
    if tag == "SD2":
        lhs = x | (y & z)
        rhs = x | (y & (x | (z & (x | y))))
        return lhs, rhs
    if tag == "D2D":
        lhs = a & join(x, y, z)
        rhs = join(a & (x | y), a & (x | z), a & (y | z))
        return lhs, rhs
    raise UnknownTag(tag)


def builtin_quasi_identity(tag: str = "theta") -> QuasiIdentity:
    if tag != "theta":
        raise UnknownTag(tag)
    a, b, c = Var("a"), Var("b"), Var("c")
    ap, bp, cp = Var("a'"), Var("b'"), Var("c'")
    premises = (
        (a, (ap | b) & (ap | c)),
        (b, (bp | a) & (bp | c)),
        (c, (cp | a) & (cp | b)),
        (join(ap & a, bp & b, cp & c, a & b, a & c, b & c), meet(ap, bp, cp)),
    )
    return QuasiIdentity(premises, (a, ap))


def builtin_term(tag: str):
    """The identity pair, or the quasi-identity structure, named by `tag`."""
    if tag in IDENTITY_TAGS:
        return builtin_identity(tag)
    if tag in QUASI_TAGS:
        return builtin_quasi_identity(tag)
    raise UnknownTag(tag)


def _axiom_sj(lattice: FiniteLattice) -> Optional[dict]:
    jirr = lattice.jirr
    le = lattice.le
    jn = lattice.join_table
    sdn = lattice.strict_down
    n = lattice.n
    for a in jirr:
        for c in jirr:
            # wmask: all w with a <= w v c
            wmask = 0
            for w in range(n):
                if le(a, jn[w][c]):
                    wmask |= 1 << w
            for b in jirr:
                if b == a or not le(a, jn[b][c]):
                    continue
                if sdn[b] & wmask:
                    continue  # some x < b already covers, nothing to prove
                for b0 in jirr:
                    for b1 in jirr:
                        if not le(b, jn[b0][b1]):
                            continue
                        if (le(b, jn[a][b0]) and le(a, jn[b0][c])) or (
                            le(b, jn[a][b1]) and le(a, jn[b1][c])
                        ):
                            continue
                        return {"a": a, "b": b, "b0": b0, "b1": b1, "c": c}
    return None


def _axiom_uj(lattice: FiniteLattice) -> Optional[dict]:
    jirr = lattice.jirr
    le = lattice.le
    jn = lattice.join_table
    for x in jirr:
        for x0 in jirr:
            if le(x, x0):
                continue
            for x1 in jirr:
                if le(x, x1) or not le(x, jn[x0][x1]):
                    continue
                for x2 in jirr:
                    if le(x, x2):
                        continue
                    if le(x, jn[x0][x2]) and le(x, jn[x1][x2]):
                        return {"x": x, "x0": x0, "x1": x1, "x2": x2}
    return None


def _axiom_bj(lattice: FiniteLattice) -> Optional[dict]:
    jirr = lattice.jirr
    le = lattice.le
    jn = lattice.join_table
    for x in jirr:
        for a0 in jirr:
            if le(x, a0):
                continue
            for a1 in jirr:
                if le(x, a1) or not le(x, jn[a0][a1]):
                    continue
                for b0 in jirr:
                    if le(x, b0):
                        continue
                    for b1 in jirr:
                        if le(x, b1) or not le(x, jn[b0][b1]):
                            continue
                        if le(x, jn[a0][b0]) and le(x, jn[a1][b1]):
                            continue
                        if le(x, jn[a0][b1]) and le(x, jn[a1][b0]):
                            continue
                        return {"x": x, "a0": a0, "a1": a1, "b0": b0, "b1": b1}
    return None


def _axiom_d2dj(lattice: FiniteLattice) -> Optional[dict]:
    n = lattice.n
    jn = lattice.join_np
    le = lattice.le_np
    pair = None
    for p in lattice.jirr:
        lp = le[p]
        sat2 = lp[jn]  # sat2[x, y] : p <= x v y
        triple = lp[jn[jn, :]]  # triple[x, y, z] : p <= (x v y) v z
        ok2 = sat2[:, :, None] | sat2[:, None, :] | sat2[None, :, :]
        viol = triple & ~ok2
        if viol.any():
            x, y, z = np.unravel_index(int(np.argmax(viol)), viol.shape)
            pair = {"p": p, "a": int(x), "b": int(y), "c": int(z)}
            break
    return pair


def satisfies_jirr_axiom(lattice: FiniteLattice, tag: str) -> AxiomReport:
    """Exhaustive check of one join-irreducible axiom; first witness reported."""
    sweeps = {"Sj": _axiom_sj, "Uj": _axiom_uj, "Bj": _axiom_bj, "D2Dj": _axiom_d2dj}
    if tag not in sweeps:
        raise UnknownTag(tag)
    witness = sweeps[tag](lattice)
    return AxiomReport(tag, witness is None, witness)


def satisfies_SUB_fast(lattice: FiniteLattice) -> AxiomReport:
    """Membership test via the join-irreducible axioms.

    For finite lattices the hypotheses of the axiom-to-identity transfer reduce
    to dual 2-distributivity on join-irreducibles plus Sj, Uj, Bj; the first
    failing axiom is reported.
    """
    hit = _fast_memo.get(lattice.key())
    if hit is not None:
        return hit
    report = AxiomReport("SUBj", True)
    for tag in ("D2Dj", "Sj", "Uj", "Bj"):
        rep = satisfies_jirr_axiom(lattice, tag)
        if not rep.holds:
            report = rep
            break
    _fast_memo[lattice.key()] = report
    return report


def satisfies_SUB_bruteforce(lattice: FiniteLattice, budget: int = DEFAULT_BUDGET) -> AxiomReport:
    """Membership test by sweeping S, U, B over all assignments."""
    hit = _brute_memo.get(lattice.key())
    if hit is not None:
        return hit
    report = AxiomReport("SUB", True)
    for tag in ("S", "U", "B"):
        s, t = builtin_identity(tag)
        res = check_identity(lattice, s, t, budget=budget)
        if res is not True:
            report = AxiomReport(tag, False, res)
            break
    _brute_memo[lattice.key()] = report
    return report


def check_theta(lattice: FiniteLattice, budget: int = DEFAULT_BUDGET,
                stats: Optional[dict] = None) -> AxiomReport:
    """Exhaustive premise-pruned check of theta."""
    res = check_quasi_identity(lattice, builtin_quasi_identity(), budget=budget, stats=stats)
    if res is True:
        return AxiomReport("theta", True)
    return AxiomReport("theta", False, res)


DEFAULT_SAMPLE_SEED = 1729


@dataclass(frozen=True)
class ThetaSampleStats:
    premise_hits: int
    draws: int
    exhaustive: bool


_REPAIR_ROUNDS = 10


def _theta_sample_batch(lattice, rng, batch):
    """Draw assignments biased toward the premise region, then repair.

    Mixture per batch: a quarter fully uniform; half with a', b', c' pushed up
    (join of two uniforms) and a, b, c pushed down (meet of two uniforms); a
    quarter with b' and c' cloned from a'. The covering premises are then
    enforced by iterating x <- x ^ (x' v y) ^ (x' v z); results are verified
    exactly afterwards, so the repair cap only trades hit rate, not soundness.
    """
    n = lattice.n
    jn, mt = lattice.join_np, lattice.meet_np

    def uniform(size=batch):
        return rng.integers(0, n, size=size, dtype=np.int64)

    q = batch // 4
    ap, bp, cp = uniform(), uniform(), uniform()
    ap[q:] = jn[ap[q:], uniform(batch - q)]
    bp[q:] = jn[bp[q:], uniform(batch - q)]
    cp[q:] = jn[cp[q:], uniform(batch - q)]
    bp[3 * q:] = ap[3 * q:]
    cp[3 * q:] = ap[3 * q:]
    a, b, c = uniform(), uniform(), uniform()
    a[q:] = mt[a[q:], uniform(batch - q)]
    b[q:] = mt[b[q:], uniform(batch - q)]
    c[q:] = mt[c[q:], uniform(batch - q)]
    for _ in range(_REPAIR_ROUNDS):
        a = mt[mt[a, jn[ap, b]], jn[ap, c]]
        b = mt[mt[b, jn[bp, a]], jn[bp, c]]
        c = mt[mt[c, jn[cp, a]], jn[cp, b]]
    return a, b, c, ap, bp, cp


_theta_sampled_memo: dict = {}


def check_theta_sampled(
    lattice: FiniteLattice,
    min_hits: int = 10**6,
    seed: int = DEFAULT_SAMPLE_SEED,
    batch: int = 1 << 17,
    max_draws: int = 10**9,
    exhaustive_cells: int = 20**6,
) -> tuple[AxiomReport, ThetaSampleStats]:
    """Randomized theta check: draw until `min_hits` premise-satisfying
    assignments have been verified (falling back to the exhaustive sweep when
    the full grid is within `exhaustive_cells`). Results are memoized per
    lattice structure, seed, and hit target."""
    memo_key = (lattice.key(), min_hits, seed)
    hit = _theta_sampled_memo.get(memo_key)
    if hit is not None:
        return hit
    n = lattice.n
    if n**6 <= exhaustive_cells:
        grid_stats: dict = {}
        report = check_theta(lattice, budget=max(DEFAULT_BUDGET, n**6), stats=grid_stats)
        out = report, ThetaSampleStats(
            premise_hits=grid_stats.get("satisfying", 0), draws=n**6, exhaustive=True
        )
        _theta_sampled_memo[memo_key] = out
        return out
    rng = np.random.default_rng(seed)
    le = lattice.le_np
    jn, mt = lattice.join_np, lattice.meet_np
    hits = 0
    draws = 0
    while hits < min_hits:
        if draws >= max_draws:
            raise RuntimeError(
                f"theta sampler drew {draws} assignments but found only {hits} premise hits"
            )
        a, b, c, ap, bp, cp = _theta_sample_batch(lattice, rng, batch)
        draws += batch
        ok = le[a, mt[jn[ap, b], jn[ap, c]]]
        ok &= le[b, mt[jn[bp, a], jn[bp, c]]]
        ok &= le[c, mt[jn[cp, a], jn[cp, b]]]
        lhs = jn[jn[jn[jn[jn[mt[ap, a], mt[bp, b]], mt[cp, c]], mt[a, b]], mt[a, c]], mt[b, c]]
        ok &= le[lhs, mt[mt[ap, bp], cp]]
        hits += int(ok.sum())
        bad = ok & ~le[a, ap]
        if bad.any():
            i = int(np.argmax(bad))
            witness = {
                "a": int(a[i]), "b": int(b[i]), "c": int(c[i]),
                "a'": int(ap[i]), "b'": int(bp[i]), "c'": int(cp[i]),
            }
            return (
                AxiomReport("theta", False, witness),
                ThetaSampleStats(hits, draws, False),
            )
    out = AxiomReport("theta", True), ThetaSampleStats(hits, draws, False)
    _theta_sampled_memo[memo_key] = out
    return out


def recheck_witness(lattice: FiniteLattice, tag: str, witness: dict) -> bool:
    """True iff `witness` really violates the tagged identity/axiom/quasi-identity."""
    if tag in IDENTITY_TAGS:
        s, t = builtin_identity(tag)
        return eval_term(lattice, s, witness) != eval_term(lattice, t, witness)
    if tag == "theta":
        q = builtin_quasi_identity()
        for s, t in q.premises:
            if not lattice.le(eval_term(lattice, s, witness), eval_term(lattice, t, witness)):
                return False
        s, t = q.conclusion
        return not lattice.le(eval_term(lattice, s, witness), eval_term(lattice, t, witness))
    if tag in JIRR_TAGS:
        return _recheck_jirr(lattice, tag, witness)
    raise UnknownTag(tag)


def _recheck_jirr(lattice: FiniteLattice, tag: str, w: dict) -> bool:
    le, jn = lattice.le, lattice.join_table
    jset = set(lattice.jirr)
    if tag == "D2Dj":
        p, a, b, c = w["p"], w["a"], w["b"], w["c"]
        return (
            p in jset
            and le(p, jn[jn[a][b]][c])
            and not (le(p, jn[a][b]) or le(p, jn[a][c]) or le(p, jn[b][c]))
        )
    if not all(v in jset for v in w.values()):
        return False
    if tag == "Uj":
        x, x0, x1, x2 = w["x"], w["x0"], w["x1"], w["x2"]
        return (
            le(x, jn[x0][x1]) and le(x, jn[x0][x2]) and le(x, jn[x1][x2])
            and not (le(x, x0) or le(x, x1) or le(x, x2))
        )
    if tag == "Bj":
        x, a0, a1, b0, b1 = w["x"], w["a0"], w["a1"], w["b0"], w["b1"]
        return (
            le(x, jn[a0][a1]) and le(x, jn[b0][b1])
            and not any(le(x, v) for v in (a0, a1, b0, b1))
            and not (le(x, jn[a0][b0]) and le(x, jn[a1][b1]))
            and not (le(x, jn[a0][b1]) and le(x, jn[a1][b0]))
        )
    if tag == "Sj":
        a, b, b0, b1, c = w["a"], w["b"], w["b0"], w["b1"], w["c"]
        if a == b or not (le(a, jn[b][c]) and le(b, jn[b0][b1])):
            return False
        if any(le(a, jn[x][c]) for x in bits(lattice.strict_down[b])):
            return False
        for bi in (b0, b1):
            if le(b, jn[a][bi]) and le(a, jn[bi][c]):
                return False
        return True
    raise UnknownTag(tag)
