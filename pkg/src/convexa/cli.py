"""Command-line frontend: co, check, report, embed, gamma, crown, treelike,
theta, decide, catalog.

Exit codes: 0 = holds / VALID / nothing found, 1 = fails / counterexample
found, 2 = usage, parse, size, or budget error.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import decide as decide_mod
from . import embed as embed_mod
from . import identities as ident_mod
from .convexity import DEFAULT_SUBSET_CAP, co_lattice, set_label
from .errors import (
    BudgetError,
    ConvexaError,
    DCycleError,
    FormatError,
    NotInSUB,
    SizeError,
)
from .lattice import DEFAULT_BUDGET, FiniteLattice, format_lattice, parse_lattice
from .poset import Poset, bits, find_crown, find_path, format_poset, is_tree_like, parse_poset
from .terms import parse_quasi, parse_term, to_sexp

DEFAULT_SEED = 1729


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc


def _sniff_header(text: str) -> str:
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            return stripped.split()[0]
    return ""


def _load_poset(path: str) -> Poset:
    return parse_poset(_read(path))


def _load_lattice_or_co(path: str, cap: int):
    """A lattice file as-is; a poset file becomes its convex-set lattice."""
    text = _read(path)
    head = _sniff_header(text)
    if head == "poset":
        return co_lattice(parse_poset(text), cap=cap)
    return parse_lattice(text)


def _subset_cap(args) -> int:
    env = os.environ.get("CONVEXA_MAX_SUBSET_BITS")
    if getattr(args, "cap", None) is not None:
        return args.cap
    if env is not None:
        return int(env)
    return DEFAULT_SUBSET_CAP


def _prologue(out, args, **extra):
    fields = {"seed": getattr(args, "seed", DEFAULT_SEED), **extra}
    meta = " ".join(f"{k}={v}" for k, v in fields.items())
    print(f"# convexa {args.command} {meta}", file=out)


def _axiom_line(report) -> str:
    if report.holds:
        return f"AXIOM {report.tag} HOLDS"
    witness = " ".join(f"{k}={v}" for k, v in sorted(report.witness.items()))
    return f"AXIOM {report.tag} FAILS {witness}"


def _cmd_co(args, out) -> int:
    poset = _load_poset(args.poset)
    lat = co_lattice(poset, cap=_subset_cap(args))
    _prologue(out, args, cap=_subset_cap(args), poset_size=poset.n)
    out.write(format_lattice(lat))
    return 0


def _cmd_check(args, out) -> int:
    lat = _load_lattice_or_co(args.lattice, _subset_cap(args))
    _prologue(out, args, lattice_size=lat.n)
    fast_reports = [ident_mod.satisfies_jirr_axiom(lat, tag) for tag in ("D2Dj", "Sj", "Uj", "Bj")]
    for rep in fast_reports:
        print(_axiom_line(rep), file=out)
    brute = ident_mod.satisfies_SUB_bruteforce(lat, budget=args.budget)
    for tag in ("S", "U", "B"):
        if not brute.holds and brute.tag == tag:
            print(_axiom_line(brute), file=out)
            break
        print(f"AXIOM {tag} HOLDS", file=out)
    fast_holds = all(r.holds for r in fast_reports)
    print(f"AGREEMENT fast={fast_holds} brute={brute.holds}", file=out)
    verdict = "IN-SUB" if fast_holds and brute.holds else "NOT-IN-SUB"
    print(verdict, file=out)
    return 0 if verdict == "IN-SUB" else 1


def _cmd_report(args, out) -> int:
    lat = _load_lattice_or_co(args.lattice, _subset_cap(args))
    _prologue(out, args, lattice_size=lat.n, budget=args.budget)
    for tag in ("D2Dj", "Sj", "Uj", "Bj"):
        print(_axiom_line(ident_mod.satisfies_jirr_axiom(lat, tag)), file=out)
    from .lattice import check_identity

    holds_all = True
    for tag in ("S", "U", "B", "SD2", "D2D"):
        s, t = ident_mod.builtin_identity(tag)
        res = check_identity(lat, s, t, budget=args.budget)
        if res is True:
            print(f"AXIOM {tag} HOLDS", file=out)
        else:
            holds_all = False
            witness = " ".join(f"{k}={v}" for k, v in sorted(res.items()))
            print(f"AXIOM {tag} FAILS {witness}", file=out)
    return 0 if holds_all else 1


def _cmd_embed(args, out) -> int:
    lat = _load_lattice_or_co(args.lattice, _subset_cap(args))
    _prologue(out, args, lattice_size=lat.n)
    try:
        rb = embed_mod.build_R(lat)
        result = embed_mod.phi(lat, rb)
    except NotInSUB as exc:
        print(f"NOT-IN-SUB {exc}", file=out)
        return 1
    labels = result.labels
    for i, lbl in enumerate(labels):
        print(f"# label {i} {lbl}", file=out)
    out.write(format_poset(result.target))
    for x in range(lat.n):
        names = ",".join(labels[i] for i in result.image_elements(x))
        print(f"map {x} -> {{{names}}}", file=out)
    bound = result.stats["bound"]
    print(f"|R|={result.target.n} bound={bound} verified={str(result.verified).lower()}", file=out)
    return 0


def _cmd_gamma(args, out) -> int:
    lat = _load_lattice_or_co(args.lattice, _subset_cap(args))
    _prologue(out, args, lattice_size=lat.n)
    try:
        gb = embed_mod.build_Gamma(lat)
        result = embed_mod.psi(lat, gb)
    except NotInSUB as exc:
        print(f"NOT-IN-SUB {exc}", file=out)
        return 1
    except DCycleError as exc:
        print(f"DCycleError {exc}", file=out)
        return 1
    labels = result.labels
    for i, lbl in enumerate(labels):
        print(f"# label {i} {lbl}", file=out)
    out.write(format_poset(result.target))
    for x in range(lat.n):
        names = ",".join(labels[i] for i in result.image_elements(x))
        print(f"map {x} -> {{{names}}}", file=out)
    print(
        f"|Gamma|={result.target.n} tree-like=true verified={str(result.verified).lower()}",
        file=out,
    )
    return 0


def _cmd_crown(args, out) -> int:
    poset = _load_poset(args.poset)
    _prologue(out, args, poset_size=poset.n)
    crown = find_crown(poset)
    if crown is None:
        print("CROWN-FREE", file=out)
        return 0
    pairs = " ".join(f"({a},{b})" for a, b in crown.pairs)
    print(f"CROWN {len(crown.pairs)} {pairs}", file=out)
    return 1


def _cmd_treelike(args, out) -> int:
    poset = _load_poset(args.poset)
    _prologue(out, args, poset_size=poset.n)
    if is_tree_like(poset):
        print("TREE-LIKE", file=out)
        return 0
    # witness: either a cover-graph cycle or a disconnected comparable pair
    cycle = _cover_cycle(poset)
    if cycle is not None:
        print(f"NOT-TREE-LIKE cycle {'-'.join(map(str, cycle))}", file=out)
    else:
        print("NOT-TREE-LIKE", file=out)
    return 1


def _cover_cycle(poset: Poset):
    """A cycle in the undirected cover graph, if any (DFS back-edge)."""
    color: dict[int, int] = {}
    parent: dict[int, int] = {}
    adj = poset.cover_neighbors
    for s in range(poset.n):
        if s in color:
            continue
        stack = [(s, -1)]
        while stack:
            x, par = stack.pop()
            if x in color:
                continue
            color[x] = 1
            parent[x] = par
            for y in bits(adj[x]):
                if y == par:
                    continue
                if y in color:
                    cycle = [x]
                    while cycle[-1] != y and parent[cycle[-1]] != -1:
                        cycle.append(parent[cycle[-1]])
                    return cycle
                stack.append((y, x))
    return None


def _cmd_theta(args, out) -> int:
    lat = _load_lattice_or_co(args.input, _subset_cap(args))
    _prologue(out, args, lattice_size=lat.n, budget=args.budget, samples=args.samples)
    if args.samples:
        report, stats = ident_mod.check_theta_sampled(
            lat, min_hits=args.samples, seed=args.seed
        )
        print(
            f"# premise-hits={stats.premise_hits} draws={stats.draws} "
            f"exhaustive={str(stats.exhaustive).lower()}",
            file=out,
        )
    else:
        report = ident_mod.check_theta(lat, budget=args.budget)
    print(_axiom_line(report), file=out)
    return 0 if report.holds else 1


def _cmd_decide(args, out) -> int:
    _prologue(out, args, max_size=args.max_size, budget=args.budget, filter=args.filter)
    if args.quasi is not None:
        if args.quasi in ident_mod.QUASI_TAGS:
            q = ident_mod.builtin_quasi_identity(args.quasi)
        else:
            q = parse_quasi(_read(args.quasi))
        result = decide_mod.search_quasi_counterexample(
            q,
            max_size=args.max_size if args.max_size is not None else decide_mod.ENUMERATION_CAP,
            budget=args.budget,
            poset_filter=args.filter,
        )
        if result.found is not None:
            poset, assignment = result.found
            print(f"FOUND poset={poset!r}", file=out)
            for var, val in sorted(assignment.items()):
                print(f"  {var} = {set_label(sum(1 << e for e in val))}", file=out)
            return 1
        print(f"ABSENT checked={result.checked} budget_hit={str(result.budget_hit).lower()}", file=out)
        return 2 if result.budget_hit else 0
    if args.term_s is None or args.term_t is None:
        print("decide: need --term-s and --term-t, or --quasi", file=sys.stderr)
        return 2
    s = parse_term(_read(args.term_s))
    t = parse_term(_read(args.term_t))
    result = decide_mod.decide_identity_in_SUB(
        s, t, max_size=args.max_size, budget=args.budget
    )
    if result.verdict == "VALID":
        print(f"VALID bound={result.bound} checked={result.checked}", file=out)
        return 0
    print(f"INVALID bound={result.bound} witness={result.witness_poset!r}", file=out)
    for var, val in sorted(result.witness_assignment.items()):
        print(f"  {var} = {set_label(sum(1 << e for e in val))}", file=out)
    return 1


def _cmd_catalog(args, out) -> int:
    catalog = decide_mod.enumerate_posets(args.size)
    _prologue(out, args, size=args.size, count=len(catalog.posets))
    for i, poset in enumerate(catalog.posets):
        print(f"# poset {i}", file=out)
        out.write(format_poset(poset))
    return 0


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="convexa", description=__doc__)
    top.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--cap", type=int, default=None,
                       help="max poset size for convex-subset enumeration")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="max assignments per exhaustive sweep")
        return p

    p = add("co", _cmd_co, help="print the convex-set lattice of a poset")
    p.add_argument("poset")
    p = add("check", _cmd_check, help="SUB membership: axiom suite + agreement")
    p.add_argument("lattice")
    p = add("report", _cmd_report, help="full axiom report for a lattice")
    p.add_argument("lattice")
    p = add("embed", _cmd_embed, help="build the small target poset and the verified embedding")
    p.add_argument("lattice")
    p = add("gamma", _cmd_gamma, help="build the tree-like target poset and the verified embedding")
    p.add_argument("lattice")
    p = add("crown", _cmd_crown, help="search a poset for a crown")
    p.add_argument("poset")
    p = add("treelike", _cmd_treelike, help="tree-likeness verdict for a poset")
    p.add_argument("poset")
    p = add("theta", _cmd_theta, help="check the six-variable quasi-identity")
    p.add_argument("input", help="lattice or poset file (posets are turned into their convex-set lattice)")
    p.add_argument("--samples", type=int, default=None,
                   help="randomized mode: require this many premise-satisfying samples")
    p = add("decide", _cmd_decide, help="decide an identity over all convex-set lattices, or hunt a quasi-identity counterexample")
    p.add_argument("--term-s", default=None)
    p.add_argument("--term-t", default=None)
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--quasi", default=None, help="builtin tag (theta) or a quasi-identity file")
    p.add_argument("--filter", choices=("all", "crown-free", "has-crown"), default="all")
    p = add("catalog", _cmd_catalog, help="dump all posets of one size up to isomorphism")
    p.add_argument("size", type=int)
    return top


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args, out)
    except FormatError as exc:
        where = f":{exc.line}" if exc.line is not None else ""
        print(f"error{where}: {exc}", file=sys.stderr)
        return 2
    except (SizeError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvexaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
