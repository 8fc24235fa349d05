"""Lattice terms: binary meet/join trees over named variables, plus an s-expression format."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterator

from .errors import FormatError


class Term:
    def __and__(self, other: "Term") -> "Meet":
        return Meet(self, other)

    def __or__(self, other: "Term") -> "Join":
        return Join(self, other)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Meet(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Join(Term):
    left: Term
    right: Term


def meet(*ts: Term) -> Term:
    return reduce(lambda a, b: Meet(a, b), ts)


def join(*ts: Term) -> Term:
    return reduce(lambda a, b: Join(a, b), ts)


def variables(t: Term) -> tuple[str, ...]:
    """Sorted distinct variable names of t."""
    out: set[str] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        else:
            stack.append(node.left)
            stack.append(node.right)
    return tuple(sorted(out))


def node_count(t: Term) -> int:
    """Variables plus operation symbols."""
    if isinstance(t, Var):
        return 1
    return 1 + node_count(t.left) + node_count(t.right)


def to_sexp(t: Term) -> str:
    if isinstance(t, Var):
        return f"(var {t.name})"
    op = "meet" if isinstance(t, Meet) else "join"
    return f"({op} {to_sexp(t.left)} {to_sexp(t.right)})"


def _tokens(text: str) -> Iterator[str]:
    buf = ""
    for ch in text:
        if ch in "()":
            if buf:
                yield buf
                buf = ""
            yield ch
        elif ch.isspace():
            if buf:
                yield buf
                buf = ""
        else:
            buf += ch
    if buf:
        yield buf


def parse_term(text: str) -> Term:
    """Parse `(var x)` / `(meet s t)` / `(join s t)`; round-trips with to_sexp."""
    toks = list(_tokens(text))
    pos = 0

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(toks):
            raise FormatError("unexpected end of term")
        tok = toks[pos]
        pos += 1
        if expected is not None and tok != expected:
            raise FormatError(f"expected {expected!r}, got {tok!r}")
        return tok

    def expr() -> Term:
        take("(")
        head = take()
        if head == "var":
            name = take()
            take(")")
            return Var(name)
        if head in ("meet", "join"):
            left = expr()
            right = expr()
            take(")")
            return Meet(left, right) if head == "meet" else Join(left, right)
        raise FormatError(f"unknown operator {head!r}")

    t = expr()
    if pos != len(toks):
        raise FormatError(f"trailing input after term: {toks[pos]!r}")
    return t


@dataclass(frozen=True)
class QuasiIdentity:
    """Horn sentence: every premise `s <= t` implies the conclusion `s <= t`."""

    premises: tuple[tuple[Term, Term], ...]
    conclusion: tuple[Term, Term]

    def variable_names(self) -> tuple[str, ...]:
        names: set[str] = set()
        for s, t in (*self.premises, self.conclusion):
            names.update(variables(s))
            names.update(variables(t))
        return tuple(sorted(names))


def format_quasi(q: QuasiIdentity) -> str:
    lines = [f"premise {to_sexp(s)} <= {to_sexp(t)}" for s, t in q.premises]
    lines.append(f"conclusion {to_sexp(q.conclusion[0])} <= {to_sexp(q.conclusion[1])}")
    return "\n".join(lines) + "\n"


def parse_quasi(text: str) -> QuasiIdentity:
    premises = []
    conclusion = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, _, rest = line.partition(" ")
        if kind not in ("premise", "conclusion") or "<=" not in rest:
            raise FormatError(f"expected `premise|conclusion <s> <= <t>`: {line!r}", line=lineno)
        left, _, right = rest.partition("<=")
        pair = (parse_term(left), parse_term(right))
        if kind == "premise":
            premises.append(pair)
        elif conclusion is not None:
            raise FormatError("duplicate conclusion", line=lineno)
        else:
            conclusion = pair
    if conclusion is None:
        raise FormatError("missing conclusion line")
    return QuasiIdentity(tuple(premises), conclusion)
