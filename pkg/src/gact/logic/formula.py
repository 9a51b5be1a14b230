"""Formula AST for languages with group-indexed unary function symbols.

A term is ``sigma_g(v)`` with exactly one group element ``g`` (an index into
the ambient group).  Nested applications are composed on construction, so
``sigma_g(sigma_h(v))`` is stored as ``sigma_{g*h}(v)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from ..group import FiniteGroup


@dataclass(frozen=True, order=True)
class Term:
    var: str
    g: int = 0

    def apply(self, group: FiniteGroup, k: int) -> "Term":
        return Term(self.var, group.mul(k, self.g))

    def text(self, group: FiniteGroup | None) -> str:
        if group is None:
            return f"{self.g}·{self.var}"
        if self.g == group.identity:
            return self.var
        return f"{group.names[self.g]}·{self.var}"


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return conj([self, other])

    def __or__(self, other):
        return disj([self, other])

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel(Formula):
    symbol: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


Atom = Union[Eq, Rel]
QUANTIFIERS = (Exists, Forall)


def conj(args: Iterable[Formula]) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, Top):
            continue
        if isinstance(a, Bottom):
            return FALSE
        flat.extend(a.args if isinstance(a, And) else [a])
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(args: Iterable[Formula]) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, Bottom):
            continue
        if isinstance(a, Top):
            return TRUE
        flat.extend(a.args if isinstance(a, Or) else [a])
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def is_atom(f: Formula) -> bool:
    return isinstance(f, (Eq, Rel))


def is_literal(f: Formula) -> bool:
    return is_atom(f) or (isinstance(f, Not) and is_atom(f.arg))


def terms_of(f: Formula) -> Iterator[Term]:
    if isinstance(f, (Eq, Rel)):
        yield f.left
        yield f.right
    elif isinstance(f, Not):
        yield from terms_of(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from terms_of(a)
    elif isinstance(f, Implies):
        yield from terms_of(f.left)
        yield from terms_of(f.right)
    elif isinstance(f, QUANTIFIERS):
        yield from terms_of(f.body)


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (Eq, Rel)):
        return frozenset((f.left.var, f.right.var))
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        out: frozenset[str] = frozenset()
        for a in f.args:
            out |= free_vars(a)
        return out
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    return frozenset()


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, Not):
        return quantifier_depth(f.arg)
    if isinstance(f, (And, Or)):
        return max((quantifier_depth(a) for a in f.args), default=0)
    if isinstance(f, Implies):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    if isinstance(f, QUANTIFIERS):
        return 1 + quantifier_depth(f.body)
    return 0


def is_quantifier_free(f: Formula) -> bool:
    return quantifier_depth(f) == 0


def substitute(f: Formula, var: str, term: Term, group: FiniteGroup) -> Formula:
    """Replace free occurrences of ``var`` by ``term``; sigma_g(var) becomes sigma_{g*h}(x)."""

    def t(x: Term) -> Term:
        return Term(term.var, group.mul(x.g, term.g)) if x.var == var else x

    if isinstance(f, Eq):
        return Eq(t(f.left), t(f.right))
    if isinstance(f, Rel):
        return Rel(f.symbol, t(f.left), t(f.right))
    if isinstance(f, Not):
        return Not(substitute(f.arg, var, term, group))
    if isinstance(f, And):
        return And(tuple(substitute(a, var, term, group) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(substitute(a, var, term, group) for a in f.args))
    if isinstance(f, Implies):
        return Implies(substitute(f.left, var, term, group), substitute(f.right, var, term, group))
    if isinstance(f, QUANTIFIERS):
        if f.var == var:
            return f
        if f.var == term.var:
            raise ValueError(f"substitution would capture {term.var}")
        return type(f)(f.var, substitute(f.body, var, term, group))
    return f


def to_text(f: Formula, group: FiniteGroup | None = None) -> str:
    """Render in the parser's grammar (round-trips through ``parse``)."""

    def go(f: Formula, prec: int) -> str:
        if isinstance(f, Top):
            return "true"
        if isinstance(f, Bottom):
            return "false"
        if isinstance(f, Eq):
            return f"{f.left.text(group)} = {f.right.text(group)}"
        if isinstance(f, Rel):
            if f.symbol == "R":
                return f"R({f.left.text(group)}, {f.right.text(group)})"
            return f"{f.symbol}({f.left.text(group)}, {f.right.text(group)})"
        if isinstance(f, Not):
            if isinstance(f.arg, Eq):
                return f"{f.arg.left.text(group)} != {f.arg.right.text(group)}"
            return "!" + go(f.arg, 4)
        if isinstance(f, And):
            s = " & ".join(go(a, 3) for a in f.args)
            return s if prec <= 3 else f"({s})"
        if isinstance(f, Or):
            s = " | ".join(go(a, 2) for a in f.args)
            return s if prec <= 2 else f"({s})"
        if isinstance(f, Implies):
            s = f"{go(f.left, 2)} -> {go(f.right, 2)}"
            return s if prec <= 1 else f"({s})"
        if isinstance(f, QUANTIFIERS):
            q = "E" if isinstance(f, Exists) else "A"
            s = f"{q} {f.var}. {go(f.body, 0)}"
            return s if prec == 0 else f"({s})"
        raise TypeError(f)

    return go(f, 0)
