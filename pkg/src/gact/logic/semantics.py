"""Tarski semantics in finite G-structures, and Boolean normal forms."""
from __future__ import annotations

from typing import Iterable, Mapping

from ..errors import DNFTooLarge, SignatureMismatch, UnassignedVariable
from .formula import (FALSE, TRUE, And, Bottom, Eq, Exists, Forall, Formula, Implies, Not, Or,
                      Rel, Term, Top, conj, disj)

Literal = Formula
Clause = frozenset  # of literals


def check_signature(m, phi: Formula) -> None:
    sym = m.signature.symbol
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Rel):
            if f.symbol != sym:
                raise SignatureMismatch(
                    f"relation {f.symbol!r} is not in the {m.signature.value} signature")
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or)):
            stack.extend(f.args)
        elif isinstance(f, Implies):
            stack.extend((f.left, f.right))
        elif isinstance(f, (Exists, Forall)):
            stack.append(f.body)


def evaluate(m, phi: Formula, assignment: Mapping[str, int | str] | None = None,
             domain: Iterable[int] | None = None) -> bool:
    """Satisfaction of ``phi`` in ``m`` under ``assignment`` (labels or indices).

    ``domain`` optionally restricts the range of every quantifier.
    """
    check_signature(m, phi)
    env = {v: m.index(a) for v, a in (assignment or {}).items()}
    dom = list(range(m.size)) if domain is None else sorted(set(domain))
    act, rel = m.action, m.relation

    def val(t: Term) -> int:
        try:
            return act[t.g][env[t.var]]
        except KeyError:
            raise UnassignedVariable(f"variable {t.var!r} has no value") from None

    def go(f: Formula) -> bool:
        if isinstance(f, Eq):
            return val(f.left) == val(f.right)
        if isinstance(f, Rel):
            return (val(f.left), val(f.right)) in rel
        if isinstance(f, Not):
            return not go(f.arg)
        if isinstance(f, And):
            return all(go(a) for a in f.args)
        if isinstance(f, Or):
            return any(go(a) for a in f.args)
        if isinstance(f, Implies):
            return (not go(f.left)) or go(f.right)
        if isinstance(f, (Exists, Forall)):
            want = isinstance(f, Exists)
            old = env.get(f.var)
            try:
                for b in dom:
                    env[f.var] = b
                    if go(f.body) == want:
                        return want
                return not want
            finally:
                if old is None:
                    env.pop(f.var, None)
                else:
                    env[f.var] = old
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        raise TypeError(f"not a formula: {f!r}")

    return go(phi)


# ------------------------------------------------------------ normal forms

def nnf(f: Formula) -> Formula:
    """Negation normal form of a quantifier-free formula (implications removed)."""

    def pos(f):
        if isinstance(f, Not):
            return neg(f.arg)
        if isinstance(f, And):
            return conj(pos(a) for a in f.args)
        if isinstance(f, Or):
            return disj(pos(a) for a in f.args)
        if isinstance(f, Implies):
            return disj([neg(f.left), pos(f.right)])
        if isinstance(f, (Exists, Forall)):
            raise ValueError("nnf expects a quantifier-free formula")
        return f

    def neg(f):
        if isinstance(f, Not):
            return pos(f.arg)
        if isinstance(f, And):
            return disj(neg(a) for a in f.args)
        if isinstance(f, Or):
            return conj(neg(a) for a in f.args)
        if isinstance(f, Implies):
            return conj([pos(f.left), neg(f.right)])
        if isinstance(f, Top):
            return FALSE
        if isinstance(f, Bottom):
            return TRUE
        if isinstance(f, (Exists, Forall)):
            raise ValueError("nnf expects a quantifier-free formula")
        return Not(f)

    return pos(f)


def _atom_of(lit: Formula) -> tuple[Formula, bool]:
    return (lit.arg, False) if isinstance(lit, Not) else (lit, True)


def normalize_literal(lit: Formula) -> Formula | bool:
    """Orient atoms canonically and decide trivial ones (``t = t``, ``R(t, t)``)."""
    atom, positive = _atom_of(lit)
    if isinstance(atom, Eq):
        a, b = sorted((atom.left, atom.right))
        if a == b:
            return positive
        atom = Eq(a, b)
    elif isinstance(atom, Rel):
        a, b = atom.left, atom.right
        if a == b and atom.symbol in ("R", "<"):
            return not positive
        if atom.symbol == "R":
            a, b = sorted((a, b))
        atom = Rel(atom.symbol, a, b)
    return atom if positive else Not(atom)


def dnf(f: Formula, cap: int = 20000) -> list[Clause]:
    """Disjunctive normal form as a sorted list of literal sets.

    Trivial literals are decided, contradictory clauses dropped, duplicates
    and clauses subsumed by a smaller one removed.  ``[]`` is false and
    ``[frozenset()]`` is true.
    """

    def go(f: Formula) -> set[Clause]:
        if isinstance(f, Top):
            return {frozenset()}
        if isinstance(f, Bottom):
            return set()
        if isinstance(f, Or):
            out: set[Clause] = set()
            for a in f.args:
                out |= go(a)
                if len(out) > cap:
                    raise DNFTooLarge(f"more than {cap} disjuncts")
            return out
        if isinstance(f, And):
            acc: set[Clause] = {frozenset()}
            for a in f.args:
                part = go(a)
                nxt = set()
                for c in acc:
                    for d in part:
                        e = c | d
                        if not _contradictory(e):
                            nxt.add(e)
                if len(nxt) > cap:
                    raise DNFTooLarge(f"more than {cap} disjuncts")
                acc = nxt
                if not acc:
                    break
            return acc
        lit = normalize_literal(f)
        if lit is True:
            return {frozenset()}
        if lit is False:
            return set()
        return {frozenset([lit])}

    clauses = go(nnf(f))
    ordered = sorted(clauses, key=lambda c: (len(c), sorted(map(repr, c))))
    kept: list[Clause] = []
    for c in ordered:
        if not any(k <= c for k in kept):
            kept.append(c)
    return kept


def _contradictory(clause: Clause) -> bool:
    return any(isinstance(l, Not) and l.arg in clause for l in clause)


def from_dnf(clauses: Iterable[Clause]) -> Formula:
    return disj(conj(sorted(c, key=_lit_key)) for c in clauses)


def _lit_key(lit: Formula):
    atom, positive = _atom_of(lit)
    kind = 0 if isinstance(atom, Eq) else 1
    return (kind, atom.left, atom.right, not positive)


def simplify(f: Formula, cap: int = 20000) -> Formula:
    """Quantifier-free ``f`` rewritten through its reduced DNF."""
    return from_dnf(dnf(f, cap))
