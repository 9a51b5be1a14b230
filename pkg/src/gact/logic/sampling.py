"""Seeded random formulas for property tests and the soundness harness."""
from __future__ import annotations

import random
from typing import Sequence

from ..group import FiniteGroup
from .formula import And, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, Term


def random_atom(rng: random.Random, group: FiniteGroup, variables: Sequence[str],
                theory: str = "graph") -> Formula:
    a = Term(rng.choice(variables), rng.randrange(group.order))
    b = Term(rng.choice(variables), rng.randrange(group.order))
    if theory == "graph" and rng.random() < 0.5:
        return Rel("R", a, b)
    return Eq(a, b)


def random_formula(rng: random.Random, group: FiniteGroup, free: Sequence[str], depth: int,
                   theory: str = "graph", width: int = 2) -> Formula:
    """A formula with free variables among ``free`` and quantifier depth at most ``depth``.

    Bound variables are named ``y0, y1, ...`` by nesting level; every quantifier
    body mentions its variable.
    """

    def build(scope: list[str], d: int, level: int) -> Formula:
        if d > 0 and (level == 0 or rng.random() < 0.75):
            y = f"y{level}"
            inner = scope + [y]
            parts = [_mention(rng, group, inner, y, theory)]
            if d > 1 or rng.random() < 0.3:
                parts.append(build(inner, d - 1, level + 1))
            parts += [_literal(rng, group, inner, theory) for _ in range(rng.randint(0, width - 1))]
            body = _combine(rng, parts)
            return Exists(y, body) if rng.random() < 0.5 else Forall(y, body)
        if not scope:
            return _closed(rng, group, theory)
        return _combine(rng, [_literal(rng, group, scope, theory) for _ in range(rng.randint(1, width))])

    scope = list(free)
    parts = [build(scope, depth, 0)]
    if scope and rng.random() < 0.5:
        parts.append(_literal(rng, group, scope, theory))
    return _combine(rng, parts)


def _closed(rng, group, theory):
    y = "y9"
    body = _literal(rng, group, [y], theory)
    return Exists(y, body) if rng.random() < 0.5 else Forall(y, body)


def _mention(rng, group, scope, y, theory) -> Formula:
    a = Term(y, rng.randrange(group.order))
    b = Term(rng.choice(scope), rng.randrange(group.order))
    atom = Rel("R", a, b) if theory == "graph" and rng.random() < 0.5 else Eq(a, b)
    return Not(atom) if rng.random() < 0.5 else atom


def _literal(rng, group, scope, theory) -> Formula:
    atom = random_atom(rng, group, scope, theory)
    return Not(atom) if rng.random() < 0.4 else atom


def _combine(rng, parts: list[Formula]) -> Formula:
    if len(parts) == 1:
        return parts[0]
    r = rng.random()
    if r < 0.5:
        return And(tuple(parts))
    if r < 0.8:
        return Or(tuple(parts))
    return Implies(parts[0], And(tuple(parts[1:])) if len(parts) > 2 else parts[1])
