"""Quantifier elimination for the model companions of G-graphs and of pure G-sets.

Existentials are removed innermost first.  The matrix is put in DNF and each
clause is handled on its own.  If a clause contains ``sigma_g(y) = t`` with
``t`` not a ``y``-term, ``y := sigma_{g^-1}(t)`` is substituted.  Otherwise the
clause asks for a ``y`` outside the orbits of the parameters (any witness inside
them satisfies the same condition, see below), and realisability of such a
``y`` is decided from its orbit type:

* the stabilizer must contain ``H = <g : sigma_g(y) = y>`` and can be taken
  equal to it, so a literal ``sigma_g(y) != y`` with ``g`` in ``H`` kills it;
* an edge ``R(sigma_k y, y)`` depends only on the class ``HkH u Hk^-1H``, so
  required and forbidden internal edges must not share a class;
* the neighbours of ``y`` among old elements are exactly ``H . {p : R(y, p)}``,
  hence forbidden neighbours ``q`` give the condition ``sigma_h(p) != q``.

When these hold the one-orbit extension exists and, the model being
existentially closed, so does a witness.  Conversely a witness inside the
parameter orbits has stabilizer containing ``H`` and so meets the same
conditions; the result is exact without a case split over old elements.

``route="config"`` instead takes the disjunction of the Z0-restrictions of all
consistent configurations that contain the clause (only practical for small
term sets); both routes are tested against each other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..errors import ContradictoryBase, NotGenerating, UnsupportedSignature
from ..group import FiniteGroup
from .formula import (And, Bottom, Eq, Exists, Forall, Formula, Implies, Not, Or,
                      Rel, Term, Top, conj, disj, free_vars, is_quantifier_free, terms_of)
from .semantics import Clause, dnf, from_dnf, normalize_literal

THEORIES = ("graph", "empty")


@dataclass(frozen=True)
class QEResult:
    input: Formula
    output: Formula
    certificate: tuple = field(default=())


def _theory_name(theory) -> str:
    name = getattr(theory, "value", theory)
    if name not in THEORIES:
        raise UnsupportedSignature(f"no quantifier elimination for theory {theory!r}")
    return name


def _check_symbols(phi: Formula, theory: str) -> None:
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Rel):
            if theory == "empty" or f.symbol != "R":
                raise UnsupportedSignature(
                    f"relation {f.symbol!r} is not available in the {theory} theory")
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or)):
            stack.extend(f.args)
        elif isinstance(f, Implies):
            stack.extend((f.left, f.right))
        elif isinstance(f, (Exists, Forall)):
            stack.append(f.body)


def _sub(t: Term, y: str, s: Term, group: FiniteGroup) -> Term:
    return Term(s.var, group.mul(t.g, s.g)) if t.var == y else t


def _substitute_clause(lits, y: str, s: Term, group: FiniteGroup) -> Clause | None:
    out = set()
    for lit in lits:
        neg = isinstance(lit, Not)
        atom = lit.arg if neg else lit
        a, b = _sub(atom.left, y, s, group), _sub(atom.right, y, s, group)
        new = Eq(a, b) if isinstance(atom, Eq) else Rel(atom.symbol, a, b)
        n = normalize_literal(Not(new) if neg else new)
        if n is False:
            return None
        if n is not True:
            out.add(n)
    if any(isinstance(l, Not) and l.arg in out for l in out):
        return None
    return frozenset(out)


def _eliminate_orbit(y: str, clause: Clause, group: FiniteGroup) -> tuple[list[Clause], dict]:
    outside = [l for l in clause if y not in {t.var for t in terms_of(l)}]
    inner = sorted((l for l in clause if l not in outside), key=repr)
    names = group.names
    for lit in inner:
        if isinstance(lit, Eq) and (lit.left.var == y) != (lit.right.var == y):
            ty, t = (lit.left, lit.right) if lit.left.var == y else (lit.right, lit.left)
            s = Term(t.var, group.mul(group.inv(ty.g), t.g))
            rest = _substitute_clause(inner, y, s, group)
            cert = {"case": "substitution", "term": s.text(group)}
            if rest is None:
                return [], cert
            res = frozenset(outside) | rest
            if any(isinstance(l, Not) and l.arg in res for l in res):
                return [], cert
            return [res], cert
    s_pos, s_neg, e_pos, e_neg, p_set, n_set = set(), set(), set(), set(), set(), set()
    for lit in inner:
        neg = isinstance(lit, Not)
        atom = lit.arg if neg else lit
        a, b = atom.left, atom.right
        if a.var == y and b.var == y:
            k = group.mul(group.inv(b.g), a.g)
            if isinstance(atom, Eq):
                (s_neg if neg else s_pos).add(k)
            else:
                (e_neg if neg else e_pos).add(k)
        elif isinstance(atom, Rel):
            ty, t = (a, b) if a.var == y else (b, a)
            t = Term(t.var, group.mul(group.inv(ty.g), t.g))
            (n_set if neg else p_set).add(t)
        # y != t with t old is automatic for a fresh witness
    h = group.generated(s_pos)
    cert = {"case": "fresh", "stabilizer": sorted(names[g] for g in h)}
    if s_neg & h:
        cert["case"] = "inconsistent"
        cert["reason"] = "stabilizer literal contradicts the generated subgroup"
        return [], cert

    def klass(k: int) -> frozenset[int]:
        out = set()
        for u in h:
            for v in h:
                out.add(group.mul(group.mul(u, k), v))
                out.add(group.mul(group.mul(u, group.inv(k)), v))
        return frozenset(out)

    edge_classes: set[int] = set()
    for k in e_pos:
        if k in h:
            cert["case"] = "inconsistent"
            cert["reason"] = "edge from y to itself"
            return [], cert
        edge_classes |= klass(k)
    if e_neg & edge_classes:
        cert["case"] = "inconsistent"
        cert["reason"] = "internal edge both required and forbidden"
        return [], cert
    cert["internal_edges"] = sorted(names[g] for g in edge_classes)
    conds = set(outside)
    for p in p_set:
        for q in n_set:
            for u in h:
                lit = normalize_literal(Not(Eq(p.apply(group, u), q)))
                if lit is False:
                    cert["case"] = "inconsistent"
                    cert["reason"] = "a required neighbour is also forbidden"
                    return [], cert
                if lit is not True:
                    conds.add(lit)
    res = frozenset(conds)
    if any(isinstance(l, Not) and l.arg in res for l in res):
        return [], cert
    return [res], cert


def _eliminate_config(y: str, clause: Clause, group: FiniteGroup) -> tuple[list[Clause], dict]:
    from ..config import TermSet, enumerate_extensions

    xs = tuple(sorted({t.var for l in clause for t in terms_of(l)} - {y}))
    terms = TermSet(group, len(xs), 1, xs, (y,))
    try:
        configs = enumerate_extensions(list(clause), terms)
    except ContradictoryBase:
        return [], {"case": "configurations", "configurations": []}
    seen, out, used = set(), [], []
    for q in configs:
        used.append(list(q.vector()))
        r = q.restrict()
        if r.vector() in seen:
            continue
        seen.add(r.vector())
        lits = set()
        for lit in r.literals():
            n = normalize_literal(lit)
            if n is not True:
                lits.add(n)
        out.append(frozenset(lits))
    return out, {"case": "configurations", "configurations": used}


class _Eliminator:
    def __init__(self, group: FiniteGroup, route: str, cap: int):
        if route not in ("orbit", "config"):
            raise ValueError(f"unknown route {route!r}")
        self.group, self.route, self.cap = group, route, cap
        self.certificate: list[dict] = []

    def exists(self, y: str, body: Formula) -> Formula:
        clauses = dnf(body, self.cap)
        out: list[Clause] = []
        records = []
        elim = _eliminate_orbit if self.route == "orbit" else _eliminate_config
        for c in clauses:
            if y not in {t.var for l in c for t in terms_of(l)}:
                out.append(c)
                records.append({"case": "vacuous"})
                continue
            res, cert = elim(y, c, self.group)
            out.extend(res)
            records.append(cert)
        self.certificate.append({"var": y, "clauses": records})
        return from_dnf(dnf(from_dnf(out), self.cap))

    def run(self, f: Formula) -> Formula:
        if is_quantifier_free(f):
            return f
        if isinstance(f, Not):
            return Not(self.run(f.arg))
        if isinstance(f, And):
            return conj(self.run(a) for a in f.args)
        if isinstance(f, Or):
            return disj(self.run(a) for a in f.args)
        if isinstance(f, Implies):
            return disj([Not(self.run(f.left)), self.run(f.right)])
        if isinstance(f, Exists):
            return self.exists(f.var, self.run(f.body))
        if isinstance(f, Forall):
            return from_dnf(dnf(Not(self.exists(f.var, Not(self.run(f.body)))), self.cap))
        raise TypeError(f"not a formula: {f!r}")


def qe(phi: Formula, group: FiniteGroup, theory="graph", route: str = "orbit",
       cap: int = 20000) -> QEResult:
    name = _theory_name(theory)
    _check_symbols(phi, name)
    if is_quantifier_free(phi):
        return QEResult(phi, phi, ())
    e = _Eliminator(group, route, cap)
    out = e.run(phi)
    return QEResult(phi, out, tuple(e.certificate))


def qe_graph(phi: Formula, group: FiniteGroup, route: str = "orbit", cap: int = 20000) -> QEResult:
    return qe(phi, group, "graph", route, cap)


def qe_empty(phi: Formula, group: FiniteGroup, cap: int = 20000) -> QEResult:
    return qe(phi, group, "empty", "orbit", cap)


def decide_sentence(theory, group: FiniteGroup, sentence: Formula, route: str = "orbit") -> bool:
    if free_vars(sentence):
        raise ValueError(f"not a sentence: free variables {sorted(free_vars(sentence))}")
    out = from_dnf(dnf(qe(sentence, group, theory, route).output))
    if isinstance(out, Top):
        return True
    if isinstance(out, Bottom):
        return False
    raise AssertionError(f"variable-free residue {out!r}")  # pragma: no cover


def relativize_to_invariants(phi: Formula, group: FiniteGroup, generators: Sequence[int]) -> Formula:
    """Translate an L-formula so that every variable ranges over the invariants."""
    gens = sorted(set(generators))
    if group.generated(gens) != frozenset(group.elements):
        raise NotGenerating(f"{[group.names[g] for g in gens]} do not generate the group")
    gens = [g for g in gens if g != group.identity]

    def fixed(v: str) -> list[Formula]:
        return [Eq(Term(v, g), Term(v, group.identity)) for g in gens]

    def go(f: Formula) -> Formula:
        if isinstance(f, (Eq, Rel)):
            if f.left.g != group.identity or f.right.g != group.identity:
                raise ValueError("relativization expects a formula without group symbols")
            vs = sorted({f.left.var, f.right.var})
            return conj([f] + [c for v in vs for c in fixed(v)])
        if isinstance(f, (Top, Bottom)):
            return f
        if isinstance(f, Not):
            return Not(go(f.arg))
        if isinstance(f, And):
            return And(tuple(go(a) for a in f.args))
        if isinstance(f, Or):
            return Or(tuple(go(a) for a in f.args))
        if isinstance(f, Implies):
            return Implies(go(f.left), go(f.right))
        if isinstance(f, Exists):
            return Exists(f.var, conj(fixed(f.var) + [go(f.body)]))
        if isinstance(f, Forall):
            guard = fixed(f.var)
            return Forall(f.var, Implies(conj(guard), go(f.body)) if guard else go(f.body))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi)
