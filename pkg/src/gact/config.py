"""Configurations of the closed term set Z = {sigma_g(x_j), sigma_g(y_k)} for G-graphs.

A configuration assigns to every pair of terms one of EQ, R (edge) or NR
(distinct and no edge).  Term ``(v, g)`` has canonical index ``v*|G| + g`` with
the x-variables before the y-variables, which is the same order used by
:func:`gact.structure.diagram_key`, so a configuration read off a structure is
literally its diagram key.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ContradictoryBase, InvalidStructure
from .group import FiniteGroup
from .logic.formula import Eq, Formula, Not, Rel, Term, conj
from .structure import GStructure, Signature, diagram_key

EQ, R, NR = 0, 1, 2
ENTRY_NAMES = ("EQ", "R", "NR")


@dataclass(frozen=True)
class TermSet:
    group: FiniteGroup
    n: int
    n_prime: int
    x_names: tuple[str, ...] = ()
    y_names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.x_names:
            object.__setattr__(self, "x_names", tuple(f"x{j}" for j in range(self.n)))
        if not self.y_names:
            object.__setattr__(self, "y_names", tuple(f"y{k}" for k in range(self.n_prime)))
        if len(self.x_names) != self.n or len(self.y_names) != self.n_prime:
            raise ValueError("variable name counts must match n and n_prime")

    @property
    def var_names(self) -> tuple[str, ...]:
        return self.x_names + self.y_names

    @property
    def size(self) -> int:
        return self.group.order * (self.n + self.n_prime)

    @property
    def z0_size(self) -> int:
        return self.group.order * self.n

    def term(self, idx: int) -> Term:
        v, g = divmod(idx, self.group.order)
        return Term(self.var_names[v], g)

    def index(self, t: Term) -> int:
        try:
            v = self.var_names.index(t.var)
        except ValueError:
            raise KeyError(f"variable {t.var!r} not in term set") from None
        return v * self.group.order + t.g

    def act(self, k: int, idx: int) -> int:
        """sigma_k · sigma_g(v) = sigma_{k*g}(v)."""
        return self.act_table[k][idx]

    @functools.cached_property
    def act_table(self) -> tuple[tuple[int, ...], ...]:
        o, mul = self.group.order, self.group.mul
        return tuple(tuple((i // o) * o + mul(k, i % o) for i in range(self.size))
                     for k in self.group.elements)

    @functools.cached_property
    def pair_orbits(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Orbits of unordered pairs i<j under the term action, in canonical order."""
        seen, out = set(), []
        for i in range(self.size):
            for j in range(i + 1, self.size):
                if (i, j) in seen:
                    continue
                orb = set()
                for k in self.group.elements:
                    a, b = self.act(k, i), self.act(k, j)
                    orb.add((min(a, b), max(a, b)))
                seen |= orb
                out.append(tuple(sorted(orb)))
        return tuple(out)


@dataclass(frozen=True)
class Configuration:
    terms: TermSet
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.terms.size
        ent = tuple(tuple(int(v) for v in row) for row in self.entries)
        if len(ent) != n or any(len(r) != n for r in ent):
            raise ValueError("entries must be a |Z| x |Z| matrix")
        if any(v not in (EQ, R, NR) for r in ent for v in r):
            raise ValueError("entries must be EQ, R or NR")
        object.__setattr__(self, "entries", ent)

    @classmethod
    def from_pairs(cls, terms: TermSet, upper: Mapping[tuple[int, int], int] | Sequence[int],
                   default: int | None = None) -> "Configuration":
        """Build a symmetric configuration from values on pairs i<j."""
        n = terms.size
        if not isinstance(upper, Mapping):
            it = iter(upper)
            upper = {(i, j): next(it) for i in range(n) for j in range(i + 1, n)}
        m = [[EQ if i == j else None for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                v = upper.get((i, j), default)
                if v is None:
                    raise ValueError(f"missing entry for pair {(i, j)}")
                m[i][j] = m[j][i] = v
        return cls(terms, tuple(tuple(r) for r in m))

    def __getitem__(self, pair: tuple[int, int]) -> int:
        return self.entries[pair[0]][pair[1]]

    def vector(self) -> tuple[int, ...]:
        n = self.terms.size
        return tuple(self.entries[i][j] for i in range(n) for j in range(i + 1, n))

    def restrict(self, n_vars: int | None = None) -> "Configuration":
        """Restriction to the x-part Z0 (or to the first ``n_vars`` variables)."""
        t = self.terms
        k = t.n if n_vars is None else n_vars
        sub = TermSet(t.group, k, 0, t.var_names[:k], ())
        m = sub.size
        return Configuration(sub, tuple(tuple(self.entries[i][j] for j in range(m)) for i in range(m)))

    def literals(self, only_pairs: Iterable[tuple[int, int]] | None = None) -> list[Formula]:
        """The conjunction z1 Q z2 over pairs i<j, as literals."""
        n = self.terms.size
        pairs = only_pairs if only_pairs is not None else (
            (i, j) for i in range(n) for j in range(i + 1, n))
        out: list[Formula] = []
        for i, j in pairs:
            a, b = self.terms.term(i), self.terms.term(j)
            v = self.entries[i][j]
            if v == EQ:
                out.append(Eq(a, b))
            elif v == R:
                out.append(Rel("R", a, b))
            else:
                out.append(Not(Eq(a, b)))
                out.append(Not(Rel("R", a, b)))
        return out

    def formula(self) -> Formula:
        return conj(self.literals())

    def to_triples(self) -> list[tuple[int, int, str]]:
        n = self.terms.size
        return [(i, j, ENTRY_NAMES[self.entries[i][j]]) for i in range(n) for j in range(i + 1, n)]


@dataclass
class ConsistencyReport:
    consistent: bool
    witness: GStructure | None = None
    violation: str | None = None
    classes: tuple[tuple[int, ...], ...] = field(default=())

    def __bool__(self):
        return self.consistent


def is_consistent(q: Configuration) -> ConsistencyReport:
    """Decide realisability of ``q`` in some G-graph; on success return the quotient witness."""
    t, e = q.terms, q.entries
    n, grp = t.size, t.group
    for i in range(n):
        if e[i][i] != EQ:
            return ConsistencyReport(False, violation=f"diagonal entry ({i},{i}) is not EQ")
        for j in range(n):
            if e[i][j] != e[j][i]:
                return ConsistencyReport(False, violation=f"asymmetric entries at ({i},{j})")
    for i in range(n):
        for j in range(n):
            if e[i][j] == EQ and e[i] != e[j]:
                k = next(k for k in range(n) if e[i][k] != e[j][k])
                return ConsistencyReport(
                    False, violation=f"EQ at ({i},{j}) but entries differ at term {k}")
    for k in grp.elements:
        ak = t.act_table[k]
        for i in range(n):
            row, krow = e[i], e[ak[i]]
            for j in range(n):
                if row[j] != krow[ak[j]]:
                    return ConsistencyReport(
                        False, violation=f"not equivariant: pair ({i},{j}) under {grp.names[k]}")
    # the EQ rows coincide, so EQ is an equivalence and R is well defined on classes
    rep = [min(j for j in range(n) if e[i][j] == EQ) for i in range(n)]
    reps = sorted(set(rep))
    pos = {r: c for c, r in enumerate(reps)}
    universe = []
    for r in reps:
        term = t.term(r)
        universe.append(term.text(grp).replace("·", "."))
    rel = {(pos[a], pos[b]) for a in reps for b in reps if e[a][b] == R}
    action = tuple(tuple(pos[rep[t.act(k, r)]] for r in reps) for k in grp.elements)
    try:
        witness = GStructure(Signature.GRAPH, tuple(universe), frozenset(rel), grp, action)
    except InvalidStructure as exc:  # pragma: no cover - excluded by the checks above
        return ConsistencyReport(False, violation=str(exc))
    classes = tuple(tuple(i for i in range(n) if rep[i] == r) for r in reps)
    return ConsistencyReport(True, witness=witness, classes=classes)


def witness_tuple(report: ConsistencyReport, terms: TermSet) -> list[int]:
    """Elements of the witness interpreting each variable (the class of sigma_e(v))."""
    out = []
    for v in range(terms.n + terms.n_prime):
        idx = v * terms.group.order + terms.group.identity
        out.append(next(c for c, cls in enumerate(report.classes) if idx in cls))
    return out


def _allowed_from_literals(base: Iterable[Formula], terms: TermSet) -> dict[tuple[int, int], set[int]]:
    allowed: dict[tuple[int, int], set[int]] = {}

    def restrict(i: int, j: int, vals: set[int]):
        if i == j:
            if EQ not in vals:
                raise ContradictoryBase(f"literal denies equality of term {i} with itself")
            return
        key = (min(i, j), max(i, j))
        allowed[key] = allowed.get(key, {EQ, R, NR}) & vals

    for lit in base:
        neg = isinstance(lit, Not)
        atom = lit.arg if neg else lit
        if isinstance(atom, Eq):
            vals = {R, NR} if neg else {EQ}
        elif isinstance(atom, Rel):
            if atom.symbol != "R":
                raise ValueError(f"unsupported relation {atom.symbol}")
            vals = {EQ, NR} if neg else {R}
        else:
            raise ValueError(f"not a literal: {lit}")
        i, j = terms.index(atom.left), terms.index(atom.right)
        if isinstance(atom, Rel) and i == j:
            if not neg:
                raise ContradictoryBase("R is irreflexive")
            continue
        restrict(i, j, vals)
    return allowed


def enumerate_extensions(base: Iterable[Formula] | Mapping[tuple[int, int], set[int]],
                         terms: TermSet, limit: int | None = None,
                         verify: bool = False) -> list[Configuration]:
    """All consistent configurations extending the partial information ``base``.

    ``base`` is a collection of literals over the term set (or a map from pairs
    i<j to allowed entry sets).  One pair per orbit of the term action is
    decided, the rest follows by equivariance; EQ-congruence on triangles is
    propagated as entries are set.  Output is sorted lexicographically by entry
    vector with EQ < R < NR.
    """
    if isinstance(base, Mapping):
        allowed = {k: set(v) for k, v in base.items()}
    else:
        allowed = _allowed_from_literals(base, terms)
    n = terms.size
    orbits = terms.pair_orbits
    orbit_allowed = []
    for orb in orbits:
        vals = {EQ, R, NR}
        for p in orb:
            vals &= allowed.get(p, {EQ, R, NR})
        if not vals:
            raise ContradictoryBase(f"no admissible entry for pair orbit {orb}")
        orbit_allowed.append(sorted(vals))
    _check_forced_equalities(terms, orbits, orbit_allowed)

    m = [[EQ if i == j else None for j in range(n)] for i in range(n)]
    results: list[tuple[int, ...]] = []

    def ok_triangles(orb) -> bool:
        for a, b in orb:
            for c in range(n):
                if c == a or c == b:
                    continue
                x, y, z = m[a][b], m[a][c], m[b][c]
                if y is None or z is None:
                    continue
                if x == EQ and y != z:
                    return False
                if y == EQ and x != z:
                    return False
                if z == EQ and x != y:
                    return False
        return True

    def rec(k: int) -> bool:
        if k == len(orbits):
            results.append(tuple(m[i][j] for i in range(n) for j in range(i + 1, n)))
            return limit is not None and len(results) >= limit
        orb = orbits[k]
        for v in orbit_allowed[k]:
            for a, b in orb:
                m[a][b] = m[b][a] = v
            if ok_triangles(orb) and rec(k + 1):
                return True
        for a, b in orb:
            m[a][b] = m[b][a] = None
        return False

    rec(0)
    results.sort()
    out = []
    for vec in results:
        q = Configuration.from_pairs(terms, vec)
        if verify and not is_consistent(q):  # pragma: no cover - guaranteed by construction
            raise AssertionError("enumeration produced an inconsistent configuration")
        out.append(q)
    return out


def _check_forced_equalities(terms: TermSet, orbits, orbit_allowed):
    parent = list(range(terms.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for orb, vals in zip(orbits, orbit_allowed):
        if vals == [EQ]:
            for a, b in orb:
                parent[find(a)] = find(b)
    for orb, vals in zip(orbits, orbit_allowed):
        if EQ not in vals:
            for a, b in orb:
                if find(a) == find(b):
                    raise ContradictoryBase(
                        f"terms {a} and {b} are forced equal but the base separates them")


def configuration_of(m: GStructure, xs: Sequence, ys: Sequence = (),
                     x_names: Sequence[str] = (), y_names: Sequence[str] = ()) -> Configuration:
    """The configuration realised in ``m`` by the tuples ``xs`` (x-part) and ``ys`` (y-part)."""
    if m.signature is not Signature.GRAPH:
        raise InvalidStructure("configurations are defined for graphs")
    idx = m.indices(list(xs) + list(ys))
    terms = TermSet(m.group, len(xs), len(ys), tuple(x_names), tuple(y_names))
    key = diagram_key(m, idx)
    n = terms.size
    return Configuration(terms, tuple(tuple(key[i * n:(i + 1) * n]) for i in range(n)))


def all_configurations(group: FiniteGroup, n: int, n_prime: int) -> list[Configuration]:
    return enumerate_extensions([], TermSet(group, n, n_prime))
