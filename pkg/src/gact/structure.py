"""Finite structures with a group acting by automorphisms.

Three signatures are supported: pure equality, one irreflexive symmetric
relation ``R`` (graphs) and one strict linear order ``<``.  The action is a
tuple of permutations indexed by group element; construction rejects anything
that is not an action by automorphisms.
"""
from __future__ import annotations

import enum
import functools
import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Protocol, Sequence

from .errors import BudgetExceeded, InvalidStructure, UnknownElement
from .group import FiniteGroup, trivial
from .logic.formula import Eq, Exists, Formula, Not, Rel, Term, conj


class Signature(enum.Enum):
    EMPTY = "empty"
    GRAPH = "graph"
    ORDER = "order"

    @property
    def symbol(self) -> str | None:
        return {"empty": None, "graph": "R", "order": "<"}[self.value]


@dataclass(frozen=True, eq=False)
class GStructure:
    signature: Signature
    universe: tuple[str, ...]
    relation: frozenset[tuple[int, int]]
    group: FiniteGroup
    action: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "relation", frozenset((int(a), int(b)) for a, b in self.relation))
        object.__setattr__(self, "action", tuple(tuple(p) for p in self.action))
        self._validate()

    # -- validation -----------------------------------------------------------
    def _validate(self):
        n, g = len(self.universe), self.group
        if len(set(self.universe)) != n:
            raise InvalidStructure("duplicate element labels")
        if len(self.action) != g.order:
            raise InvalidStructure("need one permutation per group element")
        full = list(range(n))
        for p in self.action:
            if len(p) != n or sorted(p) != full:
                raise InvalidStructure("action entries must be permutations of the universe")
        if self.action[g.identity] != tuple(full):
            raise InvalidStructure("identity must act trivially")
        for a in g.elements:
            pa = self.action[a]
            for b in g.elements:
                pb, pab = self.action[b], self.action[g.mul(a, b)]
                if any(pa[pb[i]] != pab[i] for i in full):
                    raise InvalidStructure(f"sigma_{g.names[a]} o sigma_{g.names[b]} "
                                           f"!= sigma_{g.names[g.mul(a, b)]}")
        rel = self.relation
        for a, b in rel:
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidStructure("relation refers to unknown element")
        sig = self.signature
        if sig is Signature.EMPTY and rel:
            raise InvalidStructure("empty signature carries no relation")
        if sig is Signature.GRAPH:
            if any(a == b for a, b in rel):
                raise InvalidStructure("R must be irreflexive")
            if any((b, a) not in rel for a, b in rel):
                raise InvalidStructure("R must be symmetric")
        if sig is Signature.ORDER:
            for a in range(n):
                if (a, a) in rel:
                    raise InvalidStructure("< must be irreflexive")
                for b in range(a + 1, n):
                    if ((a, b) in rel) == ((b, a) in rel):
                        raise InvalidStructure("< must be total and antisymmetric")
            for a, b in rel:
                for c in range(n):
                    if (b, c) in rel and (a, c) not in rel:
                        raise InvalidStructure("< must be transitive")
        for p in self.action:
            for a, b in rel:
                if (p[a], p[b]) not in rel:
                    raise InvalidStructure("action does not preserve the relation")

    # -- basic access ----------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.universe)

    def __len__(self):
        return len(self.universe)

    def act(self, g: int, i: int) -> int:
        return self.action[g][i]

    def related(self, a: int, b: int) -> bool:
        return (a, b) in self.relation

    @functools.cached_property
    def neighbours(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in self.universe]
        for a, b in self.relation:
            out[a].add(b)
        return tuple(frozenset(s) for s in out)

    @functools.cached_property
    def _label_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.universe)}

    def index(self, label: str | int) -> int:
        if isinstance(label, int):
            if 0 <= label < self.size:
                return label
            raise UnknownElement(f"no element {label}")
        try:
            return self._label_index[label]
        except KeyError:
            raise UnknownElement(f"no element {label!r}") from None

    def indices(self, labels: Iterable[str | int]) -> list[int]:
        return [self.index(x) for x in labels]

    def orbit_of(self, i: int) -> frozenset[int]:
        return frozenset(p[i] for p in self.action)

    def stabilizer(self, i: int) -> tuple[int, ...]:
        return tuple(g for g in self.group.elements if self.action[g][i] == i)

    @functools.cached_property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        seen, out = set(), []
        for i in range(self.size):
            if i not in seen:
                o = tuple(sorted(self.orbit_of(i)))
                seen.update(o)
                out.append(o)
        return tuple(out)

    def induced(self, members: Iterable[int]) -> "GStructure":
        """Substructure on a G-closed subset, relabelled in increasing index order."""
        members = sorted(set(members))
        pos = {m: k for k, m in enumerate(members)}
        for p in self.action:
            if any(p[m] not in pos for m in members):
                raise InvalidStructure("induced substructure must be closed under the action")
        rel = {(pos[a], pos[b]) for a, b in self.relation if a in pos and b in pos}
        action = tuple(tuple(pos[p[m]] for m in members) for p in self.action)
        return GStructure(self.signature, tuple(self.universe[m] for m in members),
                          frozenset(rel), self.group, action)

    # -- serialization ---------------------------------------------------------
    def to_json(self) -> dict:
        pairs = self.relation
        if self.signature is Signature.GRAPH:
            pairs = {(a, b) for a, b in pairs if a < b}
        rels = {}
        if self.signature.symbol:
            rels[self.signature.symbol] = [list(p) for p in sorted(pairs)]
        return {
            "signature": self.signature.value,
            "group": self.group.to_json(),
            "universe": list(self.universe),
            "relations": rels,
            "action": {self.group.names[g]: list(self.action[g]) for g in self.group.elements},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "GStructure":
        sig = Signature(data["signature"])
        group = FiniteGroup.from_json(data["group"])
        universe = tuple(str(u) for u in data["universe"])
        pairs: set[tuple[int, int]] = set()
        for _, plist in (data.get("relations") or {}).items():
            for a, b in plist:
                pairs.add((a, b))
                if sig is Signature.GRAPH:
                    pairs.add((b, a))
        act = data.get("action") or {}
        action = []
        for g in group.elements:
            name = group.names[g]
            action.append(tuple(act[name]) if name in act else tuple(range(len(universe))))
        return cls(sig, universe, frozenset(pairs), group, tuple(action))

    @classmethod
    def loads(cls, text: str) -> "GStructure":
        return cls.from_json(json.loads(text))

    def __repr__(self):
        return (f"GStructure({self.signature.value}, |M|={self.size}, "
                f"|R|={len(self.relation)}, |G|={self.group.order})")


def make_structure(signature: Signature | str, universe: Sequence[str] | int,
                   relation: Iterable[tuple[int, int]] = (), group: FiniteGroup | None = None,
                   action: dict | Sequence[Sequence[int]] | None = None,
                   symmetric: bool = True) -> GStructure:
    """Convenience constructor; graph edges are symmetrised, missing actions default to identity.

    ``action`` may map group element names to permutations, or list permutations
    of the generators-free form (one per element in index order).
    """
    sig = Signature(signature) if isinstance(signature, str) else signature
    if isinstance(universe, int):
        universe = [f"v{i}" for i in range(universe)]
    group = group or trivial()
    n = len(universe)
    rel = set()
    for a, b in relation:
        rel.add((a, b))
        if sig is Signature.GRAPH and symmetric:
            rel.add((b, a))
    if action is None:
        perms = [tuple(range(n))] * group.order
    elif isinstance(action, dict):
        perms = [tuple(range(n))] * group.order
        for k, p in action.items():
            perms[group.index(k) if isinstance(k, str) else k] = tuple(p)
    else:
        perms = [tuple(p) for p in action]
    return GStructure(sig, tuple(universe), frozenset(rel), group, tuple(perms))


def regular_action(group: FiniteGroup, offset: int = 0) -> list[tuple[int, ...]]:
    """Left-multiplication action of ``group`` on ``offset + g`` for g in G."""
    return [tuple(offset + group.mul(g, h) for h in group.elements) for g in group.elements]


def disjoint_union(parts: Sequence[GStructure]) -> GStructure:
    """Disjoint union without cross edges; labels are prefixed when they clash."""
    if not parts:
        raise InvalidStructure("need at least one part")
    group, sig = parts[0].group, parts[0].signature
    labels, rel, offset = [], set(), 0
    perms = [[] for _ in group.elements]
    used: set[str] = set()
    for k, m in enumerate(parts):
        if m.group != group or m.signature != sig:
            raise InvalidStructure("parts must share group and signature")
        for lab in m.universe:
            lab2 = lab if lab not in used else f"{k}:{lab}"
            used.add(lab2)
            labels.append(lab2)
        rel |= {(a + offset, b + offset) for a, b in m.relation}
        for g in group.elements:
            perms[g].extend(offset + x for x in m.action[g])
        offset += m.size
    return GStructure(sig, tuple(labels), frozenset(rel), group, tuple(tuple(p) for p in perms))


# ------------------------------------------------------------------- operations

def orbit(m: GStructure, elements: Iterable[str | int]) -> frozenset[int]:
    """G·A: the union of orbits of the given elements."""
    out: set[int] = set()
    for i in m.indices(elements):
        out |= m.orbit_of(i)
    return frozenset(out)


def invariants(m: GStructure) -> frozenset[int]:
    """Elements fixed by every sigma_g."""
    return frozenset(i for i in range(m.size) if all(p[i] == i for p in m.action))


def term_list(m: GStructure, n_vars: int) -> list[tuple[int, int]]:
    """Canonical term order: (variable index, group element) pairs."""
    return [(v, g) for v in range(n_vars) for g in m.group.elements]


def diagram_key(m: GStructure, tup: Sequence[int]) -> tuple[int, ...]:
    """Compact atomic diagram of ``tup``: one code per ordered pair of terms.

    Codes: 0 equal, 1 related, 2 neither.  Two tuples of equal length realise the
    same quantifier-free type iff their keys coincide.
    """
    vals = [m.action[g][tup[v]] for v in range(len(tup)) for g in m.group.elements]
    rel = m.relation
    return tuple(0 if a == b else (1 if (a, b) in rel else 2) for a in vals for b in vals)


def atomic_diagram(m: GStructure, tup: Sequence[str | int], names: Sequence[str] | None = None
                   ) -> frozenset[Formula]:
    """All (in)equalities and (non)relations among the terms sigma_g(x_i).

    Equalities are listed once per unordered pair (including ``t = t``);
    relation literals for every ordered pair of terms.
    """
    idx = m.indices(tup)
    names = list(names) if names is not None else [f"x{i}" for i in range(len(idx))]
    terms = [Term(names[v], g) for v, g in term_list(m, len(idx))]
    vals = [m.action[g][idx[v]] for v, g in term_list(m, len(idx))]
    sym = m.signature.symbol
    lits: set[Formula] = set()
    for a in range(len(terms)):
        for b in range(len(terms)):
            if a <= b:
                e = Eq(terms[a], terms[b])
                lits.add(e if vals[a] == vals[b] else Not(e))
            if sym is not None and a != b:
                r = Rel(sym, terms[a], terms[b])
                lits.add(r if (vals[a], vals[b]) in m.relation else Not(r))
    return frozenset(lits)


# -------------------------------------------------------------- automorphisms

def automorphisms(m: GStructure, fixed: Iterable[int] = (), domain: Iterable[int] | None = None,
                  preserve_action: bool = False, partial: dict[int, int] | None = None,
                  limit: int | None = None) -> Iterator[dict[int, int]]:
    """Backtracking search for automorphisms of (the substructure on) ``domain``.

    Yields maps as dicts over the domain.  ``fixed`` elements are fixed pointwise,
    ``partial`` pins further images.  With ``preserve_action`` only maps commuting
    with every sigma_g are produced (the domain must then be G-closed).
    Candidates are pruned by in/out degree inside the domain and, when the
    action is preserved, by stabilizer; branching is on the lowest index.
    """
    dom = sorted(set(range(m.size) if domain is None else domain))
    dset = set(dom)
    rel = m.relation
    outdeg = {i: sum(1 for j in dom if (i, j) in rel) for i in dom}
    indeg = {i: sum(1 for j in dom if (j, i) in rel) for i in dom}
    colour = {i: (outdeg[i], indeg[i]) for i in dom}
    if preserve_action:
        for i in dom:
            colour[i] += (m.stabilizer(i),)
    start: dict[int, int] = {i: i for i in fixed if i in dset}
    for k, v in (partial or {}).items():
        if k not in dset or v not in dset:
            return
        if start.get(k, v) != v:
            return
        start[k] = v
    count = 0

    def consistent(f: dict[int, int], a: int, b: int) -> bool:
        if colour[a] != colour[b]:
            return False
        for x, y in f.items():
            if ((a, x) in rel) != ((b, y) in rel) or ((x, a) in rel) != ((y, b) in rel):
                return False
        return ((a, a) in rel) == ((b, b) in rel)

    def assign(f: dict[int, int], used: set[int], a: int, b: int) -> list[int] | None:
        """Assign a->b and everything the action forces; returns the keys added."""
        todo = [(a, b)]
        added: list[int] = []
        while todo:
            x, y = todo.pop()
            if x in f:
                if f[x] != y:
                    break
                continue
            if y in used or not consistent(f, x, y):
                break
            f[x] = y
            used.add(y)
            added.append(x)
            if preserve_action:
                for p in m.action:
                    todo.append((p[x], p[y]))
        else:
            return added
        for x in added:
            used.discard(f.pop(x))
        return None

    f: dict[int, int] = {}
    used: set[int] = set()
    for a, b in sorted(start.items()):
        if assign(f, used, a, b) is None:
            return

    def rec() -> Iterator[dict[int, int]]:
        nonlocal count
        if len(f) == len(dom):
            count += 1
            yield dict(f)
            return
        a = next(i for i in dom if i not in f)
        for b in dom:
            if b in used:
                continue
            added = assign(f, used, a, b)
            if added is None:
                continue
            yield from rec()
            for x in added:
                used.discard(f.pop(x))
            if limit is not None and count >= limit:
                return

    yield from rec()


def find_automorphism(m: GStructure, **kw) -> dict[int, int] | None:
    return next(automorphisms(m, limit=1, **kw), None)


def find_isomorphism(m1: GStructure, m2: GStructure, pins: dict[int, int] | None = None,
                     preserve_action: bool = True) -> dict[int, int] | None:
    """An isomorphism m1 -> m2 extending ``pins``, commuting with the action if asked."""
    if m1.size != m2.size or len(m1.relation) != len(m2.relation) or m1.signature != m2.signature:
        return None
    r1, r2 = m1.relation, m2.relation

    def colour(m, i):
        c = (len(m.neighbours[i]), sum(1 for a, b in m.relation if b == i))
        return c + ((m.stabilizer(i),) if preserve_action else ())

    c1 = [colour(m1, i) for i in range(m1.size)]
    c2 = [colour(m2, i) for i in range(m2.size)]
    if sorted(c1) != sorted(c2):
        return None
    f: dict[int, int] = {}
    used: set[int] = set()

    def assign(a: int, b: int) -> list[int] | None:
        todo, added = [(a, b)], []
        while todo:
            x, y = todo.pop()
            if x in f:
                if f[x] != y:
                    break
                continue
            if y in used or c1[x] != c2[y]:
                break
            if any(((x, u) in r1) != ((y, v) in r2) or ((u, x) in r1) != ((v, y) in r2)
                   for u, v in f.items()):
                break
            f[x] = y
            used.add(y)
            added.append(x)
            if preserve_action:
                for g in m1.group.elements:
                    todo.append((m1.action[g][x], m2.action[g][y]))
        else:
            return added
        for x in added:
            used.discard(f.pop(x))
        return None

    for a, b in sorted((pins or {}).items()):
        if assign(a, b) is None:
            return None

    def rec() -> bool:
        if len(f) == m1.size:
            return True
        a = next(i for i in range(m1.size) if i not in f)
        for b in range(m2.size):
            if b in used:
                continue
            added = assign(a, b)
            if added is None:
                continue
            if rec():
                return True
            for x in added:
                used.discard(f.pop(x))
        return False

    return dict(f) if rec() else None


# ------------------------------------------------------- extension predicates

@dataclass(frozen=True)
class ExtensionPair:
    """A substructure ``small`` of ``big``, given as an index set of ``big``.

    Use :meth:`from_embedding` to start from a separate small structure.
    """
    big: GStructure
    small: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "small", frozenset(self.small))
        for i in self.small:
            if not 0 <= i < self.big.size:
                raise UnknownElement(f"no element {i}")
        for p in self.big.action:
            if any(p[i] not in self.small for i in self.small):
                raise InvalidStructure("small part must be closed under the action")

    @classmethod
    def from_embedding(cls, small: GStructure, big: GStructure,
                       embedding: Sequence[int]) -> "ExtensionPair":
        emb = list(embedding)
        if len(emb) != small.size or len(set(emb)) != len(emb):
            raise InvalidStructure("embedding must be injective")
        for a in range(small.size):
            for b in range(small.size):
                if small.related(a, b) != big.related(emb[a], emb[b]):
                    raise InvalidStructure("embedding must preserve and reflect relations")
        if small.group == big.group:
            for g in small.group.elements:
                if any(emb[small.act(g, a)] != big.act(g, emb[a]) for a in range(small.size)):
                    raise InvalidStructure("embedding must commute with the action")
        return cls(big, frozenset(emb))


@dataclass
class ECResult:
    holds: bool
    var_bound: int
    param_bound: int
    checked: int
    formula: Formula | None = None
    params: tuple[str, ...] = ()

    def __bool__(self):
        return self.holds


def _type_over(m: GStructure, ys: Sequence[int], closed: frozenset[int]) -> tuple:
    """Quantifier-free type of the tuple ``ys`` over the G-closed set ``closed``."""
    vals = [m.action[g][y] for y in ys for g in m.group.elements]
    rel = m.relation
    key = []
    for a in vals:
        key.append(("in", a) if a in closed else ("out",))
        key.append(tuple(sorted(c for c in closed if (a, c) in rel)))
        key.append(tuple(sorted(c for c in closed if (c, a) in rel)))
    for a in vals:
        for b in vals:
            key.append(0 if a == b else (1 if (a, b) in rel else 2))
    return tuple(key)


def _type_formula(m: GStructure, ys: Sequence[int], params: Sequence[int]) -> Formula:
    g = m.group
    pnames = [f"p{k}" for k in range(len(params))]
    rep: dict[int, Term] = {}
    for k, p in enumerate(params):
        for h in g.elements:
            rep.setdefault(m.action[h][p], Term(pnames[k], h))
    sym = m.signature.symbol
    yterms = [(Term(f"y{k}", h), m.action[h][y]) for k, y in enumerate(ys) for h in g.elements]
    lits: list[Formula] = []
    for t, a in yterms:
        for c, s in sorted(rep.items(), key=lambda kv: kv[0]):
            lits.append(Eq(t, s) if a == c else Not(Eq(t, s)))
            if sym:
                lits.append(Rel(sym, t, s) if m.related(a, c) else Not(Rel(sym, t, s)))
        for u, b in yterms:
            if (t, a) < (u, b):
                lits.append(Eq(t, u) if a == b else Not(Eq(t, u)))
            if sym and t != u:
                lits.append(Rel(sym, t, u) if m.related(a, b) else Not(Rel(sym, t, u)))
    body = conj(lits)
    for k in reversed(range(len(ys))):
        body = Exists(f"y{k}", body)
    return body


def is_existentially_closed(pair: ExtensionPair, var_bound: int = 1, param_bound: int | None = None,
                            node_cap: int = 2_000_000) -> ECResult:
    """Check ``small <=_1 big`` for systems with at most ``var_bound`` unknowns.

    A system with parameters p (at most ``param_bound`` of them, default
    ``var_bound``) is captured by the complete quantifier-free type of the
    unknowns over G·p, so it suffices to ask, for every parameter set and every
    tuple of ``big``, whether ``small`` realises the same type.
    """
    if var_bound < 1:
        raise ValueError("var_bound must be at least 1")
    pb = var_bound if param_bound is None else param_bound
    m, small = pair.big, sorted(pair.small)
    param_sets = [c for r in range(pb + 1) for c in itertools.combinations(small, r)]
    cost = len(param_sets) * sum(m.size ** k for k in range(1, var_bound + 1))
    if cost > node_cap:
        raise BudgetExceeded(f"{cost} candidate tuples exceed node cap {node_cap}")
    checked = 0
    for params in param_sets:
        closed = frozenset(x for p in params for x in m.orbit_of(p))
        for k in range(1, var_bound + 1):
            realised = {_type_over(m, ys, closed) for ys in itertools.product(small, repeat=k)}
            for ys in itertools.product(range(m.size), repeat=k):
                checked += 1
                if _type_over(m, ys, closed) not in realised:
                    return ECResult(False, var_bound, pb, checked, _type_formula(m, ys, params),
                                    tuple(m.universe[p] for p in params))
    return ECResult(True, var_bound, pb, checked)


class ClosureOracle(Protocol):
    def dcl(self, elements: Iterable[int]) -> frozenset[int]: ...

    def acl(self, elements: Iterable[int]) -> frozenset[int]: ...


def is_regular_extension(e: Iterable[int], a: Iterable[int], closure: ClosureOracle) -> bool:
    """dcl(A) ∩ acl(E) ⊆ dcl(E) for E ⊆ A."""
    e, a = frozenset(e), frozenset(a)
    if not e <= a:
        raise ValueError("E must be a subset of A")
    return (closure.dcl(a) & closure.acl(e)) <= closure.dcl(e)


def is_normal_extension(a: Iterable[int], c: Iterable[int], ambient: GStructure) -> bool:
    """Every automorphism of ``ambient`` fixing A pointwise maps C into C."""
    a, c = frozenset(a), frozenset(c)
    if not a <= c:
        raise ValueError("A must be a subset of C")
    outside = [d for d in range(ambient.size) if d not in c]
    for x in sorted(c - a):
        for d in outside:
            if find_automorphism(ambient, fixed=a, partial={x: d}) is not None:
                return False
    return True


def is_order_preserving(perm: Sequence[int], order: GStructure | None = None) -> bool:
    """Whether ``perm`` preserves ``<`` (the natural order on indices by default)."""
    if order is None:
        return all(perm[i] < perm[i + 1] for i in range(len(perm) - 1))
    return all((perm[a], perm[b]) in order.relation for a, b in order.relation)


def order_rigidity_check(m: GStructure) -> bool:
    """A finite group acting on a finite chain by order automorphisms acts trivially."""
    if m.signature is not Signature.ORDER:
        raise InvalidStructure("order_rigidity_check needs the ORDER signature")
    ident = tuple(range(m.size))
    return all(p == ident for p in m.action)


def chain(n: int, group: FiniteGroup | None = None,
          action: dict | Sequence[Sequence[int]] | None = None) -> GStructure:
    """The chain v0 < v1 < ... < v(n-1)."""
    rel = [(a, b) for a in range(n) for b in range(a + 1, n)]
    return make_structure(Signature.ORDER, n, rel, group, action)
