"""The independence relation on orbit closures, its axioms, and type amalgamation.

For the G-set and G-graph theories algebraic closure is trivial in the
ambient theory, so independence of orbit closures comes down to
``G·A ∩ G·B ⊆ G·E``.  The relation is a parameter everywhere so that the axiom
checker can be pointed at deliberately broken variants.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import HypothesisViolated
from .generic import _Builder, free_amalgam_maps, random_structure, verify_extension_axioms
from .group import FiniteGroup, builtin, subgroups
from .structure import GStructure, automorphisms, find_isomorphism, orbit

Relation = Callable[[GStructure, frozenset, frozenset, frozenset], bool]


@dataclass(frozen=True)
class IndepQuery:
    a: frozenset[int]
    e: frozenset[int]
    b: frozenset[int]
    ambient: GStructure
    theory: str = "graph"

    def __post_init__(self):
        for name in ("a", "e", "b"):
            s = frozenset(self.ambient.indices(getattr(self, name)))
            object.__setattr__(self, name, s)


def orbit_relation(m: GStructure, a, e, b) -> bool:
    return (orbit(m, a) & orbit(m, b)) <= orbit(m, e)


def plain_relation(m: GStructure, a, e, b) -> bool:
    """Broken variant: intersection test without orbit closure."""
    return (frozenset(a) & frozenset(b)) <= frozenset(e)


def open_base_relation(m: GStructure, a, e, b) -> bool:
    """Broken variant: orbit closures of A and B, but the base left unclosed."""
    return (orbit(m, a) & orbit(m, b)) <= frozenset(e)


RELATIONS = {"orbit": orbit_relation, "plain": plain_relation, "open-base": open_base_relation}


def indep(q: IndepQuery, relation: Relation = orbit_relation) -> bool:
    return relation(q.ambient, q.a, q.e, q.b)


# ------------------------------------------------------------- axiom suite

AXIOMS = ("invariance", "local_character", "finite_character", "symmetry", "transitivity",
          "existence", "acl_law")


@dataclass
class AxiomReport:
    trials: dict[str, int] = field(default_factory=lambda: {k: 0 for k in AXIOMS})
    failures: dict[str, list] = field(default_factory=lambda: {k: [] for k in AXIOMS})
    failed: dict[str, int] = field(default_factory=lambda: {k: 0 for k in AXIOMS})
    seed: int = 0
    relation: str = "orbit"

    def failure_count(self, axioms: Iterable[str] = AXIOMS) -> int:
        return sum(self.failed[k] for k in axioms)

    @property
    def ok(self) -> bool:
        return self.failure_count() == 0

    def to_json(self) -> dict:
        return {"seed": self.seed, "relation": self.relation,
                "axioms": {k: {"trials": self.trials[k], "failed": self.failed[k],
                               "examples": self.failures[k]}
                           for k in AXIOMS}}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _subset(rng: random.Random, pool: Sequence[int], k: int) -> frozenset[int]:
    return frozenset(rng.sample(list(pool), min(k, len(pool))))


def _labels(m: GStructure, s: Iterable[int]) -> list[str]:
    return sorted(m.universe[i] for i in s)


def _record(report: AxiomReport, axiom: str, ok: bool, m: GStructure, **sets):
    report.trials[axiom] += 1
    if not ok:
        report.failed[axiom] += 1
    if not ok and len(report.failures[axiom]) < 20:
        report.failures[axiom].append({k: _labels(m, v) for k, v in sets.items()})


def check_axioms(theory: str = "graph", groups: Sequence[FiniteGroup | str] = ("z2", "z3", "z2xz2"),
                 trials: int = 100, seed: int = 0, relation: Relation | str = "orbit",
                 max_orbits: int = 4) -> AxiomReport:
    """Test the independence axioms and the acl law on ``trials`` random instances.

    Each trial draws a group, a random G-structure and random sets A, E, B
    from a generator seeded by ``(seed, trial)``.
    """
    rel_name = relation if isinstance(relation, str) else getattr(relation, "__name__", "custom")
    rel = RELATIONS[relation] if isinstance(relation, str) else relation
    grps = [builtin(g) if isinstance(g, str) else g for g in groups]
    report = AxiomReport(seed=seed, relation=rel_name)
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        g = grps[t % len(grps)]
        m = random_structure(g, rng, orbits=rng.randint(1, max_orbits), theory=theory)
        _one_trial(report, m, rel, rng)
    return report


def _one_trial(report: AxiomReport, m: GStructure, rel: Relation, rng: random.Random):
    n = m.size
    pool = range(n)
    a = _subset(rng, pool, rng.randint(0, 3))
    b = _subset(rng, pool, rng.randint(0, 4))
    e = _subset(rng, pool, rng.randint(0, 3))
    base = rel(m, a, e, b)

    # invariance under automorphisms commuting with the action
    autos = list(automorphisms(m, preserve_action=True, limit=24))
    f = rng.choice(autos)
    img = lambda s: frozenset(f[x] for x in s)  # noqa: E731
    _record(report, "invariance", rel(m, img(a), img(e), img(b)) == base, m, a=a, e=e, b=b)

    # local character: a base inside B of size <= |A|·|G|
    bound = len(a) * m.group.order
    cand = _local_base(m, a, b)
    ok = len(cand) <= bound and rel(m, a, cand, b)
    if not ok and len(b) <= 8:
        ok = any(rel(m, a, frozenset(c), b)
                 for k in range(min(bound, len(b)) + 1) for c in itertools.combinations(sorted(b), k))
    _record(report, "local_character", ok, m, a=a, b=b)

    # finite character, tested against all sub-tuples of B of length <= 2
    parts = [frozenset(c) for k in range(3) for c in itertools.combinations(sorted(b), k)]
    _record(report, "finite_character", base == all(rel(m, a, e, p) for p in parts),
            m, a=a, e=e, b=b)

    # symmetry
    _record(report, "symmetry", base == rel(m, b, e, a), m, a=a, e=e, b=b)

    # transitivity over a chain E0 <= E1 <= E2
    e0 = _subset(rng, pool, rng.randint(0, 2))
    e1 = e0 | _subset(rng, pool, rng.randint(0, 3))
    e2 = e1 | _subset(rng, pool, rng.randint(0, 3))
    lhs = rel(m, a, e0, e2)
    rhs = rel(m, a, e0, e1) and rel(m, a, e1, e2)
    _record(report, "transitivity", lhs == rhs, m, a=a, e0=e0, e1=e1, e2=e2)

    # existence: a copy of M over G·E moves A off B
    closed = sorted(orbit(m, e))
    amal, emb = free_amalgam_maps(m, m, [(i, i) for i in closed])
    fa = frozenset(emb[x] for x in a)
    ok = rel(amal, fa, e, b) and _is_iso_over(m, amal, emb, closed)
    _record(report, "existence", ok, m, a=a, e=e, b=b)

    # acl law: A ind_E B iff acl(A) ind_acl(E) acl(B)
    ca, ce, cb = orbit(m, a), orbit(m, e), orbit(m, b)
    ok = base == rel(m, a, ce, b) == rel(m, ca, ce, cb)
    _record(report, "acl_law", ok, m, a=a, e=e, b=b)


def _local_base(m: GStructure, a: frozenset, b: frozenset) -> frozenset[int]:
    """One representative in B for each orbit shared by G·A and G·B."""
    ga = orbit(m, a)
    out, seen = set(), set()
    for x in sorted(b):
        o = m.orbit_of(x)
        if o & ga and o not in seen:
            seen.add(o)
            out.add(x)
    return frozenset(out)


def _is_iso_over(m: GStructure, amal: GStructure, emb: Sequence[int], fixed: Sequence[int]) -> bool:
    """``emb`` is an equivariant embedding of m into amal fixing ``fixed`` pointwise."""
    if any(emb[i] != i for i in fixed):
        return False
    for g in m.group.elements:
        if any(emb[m.act(g, i)] != amal.act(g, emb[i]) for i in range(m.size)):
            return False
    return all(m.related(i, j) == amal.related(emb[i], emb[j])
               for i in range(m.size) for j in range(m.size))


# ------------------------------------------------------ type amalgamation

def same_type(m1: GStructure, t1: Sequence[int], m2: GStructure, t2: Sequence[int],
              base: Iterable[int]) -> dict[int, int] | None:
    """Equivariant isomorphism G·(base ∪ t1) -> G·(base ∪ t2) fixing base, t1 -> t2.

    ``base`` indexes both structures identically (a shared substructure).
    Returns the isomorphism in m1/m2 indices, or None when the types differ.
    """
    base = sorted(set(base))
    if len(t1) != len(t2):
        return None
    d1 = sorted(orbit(m1, list(base) + list(t1)))
    d2 = sorted(orbit(m2, list(base) + list(t2)))
    s1, s2 = m1.induced(d1), m2.induced(d2)
    p1 = {x: k for k, x in enumerate(d1)}
    p2 = {x: k for k, x in enumerate(d2)}
    pins = {p1[x]: p2[x] for x in base}
    for u, v in zip(t1, t2):
        if p1[u] in pins and pins[p1[u]] != p2[v]:
            return None
        pins[p1[u]] = p2[v]
    iso = find_isomorphism(s1, s2, pins)
    if iso is None:
        return None
    return {d1[k]: d2[v] for k, v in iso.items()}


@dataclass
class AmalgamResult:
    structure: GStructure
    c: tuple[int, ...]
    iso_a: dict[int, int]
    iso_b: dict[int, int]
    independent: bool


def independence_theorem_check(n: GStructure, m: Iterable[int], a: Sequence[int], b: Sequence[int],
                               c1: Sequence[int], c2: Sequence[int], theory: str = "graph",
                               relation: Relation = orbit_relation) -> AmalgamResult:
    """Amalgamate tp(c1/Ma) and tp(c2/Mb) into one c independent from ab over M.

    All tuples index the ambient ``n``; ``m`` is a G-closed subset of it.
    Hypotheses: M is generic at bounds (0, 1), a ind_M b, c1 ind_M a, c2 ind_M b
    and c1, c2 have the same type over M.
    """
    mset = frozenset(n.indices(m))
    a, b, c1, c2 = (tuple(n.indices(t)) for t in (a, b, c1, c2))
    if orbit(n, mset) != mset:
        raise HypothesisViolated("M is not closed under the action")
    sub = n.induced(sorted(mset))
    if verify_extension_axioms(sub, theory, 0, 1):
        raise HypothesisViolated("M fails the extension axioms at bounds (0, 1)")
    if not relation(n, frozenset(a), mset, frozenset(b)):
        raise HypothesisViolated("a is not independent from b over M")
    if not relation(n, frozenset(c1), mset, frozenset(a)):
        raise HypothesisViolated("c1 is not independent from a over M")
    if not relation(n, frozenset(c2), mset, frozenset(b)):
        raise HypothesisViolated("c2 is not independent from b over M")
    phi = same_type(n, c1, n, c2, mset)
    if phi is None:
        raise HypothesisViolated("c1 and c2 have different types over M")

    keep = sorted(orbit(n, list(mset) + list(a) + list(b)))
    pos = {x: k for k, x in enumerate(keep)}
    bl = _Builder(n.induced(keep))
    gm = mset
    ga_out = orbit(n, a) - gm
    gb_out = orbit(n, b) - gm
    new1 = sorted(orbit(n, c1) - gm)
    # copy of G·c1 outside M, with the action of n
    copy = {}
    for x in new1:
        copy[x] = bl.size
        bl.labels.append(bl.fresh_label())
        bl.used.add(bl.labels[-1])
        bl.adj.append(set())
    for gi in n.group.elements:
        row = bl.act[gi]
        row.extend([0] * len(new1))
        for x in new1:
            row[copy[x]] = copy[n.act(gi, x)]

    def edge(u, v):
        bl.adj[u].add(v)
        bl.adj[v].add(u)

    for x in new1:
        for y in new1:
            if n.related(x, y):
                edge(copy[x], copy[y])
        for t in gm | ga_out:  # relations to M and a as c1 has them
            if n.related(x, t):
                edge(copy[x], pos[t])
        for t in gb_out:  # relations to b as c2 has them
            if n.related(phi[x], t):
                edge(copy[x], pos[t])
    out = bl.build()
    c = tuple(copy[x] if x in copy else pos[x] for x in c1)

    def transport(tup):
        return tuple(pos[x] for x in tup)

    base_a = [pos[x] for x in sorted(orbit(n, list(mset) + list(a)))]
    base_b = [pos[x] for x in sorted(orbit(n, list(mset) + list(b)))]
    iso_a = _type_iso(out, c, n, c1, base_a, keep)
    iso_b = _type_iso(out, c, n, c2, base_b, keep)
    ind = relation(out, frozenset(c), frozenset(pos[x] for x in mset),
                   frozenset(transport(a) + transport(b)))
    if iso_a is None or iso_b is None or not ind:  # pragma: no cover - guarded by tests
        raise AssertionError("amalgam does not realise both types independently")
    return AmalgamResult(out, c, iso_a, iso_b, ind)


def _type_iso(out: GStructure, c, n: GStructure, ci, base_out: Sequence[int], keep: Sequence[int]):
    """Isomorphism from G·(base ∪ c) in ``out`` to G·(base ∪ ci) in ``n`` fixing base."""
    d1 = sorted(orbit(out, list(base_out) + list(c)))
    d2 = sorted(orbit(n, [keep[x] for x in base_out] + list(ci)))
    s1, s2 = out.induced(d1), n.induced(d2)
    p1 = {x: k for k, x in enumerate(d1)}
    p2 = {x: k for k, x in enumerate(d2)}
    pins = {p1[x]: p2[keep[x]] for x in base_out}
    for u, v in zip(c, ci):
        if p1[u] in pins and pins[p1[u]] != p2[v]:
            return None
        pins[p1[u]] = p2[v]
    iso = find_isomorphism(s1, s2, pins)
    return None if iso is None else {d1[k]: d2[v] for k, v in iso.items()}


def random_theorem_instance(group: FiniteGroup, rng: random.Random, theory: str = "graph",
                            m: GStructure | None = None):
    """A random ambient structure and tuples satisfying the amalgamation hypotheses."""
    from .generic import SaturationState, saturate_empty, saturate_graph

    if m is None:
        st = SaturationState.empty(group, theory)
        m = (saturate_graph(st, 1, n_bound=0) if theory == "graph" else saturate_empty(st, 1)).current
    subs = [tuple(h.members) for h in subgroups(group)]
    bl = _Builder(m)
    graph = theory == "graph"
    mset = list(range(m.size))

    def rnd_nbrs(pool):
        return [t for t in pool if graph and rng.random() < 0.3]

    def rnd_internal(h):
        if not graph:
            return []
        return [k for k in group.elements if k not in h and rng.random() < 0.3]

    def safe_internal(h, ks):
        hs = set(h)
        closed = {group.mul(group.mul(u, k), v) for k in ks for u in hs for v in hs}
        closed |= {group.inv(k) for k in closed}
        return ks if not closed & hs else []

    ha = rng.choice(subs)
    a = bl.add_orbit(ha, rnd_nbrs(mset), safe_internal(ha, rnd_internal(ha)))[0]
    hb = rng.choice(subs)
    b = bl.add_orbit(hb, rnd_nbrs(mset + [a]), safe_internal(hb, rnd_internal(hb)))[0]
    hc = rng.choice(subs)
    to_m = rnd_nbrs(mset)
    internal = safe_internal(hc, rnd_internal(hc))
    c1 = bl.add_orbit(hc, to_m + rnd_nbrs([a, b]), internal)[0]
    c2 = bl.add_orbit(hc, to_m + rnd_nbrs([a, b, c1]), internal)[0]
    n = bl.build()
    return n, mset, (a,), (b,), (c1,), (c2,)
