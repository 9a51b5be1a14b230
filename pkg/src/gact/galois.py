"""Galois-type computations on finite structures.

Automorphism groups are enumerated by backtracking, so everything here is
bounded by the size of the extension (``BoundExceeded`` beyond it).
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import InitVar, dataclass, field
from typing import Iterable, Sequence

from .errors import BoundExceeded, NotSubgroup
from .group import FiniteGroup, permutation_group, subgroups
from .structure import GStructure, automorphisms, find_automorphism, invariants

DEFAULT_BOUND = 12


@dataclass(frozen=True)
class FiniteExtension:
    ambient: GStructure
    base: frozenset[int]
    whole: frozenset[int]
    preserve_action: bool = False

    def __post_init__(self):
        a = frozenset(self.ambient.indices(self.base))
        c = frozenset(self.ambient.indices(self.whole))
        if not a <= c:
            raise ValueError("base must be contained in the extension")
        object.__setattr__(self, "base", a)
        object.__setattr__(self, "whole", c)

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(sorted(self.whole))


@dataclass(frozen=True)
class PermGroup:
    """Permutations of ``domain`` stored as image tuples in domain order."""
    domain: tuple[int, ...]
    elements: frozenset[tuple[int, ...]]
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "elements", frozenset(tuple(p) for p in self.elements))
        if not validate:
            return
        if self.domain not in self.elements:
            raise NotSubgroup("identity missing")
        pos = {x: i for i, x in enumerate(self.domain)}
        for p in self.elements:
            for q in self.elements:
                if _compose(p, q, pos) not in self.elements:
                    raise NotSubgroup("not closed under composition")

    @functools.cached_property
    def generators(self) -> tuple[tuple[int, ...], ...]:
        """Deterministic generating set, scanned in lexicographic order."""
        return _generators(self.elements, self.domain)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.elements

    def __le__(self, other: "PermGroup") -> bool:
        return self.domain == other.domain and self.elements <= other.elements

    def as_maps(self) -> list[dict[int, int]]:
        return [dict(zip(self.domain, p)) for p in sorted(self.elements)]

    def to_finite_group(self) -> tuple[FiniteGroup, list[tuple[int, ...]]]:
        """The abstract group and the permutation behind each of its indices."""
        pos = {x: i for i, x in enumerate(self.domain)}
        local = [tuple(pos[y] for y in p) for p in self.elements]
        g = permutation_group(local)
        ident = tuple(range(len(self.domain)))
        order = [ident] + sorted(p for p in local if p != ident)
        back = [tuple(self.domain[i] for i in p) for p in order]
        return g, back

    def to_json(self) -> dict:
        return {"domain": list(self.domain), "order": self.order,
                "generators": [list(p) for p in self.generators]}


def _compose(p, q, pos) -> tuple[int, ...]:
    """(p o q) in image-tuple form."""
    return tuple(p[pos[q[i]]] for i in range(len(q)))


def _closure(gens: Iterable[tuple[int, ...]], domain: tuple[int, ...]) -> frozenset:
    pos = {x: i for i, x in enumerate(domain)}
    out = {tuple(domain)}
    frontier = list(out)
    gens = list(gens)
    while frontier:
        p = frontier.pop()
        for s in gens:
            r = _compose(s, p, pos)
            if r not in out:
                out.add(r)
                frontier.append(r)
    return frozenset(out)


def _generators(elements: frozenset, domain: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Greedy generating set: scan in lexicographic order, keep what is not yet generated."""
    gens: list[tuple[int, ...]] = []
    span = frozenset([tuple(domain)])
    for p in sorted(elements):
        if p not in span:
            gens.append(p)
            span = _closure(gens, domain)
            if span == elements:
                break
    return tuple(gens)


def generated(domain: Sequence[int], gens: Iterable[Sequence[int]]) -> PermGroup:
    d = tuple(domain)
    return PermGroup(d, _closure((tuple(g) for g in gens), d), False)


def _check_bound(n: int, bound: int):
    if n > bound:
        raise BoundExceeded(f"{n} elements exceed the bound {bound}")


def aut_group(ext: FiniteExtension, bound: int = DEFAULT_BOUND) -> PermGroup:
    """Relation-preserving bijections of C fixing A pointwise."""
    _check_bound(len(ext.whole), bound)
    dom = ext.domain
    maps = automorphisms(ext.ambient, fixed=ext.base, domain=dom,
                         preserve_action=ext.preserve_action)
    return PermGroup(dom, frozenset(tuple(f[x] for x in dom) for f in maps), False)


def alpha(ext: FiniteExtension, b: Iterable[int], aut: PermGroup | None = None,
          bound: int = DEFAULT_BOUND) -> PermGroup:
    """Aut(C/B): the pointwise stabilizer of B."""
    bset = frozenset(ext.ambient.indices(b))
    if not ext.base <= bset <= ext.whole:
        raise ValueError("need A ⊆ B ⊆ C")
    aut = aut or aut_group(ext, bound)
    pos = {x: i for i, x in enumerate(aut.domain)}
    keep = frozenset(p for p in aut.elements if all(p[pos[x]] == x for x in bset))
    return PermGroup(aut.domain, keep, False)


def beta(ext: FiniteExtension, h: PermGroup, aut: PermGroup | None = None,
         bound: int = DEFAULT_BOUND) -> frozenset[int]:
    """C^H: the points of C fixed by every element of H."""
    aut = aut or aut_group(ext, bound)
    if h.domain != aut.domain or not h.elements <= aut.elements:
        raise NotSubgroup("H is not a subgroup of Aut(C/A)")
    return frozenset(x for i, x in enumerate(aut.domain) if all(p[i] == x for p in h.elements))


@dataclass
class GaloisReport:
    laws_hold: bool
    full_correspondence: bool
    intermediates: int
    subgroups: int
    aut_order: int
    law_failures: list = field(default_factory=list)
    correspondence_failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def all_subgroups(aut: PermGroup) -> list[PermGroup]:
    g, back = aut.to_finite_group()
    return [PermGroup(aut.domain, frozenset(back[i] for i in h.members), False) for h in subgroups(g)]


def galois_connection_check(ext: FiniteExtension, bound: int = DEFAULT_BOUND) -> GaloisReport:
    """alpha·beta·alpha = alpha and beta·alpha·beta = beta everywhere; full correspondence reported."""
    aut = aut_group(ext, bound)
    free = sorted(ext.whole - ext.base)
    inters = [ext.base | frozenset(c) for k in range(len(free) + 1)
              for c in itertools.combinations(free, k)]
    subs = all_subgroups(aut)
    law_fail, corr_fail = [], []
    for b in inters:
        a1 = alpha(ext, b, aut)
        if alpha(ext, beta(ext, a1, aut), aut).elements != a1.elements:
            law_fail.append({"kind": "alpha", "set": sorted(b)})
    for h in subs:
        b1 = beta(ext, h, aut)
        if beta(ext, alpha(ext, b1, aut), aut) != b1:
            law_fail.append({"kind": "beta", "subgroup": [list(p) for p in h.generators]})
        if alpha(ext, b1, aut).elements != h.elements:
            corr_fail.append({"subgroup": [list(p) for p in h.generators], "order": h.order,
                              "closure_order": alpha(ext, b1, aut).order})
    return GaloisReport(not law_fail, not corr_fail, len(inters), len(subs), aut.order,
                        law_fail, corr_fail)


def n_galois_orbit_check(n: GStructure, ambient: GStructure, b, embedding: Sequence[int] | None = None,
                         bound: int = DEFAULT_BOUND) -> bool:
    """Whether the orbit of b under Aut(ambient / invariants(N)) is G·b.

    ``embedding`` maps N's indices into the ambient (default: by label).
    """
    _check_bound(ambient.size, bound)
    emb = list(embedding) if embedding is not None else [ambient.index(u) for u in n.universe]
    bi = n.index(b)
    inv = [emb[x] for x in invariants(n)]
    g_orbit = {emb[x] for x in n.orbit_of(bi)}
    aut_orbit = {d for d in range(ambient.size)
                 if find_automorphism(ambient, fixed=inv, partial={emb[bi]: d}) is not None}
    return aut_orbit == g_orbit


def n_galois_orbit_check_all(n: GStructure, ambient: GStructure, embedding=None,
                             bound: int = DEFAULT_BOUND) -> dict[str, bool]:
    return {n.universe[b]: n_galois_orbit_check(n, ambient, b, embedding, bound)
            for b in range(n.size)}


def generated_by_action_check(f: GStructure, base: Iterable[int] | None = None,
                              bound: int = DEFAULT_BOUND) -> bool:
    """Whether the action's permutations generate Aut(F / invariants(F))."""
    inv = invariants(f)
    base = inv if base is None else frozenset(f.indices(base))
    if base != inv:
        raise ValueError("base must be the set of invariants")
    ext = FiniteExtension(f, base, frozenset(range(f.size)))
    aut = aut_group(ext, bound)
    sub = generated(aut.domain, [tuple(p) for p in f.action])
    return sub.elements == aut.elements
