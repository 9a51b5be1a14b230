"""Finite groups given by multiplication tables.

Elements are integer indices ``0..order-1``; ``table[a][b]`` is the index of
``a*b``.  Subgroups are kept as sorted member tuples so that every listing has
one canonical order (by size, then lexicographically by members).
"""
from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidGroup, NotNormal, NotSurjective


@dataclass(frozen=True)
class FiniteGroup:
    order: int
    table: tuple[tuple[int, ...], ...]
    names: tuple[str, ...]
    identity: int = 0
    _inverse: tuple[int, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        n = self.order
        if n < 1:
            raise InvalidGroup("order must be positive")
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        if len(table) != n or any(len(row) != n for row in table):
            raise InvalidGroup("table must be order x order")
        if len(self.names) != n or len(set(self.names)) != n:
            raise InvalidGroup("need one distinct name per element")
        full = set(range(n))
        for row in table:
            if set(row) != full:
                raise InvalidGroup("table rows must be permutations")
        for b in range(n):
            if {table[a][b] for a in range(n)} != full:
                raise InvalidGroup("table columns must be permutations")
        e = self.identity
        if not 0 <= e < n or any(table[e][a] != a or table[a][e] != a for a in range(n)):
            raise InvalidGroup("identity row/column must be the identity permutation")
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise InvalidGroup(f"not associative at ({a},{b},{c})")
        inv = [0] * n
        for a in range(n):
            inv[a] = table[a].index(e)
        object.__setattr__(self, "_inverse", tuple(inv))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inverse[a]

    @property
    def elements(self) -> range:
        return range(self.order)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def generated(self, gens: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``gens`` (closure under multiplication)."""
        members = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.table[x][g]
                if y not in members:
                    members.add(y)
                    frontier.append(y)
        return frozenset(members)

    def is_subgroup(self, members: Iterable[int]) -> bool:
        s = set(members)
        if self.identity not in s:
            return False
        return all(self.table[a][b] in s for a in s for b in s)

    def to_json(self) -> dict:
        return {"order": self.order, "names": list(self.names),
                "table": [list(r) for r in self.table]}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroup":
        order = int(data["order"])
        table = data["table"]
        names = data.get("names") or [str(i) for i in range(order)]
        ident = [a for a in range(order) if list(table[a]) == list(range(order))]
        if not ident:
            raise InvalidGroup("no identity element in table")
        return cls(order, tuple(tuple(r) for r in table), tuple(names), ident[0])

    def __str__(self):
        return f"Group(order={self.order}, names={list(self.names)})"


def _from_elements(elements: Sequence, op, names: Sequence[str], identity) -> FiniteGroup:
    index = {x: i for i, x in enumerate(elements)}
    table = tuple(tuple(index[op(a, b)] for b in elements) for a in elements)
    return FiniteGroup(len(elements), table, tuple(names), index[identity])


def cyclic(n: int) -> FiniteGroup:
    names = ["e", "s"] + [f"s{k}" for k in range(2, n)]
    return _from_elements(list(range(n)), lambda a, b: (a + b) % n, names, 0)


def direct_product(g: FiniteGroup, h: FiniteGroup, names: Sequence[str] | None = None) -> FiniteGroup:
    elements = [(a, b) for a in g.elements for b in h.elements]
    if names is None:
        names = []
        for a, b in elements:
            if a == g.identity and b == h.identity:
                names.append("e")
            else:
                names.append(f"{g.names[a]}_{h.names[b]}")
    return _from_elements(
        elements, lambda x, y: (g.mul(x[0], y[0]), h.mul(x[1], y[1])), names,
        (g.identity, h.identity))


def _perm_name(p: tuple[int, ...]) -> str:
    seen, cycles = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        cycles.append("".join(map(str, cyc)))
    return "e" if not cycles else "c" + "_".join(cycles)


def permutation_group(perms: Iterable[tuple[int, ...]]) -> FiniteGroup:
    """Group of the given permutations (must be closed); composition (p*q)(i) = p(q(i))."""
    elems = sorted(set(tuple(p) for p in perms))
    n = len(elems[0])
    ident = tuple(range(n))
    elems.remove(ident)
    elems = [ident] + elems
    names = [_perm_name(p) for p in elems]
    return _from_elements(elems, lambda p, q: tuple(p[q[i]] for i in range(n)), names, ident)


def symmetric(n: int) -> FiniteGroup:
    return permutation_group(itertools.permutations(range(n)))


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    closure = {tuple(range(n))}
    frontier = list(closure)
    while frontier:
        p = frontier.pop()
        for g in (rot, ref):
            q = tuple(p[g[i]] for i in range(n))
            if q not in closure:
                closure.add(q)
                frontier.append(q)
    return permutation_group(closure)


def quaternion() -> FiniteGroup:
    # unit quaternions {±1, ±i, ±j, ±k} as (sign, unit)
    mult = {("1", u): (1, u) for u in "1ijk"}
    mult.update({(u, "1"): (1, u) for u in "1ijk"})
    mult.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                 ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                 ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
    elems = [(s, u) for u in "1ijk" for s in (1, -1)]

    def op(a, b):
        s, u = mult[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    names = [("" if s > 0 else "-") + ("e" if u == "1" and s > 0 else u) for s, u in elems]
    names[1] = "-1"
    return _from_elements(elems, op, names, (1, "1"))


def trivial() -> FiniteGroup:
    return FiniteGroup(1, ((0,),), ("e",), 0)


BUILTIN = {
    "z1": trivial,
    "z2": lambda: cyclic(2),
    "z3": lambda: cyclic(3),
    "z4": lambda: cyclic(4),
    "z5": lambda: cyclic(5),
    "z6": lambda: cyclic(6),
    "z2xz2": lambda: direct_product(cyclic(2), cyclic(2), ["e", "a", "b", "c"]),
    "s3": lambda: symmetric(3),
    "z7": lambda: cyclic(7),
    "z8": lambda: cyclic(8),
    "z2xz4": lambda: direct_product(cyclic(2), cyclic(4)),
    "z2xz2xz2": lambda: direct_product(direct_product(cyclic(2), cyclic(2), ["e", "a", "b", "c"]),
                                       cyclic(2)),
    "d4": lambda: dihedral(4),
    "q8": quaternion,
}


def builtin(name: str) -> FiniteGroup:
    key = name.lower()
    if key not in BUILTIN:
        raise InvalidGroup(f"unknown group {name!r}; known: {sorted(BUILTIN)}")
    return _builtin_cached(key)


@functools.lru_cache(maxsize=None)
def _builtin_cached(key: str) -> FiniteGroup:
    return BUILTIN[key]()


def load_group(spec: str) -> FiniteGroup:
    """Resolve a built-in name or a path to a group JSON file."""
    if spec.lower() in BUILTIN:
        return builtin(spec)
    with open(spec) as fh:
        return FiniteGroup.from_json(json.load(fh))


# --------------------------------------------------------------------- subgroups

@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))
        if not self.parent.is_subgroup(self.members):
            raise InvalidGroup(f"{self.members} is not a subgroup")

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g: int) -> bool:
        return g in self._set

    @functools.cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.members)

    def index(self) -> int:
        return self.parent.order // self.order

    def sort_key(self):
        return (len(self.members), self.members)


def _canonical(subs: Iterable[frozenset[int]]) -> list[tuple[int, ...]]:
    return sorted((tuple(sorted(s)) for s in subs), key=lambda m: (len(m), m))


@functools.lru_cache(maxsize=256)
def _subgroup_members(g: FiniteGroup) -> tuple[tuple[int, ...], ...]:
    # Every subgroup is the join of the cyclic subgroups it contains, so closing
    # the set of cyclic subgroups under joins reaches all of them.
    cyclics = {g.generated([a]) for a in g.elements}
    found = set(cyclics)
    frontier = list(cyclics)
    while frontier:
        h = frontier.pop()
        for c in cyclics:
            if c <= h:
                continue
            j = g.generated(h | c)
            if j not in found:
                found.add(j)
                frontier.append(j)
    return tuple(_canonical(found))


def subgroups(g: FiniteGroup) -> list[Subgroup]:
    """All subgroups of ``g``, each once, ordered by size then members."""
    return [Subgroup(g, m) for m in _subgroup_members(g)]


def cosets(g: FiniteGroup, h: Subgroup) -> list[frozenset[int]]:
    """Left cosets aH; the block containing the identity first, the rest by least element."""
    blocks, seen = [], set()
    for a in [g.identity] + [x for x in g.elements if x != g.identity]:
        if a in seen:
            continue
        block = frozenset(g.mul(a, x) for x in h.members)
        seen |= block
        blocks.append(block)
    return [blocks[0]] + sorted(blocks[1:], key=min)


def is_normal(g: FiniteGroup, n: Subgroup) -> bool:
    s = set(n.members)
    return all(g.mul(g.mul(a, x), g.inv(a)) in s for a in g.elements for x in n.members)


def maximal_subgroups(g: FiniteGroup) -> list[Subgroup]:
    subs = [set(s.members) for s in subgroups(g)]
    out = []
    for s in subgroups(g):
        m = set(s.members)
        if len(m) == g.order:
            continue
        if not any(m < t and len(t) < g.order for t in subs):
            out.append(s)
    return out


def frattini_subgroup(g: FiniteGroup) -> Subgroup:
    members = set(g.elements)
    for m in maximal_subgroups(g):
        members &= set(m.members)
    return Subgroup(g, tuple(members))


# ------------------------------------------------------------------ homomorphisms

@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(self.map))
        s, t, m = self.source, self.target, self.map
        if len(m) != s.order:
            raise InvalidGroup("map length must equal source order")
        if m[s.identity] != t.identity:
            raise InvalidGroup("identity must map to identity")
        for a in s.elements:
            for b in s.elements:
                if m[s.mul(a, b)] != t.mul(m[a], m[b]):
                    raise InvalidGroup(f"not a homomorphism at ({a},{b})")

    def image(self, members: Iterable[int] | None = None) -> frozenset[int]:
        if members is None:
            members = self.source.elements
        return frozenset(self.map[a] for a in members)

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, tuple(a for a in self.source.elements
                                           if self.map[a] == self.target.identity))

    def is_surjective(self) -> bool:
        return len(self.image()) == self.target.order


def _small_generating_set(g: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = frozenset([g.identity])
    for a in g.elements:
        if a not in span:
            gens.append(a)
            span = g.generated(gens)
    return gens


def homomorphisms(source: FiniteGroup, target: FiniteGroup) -> list[GroupHom]:
    """All homomorphisms, found by extending images of a generating set."""
    gens = _small_generating_set(source)
    out = []
    for images in itertools.product(target.elements, repeat=len(gens)):
        m = {source.identity: target.identity}
        frontier = [source.identity]
        ok = True
        while frontier and ok:
            x = frontier.pop()
            for gi, img in zip(gens, images):
                y = source.mul(x, gi)
                val = target.mul(m[x], img)
                if y in m:
                    if m[y] != val:
                        ok = False
                        break
                else:
                    m[y] = val
                    frontier.append(y)
        if not ok:
            continue
        mp = tuple(m[a] for a in source.elements)
        if all(mp[source.mul(a, b)] == target.mul(mp[a], mp[b])
               for a in source.elements for b in source.elements):
            out.append(GroupHom(source, target, mp))
    return out


def epimorphisms(source: FiniteGroup, target: FiniteGroup) -> list[GroupHom]:
    return [h for h in homomorphisms(source, target) if h.is_surjective()]


# ------------------------------------------------------------- Galois predicates

def is_frattini_cover(pi: GroupHom) -> bool:
    """Whether no proper subgroup of the source still maps onto the target.

    Decided twice: by the subgroup scan and by ``ker(pi) <= Frattini(source)``;
    the two must agree.
    """
    if not pi.is_surjective():
        raise NotSurjective("homomorphism is not onto its target")
    src = pi.source
    by_scan = all(len(h.members) == src.order
                  for h in subgroups(src) if len(pi.image(h.members)) == pi.target.order)
    by_kernel = set(pi.kernel().members) <= set(frattini_subgroup(src).members)
    if by_scan != by_kernel:
        raise AssertionError("Frattini cover criteria disagree")
    return by_scan


def product_set(g: FiniteGroup, a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
    b = list(b)
    return frozenset(g.mul(x, y) for x in a for y in b)


def exists_proper_supplement(g: FiniteGroup, n: Subgroup) -> Subgroup | None:
    """Smallest proper subgroup ``H`` with ``H*N = G``, or None."""
    if not is_normal(g, n):
        raise NotNormal("subgroup is not normal")
    for h in subgroups(g):
        if h.order == g.order:
            continue
        if len(product_set(g, h.members, n.members)) == g.order:
            return h
    return None


def count_subgroups_of_index(g: FiniteGroup, n: int) -> int:
    if n < 1:
        raise ValueError("index must be positive")
    if g.order % n:
        return 0
    return sum(1 for h in subgroups(g) if h.order * n == g.order)


def subgroup_of(g: FiniteGroup, members: Iterable[int]) -> Subgroup:
    return Subgroup(g, tuple(members))
