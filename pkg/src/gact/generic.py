"""Finite approximations of the generic G-graph and the generic G-set.

Saturation serves extension-axiom instances: for a tuple of old elements and
a consistent configuration whose x-part matches it, a witness is looked up
and, failing that, the configuration's canonical witness is freely amalgamated
over the tuple's orbits.  Structures only ever grow by adding whole orbits.

:class:`GenericModel` evaluates formulas in the generic model itself: a
quantified variable ranges over the orbits already present plus every
one-orbit extension (stabilizer, internal edges, H-invariant neighbourhood).
"""
from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .config import (EQ, NR, TermSet, all_configurations, enumerate_extensions,
                     is_consistent, witness_tuple)
from .errors import ActionMismatchOnBase, InvalidStructure, UnassignedVariable
from .group import FiniteGroup, subgroups
from .logic.formula import (And, Bottom, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, Top,
                            free_vars, is_quantifier_free)
from .structure import GStructure, Signature, orbit

THEORIES = ("graph", "empty")


# ------------------------------------------------------------ mutable builder

class _Builder:
    """Growing structure: labels, per-element action images and adjacency sets."""

    def __init__(self, m: GStructure):
        self.sig, self.group = m.signature, m.group
        self.labels = list(m.universe)
        self.used = set(self.labels)
        self.act = [list(p) for p in m.action]
        self.adj = [set(s) for s in m.neighbours] if m.relation else [set() for _ in m.universe]

    @property
    def size(self) -> int:
        return len(self.labels)

    def fresh_label(self) -> str:
        k = len(self.labels)
        lab = f"v{k}"
        while lab in self.used:
            lab += "'"
        return lab

    def key(self, tup: Sequence[int]) -> tuple[int, ...]:
        vals = [self.act[g][t] for t in tup for g in self.group.elements]
        adj = self.adj
        return tuple(0 if a == b else (1 if b in adj[a] else 2) for a in vals for b in vals)

    def add(self, w: GStructure, base: dict[int, int]) -> list[int]:
        """Freely amalgamate ``w`` over ``base`` (w-index -> self-index); returns new indices."""
        new = [i for i in range(w.size) if i not in base]
        emb = dict(base)
        for i in new:
            emb[i] = len(self.labels)
            lab = self.fresh_label()
            self.labels.append(lab)
            self.used.add(lab)
            self.adj.append(set())
        for g in self.group.elements:
            row = self.act[g]
            row.extend([0] * len(new))
            for i in new:
                row[emb[i]] = emb[w.action[g][i]]
        for a, b in w.relation:
            if a in base and b in base:
                continue
            self.adj[emb[a]].add(emb[b])
        return [emb[i] for i in new]

    def add_orbit(self, stabilizer: Sequence[int], neighbours: Iterable[int] = (),
                  internal: Iterable[int] = ()) -> list[int]:
        """Adjoin a copy of G/H; its base point is joined to the H-closure of
        ``neighbours`` and to sigma_k(base) for k in the HkH-closure of ``internal``.
        """
        g = self.group
        hs = frozenset(stabilizer)
        cos = _coset_structure(g, sorted(hs), self.sig)
        new = self.add(cos, {})
        base = new[0]
        nb = {self.act[h][t] for t in neighbours for h in hs}
        ks = {g.mul(g.mul(u, k), v) for k in internal for u in hs for v in hs}
        ks |= {g.inv(k) for k in ks}
        if (nb or ks) and self.sig is not Signature.GRAPH:
            raise InvalidStructure("edges need the GRAPH signature")
        if ks & hs:
            raise InvalidStructure("internal edge would be a loop")
        for x in g.elements:
            bx = self.act[x][base]
            for t in nb:
                tx = self.act[x][t]
                self.adj[bx].add(tx)
                self.adj[tx].add(bx)
            for k in ks:
                other = self.act[g.mul(x, k)][base]
                self.adj[bx].add(other)
                self.adj[other].add(bx)
        return new

    def build(self) -> GStructure:
        rel = frozenset((a, b) for a, s in enumerate(self.adj) for b in s)
        return GStructure(self.sig, tuple(self.labels), rel, self.group,
                          tuple(tuple(p) for p in self.act))


# --------------------------------------------------------------- saturation

@dataclass(frozen=True)
class SaturationState:
    current: GStructure
    round: int = 0
    birth_round: tuple[int, ...] = ()
    log: tuple = ()
    truncated: bool = False

    def __post_init__(self):
        if not self.birth_round and self.current.size:
            object.__setattr__(self, "birth_round", (0,) * self.current.size)
        if len(self.birth_round) != self.current.size:
            raise ValueError("birth_round needs one entry per element")
        if any(b > self.round for b in self.birth_round):
            raise ValueError("element born after the current round")

    @classmethod
    def empty(cls, group: FiniteGroup, theory: str = "graph") -> "SaturationState":
        sig = Signature.GRAPH if theory == "graph" else Signature.EMPTY
        return cls(GStructure(sig, (), frozenset(), group, tuple(() for _ in group.elements)))

    def born_by(self, r: int) -> list[int]:
        return [i for i, b in enumerate(self.birth_round) if b <= r]


@functools.lru_cache(maxsize=None)
def _configs_by_base(group: FiniteGroup, n: int, n_prime: int, theory: str):
    """Consistent configurations grouped by their x-part, witnesses precomputed."""
    terms = TermSet(group, n, n_prime)
    if theory == "graph":
        configs = all_configurations(group, n, n_prime)
    else:
        configs = enumerate_extensions({p: {EQ, NR} for orb in terms.pair_orbits for p in orb}, terms)
    out: dict[tuple, list] = {}
    for idx, q in enumerate(configs):
        rep = is_consistent(q)
        wt = witness_tuple(rep, terms)
        key = tuple(q.entries[i][j] for i in range(terms.z0_size) for j in range(terms.z0_size))
        out.setdefault(key, []).append((idx, q, rep.witness, wt))
    return out


def _instances(params: list[int], n: int, birth: Sequence[int]):
    tuples = list(itertools.product(params, repeat=n))
    tuples.sort(key=lambda t: (max((birth[i] for i in t), default=0), t))
    return tuples


def _realised(b: _Builder, tup: tuple[int, ...], n_prime: int, among=None) -> set:
    pool = range(b.size) if among is None else among
    if n_prime == 1:
        return {b.key(tup + (y,)) for y in pool}
    return {b.key(tup + ys) for ys in itertools.product(range(b.size), repeat=n_prime)}


def _serve(b: _Builder, tup: tuple[int, ...], n_prime: int, entry, realised: set,
           size_cap: int | None) -> tuple[str, list[int]] | None:
    """Serve one axiom instance; returns (action, new elements) or None when capped."""
    _, q, w, wt = entry
    if tuple(v for row in q.entries for v in row) in realised:
        return "satisfied", []
    base: dict[int, int] = {}
    for v in range(len(tup)):
        for g in b.group.elements:
            base[w.action[g][wt[v]]] = b.act[g][tup[v]]
    if size_cap is not None and b.size + w.size - len(base) > size_cap:
        return None
    added = b.add(w, base)
    realised |= _realised(b, tup, n_prime, added if n_prime == 1 else None)
    return "extended", added


def _saturate(state: SaturationState, rounds: int, size_cap: int | None, n_bound: int,
              n_prime_bound: int, theory: str) -> SaturationState:
    st = state
    for _ in range(rounds):
        if st.truncated:
            break
        r = st.round + 1
        b = _Builder(st.current)
        birth = list(st.birth_round)
        params = st.born_by(r - 1)
        log = list(st.log)
        truncated = False
        for n in range(n_bound + 1):
            for n_prime in range(1, n_prime_bound + 1):
                table = _configs_by_base(b.group, n, n_prime, theory)
                for tup in _instances(params, n, birth):
                    entries = table.get(b.key(tup), [])
                    realised = _realised(b, tup, n_prime) if entries else set()
                    for entry in entries:
                        res = _serve(b, tup, n_prime, entry, realised, size_cap)
                        if res is None:
                            truncated = True
                            break
                        action, added = res
                        birth.extend([r] * len(added))
                        log.append({"round": r, "params": [b.labels[i] for i in tup],
                                    "n_prime": n_prime, "config": entry[0], "action": action,
                                    "added": [b.labels[i] for i in added]})
                    if truncated:
                        break
                if truncated:
                    break
            if truncated:
                break
        st = SaturationState(b.build(), r, tuple(birth), tuple(log), truncated)
    return st


def saturate_graph(state: SaturationState, rounds: int = 1, size_cap: int | None = 200,
                   n_bound: int = 1, n_prime_bound: int = 1) -> SaturationState:
    """Serve every axiom instance with parameters from earlier rounds, ``rounds`` times.

    Stops early (``truncated``) rather than exceed ``size_cap`` elements.
    """
    if state.current.signature is not Signature.GRAPH:
        raise InvalidStructure("saturate_graph needs the GRAPH signature")
    return _saturate(state, rounds, size_cap, n_bound, n_prime_bound, "graph")


def saturate_empty(state: SaturationState, copies: int = 1) -> SaturationState:
    """Adjoin ``copies`` copies of G/H for every subgroup H."""
    if state.current.signature is not Signature.EMPTY:
        raise InvalidStructure("saturate_empty needs the EMPTY signature")
    if copies <= 0:
        return state
    g = state.current.group
    b = _Builder(state.current)
    r = state.round + 1
    birth = list(state.birth_round)
    log = list(state.log)
    for h in subgroups(g):
        cos = _coset_structure(g, h.members)
        for _ in range(copies):
            added = b.add(cos, {})
            birth.extend([r] * len(added))
            log.append({"round": r, "stabilizer": [g.names[x] for x in h.members],
                        "action": "extended", "added": [b.labels[i] for i in added]})
    return SaturationState(b.build(), r, tuple(birth), tuple(log), False)


def _coset_structure(g: FiniteGroup, h: Sequence[int], sig: Signature = Signature.EMPTY
                     ) -> GStructure:
    """G/H with left multiplication; element 0 is the coset H itself."""
    hs = frozenset(h)
    reps, index = [], {}
    for x in g.elements:
        c = frozenset(g.mul(x, y) for y in hs)
        if c not in index:
            index[c] = len(reps)
            reps.append(x)
    act = []
    for k in g.elements:
        act.append(tuple(index[frozenset(g.mul(g.mul(k, x), y) for y in hs)] for x in reps))
    return GStructure(sig, tuple(f"c{i}" for i in range(len(reps))), frozenset(), g, tuple(act))


# --------------------------------------------------------------- amalgams

def free_amalgam_maps(b: GStructure, c: GStructure, base: Iterable[tuple[int, int]]
                      ) -> tuple[GStructure, list[int]]:
    """Free amalgam of ``b`` and ``c`` glued along ``base`` pairs (b-index, c-index).

    The result keeps b's indices and labels; the returned list embeds c.
    """
    pairs = dict(base)
    if b.group != c.group or b.signature != c.signature:
        raise InvalidStructure("amalgam needs a common group and signature")
    if len(set(pairs.values())) != len(pairs):
        raise InvalidStructure("base identification must be injective")
    grp = b.group
    inv = {j: i for i, j in pairs.items()}
    for i, j in pairs.items():
        for g in grp.elements:
            bi, cj = b.act(g, i), c.act(g, j)
            if bi not in pairs or pairs[bi] != cj:
                raise ActionMismatchOnBase(
                    f"sigma_{grp.names[g]} disagrees on base element {b.universe[i]!r}")
    for i, j in pairs.items():
        for i2, j2 in pairs.items():
            if b.related(i, i2) != c.related(j, j2):
                raise InvalidStructure("the two copies of the base carry different relations")
    bl = _Builder(b)
    new = bl.add(c, inv)
    it = iter(new)
    emb = [inv[j] if j in inv else next(it) for j in range(c.size)]
    labels = bl.labels
    for j in range(c.size):
        if j not in inv and c.universe[j] not in bl.used - {labels[emb[j]]}:
            bl.used.discard(labels[emb[j]])
            labels[emb[j]] = c.universe[j]
            bl.used.add(c.universe[j])
    return bl.build(), emb


def free_amalgam(b: GStructure, c: GStructure, base: Iterable[tuple[int, int]] = ()) -> GStructure:
    return free_amalgam_maps(b, c, base)[0]


# ------------------------------------------------------------- verification

def verify_extension_axioms(m: GStructure, theory: str = "graph", param_bound: int = 1,
                            witness_bound: int = 1, params: Iterable[int] | None = None
                            ) -> list[dict]:
    """Axiom instances (bounded sizes, parameters from ``params``) lacking a witness in ``m``."""
    if theory not in THEORIES:
        raise ValueError(f"unknown theory {theory!r}")
    b = _Builder(m)
    pool = sorted(set(range(m.size) if params is None else params))
    failures = []
    for n in range(param_bound + 1):
        for n_prime in range(1, witness_bound + 1):
            table = _configs_by_base(m.group, n, n_prime, theory)
            for tup in itertools.product(pool, repeat=n):
                entries = table.get(b.key(tup), [])
                if not entries:
                    continue
                realised = {b.key(tup + ys) for ys in itertools.product(range(m.size), repeat=n_prime)}
                for idx, q, _, _ in entries:
                    if tuple(v for row in q.entries for v in row) not in realised:
                        failures.append({"params": [m.universe[i] for i in tup], "n_prime": n_prime,
                                         "config": idx, "entries": list(q.vector())})
    return failures


@dataclass(frozen=True)
class ClosureOracle:
    """dcl = acl = G·X in the generic models of both theories, on a concrete approximation."""
    theory: str
    group: FiniteGroup
    structure: GStructure | None = None

    def _closure(self, elements: Iterable[int]) -> frozenset[int]:
        m = self.structure
        if m is None:
            raise ValueError("closure needs a concrete structure")
        out = set(elements)
        frontier = list(out)
        while frontier:
            x = frontier.pop()
            for g in self.group.elements:
                y = m.action[g][x]
                if y not in out:
                    out.add(y)
                    frontier.append(y)
        return frozenset(out)

    def dcl(self, elements: Iterable[int]) -> frozenset[int]:
        return self._closure(elements)

    def acl(self, elements: Iterable[int]) -> frozenset[int]:
        return self._closure(elements)


# ----------------------------------------------------- the generic model

class _Fin:
    """A small G-closed structure: action table and adjacency sets."""
    __slots__ = ("act", "adj")

    def __init__(self, act, adj):
        self.act = act
        self.adj = adj

    @property
    def size(self) -> int:
        return len(self.adj)

    def key(self, vals: Sequence[int], group: FiniteGroup) -> tuple[int, ...]:
        vs = [self.act[g][v] for v in vals for g in group.elements]
        adj = self.adj
        return tuple(0 if a == b else (1 if b in adj[a] else 2) for a in vs for b in vs)

    def restrict(self, members: Iterable[int]) -> tuple["_Fin", dict[int, int]]:
        mem = sorted(set(members))
        pos = {x: k for k, x in enumerate(mem)}
        act = [[pos[row[x]] for x in mem] for row in self.act]
        adj = [{pos[y] for y in self.adj[x] if y in pos} for x in mem]
        return _Fin(act, adj), pos


class GenericModel:
    """Truth of formulas in the generic model of the graph or empty theory.

    The generic model is existentially closed and every realisable one-orbit
    extension of a finite G-closed subset is realised, so an existential is
    decided by trying the elements of the orbits of its parameters and every
    fresh orbit type over them.  Truth of a formula is a function of the
    quantifier-free type of its free variables; results are memoised on that.
    """

    def __init__(self, group: FiniteGroup, theory: str = "graph"):
        if theory not in THEORIES:
            raise ValueError(f"unknown theory {theory!r}")
        self.group, self.theory = group, theory
        self.subgroups = [tuple(h.members) for h in subgroups(group)]
        self._memo: dict = {}
        self._cosets = {h: _coset_structure(group, h) for h in self.subgroups}
        self.calls = 0

    # -- orbit types -----------------------------------------------------
    def _internal_classes(self, h: tuple[int, ...]) -> list[frozenset[int]]:
        g, hs = self.group, frozenset(h)
        seen, out = set(), []
        for k in g.elements:
            if k in hs or k in seen:
                continue
            cl = set()
            for u in hs:
                for v in hs:
                    cl.add(g.mul(g.mul(u, k), v))
                    cl.add(g.mul(g.mul(u, g.inv(k)), v))
            seen |= cl
            out.append(frozenset(cl))
        return out

    def extensions(self, fin: _Fin, touched_elems=None, touched_k=None):
        """Yield (extended fin, index of the new element) for fresh one-orbit types.

        ``touched_elems``/``touched_k`` restrict which neighbourhood and internal
        choices are varied (others are set to non-edges); ``None`` varies all.
        """
        for h in self.subgroups:
            hs = frozenset(h)
            cos = self._cosets[h]
            if self.theory == "graph":
                h_orbits, seen = [], set()
                for x in range(fin.size):
                    if x in seen:
                        continue
                    o = frozenset(fin.act[u][x] for u in h)
                    seen |= o
                    if touched_elems is None or o & touched_elems:
                        h_orbits.append(o)
                classes = [c for c in self._internal_classes(h)
                           if touched_k is None or c & touched_k]
            else:
                h_orbits, classes = [], []
            for ci in range(1 << len(classes)):
                e_set = frozenset().union(*[classes[i] for i in range(len(classes)) if ci >> i & 1])
                for ni in range(1 << len(h_orbits)):
                    nbrs = frozenset().union(*[h_orbits[i] for i in range(len(h_orbits))
                                               if ni >> i & 1])
                    yield self._extend(fin, cos, hs, e_set, nbrs)

    def _extend(self, fin: _Fin, cos: GStructure, hs, e_set, nbrs):
        g = self.group
        m = fin.size
        k = cos.size
        # coset i of cos is x_i H with x_i the least element mapping 0 to i
        rep = [next(x for x in g.elements if cos.action[x][0] == i) for i in range(k)]
        act = [row + [m + cos.action[x][i] for i in range(k)] for x, row in enumerate(fin.act)]
        adj = [set(s) for s in fin.adj] + [set() for _ in range(k)]
        for i in range(k):
            for j in range(k):
                if i != j and g.mul(g.inv(rep[j]), rep[i]) in e_set:
                    adj[m + i].add(m + j)
            ginv = g.inv(rep[i])
            for t in range(m):
                if fin.act[ginv][t] in nbrs:
                    adj[m + i].add(t)
                    adj[t].add(m + i)
        return _Fin(act, adj), m

    # -- evaluation ------------------------------------------------------
    def holds(self, m: GStructure | _Fin, phi: Formula, assignment: dict[str, int]) -> bool:
        """Truth of ``phi`` in the generic model, with variables sent into (a G-closed part of) ``m``."""
        if isinstance(m, GStructure):
            fin = _Fin([list(p) for p in m.action], [set(s) for s in m.neighbours])
            env = {v: m.index(a) for v, a in assignment.items()}
        else:
            fin, env = m, dict(assignment)
        missing = free_vars(phi) - set(env)
        if missing:
            raise UnassignedVariable(f"unassigned variables {sorted(missing)}")
        return self._truth(phi, fin, env)

    def _atom(self, f, fin: _Fin, env) -> bool:
        a = fin.act[f.left.g][env[f.left.var]]
        b = fin.act[f.right.g][env[f.right.var]]
        if isinstance(f, Eq):
            return a == b
        return b in fin.adj[a]

    def _truth(self, f: Formula, fin: _Fin, env: dict[str, int]) -> bool:
        if isinstance(f, (Eq, Rel)):
            return self._atom(f, fin, env)
        if isinstance(f, Not):
            return not self._truth(f.arg, fin, env)
        if isinstance(f, And):
            return all(self._truth(a, fin, env) for a in f.args)
        if isinstance(f, Or):
            return any(self._truth(a, fin, env) for a in f.args)
        if isinstance(f, Implies):
            return (not self._truth(f.left, fin, env)) or self._truth(f.right, fin, env)
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, (Exists, Forall)):
            return self._quant(f, fin, env)
        raise TypeError(f"not a formula: {f!r}")

    def _quant(self, f, fin: _Fin, env) -> bool:
        g = self.group
        fv = sorted(free_vars(f))
        vals = [env[v] for v in fv]
        key = (f, tuple(fv), fin.key(vals, g))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self.calls += 1
        closure = {fin.act[x][v] for v in vals for x in g.elements}
        sub, pos = fin.restrict(closure)
        env2 = {v: pos[env[v]] for v in fv}
        want = isinstance(f, Exists)
        y, body = f.var, f.body
        result = not want
        for cand in range(sub.size):
            env2[y] = cand
            if self._truth(body, sub, env2) == want:
                result = want
                break
        else:
            touched_e = touched_k = None
            if is_quantifier_free(body):
                touched_e, touched_k = self._touched(body, y, sub, env2)
            for ext, new in self.extensions(sub, touched_e, touched_k):
                env2[y] = new
                if self._truth(body, ext, env2) == want:
                    result = want
                    break
        self._memo[key] = result
        return result

    def _touched(self, body: Formula, y: str, fin: _Fin, env) -> tuple[frozenset, frozenset]:
        g = self.group
        elems, ks = set(), set()
        stack = [body]
        while stack:
            f = stack.pop()
            if isinstance(f, Rel):
                a, b = f.left, f.right
                if a.var == y and b.var == y:
                    ks.add(g.mul(g.inv(b.g), a.g))
                    ks.add(g.mul(g.inv(a.g), b.g))
                elif a.var == y or b.var == y:
                    ty, t = (a, b) if a.var == y else (b, a)
                    elems.add(fin.act[g.mul(g.inv(ty.g), t.g)][env[t.var]])
            elif isinstance(f, Not):
                stack.append(f.arg)
            elif isinstance(f, (And, Or)):
                stack.extend(f.args)
            elif isinstance(f, Implies):
                stack.extend((f.left, f.right))
        return frozenset(elems), frozenset(ks)


# --------------------------------------------------------------- samplers

def random_structure(group: FiniteGroup, rng: random.Random, orbits: int = 3,
                     theory: str = "graph", edge_p: float = 0.4) -> GStructure:
    """A random G-structure: random stabilizers, random G-invariant edges."""
    subs = [tuple(h.members) for h in subgroups(group)]
    sig = Signature.GRAPH if theory == "graph" else Signature.EMPTY
    b = _Builder(GStructure(sig, (), frozenset(), group, tuple(() for _ in group.elements)))
    for _ in range(orbits):
        b.add(_coset_structure(group, rng.choice(subs), sig), {})
    if theory == "graph":
        seen = set()
        for x in range(b.size):
            for y in range(x + 1, b.size):
                if (x, y) in seen:
                    continue
                orb = {(b.act[g][x], b.act[g][y]) for g in group.elements}
                orb |= {(v, u) for u, v in orb}
                seen |= {(min(u, v), max(u, v)) for u, v in orb}
                if any(u == v for u, v in orb):
                    continue
                if rng.random() < edge_p:
                    for u, v in orb:
                        b.adj[u].add(v)
    return b.build()


def close_under_action(m: GStructure, elements: Iterable[int]) -> frozenset[int]:
    return orbit(m, elements)
