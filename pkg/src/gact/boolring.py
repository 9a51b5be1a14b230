"""Finite Boolean rings with a group action, and multilinear polynomials over them.

A ring is the powerset of a finite list of atoms; elements are bitmasks (bit
``a`` set iff atom ``a`` is in the subset), addition is xor and multiplication
is and.  The group acts by permuting atoms.

Polynomials live in ``R[t_1..t_e]`` with ``t_i = (t_{i,1}..t_{i,n})`` and one
block per group element (block ``i`` is the element with index ``i``).  They
are stored reduced modulo ``t^2 = t``: a map from square-free monomials to
non-zero coefficients.

Since ``R`` is a product of copies of the two-element field, so is
``R[t]/(t^2 - t)``; every ideal is principal and determined atom by atom by a
set of points of ``{0,1}^{en}``.  Membership is decided on those truth tables.
"""
from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (FormulaSyntaxError, InvalidRing, NotInvariant, NotProperlyContained,
                     SearchTooLarge, ZeroElement)
from .group import FiniteGroup

SEARCH_CAP = 2 ** 20
TABLE_ATOMS = 12  # larger rings permute bits on demand instead of tabulating

Var = tuple[int, int]            # (block, position), both 0-based
Monomial = frozenset             # of Var


@dataclass(frozen=True)
class BooleanRing:
    atoms: tuple[str, ...]
    group: FiniteGroup
    action: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(str(a) for a in self.atoms))
        object.__setattr__(self, "action", tuple(tuple(p) for p in self.action))
        k, g = len(self.atoms), self.group
        if len(set(self.atoms)) != k:
            raise InvalidRing("atom labels must be distinct")
        if len(self.action) != g.order:
            raise InvalidRing("need one atom permutation per group element")
        for p in self.action:
            if sorted(p) != list(range(k)):
                raise InvalidRing(f"{p} is not a permutation of the atoms")
        if any(x != i for i, x in enumerate(self.action[g.identity])):
            raise InvalidRing("the identity must act trivially")
        for a in g.elements:
            for b in g.elements:
                pa, pb, pab = self.action[a], self.action[b], self.action[g.mul(a, b)]
                if any(pa[pb[i]] != pab[i] for i in range(k)):
                    raise InvalidRing("the atom action is not a group action")

    @property
    def size(self) -> int:
        return 1 << len(self.atoms)

    @property
    def one(self) -> int:
        return self.size - 1

    @property
    def zero(self) -> int:
        return 0

    def elements(self) -> range:
        return range(self.size)

    @staticmethod
    def add(x: int, y: int) -> int:
        return x ^ y

    @staticmethod
    def mul(x: int, y: int) -> int:
        return x & y

    def neg(self, x: int) -> int:
        return x

    def sigma(self, g: int, x: int) -> int:
        if len(self.atoms) > TABLE_ATOMS:
            p, y = self.action[g], 0
            for a in range(len(self.atoms)):
                if x >> a & 1:
                    y |= 1 << p[a]
            return y
        return self._sigma_table[g][x]

    @functools.cached_property
    def _sigma_table(self) -> tuple[tuple[int, ...], ...]:
        rows = []
        for p in self.action:
            row = []
            for x in range(self.size):
                y = 0
                for a in range(len(self.atoms)):
                    if x >> a & 1:
                        y |= 1 << p[a]
                row.append(y)
            rows.append(tuple(row))
        return tuple(rows)

    def element(self, labels: Iterable[str]) -> int:
        pos = {a: i for i, a in enumerate(self.atoms)}
        x = 0
        for lab in labels:
            if str(lab) not in pos:
                raise InvalidRing(f"unknown atom {lab!r}")
            x |= 1 << pos[str(lab)]
        return x

    def labels(self, x: int) -> list[str]:
        return [a for i, a in enumerate(self.atoms) if x >> i & 1]

    def text(self, x: int) -> str:
        if x == self.one:
            return "1"
        if x == 0:
            return "0"
        return "{" + ",".join(self.labels(x)) + "}"

    def is_atom(self, x: int) -> bool:
        return x != 0 and x & (x - 1) == 0


def powerset_ring(atoms: int | Sequence[str], group: FiniteGroup,
                  action: Mapping[int, Sequence[int]] | None = None) -> BooleanRing:
    """P(atoms) with the action given on some elements (the rest act trivially).

    ``action`` may list only generators; the remaining permutations are filled
    in by composing along the group table.
    """
    labels = [str(i + 1) for i in range(atoms)] if isinstance(atoms, int) else list(atoms)
    k = len(labels)
    ident = tuple(range(k))
    given = {g: tuple(p) for g, p in (action or {}).items()}
    perms: dict[int, tuple[int, ...]] = {group.identity: ident}
    frontier = [group.identity]
    while frontier:
        x = frontier.pop()
        for g, p in given.items():
            y = group.mul(g, x)
            q = tuple(p[perms[x][i]] for i in range(k))
            if y not in perms:
                perms[y] = q
                frontier.append(y)
            elif perms[y] != q:
                raise InvalidRing("the given permutations do not define a group action")
    for g in group.elements:
        perms.setdefault(g, ident)
    return BooleanRing(tuple(labels), group, tuple(perms[g] for g in group.elements))


# ------------------------------------------------------------------ polynomials

@dataclass(frozen=True)
class BoolPolynomial:
    e: int
    n: int
    coefficients: tuple[tuple[Monomial, int], ...]

    def __post_init__(self):
        terms: dict[frozenset, int] = {}
        items = self.coefficients.items() if isinstance(self.coefficients, Mapping) else self.coefficients
        for mono, c in items:
            mono = frozenset((int(i), int(j)) for i, j in mono)
            for i, j in mono:
                if not (0 <= i < self.e and 0 <= j < self.n):
                    raise ValueError(f"variable t[{i + 1},{j + 1}] out of range")
            terms[mono] = terms.get(mono, 0) ^ int(c)
        ordered = tuple(sorted(((m, c) for m, c in terms.items() if c),
                               key=lambda mc: (len(mc[0]), sorted(mc[0]))))
        object.__setattr__(self, "coefficients", ordered)

    @classmethod
    def zero(cls, e: int, n: int) -> "BoolPolynomial":
        return cls(e, n, ())

    @classmethod
    def constant(cls, e: int, n: int, c: int) -> "BoolPolynomial":
        return cls(e, n, ((frozenset(), c),))

    @classmethod
    def var(cls, e: int, n: int, i: int, j: int, c: int) -> "BoolPolynomial":
        """``c * t_{i,j}`` with 0-based indices."""
        return cls(e, n, ((frozenset([(i, j)]), c),))

    def as_dict(self) -> dict[frozenset, int]:
        return dict(self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def nvars(self) -> int:
        return self.e * self.n

    def degree(self) -> int:
        return max((len(m) for m, _ in self.coefficients), default=0)

    def __add__(self, other: "BoolPolynomial") -> "BoolPolynomial":
        self._same_shape(other)
        return BoolPolynomial(self.e, self.n, self.coefficients + other.coefficients)

    __sub__ = __add__

    def __mul__(self, other: "BoolPolynomial") -> "BoolPolynomial":
        self._same_shape(other)
        out: list[tuple[frozenset, int]] = []
        for m1, c1 in self.coefficients:
            for m2, c2 in other.coefficients:
                if c1 & c2:
                    out.append((m1 | m2, c1 & c2))
        return BoolPolynomial(self.e, self.n, tuple(out))

    def _same_shape(self, other: "BoolPolynomial"):
        if (self.e, self.n) != (other.e, other.n):
            raise ValueError("polynomials over different variable sets")

    def evaluate(self, point: Mapping[Var, int] | Sequence[int]) -> int:
        """Value at a point; ``point`` maps (block, position) to ring elements,
        or is a flat sequence in block-major order."""
        if not isinstance(point, Mapping):
            point = {(i, j): point[i * self.n + j] for i in range(self.e) for j in range(self.n)}
        acc = 0
        for mono, c in self.coefficients:
            v = c
            for x in mono:
                v &= point[x]
            acc ^= v
        return acc

    def text(self, ring: BooleanRing | None = None) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for mono, c in self.coefficients:
            coef = ring.text(c) if ring is not None else str(c)
            vs = [f"t[{i + 1},{j + 1}]" for i, j in sorted(mono)]
            if not vs:
                parts.append(coef)
            elif coef == "1":
                parts.append("*".join(vs))
            else:
                parts.append("*".join([coef] + vs))
        return " + ".join(parts)

    def __str__(self):
        return self.text()


def truncate(e: int, n: int, terms: Iterable[tuple[int, Mapping[Var, int]]]) -> BoolPolynomial:
    """Reduce a polynomial with exponents modulo ``t^2 = t``.

    ``terms`` are ``(coefficient, {variable: exponent})`` pairs; a positive
    exponent collapses to 1 and repeated monomials cancel in pairs.
    """
    out = []
    for c, powers in terms:
        for x, k in powers.items():
            if k < 0:
                raise ValueError("negative exponent")
        out.append((frozenset(x for x, k in powers.items() if k > 0), c))
    return BoolPolynomial(e, n, tuple(out))


def sigma_on_poly(ring: BooleanRing, k: int, f: BoolPolynomial) -> BoolPolynomial:
    """Apply sigma_k to the coefficients and move block i to block k*i."""
    g = ring.group
    return BoolPolynomial(f.e, f.n, tuple(
        (frozenset((g.mul(k, i), j) for i, j in mono), ring.sigma(k, c))
        for mono, c in f.coefficients))


def sigma_bar(ring: BooleanRing, r: Sequence[int]) -> tuple[int, ...]:
    """(sigma_1(r), ..., sigma_e(r)) flattened block-major."""
    return tuple(ring.sigma(i, x) for i in ring.group.elements for x in r)


# --------------------------------------------------------------------- ideals

@dataclass(frozen=True)
class TransformalIdeal:
    generators: tuple[BoolPolynomial, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        if len({(p.e, p.n) for p in gens}) > 1:
            raise ValueError("generators over different variable sets")
        object.__setattr__(self, "generators", gens)

    def text(self, ring: BooleanRing | None = None) -> str:
        return "(" + ", ".join(p.text(ring) for p in self.generators) + ")"


def _truth_table(f: BoolPolynomial, atom: int) -> int:
    """Bitset over points of {0,1}^(en): bit p set iff the atom-coordinate of f is 1 at p."""
    nv = f.nvars
    coeff = [0] * (1 << nv)
    for mono, c in f.coefficients:
        if c >> atom & 1:
            m = 0
            for i, j in mono:
                m |= 1 << (i * f.n + j)
            coeff[m] ^= 1
    # zeta transform over subsets: value(p) = xor of coeff[m] for m subset of p
    for b in range(nv):
        bit = 1 << b
        for p in range(1 << nv):
            if p & bit:
                coeff[p] ^= coeff[p ^ bit]
    out = 0
    for p, v in enumerate(coeff):
        if v:
            out |= 1 << p
    return out


@functools.lru_cache(maxsize=65536)
def _tables(f: BoolPolynomial, natoms: int) -> tuple[int, ...]:
    return tuple(_truth_table(f, a) for a in range(natoms))


def _support(ring: BooleanRing, ideal: TransformalIdeal) -> tuple[int, ...]:
    k = len(ring.atoms)
    out = [0] * k
    for p in ideal.generators:
        for a, t in enumerate(_tables(p, k)):
            out[a] |= t
    return tuple(out)


def polynomial_from_tables(ring: BooleanRing, e: int, n: int, tables: Sequence[int]) -> BoolPolynomial:
    """The unique reduced polynomial whose atom-coordinates have the given truth tables."""
    nv = e * n
    coeff: dict[int, int] = {}
    for a, table in enumerate(tables):
        vals = [table >> p & 1 for p in range(1 << nv)]
        for b in range(nv):
            bit = 1 << b
            for p in range(1 << nv):
                if p & bit:
                    vals[p] ^= vals[p ^ bit]
        for m, v in enumerate(vals):
            if v:
                coeff[m] = coeff.get(m, 0) | 1 << a
    return BoolPolynomial(e, n, tuple(
        (frozenset((b // n, b % n) for b in range(nv) if m >> b & 1), c) for m, c in coeff.items()))


def principal_generator(ring: BooleanRing, ideal: TransformalIdeal, e: int, n: int) -> BoolPolynomial:
    """A single generator of the ideal (every ideal here is principal)."""
    return polynomial_from_tables(ring, e, n, _support(ring, ideal))


def in_ideal(ring: BooleanRing, f: BoolPolynomial, ideal: TransformalIdeal) -> bool:
    """f lies in the ideal iff, atom by atom, f is non-zero only where some generator is."""
    sup = _support(ring, ideal)
    return all(t & ~s == 0 for t, s in zip(_tables(f, len(ring.atoms)), sup))


def ideal_contains(ring: BooleanRing, big: TransformalIdeal, small: TransformalIdeal) -> bool:
    return all(in_ideal(ring, p, big) for p in small.generators)


def ideals_equal(ring: BooleanRing, i: TransformalIdeal, j: TransformalIdeal) -> bool:
    return _support(ring, i) == _support(ring, j)


def is_g_invariant_ideal(ring: BooleanRing, ideal: TransformalIdeal) -> bool:
    return all(in_ideal(ring, sigma_on_poly(ring, g, p), ideal)
               for p in ideal.generators for g in ring.group.elements)


def _check_shape(ring: BooleanRing, ideal: TransformalIdeal, n: int):
    for p in ideal.generators:
        if p.e != ring.group.order or p.n != n:
            raise ValueError(f"generator over (e={p.e}, n={p.n}), expected (e={ring.group.order}, n={n})")


def points(ring: BooleanRing, n: int, cap: int = SEARCH_CAP) -> Iterator[tuple[int, ...]]:
    """R^n in canonical (lexicographic) order."""
    if ring.size ** n > cap:
        raise SearchTooLarge(f"|R|^n = {ring.size ** n} exceeds the cap {cap}")
    return itertools.product(ring.elements(), repeat=n)


def vanishes(ring: BooleanRing, ideal: TransformalIdeal, r: Sequence[int]) -> bool:
    """Whether every generator is zero at sigma_bar(r)."""
    pt = sigma_bar(ring, r)
    return all(p.evaluate(pt) == 0 for p in ideal.generators)


def variety_points(ideal: TransformalIdeal, ring: BooleanRing, n: int,
                   cap: int = SEARCH_CAP) -> list[tuple[int, ...]]:
    _check_shape(ring, ideal, n)
    return [r for r in points(ring, n, cap) if vanishes(ring, ideal, r)]


def check_diamond_axiom(ring: BooleanRing, i: TransformalIdeal, j: TransformalIdeal, n: int,
                        cap: int = SEARCH_CAP) -> tuple[int, ...] | None:
    """First r with sigma_bar(r) in V(I) but not in V(J), or None if there is none."""
    _check_shape(ring, i, n)
    _check_shape(ring, j, n)
    if not is_g_invariant_ideal(ring, i):
        raise NotInvariant(f"{i.text(ring)} is not G-invariant")
    if not ideal_contains(ring, j, i) or ideal_contains(ring, i, j):
        raise NotProperlyContained(f"{i.text(ring)} is not properly contained in {j.text(ring)}")
    for r in points(ring, n, cap):
        if vanishes(ring, i, r) and not vanishes(ring, j, r):
            return r
    return None


# ------------------------------------------------------------- non-atoms

@dataclass(frozen=True)
class NonAtomWitness:
    ring: BooleanRing            # R' = R[t_1..t_e] / (t^2 - t, t_i <= sigma_i(r))
    y: int                       # image of t_1 in R'
    embedding: tuple[int, ...]   # element x of R -> its image in R'
    r: int

    def embed(self, x: int) -> int:
        return self.embedding[x]


def _quotient_atoms(ring: BooleanRing, r: int) -> list[tuple[int, tuple[int, ...]]]:
    """Atoms of R': an atom a of R together with values v_i of t_i, where v_i <= [a in sigma_i(r)]."""
    e = ring.group.order
    out = []
    for a in range(len(ring.atoms)):
        free = [ring.sigma(i, r) >> a & 1 for i in range(e)]
        for v in itertools.product(*[(0, 1) if f else (0,) for f in free]):
            out.append((a, v))
    return out


def find_non_atom_witness(ring: BooleanRing, r: int) -> NonAtomWitness:
    """Adjoin t_1..t_e with t_i below sigma_i(r); t_1 is then a proper non-zero part of r.

    Raises ZeroElement for r = 0.
    """
    if r == 0:
        raise ZeroElement("0 has no non-zero part")
    g = ring.group
    atoms = _quotient_atoms(ring, r)
    pos = {x: k for k, x in enumerate(atoms)}
    labels = [f"{ring.atoms[a]}:{''.join(map(str, v))}" for a, v in atoms]
    action = []
    for k in g.elements:
        p = ring.action[k]
        perm = [0] * len(atoms)
        for idx, (a, v) in enumerate(atoms):
            w = [0] * g.order
            for i, bit in enumerate(v):
                w[g.mul(k, i)] = bit
            perm[idx] = pos[(p[a], tuple(w))]
        action.append(tuple(perm))
    big = BooleanRing(tuple(labels), g, tuple(action))
    embedding = []
    for x in ring.elements():
        m = 0
        for idx, (a, _) in enumerate(atoms):
            if x >> a & 1:
                m |= 1 << idx
        embedding.append(m)
    y = 0
    for idx, (_, v) in enumerate(atoms):
        if v[g.identity]:
            y |= 1 << idx
    w = NonAtomWitness(big, y, tuple(embedding), r)
    rr = w.embed(r)
    if not (rr & y == y and rr != y and y != 0):  # pragma: no cover
        raise AssertionError("construction failed to split r")
    return w


def check_embedding(w: NonAtomWitness, src: BooleanRing, pairs: Iterable[tuple[int, int]] | None = None) -> bool:
    """R -> R' is an injective, G-equivariant ring homomorphism (on the given pairs, or all)."""
    f, big = w.embed, w.ring
    if f(0) != 0 or f(src.one) != big.one:
        return False
    if len(set(w.embedding)) != src.size:
        return False
    if pairs is None:
        pairs = itertools.product(src.elements(), repeat=2)
    for x, y in pairs:
        if f(x ^ y) != f(x) ^ f(y) or f(x & y) != f(x) & f(y):
            return False
    return all(f(src.sigma(g, x)) == big.sigma(g, f(x))
               for g in src.group.elements for x in src.elements())


def exists_proper_part(ring: BooleanRing, r: int) -> int | None:
    """Direct evaluation of  exists y (r*y = y and r != y and y != 0)."""
    for y in ring.elements():
        if r & y == y and r != y and y != 0:
            return y
    return None


# ------------------------------------------------------------- text format

_TOKEN = re.compile(r"\s*(?:(\{[^}]*\})|t\[(\d+)\s*,\s*(\d+)\]|(\d+)|(\^)|(\*)|(\+)|(-))")


def parse_polynomial(text: str, ring: BooleanRing, n: int) -> BoolPolynomial:
    """Parse ``coef*t[i,j]*t[i',j'] + ...`` (1-based indices, optional ``^k`` exponents).

    ``coef`` is ``0``, ``1`` or an atom set such as ``{1,3}``; ``-`` is the same
    as ``+`` in characteristic 2.  Exponents are truncated.
    """
    e = ring.group.order
    terms: list[tuple[int, dict[Var, int]]] = []
    coef, powers, expect_factor = ring.one, {}, True
    pos, s = 0, text.strip()
    if not s:
        raise FormulaSyntaxError("empty polynomial", 0)
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected {s[pos:pos + 8]!r}", pos)
        subset, bi, bj, num, caret, star, plus, minus = m.groups()
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if plus or minus:
            if expect_factor:
                raise FormulaSyntaxError("missing term", start)
            terms.append((coef, powers))
            coef, powers, expect_factor = ring.one, {}, True
        elif star:
            if expect_factor:
                raise FormulaSyntaxError("missing factor", start)
            expect_factor = True
        elif caret:
            raise FormulaSyntaxError("exponent without a variable", start)
        else:
            if not expect_factor:
                raise FormulaSyntaxError("expected '*' or '+'", start)
            expect_factor = False
            if subset is not None:
                body = subset[1:-1].strip()
                coef &= ring.element(x.strip() for x in body.split(",")) if body else 0
            elif num is not None:
                if num not in ("0", "1"):
                    raise FormulaSyntaxError(f"coefficient {num} is not 0, 1 or an atom set", start)
                coef &= ring.one if num == "1" else 0
            else:
                i, j = int(bi) - 1, int(bj) - 1
                if not (0 <= i < e and 0 <= j < n):
                    raise FormulaSyntaxError(f"t[{bi},{bj}] out of range", start)
                k = 1
                m2 = re.compile(r"\s*\^\s*(\d+)").match(s, m.end())
                if m2:
                    k = int(m2.group(1))
                    m = m2
                powers[(i, j)] = powers.get((i, j), 0) + k
        pos = m.end()
    if expect_factor:
        raise FormulaSyntaxError("polynomial ends with an operator", len(s))
    terms.append((coef, powers))
    return truncate(e, n, terms)


def parse_ideal(text: str, ring: BooleanRing, n: int) -> TransformalIdeal:
    """One generator per non-empty line (``#`` starts a comment)."""
    gens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            gens.append(parse_polynomial(line, ring, n))
    return TransformalIdeal(tuple(gens))
