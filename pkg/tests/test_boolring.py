import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gact.boolring import (BoolPolynomial, TransformalIdeal, check_diamond_axiom, check_embedding,
                           exists_proper_part, find_non_atom_witness, in_ideal, is_g_invariant_ideal,
                           parse_ideal, parse_polynomial, points, powerset_ring, sigma_bar,
                           sigma_on_poly, truncate, vanishes, variety_points)
from gact.errors import (FormulaSyntaxError, InvalidRing, NotInvariant, NotProperlyContained,
                         SearchTooLarge, ZeroElement)
from gact.group import builtin, trivial

Z2 = builtin("z2")


def var(i, j, e=2, n=1, c=1):
    return BoolPolynomial.var(e, n, i, j, c)


def ideal(*gens):
    return TransformalIdeal(tuple(gens))


def join(f, g):
    return f + g + f * g


def naive_in_ideal(f, gens):
    # R[t]/I2 is itself a Boolean ring: (g1..gk) = (g1 v ... v gk) and f in (g) iff f*g = f
    if not gens:
        return f.is_zero()
    g = gens[0]
    for h in gens[1:]:
        g = join(g, h)
    return (f * g).as_dict() == f.as_dict()


@st.composite
def polys(draw, ring, e, n, max_terms=4):
    nv = [(i, j) for i in range(e) for j in range(n)]
    terms = draw(st.lists(st.tuples(st.sets(st.sampled_from(nv), max_size=3),
                                    st.integers(0, ring.one)), max_size=max_terms))
    return BoolPolynomial(e, n, [(frozenset(m), c) for m, c in terms])


def test_ring_basics():
    r = powerset_ring(3, Z2, {1: (1, 0, 2)})
    assert r.size == 8 and r.one == 7 and r.zero == 0
    x = r.element(["1"])
    assert r.sigma(1, x) == r.element(["2"])
    assert r.text(r.element(["1", "3"])) == "{1,3}"
    assert r.is_atom(x) and not r.is_atom(r.one)
    with pytest.raises(InvalidRing):
        powerset_ring(3, builtin("z3"), {1: (1, 0, 2)})


def test_truncate_examples():
    x = (0, 0)
    assert truncate(2, 1, [(1, {x: 2}), (1, {x: 1})]).is_zero()
    f = var(0, 0) * var(1, 0) + var(0, 0, c=3)
    assert truncate(2, 1, [(c, {v: 1 for v in m}) for m, c in f.coefficients]) == f
    ring = powerset_ring(3, trivial())
    c = ring.element(["2"])
    one = ring.one
    big = truncate(1, 2, [(one, {(0, 0): 3, (0, 1): 3}), (c, {(0, 0): 1})])
    assert big == BoolPolynomial(1, 2, [(frozenset({(0, 0), (0, 1)}), one), (frozenset({(0, 0)}), c)])
    for a, b in itertools.product(ring.elements(), repeat=2):
        naive = (a & b) ^ (c & a)          # (ab)^3 = ab in a Boolean ring
        assert big.evaluate([a, b]) == naive


def test_truncate_preserves_evaluation_exhaustively():
    ring = powerset_ring(2, trivial())
    nv = [(0, 0), (0, 1)]
    for exps in itertools.product(range(4), repeat=2):
        for c in ring.elements():
            f = truncate(1, 2, [(c, dict(zip(nv, exps))), (ring.one, {(0, 1): 2})])
            for a, b in itertools.product(ring.elements(), repeat=2):
                mono = c
                for v, k in zip((a, b), exps):
                    for _ in range(k):
                        mono &= v
                bb = b & b
                assert f.evaluate([a, b]) == mono ^ bb


def test_sigma_examples():
    ring = powerset_ring(1, Z2)
    f = var(0, 0)
    assert sigma_on_poly(ring, 0, f) == f
    assert sigma_on_poly(ring, 1, f) == var(1, 0)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["z2", "z3", "s3"]), st.data())
def test_sigma_composition(name, data):
    g = builtin(name)
    perms = {1: (1, 2, 0)} if name == "z3" else {1: (1, 0, 2)}
    if name == "s3":
        perms = {}
    ring = powerset_ring(3, g, perms)
    f = data.draw(polys(ring, g.order, 1))
    for k, h in itertools.product(g.elements, repeat=2):
        lhs = sigma_on_poly(ring, k, sigma_on_poly(ring, h, f))
        assert lhs == sigma_on_poly(ring, g.mul(k, h), f)


def test_invariance_examples():
    ring = powerset_ring(1, Z2)
    zero = BoolPolynomial.zero(2, 1)
    assert is_g_invariant_ideal(ring, ideal(zero))
    assert not is_g_invariant_ideal(ring, ideal(var(0, 0)))
    assert is_g_invariant_ideal(ring, ideal(var(0, 0) * var(1, 0)))
    assert is_g_invariant_ideal(ring, ideal(var(0, 0), var(1, 0)))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_membership_matches_boolean_ring_oracle(data):
    ring = powerset_ring(2, Z2, {1: (1, 0)})
    f = data.draw(polys(ring, 2, 1))
    gens = data.draw(st.lists(polys(ring, 2, 1), max_size=3))
    assert in_ideal(ring, f, ideal(*gens)) == naive_in_ideal(f, gens)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_invariance_matches_oracle(data):
    ring = powerset_ring(2, Z2, data.draw(st.sampled_from([{}, {1: (1, 0)}])))
    gens = data.draw(st.lists(polys(ring, 2, 1), min_size=1, max_size=2))
    want = all(naive_in_ideal(sigma_on_poly(ring, k, p), gens) for p in gens for k in Z2.elements)
    assert is_g_invariant_ideal(ring, ideal(*gens)) == want


def test_variety_examples():
    ring = powerset_ring(2, Z2)
    everything = list(points(ring, 1))
    assert variety_points(ideal(BoolPolynomial.zero(2, 1)), ring, 1) == everything
    assert variety_points(ideal(BoolPolynomial.constant(2, 1, ring.one)), ring, 1) == []
    got = variety_points(ideal(var(0, 0) + var(1, 0)), ring, 1)
    assert got == everything and len(got) == 4
    with pytest.raises(SearchTooLarge):
        variety_points(ideal(BoolPolynomial.zero(2, 3)), ring, 3, cap=10)


def test_diamond_examples():
    ring = powerset_ring(2, Z2)
    zero, one = BoolPolynomial.zero(2, 1), BoolPolynomial.constant(2, 1, ring.one)
    assert check_diamond_axiom(ring, ideal(zero), ideal(one), 1) == next(points(ring, 1))
    with pytest.raises(NotProperlyContained):
        check_diamond_axiom(ring, ideal(one), ideal(one), 1)
    with pytest.raises(NotInvariant):
        check_diamond_axiom(ring, ideal(var(0, 0)), ideal(one), 1)
    single = powerset_ring(1, trivial())
    w = check_diamond_axiom(single, ideal(BoolPolynomial.zero(1, 1)), ideal(var(0, 0, e=1)), 1)
    assert w == (1,)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_diamond_witness_reverified(data):
    ring = powerset_ring(2, Z2, {1: (1, 0)})
    p = data.draw(polys(ring, 2, 1))
    i = ideal(p * sigma_on_poly(ring, 1, p))
    j = ideal(*i.generators, data.draw(polys(ring, 2, 1)))
    try:
        w = check_diamond_axiom(ring, i, j, 1)
    except NotProperlyContained:
        return
    brute = [r for r in points(ring, 1) if vanishes(ring, i, r) and not vanishes(ring, j, r)]
    assert w == (brute[0] if brute else None)
    if w is not None:
        pt = sigma_bar(ring, w)
        assert all(g.evaluate(pt) == 0 for g in i.generators)
        assert any(g.evaluate(pt) != 0 for g in j.generators)


@pytest.mark.parametrize("name,atoms,perms", [
    ("z1", 1, {}), ("z1", 2, {}), ("z2", 1, {}), ("z2", 2, {1: (1, 0)}), ("z3", 3, {1: (1, 2, 0)}),
])
def test_non_atom_witness(name, atoms, perms):
    g = builtin(name)
    ring = powerset_ring(atoms, g, perms)
    for r in range(1, ring.size):
        w = find_non_atom_witness(ring, r)
        big, y, rr = w.ring, w.y, w.embed(r)
        assert big.mul(rr, y) == y and rr != y and y != 0
        assert exists_proper_part(big, rr) is not None
        assert check_embedding(w, ring)
    with pytest.raises(ZeroElement):
        find_non_atom_witness(ring, 0)


def test_non_atom_single_atom_doubles():
    w = find_non_atom_witness(powerset_ring(1, trivial()), 1)
    assert len(w.ring.atoms) == 2
    assert exists_proper_part(powerset_ring(1, trivial()), 1) is None


def test_evaluation_is_a_homomorphism():
    ring = powerset_ring(3, Z2, {1: (1, 0, 2)})
    fs = [var(0, 0), var(1, 0, c=5), var(0, 0) * var(1, 0) + BoolPolynomial.constant(2, 1, 2)]
    for r in ring.elements():
        pt = sigma_bar(ring, (r,))
        for f, g in itertools.product(fs, repeat=2):
            assert (f + g).evaluate(pt) == f.evaluate(pt) ^ g.evaluate(pt)
            assert (f * g).evaluate(pt) == f.evaluate(pt) & g.evaluate(pt)


def test_parser():
    ring = powerset_ring(3, Z2)
    f = parse_polynomial("{1,3}*t[1,1]*t[2,1] + t[1,1]^2 + t[1,1] + 1", ring, 1)
    assert f == BoolPolynomial(2, 1, [(frozenset({(0, 0), (1, 0)}), 5), (frozenset(), 7)])
    assert parse_polynomial(f.text(ring), ring, 1) == f
    assert parse_polynomial("0", ring, 1).is_zero()
    i = parse_ideal("# comment\nt[1,1]*t[2,1]\n\nt[1,1] - t[2,1]\n", ring, 1)
    assert len(i.generators) == 2
    for bad in ["t[3,1]", "{1,", "t[1,1] +", "{4}"]:
        with pytest.raises((FormulaSyntaxError, InvalidRing, ValueError)):
            parse_polynomial(bad, ring, 1)
