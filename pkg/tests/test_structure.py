import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gact.errors import InvalidStructure, UnknownElement
from gact.generic import _coset_structure
from gact.group import builtin, trivial
from gact.logic import Eq, Not, Rel, Term
from gact.structure import (ExtensionPair, GStructure, atomic_diagram, chain,
                            diagram_key, disjoint_union, find_isomorphism, invariants,
                            is_existentially_closed, is_normal_extension, is_order_preserving,
                            is_regular_extension, make_structure, orbit, order_rigidity_check)
from gact.generic import ClosureOracle

from strategies import g_structures, subsets

Z2 = builtin("z2")


def swap_pair():
    return make_structure("empty", ["a", "b"], group=Z2, action={"s": [1, 0]})


def orbits(g, stabs):
    return disjoint_union([_coset_structure(g, h) for h in stabs])


def test_orbit_examples():
    m = swap_pair()
    assert orbit(m, ["a"]) == {0, 1}
    assert orbit(m, []) == frozenset()
    s3 = builtin("s3")
    free = orbits(s3, [(0,)])
    assert len(orbit(free, [0])) == 6
    with pytest.raises(UnknownElement):
        orbit(m, ["zz"])


def test_invariants_examples():
    assert invariants(make_structure("empty", 3)) == {0, 1, 2}
    m = make_structure("empty", ["v0", "v1", "v2"], group=Z2, action={"s": [1, 0, 2]})
    assert invariants(m) == {2}
    assert invariants(orbits(builtin("z3"), [(0,)])) == frozenset()


def test_atomic_diagram_examples():
    m = make_structure("graph", 2, [(0, 1)])
    d = atomic_diagram(m, [0, 1])
    x0, x1 = Term("x0", 0), Term("x1", 0)
    assert {Rel("R", x0, x1), Rel("R", x1, x0), Not(Eq(x0, x1))} <= d
    single = atomic_diagram(make_structure("empty", 1), [0])
    assert single == {Eq(x0, x0)}
    g = make_structure("graph", 2, [(0, 1)], group=Z2, action={"s": [1, 0]})
    assert Rel("R", x0, Term("x0", 1)) in atomic_diagram(g, [0])


def test_invalid_structures():
    with pytest.raises(InvalidStructure):
        make_structure("graph", 2, [(0, 0)])
    with pytest.raises(InvalidStructure):
        make_structure("graph", 3, [(0, 1)], group=Z2, action={"s": [0, 2, 1]})
    with pytest.raises(InvalidStructure):
        make_structure("empty", 2, [(0, 1)])
    with pytest.raises(InvalidStructure):
        # a non-identity order automorphism of a chain does not exist
        chain(5, Z2, {"s": [4, 3, 2, 1, 0]})


def test_json_round_trip_is_byte_stable():
    m = make_structure("graph", ["p", "q", "r", "t"], [(0, 1), (2, 3)], group=Z2,
                       action={"s": [1, 0, 3, 2]})
    text = m.dumps()
    again = GStructure.loads(text)
    assert again.to_json() == m.to_json()
    assert again.relation == m.relation and again.action == m.action
    assert again.dumps() == text


def test_existential_closure_examples():
    m = orbits(Z2, [(0,), (0,)])
    assert is_existentially_closed(ExtensionPair(m, range(m.size)))
    small = orbits(Z2, [(0,)])
    big = orbits(Z2, [(0,), (0, 1)])
    res = is_existentially_closed(ExtensionPair.from_embedding(small, big, [0, 1]))
    assert not res
    # the missing witness is a fixed point
    assert "s·y0 = y0" in _text(res.formula) or "y0 = s·y0" in _text(res.formula)
    small = orbits(Z2, [(0,), (0,)])
    big = orbits(Z2, [(0,), (0,), (0,)])
    assert is_existentially_closed(ExtensionPair.from_embedding(small, big, range(4)))


def _text(f):
    from gact.logic import to_text
    return to_text(f, Z2)


def test_normal_extension_examples():
    m = make_structure("empty", 4)
    assert is_normal_extension([], range(4), m)
    assert is_normal_extension([1], [1], m)
    assert not is_normal_extension([], [0, 1], m)


def test_regular_extension_examples():
    m = orbits(Z2, [(0,), (0, 1), (0,)])
    oracle = ClosureOracle("empty", Z2, m)
    e = oracle.acl([0])
    assert is_regular_extension(e, range(m.size), oracle)
    assert is_regular_extension([0], [0, 1], oracle)
    for e, a in [([0], [0, 2]), ([2], [2, 3, 4]), ([], [3])]:
        assert is_regular_extension(e, a, oracle)


def test_order_rigidity():
    assert order_rigidity_check(chain(5))
    assert is_order_preserving(tuple(range(5)))
    assert not is_order_preserving((1, 0, 2))


def test_find_isomorphism_equivariant():
    a = make_structure("graph", 2, [(0, 1)], group=Z2, action={"s": [1, 0]})
    b = make_structure("graph", ["u", "w"], [(0, 1)], group=Z2, action={"s": [1, 0]})
    assert find_isomorphism(a, b) is not None
    c = make_structure("graph", 2, [(0, 1)], group=Z2)
    assert find_isomorphism(a, c) is None
    assert find_isomorphism(a, c, preserve_action=False) is not None


@settings(max_examples=60, deadline=None)
@given(g_structures(theory=None), st.data())
def test_orbit_is_closure_operator(m, data):
    a = subsets(m, data.draw)
    b = a | subsets(m, data.draw)
    ga = orbit(m, a)
    assert a <= ga
    assert orbit(m, ga) == ga
    assert ga <= orbit(m, b)
    for p in m.action:
        assert {p[x] for x in ga} == ga


@settings(max_examples=60, deadline=None)
@given(g_structures(theory=None))
def test_invariants_count(m):
    inv = invariants(m)
    nontrivial = {o for o in m.orbits if len(o) > 1}
    assert len(inv) + sum(len(o) for o in nontrivial) == m.size
    assert inv == {o[0] for o in m.orbits if len(o) == 1}


@settings(max_examples=40, deadline=None)
@given(g_structures(max_orbits=3), st.data())
def test_equal_diagrams_give_isomorphic_closures(m, data):
    x = data.draw(st.integers(0, m.size - 1))
    y = data.draw(st.integers(0, m.size - 1))
    same = diagram_key(m, [x]) == diagram_key(m, [y])
    sub_x, sub_y = m.induced(sorted(m.orbit_of(x))), m.induced(sorted(m.orbit_of(y)))
    ix, iy = sorted(m.orbit_of(x)).index(x), sorted(m.orbit_of(y)).index(y)
    iso = find_isomorphism(sub_x, sub_y, pins={ix: iy})
    assert same == (iso is not None)


def test_order_rigidity_small_exhaustive():
    for n in range(1, 7):
        for p in itertools.permutations(range(n)):
            if is_order_preserving(p):
                assert p == tuple(range(n))
    assert order_rigidity_check(chain(3, trivial()))
