import random

import pytest
from hypothesis import given, settings, strategies as st

from gact.errors import ActionMismatchOnBase
from gact.generic import (ClosureOracle, GenericModel, SaturationState, free_amalgam,
                          free_amalgam_maps, random_structure, saturate_empty, saturate_graph,
                          verify_extension_axioms)
from gact.group import builtin, subgroups, trivial
from gact.logic import parse
from gact.structure import find_isomorphism, make_structure, orbit

from strategies import g_structures, subsets

Z2 = builtin("z2")


def orbit_sizes(m):
    return sorted(len(o) for o in m.orbits)


def test_one_round_trivial_group_adds_a_vertex():
    st0 = SaturationState.empty(trivial())
    st1 = saturate_graph(st0, 1, n_bound=0)
    assert st1.current.size == 1


def test_one_round_z2():
    m = saturate_graph(SaturationState.empty(Z2), 1, n_bound=0).current
    stabs = sorted(len(m.stabilizer(o[0])) for o in m.orbits)
    assert 2 in stabs and 1 in stabs          # a fixed vertex and a swapped pair
    pairs = [o for o in m.orbits if len(o) == 2]
    assert any(m.related(*o) for o in pairs)
    assert any(not m.related(*o) for o in pairs)


def test_chain_property():
    st1 = saturate_graph(SaturationState.empty(Z2), 1)
    st2 = saturate_graph(st1, 1)
    a, b = st1.current, st2.current
    assert b.universe[:a.size] == a.universe
    for x in range(a.size):
        for y in range(a.size):
            assert a.related(x, y) == b.related(x, y)
    assert all(b.action[g][:a.size] == a.action[g] for g in Z2.elements)
    assert all(r <= st2.round for r in st2.birth_round)


def test_check_before_extend():
    st1 = saturate_graph(SaturationState.empty(Z2), 2)
    again = saturate_graph(st1, 1, n_bound=0)
    # nothing with parameters from an empty tuple is missing any more
    assert again.current.size == st1.current.size


def test_size_cap_truncates():
    st1 = saturate_graph(SaturationState.empty(builtin("z3")), 4, size_cap=20)
    assert st1.truncated
    assert st1.current.size <= 20 + 3


def test_saturate_empty_examples():
    m = saturate_empty(SaturationState.empty(Z2, "empty"), 1).current
    assert orbit_sizes(m) == [1, 2]
    s3 = saturate_empty(SaturationState.empty(builtin("s3"), "empty"), 1).current
    assert orbit_sizes(s3) == [1, 2, 3, 3, 3, 6]
    st0 = SaturationState.empty(Z2, "empty")
    assert saturate_empty(st0, 0) is st0


@pytest.mark.parametrize("name", ["z1", "z2", "z3", "z4", "z2xz2", "s3"])
def test_every_orbit_type_realised(name):
    g = builtin(name)
    m = saturate_empty(SaturationState.empty(g, "empty"), 1).current
    stabs = {m.stabilizer(o[0]) for o in m.orbits}
    assert len(stabs) == len(subgroups(g))


def test_free_amalgam_examples():
    one = trivial()
    v = make_structure("graph", ["a"], group=one)
    w = free_amalgam(v, make_structure("graph", ["b"], group=one))
    assert w.size == 2 and not w.relation
    e = make_structure("graph", ["a", "b"], [(0, 1)])
    assert free_amalgam(e, e, [(0, 0), (1, 1)]).size == 2
    ab = make_structure("graph", ["a", "b"], [(0, 1)])
    ac = make_structure("graph", ["a", "c"], [(0, 1)])
    path, emb = free_amalgam_maps(ab, ac, [(0, 0)])
    assert path.size == 3
    a, b, c = 0, 1, emb[1]
    assert path.related(a, b) and path.related(a, c) and not path.related(b, c)


def test_free_amalgam_action_mismatch():
    pair = make_structure("empty", 2, group=Z2, action={"s": [1, 0]})
    fixed = make_structure("empty", 2, group=Z2)
    with pytest.raises(ActionMismatchOnBase):
        free_amalgam(pair, fixed, [(0, 0), (1, 1)])


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["z1", "z2", "z3"]), st.integers(0, 2 ** 31))
def test_free_amalgam_symmetric(name, seed):
    g = builtin(name)
    rng = random.Random(seed)
    base = random_structure(g, rng, orbits=1)
    b = free_amalgam(base, random_structure(g, rng, orbits=1))
    c = free_amalgam(base, random_structure(g, rng, orbits=1))
    pairs = [(i, i) for i in range(base.size)]
    bc = free_amalgam(b, c, pairs)
    cb = free_amalgam(c, b, pairs)
    assert find_isomorphism(bc, cb) is not None


def test_verify_examples():
    empty = make_structure("graph", 0)
    assert len(verify_extension_axioms(empty, "graph", 0, 1)) == 1
    fixed = make_structure("graph", ["v"], group=Z2)
    fails = verify_extension_axioms(fixed, "graph", 0, 1)
    # the lone fixed vertex realises only its own type; the swapped pair with and without an edge is missing
    assert len(fails) == 2


@pytest.mark.parametrize("name", ["z2", "z3"])
def test_saturated_rounds_pass_verification(name):
    g = builtin(name)
    st1 = SaturationState.empty(g)
    for k in range(1, 3):
        st1 = saturate_graph(st1, 1, size_cap=None)
        if k >= 2:
            params = st1.born_by(k - 2)
            assert verify_extension_axioms(st1.current, "graph", 1, 1, params) == []


@settings(max_examples=40, deadline=None)
@given(g_structures(theory=None), st.data())
def test_closure_oracle_laws(m, data):
    oracle = ClosureOracle("graph", m.group, m)
    a = subsets(m, data.draw)
    b = a | subsets(m, data.draw)
    ga = oracle.acl(a)
    assert oracle.acl(ga) == ga
    assert ga <= oracle.acl(b)
    assert ga == orbit(m, a) == oracle.dcl(a)


def test_generic_model_simple_truths():
    gm = GenericModel(Z2, "graph")
    m = saturate_graph(SaturationState.empty(Z2), 1).current
    x = m.universe[0]
    assert gm.holds(m, parse("E y. R(y, x) & s·y = y", Z2), {"x": x})
    assert not gm.holds(m, parse("E y. s·y = y & s·y != y", Z2), {})
    assert gm.holds(m, parse("A y. y = x | (E z. R(y, z) & !R(x, z))", Z2), {"x": x})
    e = GenericModel(Z2, "empty")
    pts = saturate_empty(SaturationState.empty(Z2, "empty"), 1).current
    assert e.holds(pts, parse("E y. s·y != y & y != x", Z2), {"x": pts.universe[0]})
