import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from gact.config import (EQ, NR, R, Configuration, TermSet, all_configurations, configuration_of,
                         enumerate_extensions, is_consistent, witness_tuple)
from gact.errors import ContradictoryBase
from gact.group import builtin, trivial
from gact.logic import Eq, Not, Rel, Term
from gact.structure import make_structure

from strategies import g_structures

Z2 = builtin("z2")


def test_all_non_edges_is_two_isolated_vertices():
    terms = TermSet(Z2, 1, 0)
    rep = is_consistent(Configuration.from_pairs(terms, [NR]))
    assert rep.consistent
    assert rep.witness.size == 2 and not rep.witness.relation


def test_asymmetric_entries_are_inconsistent():
    terms = TermSet(Z2, 1, 0)
    q = Configuration(terms, ((EQ, EQ), (R, EQ)))
    rep = is_consistent(q)
    assert not rep.consistent and rep.violation


def test_edge_between_y_and_its_image():
    terms = TermSet(Z2, 0, 1)
    rep = is_consistent(Configuration.from_pairs(terms, [R]))
    assert rep.consistent
    w = rep.witness
    assert w.size == 2 and w.related(0, 1) and w.act(1, 0) == 1


def test_enumeration_examples():
    one = trivial()
    assert len(enumerate_extensions([], TermSet(one, 0, 1))) == 1
    assert len(enumerate_extensions([], TermSet(one, 0, 2))) == 3
    y = Term("y0", 0)
    base = [Rel("R", y, Term("y0", 1))]
    got = enumerate_extensions(base, TermSet(Z2, 0, 1))
    assert len(got) == 1 and got[0].vector() == (R,)


def test_contradictory_base():
    y = Term("y0", 0)
    with pytest.raises(ContradictoryBase):
        enumerate_extensions([Eq(y, Term("y0", 1)), Not(Eq(y, Term("y0", 1)))], TermSet(Z2, 0, 1))


def test_configuration_of_examples():
    m = make_structure("graph", 2, [(0, 1)], group=Z2, action={"s": [1, 0]})
    q = configuration_of(m, [], [0])
    assert q.vector() == (R,)
    empty = configuration_of(m, [], [])
    assert empty.terms.size == 0


def _brute(terms, pair_values):
    n = terms.size
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for vals in pair_values(pairs):
        q = Configuration.from_pairs(terms, dict(zip(pairs, vals)))
        if is_consistent(q).consistent:
            out.append(q.vector())
    return sorted(out)


def _all_values(pairs):
    return itertools.product((EQ, R, NR), repeat=len(pairs))


@pytest.mark.parametrize("group,n,n_prime", [
    ("z1", 0, 3), ("z1", 1, 2), ("z1", 0, 4), ("z1", 2, 3),
    ("z2", 0, 1), ("z2", 1, 1), ("z2", 0, 2), ("z3", 0, 1), ("z4", 0, 1),
    ("z2xz2", 0, 1), ("z5", 0, 1),
])
def test_enumeration_complete_small(group, n, n_prime):
    terms = TermSet(builtin(group), n, n_prime)
    got = sorted(q.vector() for q in enumerate_extensions([], terms))
    assert got == _brute(terms, _all_values)


@pytest.mark.parametrize("group,n,n_prime", [("z3", 1, 1), ("z3", 0, 2), ("z6", 0, 1), ("s3", 0, 1)])
def test_enumeration_complete_size_six(group, n, n_prime):
    # consistency forces equivariance, so the brute force may skip the other assignments
    terms = TermSet(builtin(group), n, n_prime)
    k = terms.group.order

    def equivariant(pairs):
        orbit_rep = {}
        for i, j in pairs:
            images = []
            for g in range(k):
                a, b = terms.act(g, i), terms.act(g, j)
                images.append((min(a, b), max(a, b)))
            orbit_rep[(i, j)] = min(images)
        reps = sorted(set(orbit_rep.values()))
        for vals in itertools.product((EQ, R, NR), repeat=len(reps)):
            table = dict(zip(reps, vals))
            yield [table[orbit_rep[p]] for p in pairs]

    got = sorted(q.vector() for q in enumerate_extensions([], terms))
    assert got == _brute(terms, equivariant)


def test_trivial_group_counts():
    # set partitions into k blocks times 2^(k choose 2) graphs on the blocks
    assert [len(all_configurations(trivial(), 0, k)) for k in (1, 2, 3)] == [1, 3, 15]


def test_canonical_order():
    qs = all_configurations(Z2, 1, 1)
    vecs = [q.vector() for q in qs]
    assert vecs == sorted(vecs)


@settings(max_examples=60, deadline=None)
@given(g_structures(max_orbits=3), st.integers(0, 2 ** 31))
def test_configuration_of_is_consistent(m, seed):
    rng = random.Random(seed)
    xs = [rng.randrange(m.size) for _ in range(rng.randint(0, 1))]
    ys = [rng.randrange(m.size) for _ in range(rng.randint(0, 1))]
    q = configuration_of(m, xs, ys)
    rep = is_consistent(q)
    assert rep.consistent
    tup = witness_tuple(rep, q.terms)
    assert configuration_of(rep.witness, tup[:len(xs)], tup[len(xs):]).vector() == q.vector()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["z1", "z2", "z3"]), st.integers(0, 1), st.integers(1, 2))
def test_witness_round_trip(name, n, n_prime):
    terms = TermSet(builtin(name), n, n_prime)
    for q in enumerate_extensions([], terms, limit=30):
        rep = is_consistent(q)
        w = rep.witness
        tup = witness_tuple(rep, terms)
        back = configuration_of(w, tup[:n], tup[n:])
        assert back.vector() == q.vector()
