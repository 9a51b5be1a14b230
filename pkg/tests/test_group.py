import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from gact.errors import InvalidGroup, NotNormal, NotSurjective
from gact.group import (BUILTIN, FiniteGroup, GroupHom, builtin, cosets, count_subgroups_of_index,
                        epimorphisms, exists_proper_supplement, frattini_subgroup,
                        is_frattini_cover, load_group, subgroup_of, subgroups)

SMALL = ["z1", "z2", "z3", "z4", "z5", "z6", "z2xz2", "s3", "z8", "z2xz4", "z2xz2xz2", "d4", "q8"]


def brute_subgroups(g):
    """Every subset that is closed under the table (slow, independent oracle)."""
    out = []
    others = [x for x in g.elements if x != g.identity]
    for k in range(len(others) + 1):
        for rest in itertools.combinations(others, k):
            s = {g.identity, *rest}
            if all(g.mul(a, b) in s for a in s for b in s):
                out.append(tuple(sorted(s)))
    return sorted(out, key=lambda m: (len(m), m))


@pytest.mark.parametrize("name", ["z2", "z3", "z4", "z6", "z2xz2", "s3", "d4", "q8"])
def test_subgroups_match_brute_force(name):
    g = builtin(name)
    assert [h.members for h in subgroups(g)] == brute_subgroups(g)


def test_subgroup_counts():
    assert len(subgroups(builtin("z2"))) == 2
    assert len(subgroups(builtin("z2xz2"))) == 5
    assert len(subgroups(builtin("s3"))) == 6


@pytest.mark.parametrize("name", SMALL)
def test_subgroups_closed_and_sorted(name):
    g = builtin(name)
    subs = subgroups(g)
    for h in subs:
        assert all(g.mul(a, b) in h for a in h.members for b in h.members)
    keys = [(h.order, h.members) for h in subs]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_cosets():
    z4 = builtin("z4")
    assert cosets(z4, subgroup_of(z4, (0, 2))) == [frozenset({0, 2}), frozenset({1, 3})]
    s3 = builtin("s3")
    assert cosets(s3, subgroups(s3)[-1]) == [frozenset(s3.elements)]
    assert len(cosets(s3, subgroups(s3)[0])) == 6


def _epi(src, tgt, images):
    return GroupHom(builtin(src), builtin(tgt), images)


def test_frattini_examples():
    assert is_frattini_cover(_epi("z4", "z2", (0, 1, 0, 1)))
    assert not is_frattini_cover(_epi("z2xz2", "z2", (0, 0, 1, 1)))
    for name in ("z3", "s3", "z2xz2"):
        g = builtin(name)
        assert is_frattini_cover(GroupHom(g, g, tuple(g.elements)))
    with pytest.raises(NotSurjective):
        is_frattini_cover(_epi("z4", "z2", (0, 0, 0, 0)))


def test_frattini_subgroups():
    assert frattini_subgroup(builtin("z4")).members == (0, 2)
    assert frattini_subgroup(builtin("z8")).members == (0, 2, 4, 6)
    assert frattini_subgroup(builtin("q8")).order == 2
    assert frattini_subgroup(builtin("d4")).order == 2
    assert frattini_subgroup(builtin("z2xz2xz2")).order == 1


def test_supplements():
    v = builtin("z2xz2")
    n = subgroup_of(v, (0, 1))          # second factor
    assert exists_proper_supplement(v, n).members == (0, 2)
    z4 = builtin("z4")
    assert exists_proper_supplement(z4, subgroup_of(z4, (0, 2))) is None
    s3 = builtin("s3")
    got = exists_proper_supplement(s3, subgroups(s3)[-1])
    assert got is not None and got.order < 6
    with pytest.raises(NotNormal):
        exists_proper_supplement(s3, subgroup_of(s3, (0, 1)))


def test_supplement_none_confirmed_by_scan():
    for name in SMALL:
        g = builtin(name)
        members = set(g.elements)
        for n in subgroups(g):
            if not all(g.mul(g.mul(a, x), g.inv(a)) in n for a in members for x in n.members):
                continue
            got = exists_proper_supplement(g, n)
            proper = [h for h in brute_subgroups(g) if len(h) < g.order]
            works = [h for h in proper
                     if len({g.mul(x, y) for x in h for y in n.members}) == g.order]
            assert (got is None) == (not works)
            if got is not None:
                assert got.members == works[0]


def test_index_counts():
    s3 = builtin("s3")
    assert count_subgroups_of_index(s3, 2) == 1
    assert count_subgroups_of_index(s3, 3) == 3
    assert count_subgroups_of_index(s3, 4) == 0
    for name in SMALL:
        g = builtin(name)
        assert count_subgroups_of_index(g, 1) == 1
        total = sum(count_subgroups_of_index(g, n) for n in range(1, g.order + 1))
        assert total == len(subgroups(g))


def test_frattini_agrees_with_kernel_criterion():
    for a, b in itertools.product(SMALL, repeat=2):
        src, tgt = builtin(a), builtin(b)
        if tgt.order > src.order or src.order % tgt.order:
            continue
        phi = set(frattini_subgroup(src).members)
        for pi in epimorphisms(src, tgt):
            assert is_frattini_cover(pi) == (set(pi.kernel().members) <= phi)


def test_invalid_tables():
    with pytest.raises(InvalidGroup):
        FiniteGroup(2, ((0, 1), (1, 1)), ("e", "s"))
    with pytest.raises(InvalidGroup):
        FiniteGroup(2, ((0, 1), (1, 0)), ("e", "e"))
    with pytest.raises(InvalidGroup):
        builtin("z99")


def test_json_round_trip(tmp_path):
    for name in BUILTIN:
        g = builtin(name)
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(g.to_json()))
        assert load_group(str(path)) == g


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_generated_is_smallest_subgroup(name, data):
    g = builtin(name)
    gens = data.draw(st.lists(st.sampled_from(list(g.elements)), max_size=3))
    h = g.generated(gens)
    assert g.is_subgroup(h)
    assert set(gens) <= h
    for s in subgroups(g):
        if set(gens) <= set(s.members):
            assert h <= set(s.members)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_inverse_and_order(name, data):
    g = builtin(name)
    a = data.draw(st.sampled_from(list(g.elements)))
    assert g.mul(a, g.inv(a)) == g.identity
    k = g.element_order(a)
    assert g.order % k == 0
