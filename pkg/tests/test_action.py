import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import orbits_by_elements
from qsteiner import known
from qsteiner.action import (
    FixedPlaneClass,
    Orbit,
    PointOrbitClass,
    _classes_from_perms,
    classify_fixed_plane,
    classify_point_orbit,
    fixed_planes,
    format_orbits,
    induced_orbits_on_orbits,
    induced_permutations,
    o3_census,
    o3_census_type,
    orbit,
    orbit_lookup,
    orbit_partition,
    parse_orbits,
    stabilizer_of_orbit,
)
from qsteiner.gf2 import act, act_rows, gaussian_binomial, span, vec
from qsteiner.group import NotNormalizing, closure, cyclic, representative_A, transvections, trivial_group
from qsteiner.theory import o3_counts


@pytest.mark.parametrize("k", [1, 2, 3])
def test_partition_sizes(g31_group, k):
    orbits = orbit_partition(7, k, g31_group)
    assert sum(o.size for o in orbits) == gaussian_binomial(7, k)
    assert all(g31_group.order % o.size == 0 for o in orbits)
    assert all(o.representative == min(o.members) for o in orbits)
    assert [o.representative for o in orbits] == sorted(o.representative for o in orbits)


def test_partition_matches_oracle():
    gens = [representative_A(4, 0), transvections(4)[3]]
    G = closure(gens)
    ours = orbit_partition(4, 2, G)
    ref = orbits_by_elements(4, 2, [e.rows for e in G.elements])
    as_sets = sorted(sorted(sorted(m.vectors()) for m in o.members) for o in ours)
    ref_sets = sorted(sorted(sorted(s) for s in orb) for orb in ref)
    assert as_sets == ref_sets


def test_trivial_group_orbits_are_singletons():
    orbits = orbit_partition(4, 2, trivial_group(4))
    assert len(orbits) == 35 and all(o.size == 1 for o in orbits)


def test_orbit_of_member_is_same():
    G = cyclic(known.g4())
    S = span([1, 8], 7)
    o = orbit(S, G)
    for m in o.members:
        assert orbit(m, G).members == o.members


def test_point_orbit_classes_v3():
    A = representative_A(3, 1)
    kinds = {}
    for o in orbit_partition(3, 1, cyclic(A)):
        kinds.setdefault(classify_point_orbit(o, A), []).append(o)
    assert len(kinds[PointOrbitClass.FIXED_POINT]) == 1
    assert len(kinds[PointOrbitClass.ORBIT_LINE]) == 1
    assert len(kinds[PointOrbitClass.ORBIT_TRIANGLE]) == 1
    tri = kinds[PointOrbitClass.ORBIT_TRIANGLE][0]
    # the orbit triangle is {(1,0,1), (1,1,1), (0,1,1)}
    assert {m.basis[0] for m in tri.members} == {vec((1, 0, 1)), vec((1, 1, 1)), vec((0, 1, 1))}


def test_fixed_plane_classes():
    A5 = representative_A(7, 5)
    # eigenspace of A_{7,5} is spanned by e_3..e_7
    E = span([1 << 2, 1 << 3, 1 << 4], 7)
    assert classify_fixed_plane(E, A5) == FixedPlaneClass.TYPE7
    A3 = representative_A(3, 1)
    assert classify_fixed_plane(span([1, 2, 4], 3), A3) == FixedPlaneClass.TYPE1
    with pytest.raises(ValueError):
        classify_fixed_plane(span([1, 4, 8], 7), representative_A(7, 1))
    with pytest.raises(ValueError):
        classify_fixed_plane(span([1, 2], 7), A5)


def test_census_v7_table():
    expect = {1: (1, 21, 21, 0, 21), 3: (7, 5, 35, 1, 35), 5: (31, 1, 31, 155, 31)}
    for f, row in expect.items():
        c = o3_census_type(7, f)
        assert (c.fixed_points, c.orbit_lines, c.orbit_triangles, c.fixed_planes_type7, c.fixed_planes_type1) == row


@pytest.mark.parametrize("v,f", [(v, f) for v in range(2, 10) for f in range(v % 2, v, 2)])
def test_census_matches_formulas(v, f):
    c = o3_census_type(v, f)
    n = o3_counts(v, f)
    assert c.fixed_points == n.fixed_points
    assert c.orbit_lines == n.orbit_lines
    assert c.orbit_triangles == n.orbit_triangles
    assert c.fixed_planes_type7 == n.fixed_planes_type7
    assert c.fixed_planes_type1 == n.fixed_planes_type1


def test_fixed_planes_are_fixed():
    A = representative_A(7, 3)
    planes = fixed_planes(A)
    assert len(planes) == 36
    assert all(act(E, A) == E for E in planes)


def test_census_of_conjugate_matches():
    rnd = random.Random(3)
    A = representative_A(7, 3)
    gens = transvections(7)
    n = gens[0]
    for _ in range(20):
        n = n @ rnd.choice(gens)
    B = n.inverse() @ A @ n
    assert o3_census(B) == o3_census(A)


def test_induced_orbits_trivial_normalizer(g31_group):
    orbits = orbit_partition(7, 2, g31_group)
    classes = induced_orbits_on_orbits(g31_group, orbits, g31_group)
    assert classes == [[i] for i in range(len(orbits))]


def test_induced_orbits_rejects_non_normalizer(g31_group):
    orbits = orbit_partition(7, 1, g31_group)
    with pytest.raises(NotNormalizing):
        induced_orbits_on_orbits(cyclic(transvections(7)[0]), orbits, g31_group)


def test_normalizer_classes_independent_of_member_choice(g31_group, g31_normalizer):
    orbits = orbit_partition(7, 2, g31_group)
    lookup = orbit_lookup(orbits)
    ref = induced_orbits_on_orbits(g31_normalizer, orbits, g31_group)
    rnd = random.Random(11)
    perms = []
    for g in g31_normalizer.generators:
        perms.append([lookup[act_rows(rnd.choice(o.members).basis, g.rows)] for o in orbits])
    assert _classes_from_perms(len(orbits), perms) == ref


def test_stabilizer_orbit_counting(g31_group, g31_normalizer):
    orbits = orbit_partition(7, 1, g31_group)
    perms = induced_permutations(g31_normalizer, orbits)
    classes = induced_orbits_on_orbits(g31_normalizer, orbits, g31_group)
    for cls in classes:
        S = stabilizer_of_orbit(g31_normalizer, cls[0], orbits, g31_group, perms)
        assert S.order * len(cls) == g31_normalizer.order
    # the fixed point e_7 is fixed by every element of the normalizer
    fixed = [i for i, o in enumerate(orbits) if o.representative.basis == (1 << 6,)]
    assert len(fixed) == 1
    assert stabilizer_of_orbit(g31_normalizer, fixed[0], orbits, g31_group, perms).order == g31_normalizer.order


@settings(max_examples=20)
@given(st.integers(1, 3))
def test_orbit_file_round_trip(k):
    orbits = orbit_partition(5, k, cyclic(representative_A(5, 1)))
    text = format_orbits(orbits)
    back = parse_orbits(text)
    assert [(o.size, o.representative) for o in orbits] == back
    assert format_orbits([Orbit(S, size) for size, S in back]) == text


def test_orbit_file_errors():
    with pytest.raises(ValueError):
        parse_orbits("orbit 0 size=1\n")
    with pytest.raises(ValueError):
        parse_orbits("#orbits=1\norbit 3 size=1\nmatrix v=3 rows=1\n1\n")
