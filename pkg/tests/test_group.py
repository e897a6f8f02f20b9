import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import group_elements
from qsteiner import known
from qsteiner.gf2 import DimensionMismatch, Gf2Matrix
from qsteiner.group import (
    GroupTooLarge,
    MatrixGroup,
    NotNormalizing,
    Order3Type,
    check_normalizer,
    closure,
    conjugacy_classes,
    conjugate,
    cyclic,
    element_order,
    fixed_space_dim,
    format_group,
    general_linear,
    identity,
    is_normalizing,
    order3_type,
    parse_group,
    representative_A,
    transvections,
    trivial_group,
)


def test_known_element_orders():
    assert element_order(known.g2()) == 2
    assert element_order(known.g31()) == 3
    assert element_order(known.g32()) == 3
    assert element_order(known.g4()) == 4


def test_known_types():
    assert order3_type(known.g31()) == Order3Type(7, 1)
    assert order3_type(known.g32()) == Order3Type(7, 3)
    assert known.g31() == representative_A(7, 1)
    assert known.g32() == representative_A(7, 3)


def test_closure_orders():
    assert cyclic(known.g4()).order == 4
    assert trivial_group(5).order == 1
    assert closure(transvections(3)).order == 168
    assert closure(transvections(4)).order == 20160


def test_closure_bfs_tree():
    G = closure(transvections(3))
    for i in range(1, G.order):
        assert G.elements[G.parent[i]] @ G.generators[G.via[i]] == G.elements[i]
    assert G.elements[0] == identity(3)


@pytest.mark.parametrize("v", [2, 3])
def test_closure_matches_oracle(v):
    gens = transvections(v)[:2]
    G = closure(gens)
    assert {e.rows for e in G.elements} == group_elements([g.rows for g in gens], v)


def test_closure_cap_and_checks():
    with pytest.raises(GroupTooLarge):
        closure(transvections(4), cap=1000)
    with pytest.raises(ValueError):
        closure([Gf2Matrix((1, 1), 2)])
    with pytest.raises(DimensionMismatch):
        closure([identity(2), identity(3)])
    with pytest.raises(ValueError):
        closure([])


@pytest.mark.parametrize("v,f", [(7, 1), (7, 3), (7, 5), (9, 1), (13, 7), (3, 1), (2, 0)])
def test_representative_types(v, f):
    A = representative_A(v, f)
    assert element_order(A) == 3
    assert fixed_space_dim(A) == f


def test_order3_type_validation():
    with pytest.raises(ValueError):
        Order3Type(7, 2)
    with pytest.raises(ValueError):
        Order3Type(7, 7)
    with pytest.raises(ValueError):
        order3_type(known.g4())
    assert str(Order3Type(7, 1)) == "A_{7,1}"


@pytest.mark.parametrize("v", [2, 3, 4])
def test_order3_classes_in_gl(v):
    """GL(v,2) has floor(v/2) classes of elements of order 3, one per type."""
    gl = general_linear(v)
    assert len(gl) == {2: 6, 3: 168, 4: 20160}[v]
    order3 = [g for g in gl if element_order(g) == 3]
    classes = conjugacy_classes(order3, transvections(v))
    assert len(classes) == v // 2
    types = sorted({order3_type(c[0]).f for c in classes})
    assert types == sorted(range(v % 2, v, 2))
    for cls in classes:
        assert len({fixed_space_dim(g) for g in cls}) == 1


def test_conjugate_and_normalizing():
    G = cyclic(known.g31())
    for n in known.normalizer_g31_generators():
        assert is_normalizing(n, G)
        c = conjugate(known.g31(), n)
        assert c in G
    check_normalizer(MatrixGroup(tuple(known.normalizer_g31_generators()), 7), G)
    with pytest.raises(NotNormalizing):
        check_normalizer(MatrixGroup(tuple(transvections(7)[:1]), 7), G)


def test_normalizer_of_cyclic_in_gl3():
    """Brute force: the normalizer of <A_{3,1}> in GL(3,2) has order 6."""
    A = representative_A(3, 1)
    G = cyclic(A)
    norm = [n for n in general_linear(3) if is_normalizing(n, G)]
    assert len(norm) == 6
    assert closure(norm).order == 6


@given(st.integers(0, 2**32))
def test_conjugation_preserves_order(seed):
    rnd = random.Random(seed)
    gl3 = _GL3
    g = rnd.choice(gl3)
    n = rnd.choice(gl3)
    assert element_order(conjugate(g, n)) == element_order(g)
    assert conjugate(conjugate(g, n), n.inverse()) == g


_GL3 = general_linear(3)


def test_group_file_round_trip(tmp_path):
    gens = known.normalizer_g31_generators()
    text = format_group(gens)
    assert text.startswith("v=7 gens=3\n")
    assert parse_group(text) == gens
    assert format_group(parse_group(text)) == text
    with pytest.raises(ValueError):
        parse_group("v=7\n")
    with pytest.raises(DimensionMismatch):
        parse_group("v=7 gens=1\nmatrix v=3 rows=3\n1\n2\n4\n")
