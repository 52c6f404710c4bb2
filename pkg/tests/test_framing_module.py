import itertools
import random

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import random_framing
from oracles import rational_rank, smith_invariants
from spatialslice.abstract_graph import AbstractGraph, fundamental_cycles, theta_graph, validate_graph
from spatialslice.diagram import MoveSpec, apply_move, load_fixture, random_move_sequence, underlying_graph
from spatialslice.framing import Framing, blackboard, is_orientable, linking_matrix
from spatialslice.framing_module import (SymVector, bond_presentation, cut_vector, find_zero_framing,
                                         framing_module, hermite_normal_form, k_invariant, matmul, presentation,
                                         smith_normal_form, solve_in_lattice, sym_from_matrix, twist_vector)

matrices = st.integers(1, 8).flatmap(
    lambda m: st.integers(1, 8).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)))


def _det(M):
    return int(sympy.Matrix(M).det())


def test_sym_vector_layout():
    v = sym_from_matrix([[1, 2], [3, 4]])
    assert v.coords == (1, 4, 5)
    assert v.diag(1) == 4 and v.merged(1, 0) == 5
    assert v.labels(["a", "b"]) == ["d[a]", "d[b]", "m[a,b]"]
    with pytest.raises(ValueError):
        SymVector(2, (1, 2))
    assert (v - v).is_zero()


def test_theta_relations():
    g = theta_graph(2)
    cs = fundamental_cycles(g)
    assert twist_vector(cs, "v0").coords == (1, 1, 2)
    assert twist_vector(cs, "v1").coords == (1, 0, 0)
    assert cut_vector(cs, ["v0", "v1", "v2"]).coords == (1, 1, 1)
    with pytest.raises(ValueError):
        cut_vector(cs, ["v1"])
    rows = presentation(g).rows
    assert set(rows) == {(1, 1, 2), (1, 0, 0), (0, 1, 0), (1, 1, 1)}


def test_theta_group_is_trivial():
    grp = framing_module(theta_graph(2))
    assert grp.is_trivial and grp.describe() == "trivial group"
    assert grp.smith.invariant_factors == [1, 1, 1]


def test_handcuff_group():
    g = underlying_graph(load_fixture("handcuff"))
    grp = framing_module(g)
    assert grp.describe() == "Z" and grp.torsion == ()


def test_hopf_handcuff_class():
    d = load_fixture("hopf_handcuff")
    k = k_invariant(d, blackboard(d))
    assert not k.zero and k.certificate is None
    # off-diagonal linking 1 on both sides gives merged coordinate 2
    assert k.representative.coords == (0, 0, 2)
    assert [abs(x) for x in k.free_coords] == [2]
    assert find_zero_framing(d, blackboard(d)) is None


@pytest.mark.parametrize("n,rank", [(2, 0), (3, 2), (4, 5), (5, 9)])
def test_theta_family_ranks(n, rank):
    pres = presentation(theta_graph(n))
    grp = framing_module(theta_graph(n), pres=pres)
    assert grp.torsion == ()
    assert grp.free_rank == rank == pres.rank - rational_rank(pres.matrix())


@given(matrices)
def test_hermite_form(M):
    n = len(M[0])
    h = hermite_normal_form(M, n)
    assert matmul(h.U, M) == h.H
    assert abs(_det(h.U)) == 1
    last = -1
    for r, c in h.pivots:
        assert c > last and h.H[r][c] > 0
        assert all(h.H[r][k] == 0 for k in range(c))
        assert all(0 <= h.H[i][c] < h.H[r][c] for i in range(r))
        last = c
    assert all(not any(h.H[r]) for r in range(h.rank, len(M)))


@given(matrices, st.integers(0, 10 ** 6))
def test_lattice_membership(M, seed):
    rng = random.Random(seed)
    n = len(M[0])
    x = [rng.randint(-3, 3) for _ in M]
    v = [sum(x[i] * M[i][j] for i in range(len(M))) for j in range(n)]
    sol = solve_in_lattice(M, v)
    assert sol is not None
    assert [sum(sol[i] * M[i][j] for i in range(len(M))) for j in range(n)] == v
    w = [a + (1 if j == 0 else 0) for j, a in enumerate(v)]
    sol = solve_in_lattice(M, w)
    # adding a vector outside the lattice changes its rank or its index
    inside = smith_invariants(M) == smith_invariants([*M, w])
    assert (sol is not None) == inside
    if sol is not None:
        assert [sum(sol[i] * M[i][j] for i in range(len(M))) for j in range(n)] == w


@given(matrices)
def test_smith_form(M):
    n = len(M[0])
    s = smith_normal_form(M, n)
    assert matmul(matmul(s.U, M), s.V) == s.D
    assert abs(_det(s.U)) == 1 and abs(_det(s.V)) == 1
    for i, row in enumerate(s.D):
        for j, x in enumerate(row):
            assert i == j or x == 0
    d = s.invariant_factors
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    assert d == smith_invariants(M)


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 5))
    vs = tuple(f"u{i}" for i in range(n))
    m = draw(st.integers(n - 1, 8))
    edges = tuple((f"e{k}", draw(st.sampled_from(vs)), draw(st.sampled_from(vs))) for k in range(m))
    g = AbstractGraph(vs, edges)
    if validate_graph(g):
        g = theta_graph(draw(st.integers(2, 7)))
    return g


@given(small_graphs())
def test_star_cuts_and_bonds_give_same_lattice(g):
    a = hermite_normal_form(presentation(g).matrix(), presentation(g).rank).basis()
    b = hermite_normal_form(bond_presentation(g).matrix(), bond_presentation(g).rank).basis()
    assert a == b


@given(st.integers(0, 10 ** 9))
def test_zero_framing_found_exactly_when_class_vanishes(seed):
    rng = random.Random(seed)
    base = load_fixture(rng.choice(["theta", "theta3", "theta4", "theta3_scrambled", "handcuff", "theta_5"]))
    d, _ = random_move_sequence(base, rng.randint(0, 5), seed)
    f = random_framing(d, rng)
    k = k_invariant(d, f)
    assert k.zero  # planar graphs with framings reachable from blackboard
    f0 = find_zero_framing(d, f, k=k)
    assert is_orientable(underlying_graph(d), f0)
    assert linking_matrix(d, f0).is_zero()


def test_class_changes_by_relations_only():
    d = load_fixture("hopf_handcuff")
    base = k_invariant(d, blackboard(d))
    for tw in itertools.product((-2, 0, 2), repeat=3):
        f = Framing.of(d.name, dict(zip(("a", "b", "v0"), tw)))
        k = k_invariant(d, f)
        assert not k.zero and k.free_coords == base.free_coords


def test_zero_framing_of_kinked_loop():
    d = apply_move(load_fixture("loop"), MoveSpec("I", {"arc": "e"}, "apply", {"sign": 1, "first_over": False}))
    f0 = find_zero_framing(d, blackboard(d))
    assert f0.as_map() == {"e": -2}
