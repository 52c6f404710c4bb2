import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import GRAPH_FIXTURES, random_framing
from oracles import surface_intersection
from spatialslice.abstract_graph import fundamental_cycles, theta_graph, vertex_star_cuts
from spatialslice.diagram import (MoveSpec, apply_move, gauss_code, linking_number, load_fixture,
                                  random_move_sequence, underlying_graph, validate_diagram)
from spatialslice.framing import (Framing, InvalidCut, NonOrientable, apply_cut_half_twists, apply_full_twist,
                                  blackboard, dump_framing, is_orientable, linking_matrix, load_framing,
                                  pushoff_diagram, self_linking_formula, transport_framing)


def test_framing_file_round_trip():
    d = load_fixture("theta")
    f = Framing.of("theta", {"v1": 2, "v0": 0, "v2": -1})
    assert f.as_map() == {"v1": 2, "v2": -1}
    g = load_framing(dump_framing(f), d)
    assert g == f
    with pytest.raises(ValueError):
        load_framing('{"diagram": "theta", "half_twists": {"zz": 1}}', d)
    with pytest.raises(ValueError):
        load_framing('{"diagram": "theta", "half_twists": [1]}', d)


def test_orientability():
    g = theta_graph(2)
    assert is_orientable(g, Framing("theta"))
    assert not is_orientable(g, Framing.of("theta", {"v0": 1}))
    f = apply_cut_half_twists(Framing("theta"), {"v0", "v1", "v2"})
    assert is_orientable(g, f) and f.as_map() == {"v0": 1, "v1": 1, "v2": 1}
    with pytest.raises(InvalidCut):
        apply_cut_half_twists(Framing("theta"), {"v0"}, g=g)


def test_full_twist_adds_two():
    f = apply_full_twist(Framing("x"), "e", -1)
    assert f.tau("e") == -2


def test_loop_pushoffs():
    d = load_fixture("loop")
    (c,) = fundamental_cycles(underlying_graph(d))
    for tau, crossings, lk in ((0, 0, 0), (2, 2, 1), (-2, 2, -1), (4, 4, 2)):
        p = pushoff_diagram(d, Framing.of("loop", {"e": tau}), c)
        assert not validate_diagram(p)
        assert len(p.crossings) == crossings
        assert linking_number(p, 0, 1) == lk
    with pytest.raises(NonOrientable):
        pushoff_diagram(d, Framing.of("loop", {"e": 1}), c)
    with pytest.raises(ValueError):
        pushoff_diagram(d, Framing("loop"), c, side=-1)


def test_kink_self_linking():
    for sign in (1, -1):
        d = apply_move(load_fixture("loop"), MoveSpec("I", {"arc": "e"}, "apply", {"sign": sign, "first_over": True}))
        A = linking_matrix(d, blackboard(d))
        assert A.as_lists() == [[sign]]


def test_hopf_handcuff_matrix():
    d = load_fixture("hopf_handcuff")
    signs = gauss_code(d).signs
    lk = sum(signs.values()) // 2
    assert linking_matrix(d, blackboard(d)).as_lists() == [[0, lk], [lk, 0]]
    assert abs(lk) == 1


def test_twisted_theta_is_asymmetric():
    # the five-crossing theta curve sits on a punctured torus in the blackboard framing
    d = load_fixture("theta_5")
    A = linking_matrix(d, blackboard(d))
    cs = fundamental_cycles(underlying_graph(d))
    assert A.as_lists() == [[1, 0], [1, 1]]
    assert A[1, 0] - A[0, 1] == surface_intersection(d, {}, cs[0].walk, cs[1].walk)


def test_nonorientable_framing_rejected():
    d = load_fixture("theta")
    with pytest.raises(NonOrientable):
        linking_matrix(d, Framing.of("theta", {"v1": 1}))


def test_vi_has_no_transport():
    d = load_fixture("theta")
    with pytest.raises(ValueError):
        transport_framing(d, blackboard(d), MoveSpec("VI", {"vertex": "A", "axis": 0}))


def _triple(seed):
    rng = random.Random(seed)
    base = load_fixture(rng.choice(GRAPH_FIXTURES))
    d, _ = random_move_sequence(base, rng.randint(0, 6), seed)
    return rng, d, random_framing(d, rng)


@given(st.integers(0, 10 ** 9))
def test_diagonal_is_writhe_plus_half_twists(seed):
    _, d, f = _triple(seed)
    cs = fundamental_cycles(underlying_graph(d))
    A = linking_matrix(d, f, cs)
    for i, c in enumerate(cs):
        assert Fraction(A[i, i]) == self_linking_formula(d, f, c)


@given(st.integers(0, 10 ** 9))
def test_antisymmetric_part_is_surface_intersection(seed):
    _, d, f = _triple(seed)
    cs = fundamental_cycles(underlying_graph(d))
    A = linking_matrix(d, f, cs)
    for i in range(len(cs)):
        for j in range(len(cs)):
            if i != j:
                assert A[j, i] - A[i, j] == surface_intersection(d, f.as_map(), cs[i].walk, cs[j].walk)


@given(st.integers(0, 10 ** 9))
def test_twist_and_cut_deltas(seed):
    rng, d, f = _triple(seed)
    g = underlying_graph(d)
    cs = fundamental_cycles(g)
    A = linking_matrix(d, f, cs)
    e = rng.choice(g.edge_labels)
    B = linking_matrix(d, apply_full_twist(f, e), cs)
    for i, ci in enumerate(cs):
        for j, cj in enumerate(cs):
            assert B[i, j] - A[i, j] == ci.coefficient(e) * cj.coefficient(e)
    for cut in vertex_star_cuts(g):
        C = linking_matrix(d, apply_cut_half_twists(f, cut), cs)
        for i, ci in enumerate(cs):
            for j, cj in enumerate(cs):
                s = sum(ci.coefficient(x) * cj.coefficient(x) for x in cut)
                if i == j:
                    assert 2 * (C[i, i] - A[i, i]) == s
                else:
                    assert C[i, j] + C[j, i] - A[i, j] - A[j, i] == s


@given(st.integers(0, 10 ** 9))
def test_moves_with_transport_keep_matrix(seed):
    rng, d, f = _triple(seed)
    cs = fundamental_cycles(underlying_graph(d))
    A = linking_matrix(d, f, cs)
    _, log = random_move_sequence(d, 4, rng.randint(0, 10 ** 6))
    for m in log:
        f = transport_framing(d, f, m)
        d = apply_move(d, m)
    assert linking_matrix(d, f, cs).rows == A.rows
