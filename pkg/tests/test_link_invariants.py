import random

import pytest
import sympy
from hypothesis import given, strategies as st

from oracles import goeritz, wirtinger_alexander
from spatialslice.diagram import link_as_graph, load_fixture, mirror, random_move_sequence, validate_diagram
from spatialslice.link_invariants import (LaurentPoly, alexander_polynomial, determinant, fox_milnor, knot_report,
                                          pairwise_linking, seifert_matrix, signature, simplify, split_pieces)

# name: (signature, determinant, Alexander coefficients from t^0 up)
KNOWN = {
    "unknot": (0, 1, (1,)),
    "kink": (0, 1, (1,)),
    "trefoil": (-2, 3, (1, -1, 1)),
    "trefoil_mirror": (2, 3, (1, -1, 1)),
    "figure8": (0, 5, (1, -3, 1)),
    "square_knot": (0, 9, (1, -2, 3, -2, 1)),
    "granny_knot": (-4, 9, (1, -2, 3, -2, 1)),
    "hopf_link": (-1, 2, (1, -1)),
    "hopf_link_mirror": (1, 2, (1, -1)),
    "torus_link_2_4": (-3, 4, (1, -1, 1, -1)),
    "split_unlink": (0, 0, ()),
    "split_trefoil": (-2, 0, ()),
}


@pytest.mark.parametrize("name", sorted(KNOWN))
def test_known_values(name):
    sig, det, delta = KNOWN[name]
    ld = load_fixture(name)
    V = seifert_matrix(ld)
    assert signature(V) == sig
    assert determinant(V) == det
    assert alexander_polynomial(V).coeffs == delta


@pytest.mark.parametrize("name", sorted(KNOWN))
def test_known_values_match_oracles(name):
    ld = load_fixture(name)
    V = seifert_matrix(ld)
    assert alexander_polynomial(V).coeffs == wirtinger_alexander(ld)
    if split_pieces(ld) == 1 and ld.crossings:
        for white in (0, 1):
            assert goeritz(ld, white) == (determinant(V), signature(V))


def test_seifert_matrix_shape():
    V = seifert_matrix(load_fixture("trefoil"))
    assert V.genus == 1 and len(V.V) == 2
    M = sympy.Matrix(V.V)
    assert abs((M - M.T).det()) == 1


def test_polynomial_text():
    assert str(LaurentPoly((1, -1, 1))) == "t^2 - t + 1"
    assert str(LaurentPoly((1, -3, 1))) == "t^2 - 3t + 1"
    assert str(LaurentPoly(())) == "0"
    assert LaurentPoly.normalise([0, -2, 5, -2]).coeffs == (2, -5, 2)


def test_fox_milnor_cases():
    assert fox_milnor(LaurentPoly((1, -1, 1))).status == "fails"
    fm = fox_milnor(LaurentPoly((1, -2, 3, -2, 1)))
    assert fm.status == "passes_full" and not fm.obstructs
    assert str(fm.factor) == "t^2 - t + 1"
    fm = fox_milnor(LaurentPoly((2, -5, 2)))
    assert fm.status == "passes_full"
    fm = fox_milnor(LaurentPoly((1, 0, -1, 0, 1)))  # irreducible, determinant 1
    assert fm.status == "passes_necessary" and fm.refuted and fm.obstructs
    fm = fox_milnor(LaurentPoly(()))
    assert fm.status == "passes_necessary" and not fm.obstructs


def _times(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_products_pass_fox_milnor(f):
    if not any(f):
        f = [1]
    p = LaurentPoly.normalise(_times(f, f[::-1]))
    if p.is_zero:
        return
    fm = fox_milnor(p)
    assert fm.status == "passes_full"
    back = LaurentPoly.normalise(_times(list(fm.factor.coeffs), list(fm.factor.coeffs[::-1])))
    assert back == p


@given(st.integers(0, 10 ** 9))
def test_knot_invariants_under_moves(seed):
    rng = random.Random(seed)
    name = rng.choice(["trefoil", "figure8", "square_knot", "hopf_link", "torus_link_2_4"])
    ld, _ = random_move_sequence(load_fixture(name), rng.randint(1, 12), seed, kinds=("I", "II", "III"))
    sig, det, delta = KNOWN[name]
    V = seifert_matrix(ld)
    assert (signature(V), determinant(V), alexander_polynomial(V).coeffs) == (sig, det, delta)
    assert goeritz(ld, rng.randint(0, 1)) == (det, sig)
    assert wirtinger_alexander(ld) == delta


@given(st.integers(0, 10 ** 9))
def test_mirror_negates_signature(seed):
    rng = random.Random(seed)
    ld, _ = random_move_sequence(load_fixture(rng.choice(["trefoil", "granny_knot", "torus_link_2_4"])), 5, seed)
    assert signature(seifert_matrix(mirror(ld))) == -signature(seifert_matrix(ld))


@given(st.integers(0, 10 ** 9))
def test_knot_polynomials_are_symmetric_with_odd_determinant(seed):
    rng = random.Random(seed)
    ld, _ = random_move_sequence(load_fixture(rng.choice(["trefoil", "figure8", "granny_knot"])), 6, seed)
    p = alexander_polynomial(seifert_matrix(ld))
    assert p.is_symmetric() and abs(p(1)) == 1
    assert determinant(seifert_matrix(ld)) % 2 == 1


def test_simplify_untangles_unknots_and_keeps_knots():
    d, _ = random_move_sequence(link_as_graph(load_fixture("unknot")), 12, seed=2, kinds=("I", "II", "III"))
    assert d.crossings
    assert not simplify(d, budget=500, seed=1).crossings
    s = simplify(load_fixture("trefoil"), budget=200)
    assert len(s.crossings) == 3 and not validate_diagram(s)
    assert simplify(d, budget=500, seed=1) == simplify(d, budget=500, seed=1)


def test_pairwise_linking_and_reports():
    assert pairwise_linking(load_fixture("torus_link_2_4")) == [[0, 2], [2, 0]]
    r = knot_report(load_fixture("figure8"))
    assert r["determinant"] == 5 and r["obstructed"] and r["fox_milnor"]["status"] == "fails"
    r = knot_report(load_fixture("square_knot"))
    assert not r["obstructed"] and r["fox_milnor"]["status"] == "passes_full"
