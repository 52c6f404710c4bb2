import json

import pytest
from hypothesis import given, strategies as st

from oracles import wirtinger_alexander
from spatialslice.diagram import (DiagramError, GaussCode, InconsistentChain, MoveSpec, NotSpherical, PatternMismatch,
                                  SgdSemanticError, SgdSyntaxError, Strand, apply_move, apply_moves, candidate_moves,
                                  canonical, crossing_sign, diagram_from_dict, diagram_to_dict, disjoint_union,
                                  extract_cycle_diagram, face_count, faces, fixture_names, from_gauss, gauss_code,
                                  link_as_graph, link_from_gauss, linking_number, load_fixture, mirror, parse_sgd,
                                  random_move_sequence, serialize_sgd, sublink, underlying_graph, validate_diagram,
                                  writhe)
from spatialslice.abstract_graph import fundamental_cycles

VALID = [n for n in fixture_names() if n != "theta_twisted_rotation"]


@pytest.mark.parametrize("name", VALID)
def test_fixture_round_trip(name):
    d = load_fixture(name)
    text = serialize_sgd(d)
    again = parse_sgd(text)
    assert serialize_sgd(again) == text
    assert diagram_to_dict(canonical(d)) == diagram_to_dict(canonical(again))


@pytest.mark.parametrize("name", VALID)
def test_euler_characteristic(name):
    d = load_fixture(name)
    touched = {a.arc for n in (*d.vertices, *d.crossings) for a in n.ccw}
    arcs = [a for a in d.arcs if a in touched]  # free circles carry no faces
    pieces = len(_pieces(d, arcs))
    v = len(d.vertices) + len(d.crossings)
    assert v - len(arcs) + face_count(d) == 2 * pieces


def _pieces(d, arcs):
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for f in faces(d):
        for a, _ in f:
            parent[find(a)] = find(f[0][0])
    return {find(a) for a in arcs}


def test_theta_faces_and_bad_rotation():
    assert face_count(load_fixture("theta")) == 3
    with pytest.raises(NotSpherical):
        load_fixture("theta_twisted_rotation")
    d = load_fixture("theta_twisted_rotation", validate=False)
    assert any(isinstance(e, NotSpherical) for e in validate_diagram(d))


def test_syntax_error_reports_line():
    with pytest.raises(SgdSyntaxError) as info:
        parse_sgd('{\n "name": "x",\n "arcs": [\n}')
    assert info.value.line == 4


def test_semantic_errors():
    with pytest.raises(SgdSemanticError):
        parse_sgd(json.dumps({"name": "x"}))
    data = diagram_to_dict(load_fixture("theta"))
    data["vertices"][0]["ccw"][0]["arc"] = "nope"
    with pytest.raises(DiagramError):
        parse_sgd(json.dumps(data))


def test_broken_edge_chain():
    data = diagram_to_dict(load_fixture("hopf_handcuff"))
    data["edges"][0]["arcs"] = list(reversed(data["edges"][0]["arcs"]))
    errs = validate_diagram(diagram_from_dict(data))
    assert any(isinstance(e, (InconsistentChain, SgdSemanticError)) for e in errs)


def test_trefoil_basics():
    d = load_fixture("trefoil")
    assert len(d.crossings) == 3 and face_count(d) == 5
    assert writhe(d) == 3
    assert all(crossing_sign(d, c) == 1 for c in d.crossings)
    m = mirror(d)
    assert writhe(m) == -3


def test_hopf_linking():
    d = load_fixture("hopf_link")
    assert linking_number(d, 0, 1) == linking_number(d, 1, 0) == 1
    assert linking_number(mirror(d), "A", "B") == -1
    assert linking_number(load_fixture("torus_link_2_4"), 0, 1) == 2
    with pytest.raises(ValueError):
        linking_number(d, 0, 0)


def test_gauss_round_trip_keeps_diagram():
    for name in VALID:
        d = load_fixture(name)
        assert diagram_to_dict(from_gauss(gauss_code(d))) == diagram_to_dict(canonical(d))


def test_extract_cycle_and_sublink():
    d = load_fixture("theta_5")
    for c in fundamental_cycles(underlying_graph(d)):
        kd = extract_cycle_diagram(d, c)
        assert len(kd.components) == 1 and not kd.vertices
        assert not validate_diagram(kd)
    s = sublink(load_fixture("hopf_link"), ["A"])
    assert len(s.crossings) == 0 and len(s.components) == 1


def test_link_as_graph_keeps_crossings():
    for name in ("trefoil", "hopf_link", "unknot", "kink", "split_trefoil"):
        ld = load_fixture(name)
        d = link_as_graph(ld)
        assert not validate_diagram(d)
        assert len(d.edges) == len(ld.components)
        assert len(d.crossings) == len(ld.crossings)
        g = underlying_graph(d)
        assert g.first_betti() == len(ld.components)


def test_disjoint_union_and_split():
    d = disjoint_union("two", load_fixture("trefoil"), load_fixture("unknot"))
    assert len(d.components) == 2
    assert not validate_diagram(d)


def test_zero_moves_is_identity():
    d = load_fixture("theta")
    out, log = random_move_sequence(d, 0, seed=3)
    assert log == [] and out == d


@pytest.mark.parametrize("name", ["theta", "hopf_handcuff", "theta3", "k5", "trefoil", "hopf_link"])
def test_random_moves_keep_graph_and_replay(name):
    d = load_fixture(name)
    out, log = random_move_sequence(d, 20, seed=7)
    assert not validate_diagram(out)
    assert underlying_graph(out) == underlying_graph(d)
    assert all(m.kind != "VI" for m in log)
    replay = apply_moves(d, [MoveSpec.from_dict(json.loads(json.dumps(m.as_dict()))) for m in log])
    assert serialize_sgd(replay) == serialize_sgd(out)
    again, log2 = random_move_sequence(d, 20, seed=7)
    assert log2 == log and serialize_sgd(again) == serialize_sgd(out)


def test_vi_needs_opt_in():
    d = load_fixture("theta")
    m = MoveSpec("VI", {"vertex": "A", "axis": 0}, "apply", {"sign": 1})
    with pytest.raises(PatternMismatch):
        apply_move(d, m)
    out = apply_move(d, m, allow_vi=True)
    assert not validate_diagram(out)


def test_bad_move_site():
    d = load_fixture("trefoil")
    with pytest.raises((PatternMismatch, KeyError)):
        apply_move(d, MoveSpec("II", {"crossings": ["a", "b"]}, "undo"))


def test_removal_candidates_on_kink():
    d = load_fixture("kink")
    ms = [m for m in candidate_moves(d, ("I",), removals_only=True)]
    assert ms and ms[0].direction == "undo"
    assert len(apply_move(d, ms[0]).crossings) == 0


@given(st.sampled_from(["trefoil", "figure8", "hopf_link", "torus_link_2_4"]), st.integers(0, 10 ** 6),
       st.integers(1, 10))
def test_moves_preserve_link_invariants(name, seed, count):
    d = load_fixture(name)
    out, _ = random_move_sequence(d, count, seed, kinds=("I", "II", "III"))
    assert wirtinger_alexander(out) == wirtinger_alexander(d)
    if len(d.components) == 2:
        assert linking_number(out, 0, 1) == linking_number(d, 0, 1)


def test_link_from_gauss_rejects_odd_codes():
    with pytest.raises((DiagramError, KeyError, ValueError)):
        link_from_gauss("bad", [("K", [("a", True)])], {"a": 1})
    with pytest.raises((DiagramError, KeyError, ValueError)):
        from_gauss(GaussCode("bad", [], [Strand("K", [("a", True), ("a", True)])], {"a": 1}))


@pytest.mark.parametrize("name", ["theta_5", "theta3_scrambled", "hopf_handcuff", "k5"])
def test_vertex_flips_keep_constituent_knots(name):
    d = load_fixture(name)
    cycles = fundamental_cycles(underlying_graph(d))
    ref = [wirtinger_alexander(extract_cycle_diagram(d, c)) for c in cycles]
    for seed in range(6):
        out, _ = random_move_sequence(d, 4, seed, allow_vi=True, kinds=("II", "III", "IV", "V", "VI"))
        assert not validate_diagram(out)
        assert [wirtinger_alexander(extract_cycle_diagram(out, c)) for c in cycles] == ref
