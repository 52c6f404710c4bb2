import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from spatialslice.diagram import load_fixture, random_move_sequence
from spatialslice.framing import NonOrientable, Framing, blackboard, transport_framing
from spatialslice.diagram import apply_move
from spatialslice.slice_pipeline import VERDICTS, recheck_certificates, run_pipeline

EXPECTED = {
    "theta": "SLICE_CERTIFIED",
    "theta3": "SLICE_CERTIFIED",
    "theta4": "SLICE_CERTIFIED",
    "theta5": "SLICE_CERTIFIED",
    "handcuff": "SLICE_CERTIFIED",
    "loop": "SLICE_CERTIFIED",
    "theta3_scrambled": "SLICE_CERTIFIED",
    "hopf_handcuff": "NOT_SLICE_K_NONZERO",
    "theta_5": "NOT_SLICE_LINK_OBSTRUCTED",
    "k5": "NOT_SLICE_NONPLANAR",
    "unknot": "SLICE_CERTIFIED",
    "kink": "SLICE_CERTIFIED",
    "trefoil": "NOT_SLICE_LINK_OBSTRUCTED",
    "trefoil_mirror": "NOT_SLICE_LINK_OBSTRUCTED",
    "figure8": "NOT_SLICE_LINK_OBSTRUCTED",
    "granny_knot": "NOT_SLICE_LINK_OBSTRUCTED",
    "square_knot": "NO_OBSTRUCTION_FOUND",
    "hopf_link": "NOT_SLICE_K_NONZERO",
    "torus_link_2_4": "NOT_SLICE_K_NONZERO",
    "split_unlink": "SLICE_CERTIFIED",
    "split_trefoil": "NOT_SLICE_LINK_OBSTRUCTED",
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_fixture_verdicts(name):
    d = load_fixture(name)
    rep = run_pipeline(d)
    assert rep.verdict == EXPECTED[name]
    assert rep.obstructed == EXPECTED[name].startswith("NOT_SLICE")
    assert recheck_certificates(d, rep)


def test_report_layout_and_json():
    rep = run_pipeline(load_fixture("hopf_handcuff"), source="hopf_handcuff.sgd")
    data = json.loads(rep.to_json())
    assert set(data) == {"input", "tree", "stages", "verdict", "certificates", "versions"}
    assert set(data["stages"]) == {"planarity", "k_invariant", "zero_framing", "pattern", "obstructions"}
    assert data["verdict"] in VERDICTS
    assert data["stages"]["zero_framing"] is None
    assert data["input"]["source"] == "hopf_handcuff.sgd"
    assert rep.to_json() == run_pipeline(load_fixture("hopf_handcuff"), source="hopf_handcuff.sgd").to_json()


def test_certificates_carry_evidence():
    rep = run_pipeline(load_fixture("theta_5"))
    assert abs(rep.certificates["signature"]["value"]) == 1
    assert rep.stages["obstructions"]["pairwise_linking"] == [[0, 0], [0, 0]]
    rep = run_pipeline(load_fixture("theta3_scrambled"))
    unlink = rep.certificates["unlink"]["diagram"]
    assert not unlink["crossings"] and len(unlink["components"]) == 3
    rep = run_pipeline(load_fixture("figure8"))
    assert rep.certificates["fox_milnor"][0]["fox_milnor"]["status"] == "fails"


def test_forged_certificate_is_caught():
    d = load_fixture("hopf_handcuff")
    rep = run_pipeline(d)
    rep.certificates["k_nonzero"]["representative"] = [0, 0, 0]
    assert not recheck_certificates(d, rep)


def test_nonorientable_input_framing():
    with pytest.raises(NonOrientable):
        run_pipeline(load_fixture("theta"), Framing.of("theta", {"v0": 1}))


def test_budget_zero_keeps_honest_verdict():
    rep = run_pipeline(load_fixture("theta3_scrambled"), budget=0)
    assert rep.verdict in ("SLICE_CERTIFIED", "NO_OBSTRUCTION_FOUND")


@settings(max_examples=25)
@given(st.sampled_from(["hopf_handcuff", "theta_5", "k5", "theta", "theta3", "handcuff"]), st.integers(0, 10 ** 9))
def test_verdict_survives_moves_with_transport(name, seed):
    rng = random.Random(seed)
    d = load_fixture(name)
    ref = run_pipeline(d).verdict
    f = blackboard(d)
    _, log = random_move_sequence(d, rng.randint(1, 5), seed)
    for m in log:
        f = transport_framing(d, f, m)
        d = apply_move(d, m)
    got = run_pipeline(d, f).verdict
    if ref == "SLICE_CERTIFIED":
        assert got in ("SLICE_CERTIFIED", "NO_OBSTRUCTION_FOUND")
    else:
        assert got == ref
