"""End-to-end sliceness decision for a spatial graph diagram.

Stages run in order and stop at the first obstruction:

  planarity of the abstract graph
  vanishing of the framed linking class
  a framing with all framed linking numbers zero
  the link of disjoint cycle copies in that framing
  link obstructions (pairwise linking, signature, Fox-Milnor per component)
  constituent knots of the fundamental cycles
  simplification of the link to a crossingless unlink
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from .abstract_graph import check_graph, fundamental_cycles, is_planar, spanning_forest
from .diagram import SpatialDiagram, diagram_to_dict, extract_cycle_diagram, link_as_graph, sublink, underlying_graph
from .framing import Framing, blackboard, is_orientable, NonOrientable
from .framing_module import VerificationFailed, find_zero_framing, k_invariant, solve_in_lattice
from .link_invariants import (alexander_polynomial, fox_milnor, knot_report, pairwise_linking, seifert_matrix,
                              signature, simplify)
from .link_pattern import fundamental_link_pattern, verify_pattern

__all__ = [
    "VERDICTS",
    "SliceReport",
    "PipelineFailure",
    "run_pipeline",
    "recheck_certificates",
]

NOT_SLICE_NONPLANAR = "NOT_SLICE_NONPLANAR"
NOT_SLICE_K_NONZERO = "NOT_SLICE_K_NONZERO"
NOT_SLICE_LINK_OBSTRUCTED = "NOT_SLICE_LINK_OBSTRUCTED"
NOT_SLICE_CONSTITUENT_KNOT = "NOT_SLICE_CONSTITUENT_KNOT"
SLICE_CERTIFIED = "SLICE_CERTIFIED"
NO_OBSTRUCTION_FOUND = "NO_OBSTRUCTION_FOUND"
VERDICTS = (NOT_SLICE_NONPLANAR, NOT_SLICE_K_NONZERO, NOT_SLICE_LINK_OBSTRUCTED,
            NOT_SLICE_CONSTITUENT_KNOT, SLICE_CERTIFIED, NO_OBSTRUCTION_FOUND)


class PipelineFailure(RuntimeError):
    """An internal consistency check failed; carries the stage name."""

    def __init__(self, stage: str, msg: str):
        super().__init__(f"[{stage}] {msg}")
        self.stage = stage


@dataclass
class SliceReport:
    input: dict
    tree: dict
    stages: dict = field(default_factory=dict)
    verdict: str = NO_OBSTRUCTION_FOUND
    certificates: dict = field(default_factory=dict)
    versions: dict = field(default_factory=lambda: {"spatialslice": __version__})
    pattern_diagram: Any = field(default=None, repr=False)

    @property
    def obstructed(self) -> bool:
        return self.verdict.startswith("NOT_SLICE")

    def as_dict(self) -> dict:
        stages = {k: self.stages.get(k) for k in ("planarity", "k_invariant", "zero_framing", "pattern",
                                                  "obstructions")}
        return {"input": self.input, "tree": self.tree, "stages": stages, "verdict": self.verdict,
                "certificates": self.certificates, "versions": self.versions}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=1, sort_keys=True) + "\n"


def _link_checks(ld) -> dict:
    V = seifert_matrix(ld)
    out: dict[str, Any] = {"signature": signature(V), "components": []}
    for comp in ld.components:
        kd = sublink(ld, [comp.id])
        delta = alexander_polynomial(seifert_matrix(kd))
        fm = fox_milnor(delta)
        out["components"].append({"component": comp.id, "alexander": str(delta), "fox_milnor": fm.as_dict(),
                                  "obstructs": fm.obstructs})
    return out


def run_pipeline(d: SpatialDiagram, f: Framing | None = None, budget: int = 2000, seed: int = 0,
                 source: str | None = None) -> SliceReport:
    d = link_as_graph(d)
    f = f or blackboard(d)
    g = underlying_graph(d)
    check_graph(g)
    t = spanning_forest(g)
    cycles = fundamental_cycles(g, t)
    rep = SliceReport(
        input={"diagram": d.name, "source": source, "crossings": len(d.crossings),
               "framing": f.as_map(), "budget": budget, "seed": seed},
        tree={"strategy": "lex-dfs", **t.as_dict(), "cycles": [c.as_dict() for c in cycles]})

    planar, witness = is_planar(g)
    rep.stages["planarity"] = {"planar": planar, "witness": witness.as_dict() if witness else None}
    if not planar:
        rep.verdict = NOT_SLICE_NONPLANAR
        rep.certificates["kuratowski"] = witness.as_dict()
        return rep

    if not is_orientable(g, f):
        raise NonOrientable("input framing is not orientable")
    k = k_invariant(d, f, t)
    rep.stages["k_invariant"] = k.as_dict()
    if not k.zero:
        rep.verdict = NOT_SLICE_K_NONZERO
        rep.certificates["k_nonzero"] = {"representative": list(k.representative.coords),
                                         "torsion_coordinates": list(k.torsion_coords),
                                         "free_coordinates": list(k.free_coords),
                                         "relations": k.group.presentation.matrix()}
        return rep

    try:
        f0 = find_zero_framing(d, f, t, k)
    except VerificationFailed as exc:
        raise PipelineFailure("zero_framing", str(exc)) from exc
    rep.stages["zero_framing"] = f0.as_dict()

    ld, layout = fundamental_link_pattern(d, f0, cycles)
    errs = verify_pattern(ld, layout, d, cycles)
    if errs:
        raise PipelineFailure("pattern", "; ".join(errs))
    rep.pattern_diagram = ld
    rep.stages["pattern"] = {"components": len(ld.components), "crossings": len(ld.crossings),
                             "layout": layout.as_dict(), "diagram": diagram_to_dict(ld)}

    lk = pairwise_linking(ld)
    if any(v for row in lk for v in row):
        raise PipelineFailure("obstructions", f"pattern in the zero framing has linking matrix {lk}")
    obs: dict[str, Any] = {"pairwise_linking": lk}
    link = _link_checks(ld)
    obs["signature"] = link["signature"]
    obs["components"] = link["components"]
    rep.stages["obstructions"] = obs
    if link["signature"] != 0:
        rep.verdict = NOT_SLICE_LINK_OBSTRUCTED
        rep.certificates["signature"] = {"value": link["signature"],
                                         "seifert_matrix": seifert_matrix(ld).as_lists()}
        return rep
    bad = [c for c in link["components"] if c["obstructs"]]
    if bad:
        rep.verdict = NOT_SLICE_LINK_OBSTRUCTED
        rep.certificates["fox_milnor"] = bad
        return rep

    knots = []
    for c in cycles:
        kd = extract_cycle_diagram(d, c)
        r = knot_report(kd)
        r["cycle"] = c.name
        knots.append(r)
    obs["constituent_knots"] = knots
    bad = [r for r in knots if r["obstructed"]]
    if bad:
        rep.verdict = NOT_SLICE_CONSTITUENT_KNOT
        rep.certificates["constituent_knots"] = bad
        return rep

    simple = simplify(ld, budget=budget, seed=seed)
    obs["simplified"] = {"crossings": len(simple.crossings), "components": len(simple.components)}
    if not simple.crossings and len(simple.components) == len(cycles):
        rep.verdict = SLICE_CERTIFIED
        rep.certificates["unlink"] = {"diagram": diagram_to_dict(simple)}
    else:
        rep.verdict = NO_OBSTRUCTION_FOUND
    return rep


def recheck_certificates(d: SpatialDiagram, rep: SliceReport) -> bool:
    """Re-derive a NOT_SLICE certificate from scratch."""
    if rep.verdict == NOT_SLICE_NONPLANAR:
        from .abstract_graph import AbstractGraph
        g = underlying_graph(d)
        w = set(rep.certificates["kuratowski"]["edges"])
        sub = AbstractGraph(g.vertices, tuple(e for e in g.edges if e[0] in w))
        return not is_planar(sub)[0]
    if rep.verdict == NOT_SLICE_K_NONZERO:
        c = rep.certificates["k_nonzero"]
        return solve_in_lattice(c["relations"], c["representative"]) is None
    if rep.verdict == NOT_SLICE_LINK_OBSTRUCTED and "signature" in rep.certificates:
        return signature(rep.certificates["signature"]["seifert_matrix"]) == rep.certificates["signature"]["value"] != 0
    return True
