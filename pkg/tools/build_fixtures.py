"""Regenerate the bundled example diagrams in src/spatialslice/fixtures.

Run from the repository root:  python3 tools/build_fixtures.py [--search-theta SECONDS]

Most fixtures are written down as signed Gauss codes.  Where a vertex
rotation is not obvious, every rotation and sign choice is tried and the
first spherical one is kept.  --search-theta reruns the random search that
produced the five-crossing theta curve and prints every hit.
"""

from __future__ import annotations

import argparse
import itertools
import random
import sys
import time
from dataclasses import replace
from pathlib import Path

from spatialslice.abstract_graph import FundamentalCycle
from spatialslice.diagram import (GaussCode, Strand, candidate_moves, canonical, disjoint_union, extract_cycle_diagram,
                                  from_gauss, gauss_code, link_from_gauss, mirror, random_move_sequence, serialize_sgd,
                                  validate_diagram)
from spatialslice.link_invariants import simplify

T, H = "tail", "head"
OUT = Path(__file__).resolve().parent.parent / "src" / "spatialslice" / "fixtures"


def first_spherical(name, verts, strands, crossings):
    """verts maps a vertex to its incident ends in any order."""
    vs = list(verts)
    rots = [[[verts[v][0], *p] for p in itertools.permutations(verts[v][1:])] for v in vs]
    for rc in itertools.product(*rots):
        for sg in itertools.product((1, -1), repeat=len(crossings)):
            gc = GaussCode(name, [(v, list(r)) for v, r in zip(vs, rc)], [Strand(*s) for s in strands],
                           dict(zip(crossings, sg)))
            try:
                d = from_gauss(gc)
            except ValueError:
                continue
            if not validate_diagram(d):
                return d
    raise RuntimeError(f"no spherical choice for {name}")


def theta_n(n, name=None):
    es = [f"v{i}" for i in range(n + 1)]
    return from_gauss(GaussCode(name or f"theta{n}", [("A", [(e, T) for e in es]), ("B", [(e, H) for e in reversed(es)])],
                                [Strand(e, [], "A", "B") for e in es], {}))


def loop(name="loop"):
    return from_gauss(GaussCode(name, [("A", [("e", T), ("e", H)])], [Strand("e", [], "A", "A")], {}))


def knot(name, code, signs):
    return link_from_gauss(name, [("K", [(x, c == "O") for x, c in code])], signs)


def trefoil(s=1, name="trefoil"):
    code = [("a", "O"), ("b", "U"), ("c", "O"), ("a", "U"), ("b", "O"), ("c", "U")]
    return knot(name, code, {x: s for x in "abc"})


def connected_sum(name, *parts):
    passes, signs = [], {}
    for k, p in enumerate(parts):
        gc = gauss_code(p)
        passes += [(f"{k}{x}", ov) for x, ov in gc.strands[0].passes]
        signs.update({f"{k}{x}": s for x, s in gc.signs.items()})
    return link_from_gauss(name, [("K", passes)], signs)


# Five crossings on a theta graph, found by random search (seed 1, --search-theta 240).
THETA_5 = {
    "v0": [("x0", False), ("x3", True), ("x1", False), ("x4", True)],
    "v1": [("x2", True), ("x3", False)],
    "v2": [("x4", False), ("x1", True), ("x2", False), ("x0", True)],
}
THETA_5_SIGNS = {"x0": 1, "x1": -1, "x2": -1, "x3": -1, "x4": -1}
THETA_5_ROT_B = [("v1", H), ("v2", H), ("v0", H)]


def theta_curve(passes, signs, rot_b, name):
    gc = GaussCode(name, [("A", [("v0", T), ("v1", T), ("v2", T)]), ("B", list(rot_b))],
                   [Strand(e, list(passes[e]), "A", "B") for e in ("v0", "v1", "v2")], dict(signs))
    return from_gauss(gc)


def constituent_crossings(d):
    pairs = [("v0", "v1"), ("v0", "v2"), ("v1", "v2")]
    return [len(simplify(extract_cycle_diagram(d, FundamentalCycle(b, ((a, 1), (b, -1)))), budget=300).crossings)
            for a, b in pairs]


def search_theta(seconds, seed=1):
    """Irreducible 5-crossing theta curves with unknotted constituents and a nonzero pattern signature."""
    from spatialslice.slice_pipeline import run_pipeline
    rng = random.Random(seed)
    seen = set()
    t0 = time.time()
    while time.time() - t0 < seconds:
        labels = [f"x{i}" for i in range(5)] * 2
        rng.shuffle(labels)
        a, b = sorted(rng.sample(range(11), 2))
        over = {x: rng.random() < .5 for x in set(labels)}
        firsts, passes = set(), {}
        for e, part in zip(("v0", "v1", "v2"), (labels[:a], labels[a:b], labels[b:])):
            passes[e] = []
            for x in part:
                passes[e].append((x, over[x] if x not in firsts else not over[x]))
                firsts.add(x)
        signs = {x: rng.choice((1, -1)) for x in set(labels)}
        rot_b = rng.choice([[("v2", H), ("v1", H), ("v0", H)], [("v1", H), ("v2", H), ("v0", H)]])
        try:
            d = theta_curve(passes, signs, rot_b, "theta_5")
        except ValueError:
            continue
        if validate_diagram(d):
            continue
        if any(m.direction == "undo" for m in candidate_moves(d, ("I", "II"), removals_only=True)):
            continue
        if any(constituent_crossings(d)):
            continue
        key = serialize_sgd(canonical(d))
        if key in seen:
            continue
        seen.add(key)
        r = run_pipeline(d)
        print(r.verdict, passes, signs, rot_b, flush=True)


def build() -> dict:
    fx = {}
    fx["unknot"] = link_from_gauss("unknot", [("K", [])], {})
    fx["kink"] = knot("kink", [("k", "O"), ("k", "U")], {"k": 1})
    fx["trefoil"] = trefoil()
    fx["trefoil_mirror"] = mirror(trefoil())
    fx["figure8"] = knot("figure8", [("A", "O"), ("D", "U"), ("B", "O"), ("A", "U"), ("C", "O"), ("B", "U"),
                                     ("D", "O"), ("C", "U")], {"A": 1, "B": -1, "C": 1, "D": -1})
    fx["square_knot"] = connected_sum("square_knot", trefoil(), mirror(trefoil()))
    fx["granny_knot"] = connected_sum("granny_knot", trefoil(), trefoil())
    fx["hopf_link"] = link_from_gauss("hopf_link", [("A", [("x", True), ("y", False)]),
                                                    ("B", [("x", False), ("y", True)])], {"x": 1, "y": 1})
    fx["hopf_link_mirror"] = mirror(fx["hopf_link"])
    fx["torus_link_2_4"] = link_from_gauss("torus_link_2_4", [("A", [("1", True), ("2", False), ("3", True), ("4", False)]),
                                                              ("B", [("1", False), ("2", True), ("3", False), ("4", True)])],
                                           {k: 1 for k in "1234"})
    fx["split_unlink"] = link_from_gauss("split_unlink", [("A", []), ("B", [])], {})
    fx["split_trefoil"] = disjoint_union("split_trefoil", trefoil(), fx["unknot"])

    fx["loop"] = loop()
    fx["theta"] = theta_n(2, "theta")
    for n in range(3, 6):
        fx[f"theta{n}"] = theta_n(n)
    fx["handcuff"] = first_spherical("handcuff", {"A": [("a", T), ("a", H), ("v0", T)], "B": [("b", T), ("b", H), ("v0", H)]},
                                     [("a", [], "A", "A"), ("b", [], "B", "B"), ("v0", [], "A", "B")], [])
    fx["hopf_handcuff"] = first_spherical(
        "hopf_handcuff", {"A": [("a", T), ("a", H), ("v0", T)], "B": [("b", T), ("b", H), ("v0", H)]},
        [("a", [("x", True), ("y", False)], "A", "A"), ("b", [("x", False), ("y", True)], "B", "B"),
         ("v0", [], "A", "B")], ["x", "y"])
    d, _ = random_move_sequence(theta_n(3), 10, seed=5)
    fx["theta3_scrambled"] = replace(canonical(d), name="theta3_scrambled", _cache={})
    fx["theta_5"] = theta_curve(THETA_5, THETA_5_SIGNS, THETA_5_ROT_B, "theta_5")

    # K5 drawn with one crossing between the diagonals 1-3 and 2-4
    vs = "12345"
    ends = {v: [] for v in vs}
    strands = []
    for a, b in itertools.combinations(vs, 2):
        e = f"e{a}{b}"
        ends[a].append((e, T))
        ends[b].append((e, H))
        passes = [("x", True)] if e == "e13" else [("x", False)] if e == "e24" else []
        strands.append((e, passes, a, b))
    fx["k5"] = first_spherical("k5", ends, strands, ["x"])
    return fx


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--search-theta", type=float, default=0.0, metavar="SECONDS")
    args = ap.parse_args(argv)
    if args.search_theta:
        search_theta(args.search_theta)
        return 0
    OUT.mkdir(parents=True, exist_ok=True)
    for name, d in build().items():
        errs = validate_diagram(d)
        if errs:
            print(f"{name}: {errs[0]}", file=sys.stderr)
            return 1
        (OUT / f"{name}.json").write_text(serialize_sgd(d))
        print(f"{name}: {len(d.crossings)} crossings")
    # a theta graph whose second vertex turns the wrong way: no sphere has this rotation system
    bad = theta_n(2, "theta_twisted_rotation")
    v = bad.vertices[1]
    bad = replace(bad, vertices=(bad.vertices[0], replace(v, ccw=v.ccw[::-1][1:] + v.ccw[::-1][:1])), _cache={})
    assert validate_diagram(bad)
    (OUT / "theta_twisted_rotation.json").write_text(serialize_sgd(bad))
    return 0


if __name__ == "__main__":
    sys.exit(main())
