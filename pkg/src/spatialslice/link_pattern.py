"""Disjoint copies of the fundamental cycles drawn inside the band surface.

Every fundamental cycle gets its own strand.  Strands share a band as
parallel lanes, pass each other only where the diagram or the twists force
them to, and are routed through each vertex disk without meeting.  The lane
order in each band is the only freedom; it is searched over until every disk
routing is crossing-free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .abstract_graph import FundamentalCycle, fundamental_cycles, is_fundamental_basis, label_key
from .diagram import DiagramError, LinkDiagram, SpatialDiagram, check_diagram, underlying_graph
from .framing import CableStrand, Framing, LayoutFailure, cable, is_orientable, NonOrientable

__all__ = [
    "PatternLayout",
    "NotFundamental",
    "fundamental_link_pattern",
    "verify_pattern",
]


class NotFundamental(ValueError):
    pass


@dataclass(frozen=True)
class PatternLayout:
    band_orders: dict[str, tuple[str, ...]]  # edge -> cycle names, right to left from the tail
    disk_matchings: dict[str, tuple[tuple[str, int, int], ...]]  # vertex -> (cycle, port in, port out)
    disk_ports: dict[str, int]
    trials: int = 1

    def as_dict(self) -> dict:
        return {"band_orders": {e: list(o) for e, o in self.band_orders.items()},
                "disk_matchings": {v: [list(c) for c in cs] for v, cs in self.disk_matchings.items()},
                "disk_ports": dict(self.disk_ports),
                "trials": self.trials}


def _lane_choices(cycles: Sequence[FundamentalCycle]) -> tuple[list[str], list[list[tuple[int, ...]]]]:
    users: dict[str, list[int]] = {}
    for k, c in enumerate(cycles):
        for e, _ in c.walk:
            users.setdefault(e, []).append(k)
    edges = sorted(users, key=label_key)
    return edges, [list(itertools.permutations(users[e])) for e in edges]


def fundamental_link_pattern(d: SpatialDiagram, f: Framing, cycles: Sequence[FundamentalCycle] | None = None,
                             max_trials: int = 100000) -> tuple[LinkDiagram, PatternLayout]:
    g = underlying_graph(d)
    cycles = list(cycles) if cycles is not None else fundamental_cycles(g)
    if not is_fundamental_basis(cycles, g):
        raise NotFundamental("cycles do not form a fundamental basis")
    if not is_orientable(g, f):
        raise NonOrientable("framing is not orientable")
    strands = [CableStrand(c.name, tuple(c.walk)) for c in cycles]
    edges, choices = _lane_choices(cycles)
    trials = 0
    for pick in itertools.product(*choices):
        trials += 1
        if trials > max_trials:
            trials -= 1
            break
        lanes = dict(zip(edges, (list(p) for p in pick)))
        info: dict = {}
        try:
            ld = cable(d, f, strands, lanes, name=f"{d.name}:pattern", layout=info)
        except LayoutFailure:
            continue
        layout = PatternLayout(
            {e: tuple(cycles[k].name for k in lanes[e]) for e in edges},
            {v: tuple((cycles[k].name, p, q) for k, p, q in cs) for v, cs in sorted(info["chords"].items())},
            dict(info["ports"]), trials)
        return ld, layout
    raise LayoutFailure(f"no crossing-free disk routing after {trials} lane orders")


def _chords_cross(a: tuple[int, int], b: tuple[int, int]) -> bool:
    lo, hi = min(a), max(a)
    return (lo < b[0] < hi) != (lo < b[1] < hi)


def verify_pattern(ld: LinkDiagram, layout: PatternLayout, d: SpatialDiagram,
                   cycles: Sequence[FundamentalCycle]) -> list[str]:
    errs = []
    if len(ld.components) != len(cycles):
        errs.append(f"ComponentCount: {len(ld.components)} components for {len(cycles)} cycles")
    try:
        check_diagram(ld)
    except DiagramError as exc:
        errs.append(f"SphereCheck: {exc}")
    names = [c.name for c in cycles]
    if sorted(c.id for c in ld.components) != sorted(names):
        errs.append("ComponentNames: components do not match the cycles")
    for c in cycles:
        for e, _ in c.walk:
            if c.name not in layout.band_orders.get(e, ()):
                errs.append(f"BandOrder: {c.name} missing from band {e}")
    for e, order in layout.band_orders.items():
        users = sorted(c.name for c in cycles if e in c.edge_set)
        if sorted(order) != users:
            errs.append(f"BandOrder: band {e} lists {list(order)}, expected {users}")
    for v, chords in layout.disk_matchings.items():
        for i, a in enumerate(chords):
            for b in chords[i + 1:]:
                if _chords_cross(a[1:], b[1:]):
                    errs.append(f"DiskPlanarity: chords of {a[0]} and {b[0]} cross in disk {v}")
    return errs
