"""Framings of a diagram's band surface, cabling, and framed linking numbers.

A framing is a half-twist count per edge, measured against the blackboard
surface of one particular diagram.  All link diagrams that live in the band
surface (core curves, their normal push-offs, whole link patterns) are drawn
by one cabling routine, `cable`, which lays strands out as parallel lanes in
each band and as straight chords inside each vertex disk.

Lane orders are always listed right to left as seen walking along the edge
from its tail.  Half-twists sit next to the tail end of each band.
"""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .abstract_graph import (AbstractGraph, FundamentalCycle, SpanningForest, fundamental_cycles,
                             is_cut_space_element, label_key)
from .diagram import (HEAD, TAIL, DiagramError, GaussCode, LinkDiagram, MoveSpec, SpatialDiagram, Strand,
                      check_diagram, from_gauss, gauss_code, kink_effect, linking_number, underlying_graph)

__all__ = [
    "Framing",
    "LinkingMatrix",
    "NonOrientable",
    "InvalidCut",
    "LayoutFailure",
    "CableStrand",
    "blackboard",
    "is_orientable",
    "apply_full_twist",
    "apply_cut_half_twists",
    "face_signs",
    "cable",
    "pushoff_diagram",
    "linking_matrix",
    "self_linking_formula",
    "transport_framing",
    "load_framing",
    "dump_framing",
]


class NonOrientable(ValueError):
    pass


class InvalidCut(ValueError):
    pass


class LayoutFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class Framing:
    diagram: str
    half_twists: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def of(diagram: str, twists: dict[str, int]) -> "Framing":
        items = tuple(sorted(((e, int(k)) for e, k in twists.items() if k), key=lambda t: label_key(t[0])))
        return Framing(diagram, items)

    def tau(self, edge: str) -> int:
        return dict(self.half_twists).get(edge, 0)

    def as_map(self) -> dict[str, int]:
        return dict(self.half_twists)

    def as_dict(self) -> dict:
        return {"diagram": self.diagram, "half_twists": self.as_map()}


def load_framing(text: str, d: SpatialDiagram | None = None) -> Framing:
    data = json.loads(text)
    if not isinstance(data, dict) or not isinstance(data.get("half_twists", {}), dict):
        raise ValueError("framing file must be {diagram, half_twists: {edge: int}}")
    twists = {str(e): int(k) for e, k in data.get("half_twists", {}).items()}
    if d is not None:
        edges = {e.id for e in d.edges}
        unknown = sorted(set(twists) - edges, key=label_key)
        if unknown:
            raise ValueError(f"framing names unknown edges: {unknown}")
    return Framing.of(str(data.get("diagram", d.name if d else "")), twists)


def dump_framing(f: Framing) -> str:
    return json.dumps(f.as_dict(), indent=1) + "\n"


def blackboard(d: SpatialDiagram) -> Framing:
    return Framing(d.name)


def is_orientable(d: SpatialDiagram | AbstractGraph, f: Framing) -> bool:
    g = d if isinstance(d, AbstractGraph) else underlying_graph(d)
    return all(sum(f.tau(e) for e, _ in c.walk) % 2 == 0 for c in fundamental_cycles(g))


def apply_full_twist(f: Framing, e: str, sign: int = 1) -> Framing:
    m = f.as_map()
    m[e] = m.get(e, 0) + 2 * (1 if sign > 0 else -1)
    return Framing.of(f.diagram, m)


def apply_cut_half_twists(f: Framing, cut: Iterable[str], sign: int = 1, g: AbstractGraph | None = None) -> Framing:
    cut = set(cut)
    if g is not None and not is_cut_space_element(g, cut):
        raise InvalidCut(f"{sorted(cut, key=label_key)} is not an edge cut")
    m = f.as_map()
    for e in cut:
        m[e] = m.get(e, 0) + (1 if sign > 0 else -1)
    return Framing.of(f.diagram, m)


def face_signs(d: SpatialDiagram, f: Framing) -> dict[str, int]:
    """Which side of each vertex disk faces the viewer (+1 = the positive side)."""
    s: dict[str, int] = {}
    adj = defaultdict(list)
    for e in d.edges:
        flip = -1 if f.tau(e.id) % 2 else 1
        adj[e.tail].append((e.head, flip))
        adj[e.head].append((e.tail, flip))
    for v in sorted((v.id for v in d.vertices), key=label_key):
        if v in s:
            continue
        s[v] = 1
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w, flip in adj[u]:
                want = s[u] * flip
                if w not in s:
                    s[w] = want
                    queue.append(w)
                elif s[w] != want:
                    raise NonOrientable("band surface is not orientable for this framing")
    return s


@dataclass(frozen=True)
class CableStrand:
    name: str
    walk: tuple[tuple[str, int], ...]  # closed walk of (edge, ±1)
    pushed: bool = False  # lifted off the surface on its positive side


def _ccw_points(n: int) -> list[tuple[int, int]]:
    return [(k, k * k) for k in range(n)]


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _segment_hit(p, q, r, s) -> tuple[Fraction, Fraction]:
    """Parameters (t on pq, u on rs) of the crossing of two properly crossing chords."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    ex, ey = s[0] - r[0], s[1] - r[1]
    den = _cross(dx, dy, ex, ey)
    wx, wy = r[0] - p[0], r[1] - p[1]
    return Fraction(_cross(wx, wy, ex, ey), den), Fraction(_cross(wx, wy, dx, dy), den)


def _interleave(a: int, b: int, c: int, d: int) -> bool:
    lo, hi = min(a, b), max(a, b)
    return (lo < c < hi) != (lo < d < hi)


def cable(d: SpatialDiagram, f: Framing, strands: Sequence[CableStrand],
          lanes: dict[str, Sequence[int]], name: str = "cable", check: bool = True,
          layout: dict | None = None) -> LinkDiagram:
    """Draw closed curves in the band surface as a link diagram.

    ``lanes[e]`` lists the indices of the strands running through band e,
    right to left.  Each strand may use an edge at most once.  On-surface
    strands must meet only where the diagram itself forces it; two of them
    crossing inside a vertex disk raises LayoutFailure.
    """
    gc = gauss_code(d)
    edges = {s.id: s for s in gc.strands if not s.closed}
    rot = dict(gc.vertices)
    signs: dict[str, int] = {}
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"c{counter[0]}"

    sigma: list[dict[str, int]] = []
    for k, st in enumerate(strands):
        dirs = {}
        for e, s in st.walk:
            if e in dirs:
                raise LayoutFailure(f"strand {st.name} uses edge {e} twice")
            dirs[e] = s
        sigma.append(dirs)
        for e in dirs:
            if k not in lanes.get(e, ()):
                raise LayoutFailure(f"strand {st.name} missing from the lanes of {e}")
    for e, ls in lanes.items():
        for k in ls:
            if e not in sigma[k]:
                raise LayoutFailure(f"lane of {e} lists strand {k}, which does not use it")

    # events[(strand, edge)] = [(key, crossing, over)]
    events: dict[tuple[int, str], list] = defaultdict(list)
    tail_order: dict[str, list[int]] = {}
    for e, ls in lanes.items():
        ls = list(ls)
        tau = f.tau(e)
        order = list(ls) if tau % 2 == 0 else ls[::-1]
        tail_order[e] = list(order)
        pos = 0
        left_over = tau > 0
        for _ in range(abs(tau)):
            for i in range(len(order) - 1):
                for j in range(len(order) - 1 - i):
                    r, l = order[j], order[j + 1]
                    x = fresh()
                    cross = sigma[l][e] * sigma[r][e]
                    signs[x] = cross if left_over else -cross
                    events[(l, e)].append(((0, pos), x, left_over))
                    events[(r, e)].append(((0, pos), x, not left_over))
                    order[j], order[j + 1] = l, r
                    pos += 1
        assert order == ls

    # body: each original crossing becomes a grid of lane crossings
    where: dict[str, list[tuple[str, int, bool]]] = defaultdict(list)
    for e, s in edges.items():
        for i, (x, ov) in enumerate(s.passes):
            where[x].append((e, i, ov))
    for x, visits in where.items():
        (eo, io, _), (eu, iu, _) = sorted(visits, key=lambda t: not t[2])
        chi = gc.signs[x]
        lo, lu = list(lanes.get(eo, ())), list(lanes.get(eu, ()))
        for kb, p in enumerate(lo):
            b = 2 * kb - (len(lo) - 1)
            for ka, q in enumerate(lu):
                a = 2 * ka - (len(lu) - 1)
                y = fresh()
                signs[y] = sigma[p][eo] * sigma[q][eu] * chi
                events[(p, eo)].append(((1, io, -chi * a), y, True))
                events[(q, eu)].append(((1, iu, chi * b), y, False))

    # vertex disks
    fsign = face_signs(d, f) if any(st.pushed for st in strands) else {}
    ports: dict[str, dict[tuple[str, str, int], int]] = {}
    for v, ccw in rot.items():
        table = {}
        n = 0
        for eid, end in ccw:
            ls = lanes.get(eid, ())
            seq = tail_order.get(eid, []) if end == TAIL else list(reversed(ls))
            for k in seq:
                table[(eid, end, k)] = n
                n += 1
        ports[v] = table
    chords: dict[str, list[tuple[int, int, int, int]]] = defaultdict(list)  # v -> (strand, step, p, q)
    for k, st in enumerate(strands):
        w = st.walk
        for t, (e, s) in enumerate(w):
            e2, s2 = w[(t + 1) % len(w)]
            rec = edges[e]
            v = rec.head if s > 0 else rec.tail
            start = edges[e2].tail if s2 > 0 else edges[e2].head
            if v != start:
                raise LayoutFailure(f"strand {st.name} is not a closed walk at step {t}")
            p = ports[v][(e, HEAD if s > 0 else TAIL, k)]
            q = ports[v][(e2, TAIL if s2 > 0 else HEAD, k)]
            chords[v].append((k, t, p, q))
    if layout is not None:
        layout["tail_order"] = {e: list(o) for e, o in tail_order.items()}
        layout["chords"] = {v: [(k, p, q) for k, _, p, q in cs] for v, cs in chords.items()}
        layout["ports"] = {v: len(t) for v, t in ports.items()}
    vertex_events: dict[tuple[int, int], list] = defaultdict(list)
    for v, cs in chords.items():
        pts = _ccw_points(len(ports[v]))
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                k1, t1, p1, q1 = cs[i]
                k2, t2, p2, q2 = cs[j]
                if not _interleave(p1, q1, p2, q2):
                    continue
                push1, push2 = strands[k1].pushed, strands[k2].pushed
                if not push1 and not push2:
                    raise LayoutFailure(f"strands {strands[k1].name} and {strands[k2].name} cross in disk {v}")
                if push1 and push2:
                    first_over = k1 < k2
                else:
                    first_over = (fsign[v] > 0) == push1
                u1, u2 = _segment_hit(pts[p1], pts[q1], pts[p2], pts[q2])
                d1 = (pts[q1][0] - pts[p1][0], pts[q1][1] - pts[p1][1])
                d2 = (pts[q2][0] - pts[p2][0], pts[q2][1] - pts[p2][1])
                o, u = (d1, d2) if first_over else (d2, d1)
                x = fresh()
                signs[x] = 1 if _cross(*o, *u) > 0 else -1
                vertex_events[(k1, t1)].append((u1, x, first_over))
                vertex_events[(k2, t2)].append((u2, x, not first_over))

    comps = []
    for k, st in enumerate(strands):
        passes = []
        for t, (e, s) in enumerate(st.walk):
            evs = sorted(events[(k, e)], key=lambda ev: ev[0], reverse=s < 0)
            passes += [(x, ov) for _, x, ov in evs]
            passes += [(x, ov) for _, x, ov in sorted(vertex_events[(k, t)], key=lambda ev: ev[0])]
        comps.append(Strand(st.name, passes))
    out = from_gauss(GaussCode(name, [], comps, signs))
    if check:
        try:
            check_diagram(out)
        except DiagramError as exc:
            raise LayoutFailure(f"cabled diagram failed its own check: {exc}") from exc
    return out


def _orientable_or_raise(d: SpatialDiagram, f: Framing) -> None:
    if not is_orientable(d, f):
        raise NonOrientable("some cycle carries an odd number of half-twists")


def pushoff_diagram(d: SpatialDiagram, f: Framing, cycle: FundamentalCycle, side: int = 1) -> LinkDiagram:
    """Core of a cycle plus its push-off to one side of the band surface."""
    if side < 0:
        raise ValueError("push-offs are taken to the positive side of the surface")
    _orientable_or_raise(d, f)
    strands = [CableStrand(cycle.name, tuple(cycle.walk)),
               CableStrand(cycle.name + "+", tuple(cycle.walk), pushed=True)]
    lanes = {e: [0, 1] for e, _ in cycle.walk}
    return cable(d, f, strands, lanes, name=f"{d.name}:{cycle.name}:pushoff")


@dataclass(frozen=True)
class LinkingMatrix:
    """A[i][j] = lk(core of K_i, push-off of K_j)."""

    rows: tuple[tuple[int, ...], ...]
    diagram: str = ""
    framing: Framing | None = None
    cycles: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def is_symmetric(self) -> bool:
        return all(self.rows[i][j] == self.rows[j][i] for i in range(self.n) for j in range(self.n))

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.rows for v in r)

    def as_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def linking_matrix(d: SpatialDiagram, f: Framing, cycles: Sequence[FundamentalCycle] | None = None,
                   tree: SpanningForest | None = None) -> LinkingMatrix:
    _orientable_or_raise(d, f)
    if cycles is None:
        cycles = fundamental_cycles(underlying_graph(d), tree)
    n = len(cycles)
    rows = [[0] * n for _ in range(n)]
    for i, ci in enumerate(cycles):
        for j, cj in enumerate(cycles):
            strands = [CableStrand(ci.name, tuple(ci.walk)),
                       CableStrand(cj.name + "+", tuple(cj.walk), pushed=True)]
            lanes: dict[str, list[int]] = defaultdict(list)
            for e, _ in ci.walk:
                lanes[e].append(0)
            for e, _ in cj.walk:
                lanes[e].append(1)
            ld = cable(d, f, strands, dict(lanes), name="lk", check=False)
            rows[i][j] = linking_number(ld, 0, 1)
    return LinkingMatrix(tuple(map(tuple, rows)), d.name, f, tuple(c.name for c in cycles))


def self_linking_formula(d: SpatialDiagram, f: Framing, cycle: FundamentalCycle) -> Fraction:
    """Writhe of the cycle's knot plus half its half-twists; equals A[i][i]."""
    from .diagram import extract_cycle_diagram, writhe
    return writhe(extract_cycle_diagram(d, cycle), 0) + Fraction(sum(f.tau(e) for e, _ in cycle.walk), 2)


def transport_framing(d: SpatialDiagram, f: Framing, move: MoveSpec) -> Framing:
    """Framing on the moved diagram that describes the same surface."""
    if move.kind == "VI":
        raise ValueError("move VI changes the vertex neighbourhood; no framing transport")
    eff = kink_effect(d, move)
    if eff is None:
        return f
    sid, dw = eff
    if sid not in {e.id for e in d.edges}:
        return f
    m = f.as_map()
    m[sid] = m.get(sid, 0) - 2 * dw
    return Framing.of(f.diagram, m)
