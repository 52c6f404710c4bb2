"""Planar diagrams of spatial graphs and links.

A diagram is stored the way the SGD file format spells it: arcs, vertex nodes
with a counterclockwise list of arc ends, crossing nodes with four arc ends
and the index pair of the over-strand, and edges (or closed link components)
as oriented chains of arcs.  Every arc is oriented along its edge or
component, so an arc's ``tail`` end points back along the chain.

Most rewriting happens on the signed Gauss code (`GaussCode`): each strand is
the ordered list of crossings it passes, each crossing has a sign, and graph
vertices keep their rotation.  That data pins down the planar diagram, and
`from_gauss` rebuilds the node records from it.
"""

from __future__ import annotations

import json
import random
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

from .abstract_graph import AbstractGraph, FundamentalCycle, label_key

__all__ = [
    "ArcEnd",
    "VertexNode",
    "CrossingNode",
    "EdgeRecord",
    "ComponentRecord",
    "SpatialDiagram",
    "LinkDiagram",
    "DiagramError",
    "SgdSyntaxError",
    "SgdSemanticError",
    "NotSpherical",
    "InconsistentChain",
    "PatternMismatch",
    "Strand",
    "GaussCode",
    "MoveSpec",
    "parse_sgd",
    "serialize_sgd",
    "diagram_from_dict",
    "diagram_to_dict",
    "validate_diagram",
    "check_diagram",
    "faces",
    "face_count",
    "gauss_code",
    "from_gauss",
    "link_from_gauss",
    "canonical",
    "crossing_sign",
    "underlying_graph",
    "sublink",
    "link_as_graph",
    "fixture_names",
    "load_fixture",
    "extract_cycle_diagram",
    "writhe",
    "linking_number",
    "mirror",
    "disjoint_union",
    "apply_move",
    "apply_moves",
    "candidate_moves",
    "random_move_sequence",
    "kink_effect",
]

HEAD = "head"
TAIL = "tail"


# --------------------------------------------------------------------------
# records

@dataclass(frozen=True, order=True)
class ArcEnd:
    arc: str
    end: str  # "head" or "tail"

    def as_dict(self) -> dict:
        return {"arc": self.arc, "end": self.end}


@dataclass(frozen=True)
class VertexNode:
    id: str
    ccw: tuple[ArcEnd, ...]


@dataclass(frozen=True)
class CrossingNode:
    id: str
    ccw: tuple[ArcEnd, ArcEnd, ArcEnd, ArcEnd]
    over: tuple[int, int]


@dataclass(frozen=True)
class EdgeRecord:
    id: str
    tail: str
    head: str
    arcs: tuple[str, ...]


@dataclass(frozen=True)
class ComponentRecord:
    id: str
    arcs: tuple[str, ...]


@dataclass(frozen=True)
class SpatialDiagram:
    """Combinatorial planar diagram; with no vertices it is a link diagram."""

    name: str
    arcs: tuple[str, ...]
    vertices: tuple[VertexNode, ...] = ()
    crossings: tuple[CrossingNode, ...] = ()
    edges: tuple[EdgeRecord, ...] = ()
    components: tuple[ComponentRecord, ...] = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def is_link(self) -> bool:
        return not self.vertices and not self.edges

    @property
    def crossing_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.crossings)

    def crossing(self, cid: str) -> CrossingNode:
        for c in self.crossings:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def vertex(self, vid: str) -> VertexNode:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def component_index(self, comp: int | str) -> int:
        if isinstance(comp, int):
            return comp
        for i, c in enumerate(self.components):
            if c.id == comp:
                return i
        raise KeyError(comp)

    def end_locations(self) -> dict[ArcEnd, tuple[str, int]]:
        if "ends" not in self._cache:
            loc = {}
            for node in list(self.vertices) + list(self.crossings):
                for k, ae in enumerate(node.ccw):
                    loc[ae] = (node.id, k)
            self._cache["ends"] = loc
        return self._cache["ends"]

    def node_ccw(self, node_id: str) -> tuple[ArcEnd, ...]:
        if "nodes" not in self._cache:
            self._cache["nodes"] = {n.id: n.ccw for n in list(self.vertices) + list(self.crossings)}
        return self._cache["nodes"][node_id]


LinkDiagram = SpatialDiagram


class DiagramError(ValueError):
    """Base class for diagram problems."""


class SgdSyntaxError(DiagramError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class SgdSemanticError(DiagramError):
    pass


class NotSpherical(DiagramError):
    def __init__(self, v: int, e: int, f: int, components: int):
        super().__init__(f"rotation system is not spherical: V={v} E={e} F={f} "
                         f"over {components} component(s), V-E+F={v - e + f}")
        self.v, self.e, self.f = v, e, f


class InconsistentChain(DiagramError):
    def __init__(self, chain: str, msg: str):
        super().__init__(f"chain {chain!r}: {msg}")
        self.chain = chain


class PatternMismatch(DiagramError):
    pass


# --------------------------------------------------------------------------
# SGD text format

def _ref(obj: Any, where: str) -> ArcEnd:
    if not isinstance(obj, dict) or set(obj) != {"arc", "end"} or obj["end"] not in (HEAD, TAIL):
        raise SgdSemanticError(f"{where}: arc-end reference must be {{arc, end}} with end head|tail")
    return ArcEnd(str(obj["arc"]), obj["end"])


def diagram_from_dict(data: dict) -> SpatialDiagram:
    if not isinstance(data, dict):
        raise SgdSemanticError("top level must be an object")
    try:
        name = str(data.get("name", ""))
        arcs = tuple(str(a) for a in data["arcs"])
        vertices = tuple(
            VertexNode(str(v["id"]), tuple(_ref(r, f"vertex {v['id']}") for r in v["ccw"]))
            for v in data.get("vertices", []))
        crossings = []
        for c in data.get("crossings", []):
            ccw = tuple(_ref(r, f"crossing {c['id']}") for r in c["ccw"])
            over = tuple(int(i) for i in c["over"])
            if len(ccw) != 4 or len(over) != 2:
                raise SgdSemanticError(f"crossing {c['id']}: need 4 arc ends and 2 over indices")
            crossings.append(CrossingNode(str(c["id"]), ccw, over))
        edges = tuple(EdgeRecord(str(e["id"]), str(e["from"]), str(e["to"]), tuple(str(a) for a in e["arcs"]))
                      for e in data.get("edges", []))
        comps = []
        for k, c in enumerate(data.get("components", [])):
            if isinstance(c, dict):
                comps.append(ComponentRecord(str(c.get("id", f"L{k}")), tuple(str(a) for a in c["arcs"])))
            else:
                comps.append(ComponentRecord(f"L{k}", tuple(str(a) for a in c)))
    except (KeyError, TypeError) as exc:
        raise SgdSemanticError(f"missing or malformed field: {exc}") from None
    return SpatialDiagram(name, arcs, vertices, tuple(crossings), edges, tuple(comps))


def parse_sgd(text: str, validate: bool = True) -> SpatialDiagram:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SgdSyntaxError(exc.lineno, exc.msg) from None
    d = diagram_from_dict(data)
    if validate:
        check_diagram(d)
    return d


def _rotate_min(seq: Sequence[ArcEnd]) -> tuple[int, tuple[ArcEnd, ...]]:
    if not seq:
        return 0, ()
    k = min(range(len(seq)), key=lambda i: (label_key(seq[i].arc), seq[i].end))
    return k, tuple(seq[k:]) + tuple(seq[:k])


def diagram_to_dict(d: SpatialDiagram) -> dict:
    """Canonical dictionary: nodes and arcs sorted, cyclic lists rotated."""
    out: dict[str, Any] = {"name": d.name, "arcs": sorted(d.arcs, key=label_key)}
    verts = []
    for v in sorted(d.vertices, key=lambda v: label_key(v.id)):
        _, ccw = _rotate_min(v.ccw)
        verts.append({"id": v.id, "ccw": [a.as_dict() for a in ccw]})
    out["vertices"] = verts
    xs = []
    for c in sorted(d.crossings, key=lambda c: label_key(c.id)):
        # start at the outgoing end of the over-strand
        i, j = c.over
        k = i if c.ccw[i].end == TAIL else j
        ccw = c.ccw[k:] + c.ccw[:k]
        xs.append({"id": c.id, "ccw": [a.as_dict() for a in ccw], "over": [0, 2]})
    out["crossings"] = xs
    out["edges"] = [{"id": e.id, "from": e.tail, "to": e.head, "arcs": list(e.arcs)}
                    for e in sorted(d.edges, key=lambda e: label_key(e.id))]
    if d.components or d.is_link:
        comps = []
        for c in d.components:
            arcs = list(c.arcs)
            if arcs:
                k = min(range(len(arcs)), key=lambda i: label_key(arcs[i]))
                arcs = arcs[k:] + arcs[:k]
            comps.append({"id": c.id, "arcs": arcs})
        out["components"] = comps
    return out


def serialize_sgd(d: SpatialDiagram) -> str:
    return json.dumps(diagram_to_dict(d), indent=1) + "\n"


# --------------------------------------------------------------------------
# validation and faces

def _dart_next(d: SpatialDiagram, dart: tuple[str, int]) -> tuple[str, int]:
    arc, s = dart
    node, k = d.end_locations()[ArcEnd(arc, HEAD if s > 0 else TAIL)]
    ccw = d.node_ccw(node)
    nxt = ccw[(k - 1) % len(ccw)]
    return (nxt.arc, +1 if nxt.end == TAIL else -1)


def faces(d: SpatialDiagram) -> list[tuple[tuple[str, int], ...]]:
    """Faces as cyclic dart lists, each traversed with the face on its left.

    Free arcs (closed components without crossings) are skipped.
    """
    if "faces" in d._cache:
        return d._cache["faces"]
    loc = d.end_locations()
    darts = [(a, s) for a in sorted(d.arcs, key=label_key) for s in (+1, -1)
             if ArcEnd(a, HEAD) in loc]
    seen = set()
    out = []
    for dart in darts:
        if dart in seen:
            continue
        face = []
        cur = dart
        while cur not in seen:
            seen.add(cur)
            face.append(cur)
            cur = _dart_next(d, cur)
        out.append(tuple(face))
    d._cache["faces"] = out
    return out


def face_count(d: SpatialDiagram) -> int:
    return len(faces(d))


def _map_components(d: SpatialDiagram) -> list[tuple[set[str], set[str]]]:
    parent: dict[str, str] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    loc = d.end_locations()
    for node in list(d.vertices) + list(d.crossings):
        find("n:" + node.id)
        for ae in node.ccw:
            parent[find("a:" + ae.arc)] = find("n:" + node.id)
    groups: dict[str, tuple[set, set]] = defaultdict(lambda: (set(), set()))
    for node in list(d.vertices) + list(d.crossings):
        groups[find("n:" + node.id)][0].add(node.id)
    for a in d.arcs:
        if ArcEnd(a, HEAD) in loc:
            groups[find("a:" + a)][1].add(a)
    return list(groups.values())


def validate_diagram(d: SpatialDiagram) -> list[DiagramError]:
    errs: list[DiagramError] = []
    arcset = set(d.arcs)
    if len(arcset) != len(d.arcs):
        errs.append(SgdSemanticError("duplicate arc label"))
    ids = [n.id for n in d.vertices] + [n.id for n in d.crossings]
    if len(set(ids)) != len(ids):
        errs.append(SgdSemanticError("duplicate node id"))
    seen: dict[ArcEnd, str] = {}
    for node in list(d.vertices) + list(d.crossings):
        for ae in node.ccw:
            if ae.arc not in arcset:
                errs.append(SgdSemanticError(f"node {node.id}: unknown arc {ae.arc!r}"))
            if ae in seen:
                errs.append(SgdSemanticError(f"arc end {ae.arc}.{ae.end} used more than once"))
            seen[ae] = node.id
    for c in d.crossings:
        i, j = c.over
        if i == j or not (0 <= i < 4 and 0 <= j < 4) or (j - i) % 4 != 2:
            errs.append(SgdSemanticError(f"crossing {c.id}: over indices {list(c.over)} must be opposite"))
        for p in (0, 1):
            ends = {c.ccw[p].end, c.ccw[p + 2].end}
            if ends != {HEAD, TAIL}:
                errs.append(SgdSemanticError(f"crossing {c.id}: strand through positions {p},{p + 2} "
                                             "must enter and leave"))
    for a in d.arcs:
        has = (ArcEnd(a, HEAD) in seen, ArcEnd(a, TAIL) in seen)
        if has[0] != has[1]:
            errs.append(SgdSemanticError(f"arc {a!r} has exactly one end attached"))
    if errs:
        return errs

    used: dict[str, str] = {}
    vids = {v.id for v in d.vertices}
    xids = {c.id for c in d.crossings}
    loc = d.end_locations()

    def passes_through(a: str, b: str) -> bool:
        h, t = loc.get(ArcEnd(a, HEAD)), loc.get(ArcEnd(b, TAIL))
        return (h is not None and t is not None and h[0] == t[0] and h[0] in xids
                and (h[1] - t[1]) % 4 == 2)

    for e in d.edges:
        for a in e.arcs:
            if a in used:
                errs.append(InconsistentChain(e.id, f"arc {a!r} already used by {used[a]!r}"))
            used[a] = e.id
        if e.tail not in vids or e.head not in vids:
            errs.append(InconsistentChain(e.id, "unknown end vertex"))
            continue
        if not e.arcs:
            errs.append(InconsistentChain(e.id, "empty arc chain"))
            continue
        first, last = loc.get(ArcEnd(e.arcs[0], TAIL)), loc.get(ArcEnd(e.arcs[-1], HEAD))
        if first is None or first[0] != e.tail:
            errs.append(InconsistentChain(e.id, f"first arc does not leave vertex {e.tail!r}"))
        if last is None or last[0] != e.head:
            errs.append(InconsistentChain(e.id, f"last arc does not reach vertex {e.head!r}"))
        for a, b in zip(e.arcs, e.arcs[1:]):
            if not passes_through(a, b):
                errs.append(InconsistentChain(e.id, f"arcs {a!r},{b!r} do not meet across a crossing"))
    for c in d.components:
        for a in c.arcs:
            if a in used:
                errs.append(InconsistentChain(c.id, f"arc {a!r} already used by {used[a]!r}"))
            used[a] = c.id
        if not c.arcs:
            errs.append(InconsistentChain(c.id, "empty component"))
            continue
        free = [ArcEnd(a, HEAD) not in loc for a in c.arcs]
        if any(free):
            if len(c.arcs) != 1:
                errs.append(InconsistentChain(c.id, "free arc inside a longer chain"))
            continue
        for a, b in zip(c.arcs, c.arcs[1:] + c.arcs[:1]):
            if not passes_through(a, b):
                errs.append(InconsistentChain(c.id, f"arcs {a!r},{b!r} do not meet across a crossing"))
    for a in d.arcs:
        if a not in used:
            errs.append(InconsistentChain("-", f"arc {a!r} belongs to no edge or component"))
    for v in d.vertices:
        for ae in v.ccw:
            owner = used.get(ae.arc)
            if owner is None or owner not in {e.id for e in d.edges}:
                errs.append(InconsistentChain(v.id, f"vertex end {ae.arc}.{ae.end} is not an edge end"))
    if errs:
        return errs

    comps = _map_components(d)
    f = face_count(d)
    v = len(d.vertices) + len(d.crossings)
    e = sum(len(arcs) for _, arcs in comps)
    if v - e + f != 2 * len(comps):
        errs.append(NotSpherical(v, e, f, len(comps)))
    return errs


def check_diagram(d: SpatialDiagram) -> SpatialDiagram:
    errs = validate_diagram(d)
    if errs:
        raise errs[0]
    return d


# --------------------------------------------------------------------------
# signed Gauss codes

@dataclass
class Strand:
    """An edge (``tail``/``head`` set) or a closed link component."""

    id: str
    passes: list[tuple[str, bool]]  # (crossing id, passes over?)
    tail: str | None = None
    head: str | None = None

    @property
    def closed(self) -> bool:
        return self.tail is None


@dataclass
class GaussCode:
    name: str
    vertices: list[tuple[str, list[tuple[str, str]]]]  # vertex id, ccw (edge id, "tail"|"head")
    strands: list[Strand]
    signs: dict[str, int]

    def copy(self) -> "GaussCode":
        return GaussCode(self.name, [(v, list(c)) for v, c in self.vertices],
                         [Strand(s.id, list(s.passes), s.tail, s.head) for s in self.strands],
                         dict(self.signs))

    def strand(self, sid: str) -> Strand:
        for s in self.strands:
            if s.id == sid:
                return s
        raise KeyError(sid)

    def pass_index(self) -> dict[str, list[tuple[int, int]]]:
        """crossing -> [(strand index, pass index), ...] (over pass first)."""
        where: dict[str, list[tuple[int, int]]] = defaultdict(list)
        for si, s in enumerate(self.strands):
            for pi, (x, ov) in enumerate(s.passes):
                where[x].append((si, pi))
        for x in where:
            where[x].sort(key=lambda p: not self.strands[p[0]].passes[p[1]][1])
        return where


def crossing_sign(d: SpatialDiagram, c: str | CrossingNode) -> int:
    """+1 iff the under-strand direction is the over-strand direction turned 90° ccw."""
    node = d.crossing(c) if isinstance(c, str) else c
    i, j = node.over
    o_out = i if node.ccw[i].end == TAIL else j
    u = [k for k in range(4) if k not in (i, j)]
    u_out = u[0] if node.ccw[u[0]].end == TAIL else u[1]
    return +1 if (u_out - o_out) % 4 == 1 else -1


def _strand_records(d: SpatialDiagram):
    for e in d.edges:
        yield e.id, e.arcs, e.tail, e.head
    for c in d.components:
        yield c.id, c.arcs, None, None


def gauss_code(d: SpatialDiagram) -> GaussCode:
    if "gauss" in d._cache:
        return d._cache["gauss"].copy()
    loc = d.end_locations()
    over_ends = {}
    for c in d.crossings:
        for k in c.over:
            over_ends[c.ccw[k]] = True
    strands = []
    for sid, arcs, tail, head in _strand_records(d):
        passes = []
        heads = arcs if tail is None else arcs[:-1]
        for a in heads:
            ae = ArcEnd(a, HEAD)
            if ae not in loc:
                continue
            passes.append((loc[ae][0], ae in over_ends))
        strands.append(Strand(sid, passes, tail, head))
    edge_of_first = {e.arcs[0]: e.id for e in d.edges}
    edge_of_last = {e.arcs[-1]: e.id for e in d.edges}
    verts = []
    for v in d.vertices:
        ccw = []
        for ae in v.ccw:
            if ae.end == TAIL:
                ccw.append((edge_of_first[ae.arc], TAIL))
            else:
                ccw.append((edge_of_last[ae.arc], HEAD))
        verts.append((v.id, ccw))
    gc = GaussCode(d.name, verts, strands, {c.id: crossing_sign(d, c) for c in d.crossings})
    d._cache["gauss"] = gc.copy()
    return gc


def _arc_names(s: Strand) -> list[str]:
    m = len(s.passes)
    if s.closed:
        return [s.id] if m == 0 else [f"{s.id}.{i}" for i in range(m)]
    return [s.id] if m == 0 else [f"{s.id}.{i}" for i in range(m + 1)]


def from_gauss(gc: GaussCode) -> SpatialDiagram:
    names = {s.id: _arc_names(s) for s in gc.strands}
    visits: dict[str, list[tuple[ArcEnd, ArcEnd, bool]]] = defaultdict(list)
    for s in gc.strands:
        arcs = names[s.id]
        m = len(s.passes)
        for i, (x, ov) in enumerate(s.passes):
            a_in = arcs[i]
            a_out = arcs[(i + 1) % m] if s.closed else arcs[i + 1]
            visits[x].append((ArcEnd(a_in, HEAD), ArcEnd(a_out, TAIL), ov))
    crossings = []
    for x in sorted(visits, key=label_key):
        vs = visits[x]
        if len(vs) != 2 or vs[0][2] == vs[1][2]:
            raise SgdSemanticError(f"crossing {x}: needs one over pass and one under pass")
        o, u = (vs[0], vs[1]) if vs[0][2] else (vs[1], vs[0])
        if gc.signs[x] > 0:
            ccw = (o[1], u[1], o[0], u[0])
        else:
            ccw = (o[1], u[0], o[0], u[1])
        crossings.append(CrossingNode(x, ccw, (0, 2)))
    verts = []
    by_id = {s.id: s for s in gc.strands}
    for vid, ccw in gc.vertices:
        ends = []
        for eid, end in ccw:
            arcs = names[eid]
            ends.append(ArcEnd(arcs[0], TAIL) if end == TAIL else ArcEnd(arcs[-1], HEAD))
        verts.append(VertexNode(vid, tuple(ends)))
    edges = tuple(EdgeRecord(s.id, s.tail, s.head, tuple(names[s.id])) for s in gc.strands if not s.closed)
    comps = tuple(ComponentRecord(s.id, tuple(names[s.id])) for s in gc.strands if s.closed)
    arcs = tuple(a for s in gc.strands for a in names[s.id])
    d = SpatialDiagram(gc.name, arcs, tuple(verts), tuple(crossings), edges, comps)
    d._cache["gauss"] = GaussCode(gc.name, [(v, list(c)) for v, c in gc.vertices],
                                  [Strand(s.id, list(s.passes), s.tail, s.head) for s in gc.strands],
                                  dict(gc.signs))
    del by_id
    return d


def link_from_gauss(name: str, components: Sequence[tuple[str, Sequence[tuple[str, bool]]]],
                    signs: dict[str, int]) -> LinkDiagram:
    """Build a link diagram from (component id, passes) pairs and crossing signs."""
    gc = GaussCode(name, [], [Strand(cid, list(p)) for cid, p in components], dict(signs))
    return from_gauss(gc)


def canonical(d: SpatialDiagram) -> SpatialDiagram:
    """Same diagram with arcs renamed from the Gauss code."""
    return from_gauss(gauss_code(d))


# --------------------------------------------------------------------------
# derived diagrams and numbers

def underlying_graph(d: SpatialDiagram) -> AbstractGraph:
    return AbstractGraph(tuple(v.id for v in d.vertices), tuple((e.id, e.tail, e.head) for e in d.edges))


def extract_cycle_diagram(d: SpatialDiagram, cycle: FundamentalCycle, name: str | None = None) -> LinkDiagram:
    """Knot diagram of one cycle: other edges deleted, vertices smoothed."""
    gc = gauss_code(d)
    passes: list[tuple[str, bool, int]] = []
    for eid, direction in cycle.walk:
        seq = gc.strand(eid).passes
        if direction < 0:
            seq = list(reversed(seq))
        passes.extend((x, ov, direction) for x, ov in seq)
    count = defaultdict(list)
    for x, _, direction in passes:
        count[x].append(direction)
    keep = {x for x, dirs in count.items() if len(dirs) == 2}
    signs = {x: gc.signs[x] * count[x][0] * count[x][1] for x in keep}
    comp = [(x, ov) for x, ov, _ in passes if x in keep]
    return link_from_gauss(name or f"{d.name}:{cycle.name}", [(cycle.name, comp)], signs)


def sublink(ld: LinkDiagram, keep: Sequence[int | str], name: str | None = None) -> LinkDiagram:
    """The chosen components on their own, other components erased."""
    idx = {ld.component_index(k) for k in keep}
    gc = gauss_code(ld)
    where = _comp_of_crossings(ld)
    xs = {x for x, comps in where.items() if set(comps) <= idx}
    parts = [(gc.strands[i].id, [(x, ov) for x, ov in gc.strands[i].passes if x in xs]) for i in sorted(idx)]
    return link_from_gauss(name or f"{ld.name}:sub", parts, {x: gc.signs[x] for x in xs})


def link_as_graph(ld: LinkDiagram) -> SpatialDiagram:
    """Each link component becomes a loop edge on its own base-point vertex."""
    if not ld.is_link:
        return ld
    loc = ld.end_locations()
    arcs, vs, es = list(ld.arcs), [], []
    moved: dict[ArcEnd, ArcEnd] = {}
    for c in ld.components:
        vid = f"{c.id}.pt"
        first = c.arcs[0]
        if ArcEnd(first, TAIL) in loc:
            # split the first arc: its old tail now starts a new closing arc
            closing = f"{first}'"
            arcs.append(closing)
            moved[ArcEnd(first, TAIL)] = ArcEnd(closing, TAIL)
            chain = (*c.arcs[1:], closing) if len(c.arcs) > 1 else (closing,)
            chain = (first, *chain)
            vs.append(VertexNode(vid, (ArcEnd(first, TAIL), ArcEnd(closing, HEAD))))
        else:
            chain = tuple(c.arcs)
            vs.append(VertexNode(vid, (ArcEnd(first, TAIL), ArcEnd(c.arcs[-1], HEAD))))
        es.append(EdgeRecord(c.id, vid, vid, chain))
    xs = tuple(CrossingNode(x.id, tuple(moved.get(a, a) for a in x.ccw), x.over) for x in ld.crossings)
    return SpatialDiagram(ld.name, tuple(arcs), tuple(vs), xs, tuple(es))


def _comp_of_crossings(d: LinkDiagram) -> dict[str, list[int]]:
    gc = gauss_code(d)
    where: dict[str, list[int]] = defaultdict(list)
    for si, s in enumerate(gc.strands):
        for x, _ in s.passes:
            where[x].append(si)
    return where


def writhe(ld: LinkDiagram, component: int | str = 0) -> int:
    k = ld.component_index(component) if ld.components else component
    gc = gauss_code(ld)
    return sum(gc.signs[x] for x, comps in _comp_of_crossings(ld).items() if comps == [k, k])


def linking_number(ld: LinkDiagram, i: int | str, j: int | str) -> int:
    i, j = ld.component_index(i), ld.component_index(j)
    if i == j:
        raise ValueError("linking number needs two different components")
    gc = gauss_code(ld)
    total = sum(gc.signs[x] for x, comps in _comp_of_crossings(ld).items() if sorted(comps) == sorted([i, j]))
    if total % 2:
        raise DiagramError("odd signed crossing count between two components")
    return total // 2


def mirror(d: SpatialDiagram) -> SpatialDiagram:
    """Switch every crossing; vertex rotations are kept."""
    gc = gauss_code(d)
    for s in gc.strands:
        s.passes = [(x, not ov) for x, ov in s.passes]
    gc.signs = {x: -s for x, s in gc.signs.items()}
    gc.name = d.name + "*"
    return from_gauss(gc)


def disjoint_union(name: str, *parts: SpatialDiagram) -> SpatialDiagram:
    vs, xs, es, cs, arcs = [], [], [], [], []
    for k, p in enumerate(parts):
        pre = f"p{k}_"
        ren = lambda a: pre + a  # noqa: E731
        arcs += [ren(a) for a in p.arcs]
        vs += [VertexNode(pre + v.id, tuple(ArcEnd(ren(a.arc), a.end) for a in v.ccw)) for v in p.vertices]
        xs += [CrossingNode(pre + c.id, tuple(ArcEnd(ren(a.arc), a.end) for a in c.ccw), c.over)
               for c in p.crossings]
        es += [EdgeRecord(pre + e.id, pre + e.tail, pre + e.head, tuple(map(ren, e.arcs))) for e in p.edges]
        cs += [ComponentRecord(pre + c.id, tuple(map(ren, c.arcs))) for c in p.components]
    return SpatialDiagram(name, tuple(arcs), tuple(vs), tuple(xs), tuple(es), tuple(cs))


# --------------------------------------------------------------------------
# Reidemeister moves

@dataclass(frozen=True)
class MoveSpec:
    """One local move.

    kind is "I".."VI".  Sites, by kind and direction:
      I apply:  {"arc"}; params {"sign": ±1, "first_over": bool}
      I undo:   {"crossing"}
      II apply: {"darts": [[arc, ±1], [arc, ±1]]} two darts of one face; params {"first_over": bool}
      II undo:  {"crossings": [x, y]} bounding a bigon face
      III:      {"crossings": [x, y, z]} bounding a triangle face (self-inverse)
      IV/V apply: {"vertex", "dart": [arc, ±1]}; the strand is pushed under (IV) or over (V)
      IV/V undo:  {"vertex", "crossings": [...]}
      VI:       {"vertex", "axis": index into the rotation}; params {"sign": ±1}
    """

    kind: str
    site: dict
    direction: str = "apply"
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "site": self.site, "direction": self.direction, "params": self.params}

    @staticmethod
    def from_dict(data: dict) -> "MoveSpec":
        return MoveSpec(data["kind"], dict(data["site"]), data.get("direction", "apply"),
                        dict(data.get("params", {})))

    def __hash__(self):
        return hash(json.dumps(self.as_dict(), sort_keys=True))


def _fresh(gc: GaussCode, k: int) -> list[str]:
    used = set(gc.signs)
    out = []
    n = 1
    while len(out) < k:
        cand = f"x{n}"
        if cand not in used:
            out.append(cand)
            used.add(cand)
        n += 1
    return out


def _arc_slot(d: SpatialDiagram, arc: str) -> tuple[str, int]:
    """(strand id, index of the pass just after the arc)."""
    for sid, arcs, _, _ in _strand_records(d):
        if arc in arcs:
            return sid, arcs.index(arc)
    raise PatternMismatch(f"unknown arc {arc!r}")


def _is_free(d: SpatialDiagram, arc: str) -> bool:
    return ArcEnd(arc, HEAD) not in d.end_locations()


def _insert(gc: GaussCode, inserts: list[tuple[str, int, list[tuple[str, bool]]]]) -> None:
    for sid, slot, new in sorted(inserts, key=lambda t: -t[1]):
        s = gc.strand(sid)
        s.passes[slot:slot] = new


def _node_of(d: SpatialDiagram, arc: str, end: str) -> str | None:
    loc = d.end_locations().get(ArcEnd(arc, end))
    return None if loc is None else loc[0]


def _face_of(d: SpatialDiagram, dart: tuple[str, int]) -> tuple[tuple[str, int], ...]:
    for f in faces(d):
        if dart in f:
            return f
    raise PatternMismatch(f"dart {dart} is not on any face")


def _dart_end_node(d: SpatialDiagram, dart: tuple[str, int]) -> str:
    return _node_of(d, dart[0], HEAD if dart[1] > 0 else TAIL)


def _move_I(d, gc, m):
    if m.direction == "apply":
        arc = m.site["arc"]
        sid, slot = _arc_slot(d, arc)
        (x,) = _fresh(gc, 1)
        first_over = bool(m.params.get("first_over", True))
        _insert(gc, [(sid, slot, [(x, first_over), (x, not first_over)])])
        gc.signs[x] = int(m.params.get("sign", 1))
        return gc
    x = m.site["crossing"]
    for s in gc.strands:
        idx = [i for i, (c, _) in enumerate(s.passes) if c == x]
        if len(idx) == 2:
            n = len(s.passes)
            i, j = idx
            if j == i + 1 or (s.closed and i == 0 and j == n - 1):
                s.passes = [p for p in s.passes if p[0] != x]
                del gc.signs[x]
                return gc
    raise PatternMismatch(f"crossing {x} is not a removable kink")


def _move_II(d, gc, m):
    if m.direction == "apply":
        (a, da), (b, db) = [tuple(t) for t in m.site["darts"]]
        if a == b or _is_free(d, a) or _is_free(d, b):
            raise PatternMismatch("need two distinct attached arcs")
        face = _face_of(d, (a, da))
        if (b, db) not in face:
            raise PatternMismatch("darts do not share a face")
        a_over = bool(m.params.get("first_over", True))
        x, y = _fresh(gc, 2)
        sa, slot_a = _arc_slot(d, a)
        sb, slot_b = _arc_slot(d, b)
        pa = [(x, a_over), (y, a_over)] if da > 0 else [(y, a_over), (x, a_over)]
        pb = [(y, not a_over), (x, not a_over)] if db > 0 else [(x, not a_over), (y, not a_over)]
        _insert(gc, [(sa, slot_a, pa), (sb, slot_b, pb)])
        e = da * db if a_over else -da * db
        gc.signs[x], gc.signs[y] = e, -e
        return gc
    x, y = m.site["crossings"]
    if not _is_bigon(d, x, y):
        raise PatternMismatch(f"{x},{y} do not bound a removable bigon")
    for s in gc.strands:
        s.passes = [p for p in s.passes if p[0] not in (x, y)]
    del gc.signs[x], gc.signs[y]
    return gc


def _end_is_over(d: SpatialDiagram, arc: str, end: str) -> bool | None:
    loc = d.end_locations().get(ArcEnd(arc, end))
    if loc is None:
        return None
    node, k = loc
    try:
        c = d.crossing(node)
    except KeyError:
        return None
    return k in c.over


def _arc_over_pattern(d: SpatialDiagram, arc: str) -> tuple[bool | None, bool | None]:
    return _end_is_over(d, arc, TAIL), _end_is_over(d, arc, HEAD)


def _polygon_faces(d: SpatialDiagram, k: int):
    xids = set(d.crossing_ids)
    for f in faces(d):
        if len(f) != k:
            continue
        nodes = [_dart_end_node(d, dart) for dart in f]
        if all(n in xids for n in nodes) and len(set(nodes)) == k:
            yield f, nodes


def _is_bigon(d: SpatialDiagram, x: str, y: str) -> bool:
    for f, nodes in _polygon_faces(d, 2):
        if set(nodes) == {x, y}:
            pats = [_arc_over_pattern(d, a) for a, _ in f]
            if any(p == (True, True) for p in pats) and any(p == (False, False) for p in pats):
                return True
    return False


def _triangle(d: SpatialDiagram, xs: Sequence[str]):
    for f, nodes in _polygon_faces(d, 3):
        if set(nodes) == set(xs):
            pats = sorted((_arc_over_pattern(d, a) for a, _ in f), key=lambda p: (p[0], p[1]))
            ups = [p for p in pats if p == (True, True)]
            downs = [p for p in pats if p == (False, False)]
            if len(ups) == 1 and len(downs) == 1:
                return f
    return None


def _move_III(d, gc, m):
    f = _triangle(d, m.site["crossings"])
    if f is None:
        raise PatternMismatch(f"{m.site['crossings']} do not bound an R3 triangle")
    swaps = []
    for arc, _ in f:
        sid, slot = _arc_slot(d, arc)
        swaps.append((sid, slot))
    for sid, slot in swaps:
        s = gc.strand(sid)
        n = len(s.passes)
        i, j = (slot - 1) % n, slot % n
        s.passes[i], s.passes[j] = s.passes[j], s.passes[i]
    return gc


def _vertex_corners(d: SpatialDiagram, face, vid: str) -> list[int]:
    return [k for k, dart in enumerate(face) if _dart_end_node(d, dart) == vid]


def _finger_over_vertex(d, gc, vid, dart, over):
    arc, da = dart
    if _is_free(d, arc):
        raise PatternMismatch("free arc")
    if vid in (_node_of(d, arc, HEAD), _node_of(d, arc, TAIL)):
        raise PatternMismatch("strand arc touches the vertex")
    face = _face_of(d, (arc, da))
    corners = _vertex_corners(d, face, vid)
    if len(corners) != 1:
        raise PatternMismatch("vertex must meet the face exactly once")
    k = corners[0]
    v = d.vertex(vid)
    arrive = face[k]
    e_in = ArcEnd(arrive[0], HEAD if arrive[1] > 0 else TAIL)
    i_in = v.ccw.index(e_in)
    deg = len(v.ccw)
    order = [(i_in - 1 - t) % deg for t in range(deg)]  # clockwise, starting at the leaving end
    ccw_edges = dict(gc.vertices)[vid]
    xs = _fresh(gc, deg)
    strand_passes = []
    inserts = []
    for x, idx in zip(xs, order):
        eid, end = ccw_edges[idx]
        t = 1 if end == TAIL else -1
        gc.signs[x] = t * da if over else -t * da
        strand_passes.append((x, over))
        s = gc.strand(eid)
        inserts.append((eid, 0 if end == TAIL else len(s.passes), [(x, not over)]))
    if da < 0:
        strand_passes.reverse()
    sid, slot = _arc_slot(d, arc)
    inserts.append((sid, slot, strand_passes))
    # inserts at the same strand must go from the back
    for sid2, slot2, new in sorted(inserts, key=lambda t: (-t[1])):
        gc.strand(sid2).passes[slot2:slot2] = new
    return gc


def _move_IV_V(d, gc, m):
    over = m.kind == "V"
    vid = m.site["vertex"]
    if m.direction == "apply":
        return _finger_over_vertex(d, gc, vid, tuple(m.site["dart"]), over)
    xs = list(m.site["crossings"])
    trial = gc.copy()
    for s in trial.strands:
        s.passes = [p for p in s.passes if p[0] not in xs]
    for x in xs:
        trial.signs.pop(x, None)
    d2 = from_gauss(trial)
    target = _gauss_key(gc, ignore_ids=True)
    for f in faces(d2):
        for dart in f:
            try:
                back = _finger_over_vertex(d2, trial.copy(), vid, dart, over)
            except PatternMismatch:
                continue
            if _gauss_key(back, ignore_ids=True) == target:
                return trial
    raise PatternMismatch(f"crossings {xs} are not a strand passing {'over' if over else 'under'} {vid}")


def _move_VI(d, gc, m):
    vid = m.site["vertex"]
    axis = int(m.site.get("axis", 0))
    sign = int(m.params.get("sign", 1))
    ccw = dict(gc.vertices)[vid]
    deg = len(ccw)
    fan = [ccw[(axis + 1 + i) % deg] for i in range(deg - 1)]  # right to left
    order = list(range(len(fan)))
    hits: dict[int, list[str]] = defaultdict(list)
    n_swaps = len(fan) * (len(fan) - 1) // 2
    names = _fresh(gc, n_swaps)
    k = 0
    for i in range(len(fan) - 1):
        for j in range(len(fan) - 1 - i):
            r, l = order[j], order[j + 1]
            x = names[k]
            k += 1
            tl = 1 if fan[l][1] == TAIL else -1
            tr = 1 if fan[r][1] == TAIL else -1
            over_l = sign > 0
            gc.signs[x] = -tl * tr if over_l else tl * tr
            hits[l].append((x, over_l))
            hits[r].append((x, not over_l))
            order[j], order[j + 1] = l, r
    for idx, (eid, end) in enumerate(fan):
        s = gc.strand(eid)
        seq = hits[idx]
        if end == TAIL:
            s.passes[0:0] = seq
        else:
            s.passes.extend(reversed(seq))
    new_ccw = [ccw[axis]] + list(reversed(fan))
    gc.vertices = [(v, new_ccw if v == vid else c) for v, c in gc.vertices]
    return gc


_MOVES = {"I": _move_I, "II": _move_II, "III": _move_III, "IV": _move_IV_V, "V": _move_IV_V, "VI": _move_VI}


def _gauss_key(gc: GaussCode, ignore_ids: bool = False):
    ren: dict[str, str] = {}
    if ignore_ids:
        for s in gc.strands:
            for x, _ in s.passes:
                ren.setdefault(x, f"#{len(ren)}")
    r = (lambda x: ren[x]) if ignore_ids else (lambda x: x)
    return (tuple((v, tuple(c)) for v, c in gc.vertices),
            tuple((s.id, s.tail, s.head, tuple((r(x), o) for x, o in s.passes)) for s in gc.strands),
            tuple(sorted((r(x), s) for x, s in gc.signs.items())))


def apply_move(d: SpatialDiagram, m: MoveSpec, allow_vi: bool = False) -> SpatialDiagram:
    if m.kind not in _MOVES:
        raise PatternMismatch(f"unknown move kind {m.kind!r}")
    if m.kind == "VI" and not allow_vi:
        raise PatternMismatch("move VI changes the rigid isotopy class; pass allow_vi=True")
    gc = _MOVES[m.kind](d, gauss_code(d), m)
    out = from_gauss(gc)
    errs = validate_diagram(out)
    if errs:
        raise PatternMismatch(f"move {m.kind} at {m.site} broke the diagram: {errs[0]}")
    return out


def apply_moves(d: SpatialDiagram, moves: Iterable[MoveSpec], allow_vi: bool = False) -> SpatialDiagram:
    for m in moves:
        d = apply_move(d, m, allow_vi=allow_vi)
    return d


def kink_effect(d: SpatialDiagram, m: MoveSpec) -> tuple[str, int] | None:
    """(strand id, writhe change) for a move I, else None."""
    if m.kind != "I":
        return None
    if m.direction == "apply":
        sid, _ = _arc_slot(d, m.site["arc"])
        return sid, int(m.params.get("sign", 1))
    x = m.site["crossing"]
    gc = gauss_code(d)
    for s in gc.strands:
        if any(c == x for c, _ in s.passes):
            return s.id, -gc.signs[x]
    raise PatternMismatch(x)


def candidate_moves(d: SpatialDiagram, kinds: Iterable[str] = ("I", "II", "III", "IV", "V"),
                    removals_only: bool = False) -> list[MoveSpec]:
    """Every removal site and R3 site; for growth moves, one spec per site with default params."""
    kinds = set(kinds)
    out: list[MoveSpec] = []
    gc = gauss_code(d)
    if "I" in kinds:
        for s in gc.strands:
            n = len(s.passes)
            for i in range(n):
                j = i + 1 if i + 1 < n else (0 if s.closed and n > 1 else None)
                if j is not None and s.passes[i][0] == s.passes[j][0]:
                    out.append(MoveSpec("I", {"crossing": s.passes[i][0]}, "undo"))
    if "II" in kinds:
        for f, nodes in _polygon_faces(d, 2):
            if _is_bigon(d, *nodes):
                out.append(MoveSpec("II", {"crossings": sorted(nodes, key=label_key)}, "undo"))
    if "III" in kinds:
        for f, nodes in _polygon_faces(d, 3):
            if _triangle(d, nodes) is not None:
                out.append(MoveSpec("III", {"crossings": sorted(nodes, key=label_key)}))
    out = list(dict.fromkeys(out))
    if removals_only:
        return out
    attached = [a for a in sorted(d.arcs, key=label_key) if not _is_free(d, a)]
    if "I" in kinds:
        out += [MoveSpec("I", {"arc": a}, params={"sign": 1, "first_over": True}) for a in attached]
    if "II" in kinds:
        for f in faces(d):
            for i, da in enumerate(f):
                for db in f[i + 1:]:
                    if da[0] != db[0]:
                        out.append(MoveSpec("II", {"darts": [list(da), list(db)]}, params={"first_over": True}))
    for kind in ("IV", "V"):
        if kind not in kinds:
            continue
        for v in d.vertices:
            for f in faces(d):
                if len(_vertex_corners(d, f, v.id)) != 1:
                    continue
                for dart in f:
                    ends = (_node_of(d, dart[0], HEAD), _node_of(d, dart[0], TAIL))
                    if v.id not in ends:
                        out.append(MoveSpec(kind, {"vertex": v.id, "dart": list(dart)}))
    return out


def random_move_sequence(d: SpatialDiagram, count: int, seed: int, allow_vi: bool = False,
                         kinds: Sequence[str] = ("I", "II", "III", "IV", "V")) -> tuple[SpatialDiagram, list[MoveSpec]]:
    """Apply ``count`` random moves; the log replays to the same result."""
    rng = random.Random(seed)
    kinds = [k for k in kinds if k != "VI" or allow_vi]
    log: list[MoveSpec] = []
    for _ in range(count):
        by_kind: dict[str, list[MoveSpec]] = defaultdict(list)
        for m in candidate_moves(d, [k for k in kinds if k != "VI"]):
            tag = m.kind if m.kind in ("III",) else f"{m.kind}:{m.direction}"
            by_kind[tag].append(m)
        if allow_vi and "VI" in kinds:
            for v in d.vertices:
                for ax in range(len(v.ccw)):
                    by_kind["VI"].append(MoveSpec("VI", {"vertex": v.id, "axis": ax}))
        tags = sorted(by_kind)
        while tags:
            tag = rng.choice(tags)
            m = rng.choice(by_kind[tag])
            if m.direction == "apply" and m.kind in ("I", "II", "VI"):
                key = "sign" if m.kind in ("I", "VI") else "first_over"
                params = dict(m.params)
                if m.kind == "I":
                    params = {"sign": rng.choice((1, -1)), "first_over": rng.random() < 0.5}
                elif m.kind == "II":
                    params = {"first_over": rng.random() < 0.5}
                else:
                    params = {key: rng.choice((1, -1))}
                m = replace(m, params=params)
            try:
                d = apply_move(d, m, allow_vi=allow_vi)
            except PatternMismatch:
                by_kind[tag].remove(m) if m in by_kind[tag] else None
                if not by_kind[tag]:
                    tags.remove(tag)
                continue
            log.append(m)
            break
        else:
            break
    return d, log


# --------------------------------------------------------------------------
# bundled example diagrams

def fixture_names() -> list[str]:
    from importlib.resources import files
    return sorted(p.name[:-5] for p in files("spatialslice").joinpath("fixtures").iterdir()
                  if p.name.endswith(".json"))


def load_fixture(name: str, validate: bool = True) -> SpatialDiagram:
    from importlib.resources import files
    text = files("spatialslice").joinpath("fixtures", f"{name}.json").read_text()
    return parse_sgd(text, validate=validate)
