"""Abstract graph combinatorics: spanning forests, fundamental cycles, cuts, planarity.

Graphs here carry no embedding. Loops and multi-edges are allowed, and every
edge is oriented from its tail to its head.
"""

from __future__ import annotations

import itertools
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "AbstractGraph",
    "GraphError",
    "DegreeViolation",
    "DuplicateLabel",
    "SizeLimit",
    "SpanningForest",
    "FundamentalCycle",
    "KuratowskiWitness",
    "label_key",
    "validate_graph",
    "check_graph",
    "spanning_forest",
    "fundamental_cycles",
    "vertex_star_cuts",
    "minimal_edge_cuts",
    "is_cut_space_element",
    "is_planar",
    "is_fundamental_basis",
    "theta_graph",
]

_DIGITS = re.compile(r"(\d+)")


def label_key(label: str) -> tuple:
    """Natural sort key so that ``v2`` sorts before ``v10``."""
    parts = _DIGITS.split(label)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p != "")


class GraphError(ValueError):
    """Base class for graph validation failures."""


class DegreeViolation(GraphError):
    def __init__(self, vertex: str, degree: int):
        super().__init__(f"vertex {vertex!r} has degree {degree} (need >= 3)")
        self.vertex = vertex
        self.degree = degree


class DuplicateLabel(GraphError):
    def __init__(self, label: str):
        super().__init__(f"duplicate label {label!r}")
        self.label = label


class SizeLimit(GraphError):
    def __init__(self, count: int, bound: int):
        super().__init__(f"{count} edges exceeds the enumeration bound {bound}")
        self.count = count
        self.bound = bound


@dataclass(frozen=True)
class AbstractGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (label, tail, head)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    @property
    def edge_labels(self) -> tuple[str, ...]:
        return tuple(e[0] for e in self.edges)

    def endpoints(self, label: str) -> tuple[str, str]:
        for lab, t, h in self.edges:
            if lab == label:
                return t, h
        raise KeyError(label)

    def degree(self, v: str) -> int:
        return sum((t == v) + (h == v) for _, t, h in self.edges)

    def incident(self, v: str) -> list[str]:
        return [lab for lab, t, h in self.edges if v in (t, h)]

    def components(self) -> list[tuple[list[str], list[str]]]:
        """Connected components as (vertices, edge labels), in vertex order."""
        adj = defaultdict(list)
        for lab, t, h in self.edges:
            adj[t].append(h)
            adj[h].append(t)
        seen: set[str] = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            verts = []
            queue = deque([v])
            seen.add(v)
            while queue:
                u = queue.popleft()
                verts.append(u)
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            vset = set(verts)
            order = {x: i for i, x in enumerate(self.vertices)}
            verts.sort(key=order.__getitem__)
            comps.append((verts, [lab for lab, t, _ in self.edges if t in vset]))
        return comps

    def first_betti(self) -> int:
        return len(self.edges) - len(self.vertices) + len(self.components())


def theta_graph(n: int) -> AbstractGraph:
    """Two vertices ``A -> B`` joined by ``n + 1`` parallel edges ``v0..vn``."""
    return AbstractGraph(("A", "B"), tuple((f"v{i}", "A", "B") for i in range(n + 1)))


def validate_graph(g: AbstractGraph) -> list[GraphError]:
    errors: list[GraphError] = []
    for labels in (g.vertices, g.edge_labels):
        seen = set()
        for lab in labels:
            if lab in seen:
                errors.append(DuplicateLabel(lab))
            seen.add(lab)
    if set(g.vertices) & set(g.edge_labels):
        for lab in sorted(set(g.vertices) & set(g.edge_labels), key=label_key):
            errors.append(DuplicateLabel(lab))
    known = set(g.vertices)
    for lab, t, h in g.edges:
        for v in (t, h):
            if v not in known:
                errors.append(GraphError(f"edge {lab!r} uses unknown vertex {v!r}"))
    if errors:
        return errors
    for verts, edges in g.components():
        # a lone loop on a lone vertex is a link component
        if len(verts) == 1 and len(edges) == 1:
            continue
        for v in verts:
            deg = g.degree(v)
            if deg < 3:
                errors.append(DegreeViolation(v, deg))
    return errors


def check_graph(g: AbstractGraph) -> AbstractGraph:
    errors = validate_graph(g)
    if errors:
        raise errors[0]
    return g


@dataclass(frozen=True)
class SpanningForest:
    edges: frozenset[str]
    roots: tuple[str, ...]
    strategy: str = "lex-dfs"

    def as_dict(self) -> dict:
        return {"strategy": self.strategy, "roots": list(self.roots),
                "edges": sorted(self.edges, key=label_key)}


def spanning_forest(g: AbstractGraph) -> SpanningForest:
    """Depth-first forest, always taking the least-labelled unused edge first."""
    adj = defaultdict(list)
    for lab, t, h in g.edges:
        if t != h:
            adj[t].append((lab, h))
            adj[h].append((lab, t))
    for v in adj:
        adj[v].sort(key=lambda p: label_key(p[0]))
    tree: set[str] = set()
    roots = []
    seen: set[str] = set()
    for root in sorted(g.vertices, key=label_key):
        if root in seen:
            continue
        roots.append(root)
        seen.add(root)
        stack = [(root, iter(adj[root]))]
        while stack:
            v, it = stack[-1]
            for lab, w in it:
                if w not in seen:
                    seen.add(w)
                    tree.add(lab)
                    stack.append((w, iter(adj[w])))
                    break
            else:
                stack.pop()
    return SpanningForest(frozenset(tree), tuple(roots))


@dataclass(frozen=True)
class FundamentalCycle:
    edge: str                                   # defining non-tree edge
    walk: tuple[tuple[str, int], ...]           # (edge, +1 along orientation / -1 against)
    sigma: tuple[tuple[str, int], ...] = field(default=())

    def __post_init__(self):
        if not self.sigma:
            object.__setattr__(self, "sigma", tuple(sorted(self.walk, key=lambda p: label_key(p[0]))))

    @property
    def name(self) -> str:
        return f"K[{self.edge}]"

    def coefficient(self, edge: str) -> int:
        for e, s in self.walk:
            if e == edge:
                return s
        return 0

    @property
    def edge_set(self) -> frozenset[str]:
        return frozenset(e for e, _ in self.walk)

    def as_dict(self) -> dict:
        return {"edge": self.edge, "walk": [[e, s] for e, s in self.walk]}


def _tree_path(g: AbstractGraph, tree: frozenset[str], start: str, goal: str) -> list[tuple[str, int]]:
    adj = defaultdict(list)
    for lab, t, h in g.edges:
        if lab in tree:
            adj[t].append((lab, h, +1))
            adj[h].append((lab, t, -1))
    prev: dict[str, tuple[str, str, int] | None] = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v == goal:
            break
        for lab, w, s in adj[v]:
            if w not in prev:
                prev[w] = (v, lab, s)
                queue.append(w)
    path = []
    v = goal
    while prev[v] is not None:
        u, lab, s = prev[v]
        path.append((lab, s))
        v = u
    path.reverse()
    return path


def fundamental_cycles(g: AbstractGraph, t: SpanningForest | None = None) -> list[FundamentalCycle]:
    """One cycle per non-tree edge: the edge itself, then back through the tree.

    Cycles are grouped by component (in component order) and sorted by the
    defining edge label inside each component.
    """
    if t is None:
        t = spanning_forest(g)
    cycles = []
    for _, comp_edges in g.components():
        for lab in sorted((e for e in comp_edges if e not in t.edges), key=label_key):
            tail, head = g.endpoints(lab)
            walk = [(lab, +1)] + _tree_path(g, t.edges, head, tail)
            cycles.append(FundamentalCycle(lab, tuple(walk)))
    return cycles


def vertex_star_cuts(g: AbstractGraph) -> list[frozenset[str]]:
    """Stars of all but the last vertex of each component; loops left out."""
    stars = []
    for verts, _ in g.components():
        if len(verts) < 2:
            continue
        for v in verts[:-1]:
            star = frozenset(lab for lab, t, h in g.edges if (t == v) != (h == v))
            if star:
                stars.append(star)
    return stars


def _connected_without(vertices: Sequence[str], edges: Iterable[tuple[str, str, str]]) -> bool:
    if not vertices:
        return True
    adj = defaultdict(set)
    for _, t, h in edges:
        adj[t].add(h)
        adj[h].add(t)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        v = stack.pop()
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    return len(seen) == len(vertices)


def minimal_edge_cuts(g: AbstractGraph, max_edges: int = 16) -> list[frozenset[str]]:
    """All bonds, found by brute force over edge subsets of each component."""
    bonds = []
    for verts, comp_edges in g.components():
        records = [e for e in g.edges if e[0] in set(comp_edges) and e[1] != e[2]]
        if len(records) > max_edges:
            raise SizeLimit(len(records), max_edges)
        loops = [e for e in g.edges if e[0] in set(comp_edges) and e[1] == e[2]]
        for r in range(1, len(records) + 1):
            for subset in itertools.combinations(records, r):
                cut = {e[0] for e in subset}
                rest = [e for e in records if e[0] not in cut] + loops
                if _connected_without(verts, rest):
                    continue
                if all(_connected_without(verts, rest + [e]) for e in subset):
                    bonds.append(frozenset(cut))
    bonds.sort(key=lambda b: sorted(label_key(x) for x in b))
    return bonds


def is_cut_space_element(g: AbstractGraph, edges: Iterable[str]) -> bool:
    """True iff every cycle meets ``edges`` an even number of times."""
    cut = set(edges)
    if not cut or not cut <= set(g.edge_labels):
        return False
    return all(len(cut & c.edge_set) % 2 == 0 for c in fundamental_cycles(g))


@dataclass(frozen=True)
class KuratowskiWitness:
    edges: tuple[str, ...]
    kind: str  # "K5" or "K3,3"

    def as_dict(self) -> dict:
        return {"kind": self.kind, "edges": list(self.edges)}


def _simple_edges(records) -> list[tuple[str, str, str]]:
    seen = set()
    out = []
    for lab, t, h in records:
        key = frozenset((t, h))
        if t == h or key in seen:
            continue
        seen.add(key)
        out.append((lab, t, h))
    return out


def _genus_zero_embedding_exists(records) -> bool:
    """Exhaustive rotation-system search, one connected simple graph at a time."""
    if not records:
        return True
    verts = sorted({v for _, t, h in records for v in (t, h)}, key=label_key)
    if len(verts) <= 4:
        return True
    if len(records) > 3 * len(verts) - 6:
        return False
    nbrs = defaultdict(list)
    for i, (_, t, h) in enumerate(records):
        nbrs[t].append((i, h))
        nbrs[h].append((i, t))
    target = 2 - len(verts) + len(records)
    # rotations: first neighbour fixed, permute the rest
    choices = []
    for v in verts:
        first, rest = nbrs[v][0], nbrs[v][1:]
        choices.append([(first,) + p for p in itertools.permutations(rest)])
    for rot_choice in itertools.product(*choices):
        nxt = {}
        for v, rot in zip(verts, rot_choice):
            k = len(rot)
            for j, (i, w) in enumerate(rot):
                # dart arriving at v from w along edge i continues along the next edge
                nxt[(i, w, v)] = (rot[(j + 1) % k][0], v, rot[(j + 1) % k][1])
        seen = set()
        faces = 0
        for dart in nxt:
            if dart in seen:
                continue
            faces += 1
            d = dart
            while d not in seen:
                seen.add(d)
                d = nxt[d]
        if faces == target:
            return True
    return False


def _planar_records(records) -> bool:
    simple = _simple_edges(records)
    g = AbstractGraph(tuple(sorted({v for _, t, h in simple for v in (t, h)}, key=label_key)), tuple(simple))
    for _, comp_edges in g.components():
        comp = [e for e in simple if e[0] in set(comp_edges)]
        if not _genus_zero_embedding_exists(comp):
            return False
    return True


def is_planar(g: AbstractGraph) -> tuple[bool, KuratowskiWitness | None]:
    if _planar_records(g.edges):
        return True, None
    # strip edges while the remainder stays non-planar; what is left is a
    # subdivision of K5 or K3,3
    keep = list(_simple_edges(g.edges))
    for rec in list(keep):
        trial = [e for e in keep if e != rec]
        if not _planar_records(trial):
            keep = trial
    degs = defaultdict(int)
    for _, t, h in keep:
        degs[t] += 1
        degs[h] += 1
    branch = [v for v, k in degs.items() if k >= 3]
    kind = "K5" if len(branch) == 5 and all(degs[v] == 4 for v in branch) else "K3,3"
    return False, KuratowskiWitness(tuple(sorted((e[0] for e in keep), key=label_key)), kind)


def is_fundamental_basis(cycles: Sequence[FundamentalCycle], g: AbstractGraph | None = None) -> bool:
    """ℤ₂-basis of the cycle space in which every cycle owns a private edge."""
    if not cycles:
        return g is None or g.first_betti() == 0
    universe = sorted({e for c in cycles for e in c.edge_set}, key=label_key)
    rows = [sum(1 << i for i, e in enumerate(universe) if e in c.edge_set) for c in cycles]
    basis: list[int] = []  # kept sorted so leading bits decrease
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r == 0:
            return False
        basis.append(r)
        basis.sort(reverse=True)
    if g is not None and len(cycles) != g.first_betti():
        return False
    for c in cycles:
        others = set().union(*(o.edge_set for o in cycles if o is not c))
        if not (c.edge_set - others):
            return False
    return True
