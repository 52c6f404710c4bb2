"""Classical invariants of link diagrams used as slice obstructions.

The Seifert surface from Seifert's algorithm is a thickened planar graph:
each Seifert circle becomes a chain of edges (a disk), each crossing a band
with one half-twist.  Its Seifert matrix is then the framed linking matrix
of that graph's fundamental cycles, computed by the same cabling code that
handles spatial graphs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .abstract_graph import fundamental_cycles, label_key
from .diagram import (HEAD, TAIL, ArcEnd, GaussCode, LinkDiagram, PatternMismatch, Strand, apply_move,
                      candidate_moves, faces, from_gauss, gauss_code, linking_number)
from .framing import Framing, linking_matrix

__all__ = [
    "SeifertMatrix",
    "LaurentPoly",
    "FoxMilnor",
    "seifert_surface_graph",
    "seifert_matrix",
    "signature",
    "determinant",
    "alexander_polynomial",
    "fox_milnor",
    "pairwise_linking",
    "split_pieces",
    "simplify",
    "knot_report",
]


# --------------------------------------------------------------------------
# Seifert surfaces

def split_pieces(ld: LinkDiagram) -> int:
    """Connected pieces of the diagram, counting crossingless loops."""
    parent: dict[str, str] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    gc = gauss_code(ld)
    for s in gc.strands:
        find(s.id)
        for x, _ in s.passes:
            parent[find(s.id)] = find("x:" + x)
    return len({find(s.id) for s in gc.strands})


def _seifert_circles(ld: LinkDiagram) -> tuple[list[list[tuple[str, int]]], list[list[str]]]:
    """Circles as lists of (crossing, turn) visits, turn +1 = left and -1 = right, plus their arcs."""
    loc = ld.end_locations()
    seen: set[str] = set()
    out, arcs_out = [], []
    arcs_in_use = [a for a in sorted(ld.arcs, key=label_key) if ArcEnd(a, HEAD) in loc]
    for start in arcs_in_use:
        if start in seen:
            continue
        circle, arcs = [], []
        a = start
        while a not in seen:
            seen.add(a)
            arcs.append(a)
            node, p = loc[ArcEnd(a, HEAD)]
            ccw = ld.node_ccw(node)
            if ccw[(p - 1) % 4].end == TAIL:
                nxt, turn = ccw[(p - 1) % 4], +1
            else:
                nxt, turn = ccw[(p + 1) % 4], -1
            circle.append((node, turn))
            a = nxt.arc
        out.append(circle)
        arcs_out.append(arcs)
    return out, arcs_out


def _outside_sides(ld: LinkDiagram, circles_arcs: list[list[str]]) -> list[int]:
    """For each circle, +1 if its outside (towards a fixed base face) is on its left, else -1."""
    fs = faces(ld)
    face_of = {dart: k for k, f in enumerate(fs) for dart in f}
    parent = list(range(len(fs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    loc = ld.end_locations()
    for c in ld.crossings:
        pairs = set()
        for p in range(4):
            if c.ccw[p].end == HEAD:
                o = (p - 1) % 4 if c.ccw[(p - 1) % 4].end == TAIL else (p + 1) % 4
                pairs.add(frozenset((p, o)))
        corners = []
        for i in range(4):
            if frozenset((i, (i + 1) % 4)) in pairs:
                continue
            ae = c.ccw[(i + 1) % 4]
            corners.append(face_of[(ae.arc, 1 if ae.end == HEAD else -1)])
        a, b = corners
        parent[find(a)] = find(b)
    adj: dict[int, list[int]] = {}
    sides = []
    for arcs in circles_arcs:
        left, right = find(face_of[(arcs[0], 1)]), find(face_of[(arcs[0], -1)])
        sides.append((left, right))
        adj.setdefault(left, []).append(right)
        adj.setdefault(right, []).append(left)
    root = find(0)
    depth = {root: 0}
    queue = [root]
    while queue:
        r = queue.pop()
        for q in adj.get(r, []):
            if q not in depth:
                depth[q] = depth[r] + 1
                queue.append(q)
    return [1 if depth[l] < depth[r] else -1 for l, r in sides]


def seifert_surface_graph(ld: LinkDiagram, band_sign: int = -1):
    """Planar graph diagram plus framing whose band surface is a Seifert surface.

    Each circle's disk is shrunk to a strip along the circle on the disk
    side.  Bands that reach into the disk side leave the strip on the outer
    side and pass back over it, since nested disks are stacked upwards.
    Band twist signs were fixed against the positive trefoil (signature -2).
    """
    gc = gauss_code(ld)
    circles, circle_arcs = _seifert_circles(ld)
    outside = _outside_sides(ld, circle_arcs)
    verts: list[tuple[str, list[tuple[str, str]]]] = []
    strands: dict[str, Strand] = {}
    band_ends: dict[str, list[str]] = {}
    twists: dict[str, int] = {}
    uturns: list[tuple[str, str, str, int]] = []  # (band, vertex, out edge, disk side)
    for ci, circle in enumerate(circles):
        names = [f"s{ci}v{k}" for k in range(len(circle))]
        chain = [f"s{ci}e{k}" for k in range(len(circle) - 1)]
        # the circle is cut once; two pendant stubs keep the band sides fixed at the cut
        stub_in, stub_out = f"s{ci}in", f"s{ci}out"
        for k, (x, turn) in enumerate(circle):
            band = f"b{x}"
            band_ends.setdefault(x, []).append(names[k])
            out = (chain[k], TAIL) if k < len(chain) else (stub_out, TAIL)
            back = (chain[k - 1], HEAD) if k > 0 else (stub_in, HEAD)
            band_end = (band, TAIL if len(band_ends[x]) == 1 else HEAD)
            side = -turn  # a left turn leaves the band on the right
            if side != outside[ci]:
                uturns.append((band, names[k], out[0], side))
                side = -side
            ends = [out, band_end, back] if side > 0 else [out, back, band_end]
            verts.append((names[k], ends))
        verts.append((f"s{ci}p", [(stub_in, TAIL)]))
        verts.append((f"s{ci}q", [(stub_out, HEAD)]))
        strands[stub_in] = Strand(stub_in, [], f"s{ci}p", names[0])
        strands[stub_out] = Strand(stub_out, [], names[-1], f"s{ci}q")
        for k, e in enumerate(chain):
            strands[e] = Strand(e, [], names[k], names[k + 1])
    for x, (u, v) in band_ends.items():
        strands[f"b{x}"] = Strand(f"b{x}", [], u, v)
        twists[f"b{x}"] = band_sign * gc.signs[x]
    signs = {}
    for n, (band, w, out, side) in enumerate(uturns):
        u = f"u{n}"
        leaving = strands[band].tail == w
        if leaving:
            strands[band].passes.insert(0, (u, True))
        else:
            strands[band].passes.append((u, True))
        strands[out].passes.insert(0, (u, False))
        beta = 1 if leaving else -1
        signs[u] = -beta if side > 0 else beta
        # passing back over the strip shows the band's other face
        twists[band] += signs[u]
    g = from_gauss(GaussCode(f"{ld.name}:seifert", verts, list(strands.values()), signs))
    return g, Framing.of(g.name, twists), len(circles)


@dataclass(frozen=True)
class SeifertMatrix:
    V: tuple[tuple[int, ...], ...]
    components: int
    pieces: int
    circles: int

    @property
    def size(self) -> int:
        return len(self.V)

    @property
    def genus(self) -> int:
        """Genus of the surface when the diagram is connected."""
        return (self.size - self.components + 1) // 2 if self.pieces == 1 else -1

    def as_lists(self) -> list[list[int]]:
        return [list(r) for r in self.V]


def seifert_matrix(ld: LinkDiagram) -> SeifertMatrix:
    pieces = split_pieces(ld)
    comps = len(ld.components)
    if not ld.crossings:
        return SeifertMatrix((), comps, pieces, comps)
    g, f, ncircles = seifert_surface_graph(ld)
    from .diagram import underlying_graph
    cycles = fundamental_cycles(underlying_graph(g))
    A = linking_matrix(g, f, cycles)
    return SeifertMatrix(A.rows, comps, pieces, ncircles + sum(1 for s in gauss_code(ld).strands if not s.passes))


def _sym(V: Sequence[Sequence[int]]):
    import sympy
    M = sympy.Matrix(V)
    return M + M.T


def signature(V: SeifertMatrix | Sequence[Sequence[int]]) -> int:
    rows = V.V if isinstance(V, SeifertMatrix) else V
    if not rows:
        return 0
    import sympy
    x = sympy.Symbol("x")
    coeffs = sympy.Poly(_sym(rows).charpoly(x).as_expr(), x).all_coeffs()

    def changes(cs):
        cs = [c for c in cs if c != 0]
        return sum(1 for a, b in zip(cs, cs[1:]) if (a > 0) != (b > 0))

    pos = changes(coeffs)
    n = len(coeffs) - 1
    neg = changes([c * (-1) ** (n - i) for i, c in enumerate(coeffs)])
    return pos - neg


def determinant(V: SeifertMatrix | Sequence[Sequence[int]]) -> int:
    if isinstance(V, SeifertMatrix):
        if V.pieces > 1:
            return 0
        rows = V.V
    else:
        rows = V
    if not rows:
        return 1
    return abs(int(_sym(rows).det()))


@dataclass(frozen=True)
class LaurentPoly:
    """Integer polynomial in t, normalised: lowest exponent 0, lowest coefficient positive."""

    coeffs: tuple[int, ...]

    @staticmethod
    def normalise(coeffs: Sequence[int]) -> "LaurentPoly":
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        k = 0
        while k < len(cs) and cs[k] == 0:
            k += 1
        cs = cs[k:]
        if cs and cs[0] < 0:
            cs = [-c for c in cs]
        return LaurentPoly(tuple(cs))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t: int) -> int:
        return sum(c * t ** k for k, c in enumerate(self.coeffs))

    def is_symmetric(self) -> bool:
        return self.coeffs == self.coeffs[::-1] or self.coeffs == tuple(-c for c in self.coeffs[::-1])

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            mag = abs(c)
            body = (str(mag) if (mag != 1 or not mono) else "") + mono
            terms.append(("-" if c < 0 else "+", body))
        s = "".join(f" {sg} {b}" for sg, b in terms).strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def as_sympy(self):
        import sympy
        t = sympy.Symbol("t")
        return sum(c * t ** k for k, c in enumerate(self.coeffs))


def alexander_polynomial(V: SeifertMatrix | Sequence[Sequence[int]]) -> LaurentPoly:
    if isinstance(V, SeifertMatrix):
        if V.pieces > 1:
            return LaurentPoly(())
        rows = V.V
    else:
        rows = V
    if not rows:
        return LaurentPoly((1,))
    import sympy
    t = sympy.Symbol("t")
    M = sympy.Matrix(rows)
    p = sympy.Poly(sympy.expand((M - t * M.T).det()), t)
    return LaurentPoly.normalise([int(c) for c in reversed(p.all_coeffs())])


# --------------------------------------------------------------------------
# Fox-Milnor

@dataclass(frozen=True)
class FoxMilnor:
    status: str  # "fails" | "passes_necessary" | "passes_full"
    determinant: int
    factor: LaurentPoly | None = None  # f with Δ = ±t^k f(t) f(1/t)
    refuted: bool = False  # exact factorisation shows no such f exists

    @property
    def obstructs(self) -> bool:
        return self.status == "fails" or self.refuted

    def as_dict(self) -> dict:
        return {"status": self.status, "determinant": self.determinant,
                "factor": str(self.factor) if self.factor is not None else None, "refuted": self.refuted}


def _reciprocal(p: LaurentPoly) -> LaurentPoly:
    return LaurentPoly.normalise(p.coeffs[::-1])


def fox_milnor(p: LaurentPoly) -> FoxMilnor:
    det = abs(p(-1))
    if p.is_zero:
        return FoxMilnor("passes_necessary", 0)
    square = math.isqrt(det) ** 2 == det
    import sympy
    t = sympy.Symbol("t")
    content, factors = sympy.factor_list(p.as_sympy(), t)
    mult: dict[LaurentPoly, int] = {}
    for fac, m in factors:
        q = LaurentPoly.normalise([int(c) for c in reversed(sympy.Poly(fac, t).all_coeffs())])
        if q.degree == 0:
            content *= q.coeffs[0] ** m
            continue
        mult[q] = mult.get(q, 0) + m
    ok = math.isqrt(abs(int(content))) ** 2 == abs(int(content))
    half: dict[LaurentPoly, int] = {}
    for q, m in mult.items():
        r = _reciprocal(q)
        if r == q:
            ok &= m % 2 == 0
            half[q] = m // 2
        elif mult.get(r, 0) != m:
            ok = False
        elif label_key(str(q.coeffs)) < label_key(str(r.coeffs)):
            half[q] = m
    if ok:
        f = sympy.Integer(math.isqrt(abs(int(content))))
        for q, m in half.items():
            f *= q.as_sympy() ** m
        fp = sympy.Poly(sympy.expand(f), t)
        fl = LaurentPoly.normalise([int(c) for c in reversed(fp.all_coeffs())])
        prod = sympy.Poly(sympy.expand(fl.as_sympy() * _reciprocal(fl).as_sympy()), t)
        if LaurentPoly.normalise([int(c) for c in reversed(prod.all_coeffs())]) == p:
            return FoxMilnor("passes_full", det, fl)
    if not square:
        return FoxMilnor("fails", det, refuted=True)
    return FoxMilnor("passes_necessary", det, refuted=True)


# --------------------------------------------------------------------------
# linking and simplification

def pairwise_linking(ld: LinkDiagram) -> list[list[int]]:
    n = len(ld.components)
    return [[0 if i == j else linking_number(ld, i, j) for j in range(n)] for i in range(n)]


def _reduce(ld: LinkDiagram) -> LinkDiagram:
    while True:
        for m in candidate_moves(ld, ("I", "II"), removals_only=True):
            if m.direction == "undo":
                ld = apply_move(ld, m)
                break
        else:
            return ld


def simplify(ld: LinkDiagram, budget: int = 2000, seed: int = 0) -> LinkDiagram:
    """Fewest-crossing diagram found by removals, R3 walks and occasional R2 detours."""
    rng = random.Random(seed)
    best = cur = _reduce(ld)
    stale = 0
    for _ in range(budget):
        if not best.crossings:
            break
        moves = [m for m in candidate_moves(cur, ("III",), removals_only=True)]
        if not moves or stale > 20:
            if rng.random() < 0.5 or not moves:
                growth = [m for m in candidate_moves(cur, ("II",)) if m.direction == "apply"]
                if growth and len(cur.crossings) < len(best.crossings) + 6:
                    m = rng.choice(growth)
                    try:
                        cur = apply_move(cur, type(m)(m.kind, m.site, m.direction,
                                                      {"first_over": rng.random() < 0.5}))
                    except PatternMismatch:
                        pass
                    stale = 0
                    continue
                cur, stale = best, 0
                continue
        m = rng.choice(moves)
        cur = _reduce(apply_move(cur, m))
        if len(cur.crossings) < len(best.crossings):
            best, stale = cur, 0
        else:
            stale += 1
    return best


def knot_report(kd: LinkDiagram) -> dict:
    V = seifert_matrix(kd)
    delta = alexander_polynomial(V)
    fm = fox_milnor(delta)
    return {"crossings": len(kd.crossings), "signature": signature(V), "determinant": determinant(V),
            "alexander": str(delta), "fox_milnor": fm.as_dict(), "obstructed": signature(V) != 0 or fm.obstructs}
