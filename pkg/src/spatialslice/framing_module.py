"""The group of framing changes and the framed linking class.

Linking data of a graph with n independent cycles lives in the lattice of
symmetric integer n×n data, stored as a flat `SymVector`: the diagonal
entries first, then one merged entry per unordered pair (i < j) holding
A[i][j] + A[j][i].  Changing the framing by a full twist on an edge or by a
half-twist along every edge of a cut moves the linking data by a fixed
vector.  The quotient of the lattice by those vectors is the framing group
computed here, and the class of a diagram's linking data in it is zero
exactly when some framing makes every framed linking number vanish.

Integer linear algebra (Hermite and Smith forms) is exact and hand-written.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .abstract_graph import (AbstractGraph, FundamentalCycle, SpanningForest, fundamental_cycles,
                             minimal_edge_cuts, spanning_forest, vertex_star_cuts)
from .diagram import SpatialDiagram, underlying_graph
from .framing import Framing, LinkingMatrix, is_orientable, linking_matrix

__all__ = [
    "SymVector",
    "FrPresentation",
    "HermiteDecomposition",
    "SmithDecomposition",
    "FrGroup",
    "KClass",
    "VerificationFailed",
    "sym_from_matrix",
    "twist_vector",
    "cut_vector",
    "presentation",
    "bond_presentation",
    "hermite_normal_form",
    "solve_in_lattice",
    "smith_normal_form",
    "framing_module",
    "k_invariant",
    "find_zero_framing",
    "matmul",
    "identity",
]

Matrix = list[list[int]]


class VerificationFailed(RuntimeError):
    pass


# --------------------------------------------------------------------------
# symmetric coordinates

def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@dataclass(frozen=True)
class SymVector:
    n: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.n * (self.n + 1) // 2:
            raise ValueError("SymVector length must be n(n+1)/2")

    @staticmethod
    def zero(n: int) -> "SymVector":
        return SymVector(n, (0,) * (n * (n + 1) // 2))

    @staticmethod
    def from_parts(diag: Sequence[int], merged: dict[tuple[int, int], int]) -> "SymVector":
        n = len(diag)
        return SymVector(n, tuple(diag) + tuple(merged.get(p, 0) for p in _pairs(n)))

    def diag(self, i: int) -> int:
        return self.coords[i]

    def merged(self, i: int, j: int) -> int:
        i, j = min(i, j), max(i, j)
        return self.coords[self.n + _pairs(self.n).index((i, j))]

    def labels(self, names: Sequence[str] | None = None) -> list[str]:
        names = list(names) if names else [str(i + 1) for i in range(self.n)]
        return [f"d[{a}]" for a in names] + [f"m[{names[i]},{names[j]}]" for i, j in _pairs(self.n)]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "SymVector") -> "SymVector":
        return SymVector(self.n, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "SymVector":
        return SymVector(self.n, tuple(-a for a in self.coords))

    def __sub__(self, other: "SymVector") -> "SymVector":
        return self + (-other)


def sym_from_matrix(A: LinkingMatrix | Sequence[Sequence[int]]) -> SymVector:
    rows = A.rows if isinstance(A, LinkingMatrix) else A
    n = len(rows)
    return SymVector.from_parts([rows[i][i] for i in range(n)],
                                {(i, j): rows[i][j] + rows[j][i] for i, j in _pairs(n)})


def _sigma(c: FundamentalCycle, e: str) -> int:
    return c.coefficient(e)


def twist_vector(cycles: Sequence[FundamentalCycle], e: str) -> SymVector:
    s = [_sigma(c, e) for c in cycles]
    return SymVector.from_parts([x * x for x in s], {(i, j): 2 * s[i] * s[j] for i, j in _pairs(len(s))})


def cut_vector(cycles: Sequence[FundamentalCycle], cut: Iterable[str]) -> SymVector:
    cut = list(cut)
    s = [[_sigma(c, e) for e in cut] for c in cycles]
    diag = []
    for row in s:
        twice = sum(x * x for x in row)
        if twice % 2:
            raise ValueError(f"{sorted(cut)} meets a cycle an odd number of times; not a cut")
        diag.append(twice // 2)
    merged = {(i, j): sum(a * b for a, b in zip(s[i], s[j])) for i, j in _pairs(len(s))}
    return SymVector.from_parts(diag, merged)


@dataclass(frozen=True)
class FrPresentation:
    """Relation rows for the framing group, in SymVector coordinates."""

    n: int
    rows: tuple[tuple[int, ...], ...]
    sources: tuple[tuple[str, tuple[str, ...]], ...]  # ("twist", (e,)) or ("cut", edges)
    cycles: tuple[FundamentalCycle, ...]
    tree: SpanningForest | None = None

    @property
    def rank(self) -> int:
        return self.n * (self.n + 1) // 2

    def matrix(self) -> Matrix:
        return [list(r) for r in self.rows]

    def as_dict(self) -> dict:
        return {"ambient_rank": self.rank,
                "coordinates": SymVector.zero(self.n).labels([c.name for c in self.cycles]),
                "rows": self.matrix(),
                "sources": [{"kind": k, "edges": list(es)} for k, es in self.sources]}


def _build(g: AbstractGraph, t: SpanningForest | None, cuts: list[frozenset[str]]) -> FrPresentation:
    t = t or spanning_forest(g)
    cycles = tuple(fundamental_cycles(g, t))
    rows, sources = [], []
    for e in g.edge_labels:
        rows.append(twist_vector(cycles, e).coords)
        sources.append(("twist", (e,)))
    for cut in cuts:
        ordered = tuple(e for e in g.edge_labels if e in cut)
        rows.append(cut_vector(cycles, ordered).coords)
        sources.append(("cut", ordered))
    return FrPresentation(len(cycles), tuple(rows), tuple(sources), cycles, t)


def presentation(g: AbstractGraph, t: SpanningForest | None = None) -> FrPresentation:
    return _build(g, t, [frozenset(c) for c in vertex_star_cuts(g)])


def bond_presentation(g: AbstractGraph, t: SpanningForest | None = None) -> FrPresentation:
    """Same group, with every minimal edge cut as a relation instead of vertex stars."""
    return _build(g, t, [frozenset(c) for c in minimal_edge_cuts(g)])


# --------------------------------------------------------------------------
# exact integer normal forms

def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols)] for i in range(len(a))]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@dataclass(frozen=True)
class HermiteDecomposition:
    """U·M = H with U unimodular and H in row echelon form."""

    U: Matrix
    H: Matrix
    pivots: tuple[tuple[int, int], ...]  # (row, column)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def basis(self) -> Matrix:
        return [list(self.H[r]) for r, _ in self.pivots]


def hermite_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None) -> HermiteDecomposition:
    H = [list(map(int, r)) for r in M]
    m = len(H)
    n = ncols if ncols is not None else (len(H[0]) if H else 0)
    U = identity(m)
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        for i in range(r + 1, m):
            if H[i][c] == 0:
                continue
            a, b = H[r][c], H[i][c]
            g, x, y = _xgcd(a, b)
            if a == 0:
                H[r], H[i] = H[i], H[r]
                U[r], U[i] = U[i], U[r]
                continue
            p, q = a // g, b // g
            H[r], H[i] = ([x * u + y * v for u, v in zip(H[r], H[i])],
                          [-q * u + p * v for u, v in zip(H[r], H[i])])
            U[r], U[i] = ([x * u + y * v for u, v in zip(U[r], U[i])],
                          [-q * u + p * v for u, v in zip(U[r], U[i])])
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-v for v in H[r]]
            U[r] = [-v for v in U[r]]
        piv = H[r][c]
        for i in range(r):
            q = H[i][c] // piv
            if q:
                H[i] = [u - q * v for u, v in zip(H[i], H[r])]
                U[i] = [u - q * v for u, v in zip(U[i], U[r])]
        pivots.append((r, c))
        r += 1
    return HermiteDecomposition(U, H, tuple(pivots))


def solve_in_lattice(M: Sequence[Sequence[int]], v: Sequence[int],
                     hnf: HermiteDecomposition | None = None) -> list[int] | None:
    """Integer x with x·M = v, or None if v is outside the row lattice."""
    hnf = hnf or hermite_normal_form(M, len(v))
    rest = list(v)
    y = [0] * len(hnf.H)
    for r, c in hnf.pivots:
        piv = hnf.H[r][c]
        if rest[c] % piv:
            return None
        y[r] = rest[c] // piv
        if y[r]:
            rest = [a - y[r] * b for a, b in zip(rest, hnf.H[r])]
    if any(rest):
        return None
    return [sum(y[k] * hnf.U[k][j] for k in range(len(y))) for j in range(len(hnf.U))]


@dataclass(frozen=True)
class SmithDecomposition:
    """U·M·V = D, U and V unimodular, D diagonal with d1 | d2 | ..."""

    U: Matrix
    V: Matrix
    D: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x)

    @property
    def invariant_factors(self) -> list[int]:
        return [x for x in self.diagonal if x]


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None) -> SmithDecomposition:
    D = [list(map(int, r)) for r in M]
    m = len(D)
    n = ncols if ncols is not None else (len(D[0]) if D else 0)
    U, V = identity(m), identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row dst += k * row src
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in D:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        done = False
            if not done:
                nz = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]] + \
                     [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j]]
                _, i, j = min(nz)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]]
            if not bad:
                break
            add_row(t, bad[0][0], 1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return SmithDecomposition(U, V, D)


# --------------------------------------------------------------------------
# the framing group

@dataclass(frozen=True)
class FrGroup:
    torsion: tuple[int, ...]
    free_rank: int
    presentation: FrPresentation
    smith: SmithDecomposition

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    def describe(self) -> str:
        if self.is_trivial:
            return "trivial group"
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts)

    def coordinates(self, v: SymVector) -> tuple[list[int], list[int]]:
        """Image of v: (residues mod each torsion factor, free coordinates)."""
        w = [sum(v.coords[k] * self.smith.V[k][j] for k in range(len(v.coords))) for j in range(len(v.coords))]
        diag = self.smith.diagonal
        r = self.smith.rank
        torsion = [w[i] % diag[i] for i in range(r) if diag[i] > 1]
        return torsion, w[r:]

    def as_dict(self) -> dict:
        return {"description": self.describe(), "torsion": list(self.torsion), "free_rank": self.free_rank,
                "invariant_factors": self.smith.invariant_factors}


def framing_module(g: AbstractGraph, t: SpanningForest | None = None,
                   pres: FrPresentation | None = None) -> FrGroup:
    pres = pres or presentation(g, t)
    snf = smith_normal_form(pres.matrix(), pres.rank)
    r = snf.rank
    torsion = tuple(d for d in snf.invariant_factors if d > 1)
    return FrGroup(torsion, pres.rank - r, pres, snf)


@dataclass(frozen=True)
class KClass:
    representative: SymVector
    torsion_coords: tuple[int, ...]
    free_coords: tuple[int, ...]
    zero: bool
    certificate: tuple[int, ...] | None  # relation-row coefficients, when zero
    group: FrGroup
    matrix: LinkingMatrix

    def as_dict(self) -> dict:
        names = [c.name for c in self.group.presentation.cycles]
        return {"zero": self.zero,
                "representative": dict(zip(self.representative.labels(names), self.representative.coords)),
                "linking_matrix": self.matrix.as_lists(),
                "cycles": names,
                "group": self.group.as_dict(),
                "torsion_coordinates": list(self.torsion_coords),
                "free_coordinates": list(self.free_coords),
                "certificate": list(self.certificate) if self.certificate is not None else None}


def k_invariant(d: SpatialDiagram, f: Framing, t: SpanningForest | None = None) -> KClass:
    g = underlying_graph(d)
    grp = framing_module(g, t)
    pres = grp.presentation
    A = linking_matrix(d, f, pres.cycles)
    rep = sym_from_matrix(A)
    cert = solve_in_lattice(pres.matrix(), rep.coords)
    tor, free = grp.coordinates(rep)
    zero = not any(tor) and not any(free)
    if zero != (cert is not None):
        raise VerificationFailed("Smith and Hermite membership tests disagree")
    return KClass(rep, tuple(tor), tuple(free), zero, tuple(cert) if cert is not None else None, grp, A)


def find_zero_framing(d: SpatialDiagram, f: Framing, t: SpanningForest | None = None,
                      k: KClass | None = None) -> Framing | None:
    """A framing with vanishing linking matrix, reached from f by twists and cuts."""
    k = k or k_invariant(d, f, t)
    if not k.zero:
        return None
    tw = f.as_map()
    for coef, (kind, edges) in zip(k.certificate, k.group.presentation.sources):
        if not coef:
            continue
        for e in edges:
            tw[e] = tw.get(e, 0) - (2 * coef if kind == "twist" else coef)
    f0 = Framing.of(f.diagram, tw)
    if not is_orientable(underlying_graph(d), f0):
        raise VerificationFailed("zero framing came out non-orientable")
    A0 = linking_matrix(d, f0, k.group.presentation.cycles)
    if not A0.is_zero():
        raise VerificationFailed(f"zero framing has linking matrix {A0.as_lists()}")
    return f0
