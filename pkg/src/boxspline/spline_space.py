"""The local spaces V_n, active translates, spline membership and
dimension counts on multicell domains.

Spline pieces in V_n are handled in two coordinate systems: BB coefficients
on the triangle, and the lambda-coordinates of the (locally independent)
active translates on that triangle.  ``c = L^T lambda`` links them, where
``L`` is the local basis matrix.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .bernstein import (
    BBPoly,
    cr_edge_conditions,
    derivative_index_set,
    dim_bb,
    from_bb,
    point_conditions,
    to_bb,
    vertex_conditions,
)
from .box_spline import DirectionTriple, box_spline
from .errors import DegreeMismatch, NotInSpace
from .exact import RationalMatrix, kernel_basis, left_inverse_on_rows, rank
from .mesh import (
    LatticePoint,
    MulticellDomain,
    TriangleId,
    common_vertices,
    is_edge_connected,
    kissing_pairs,
    over_concave_vertices,
    shared_edge,
    smoothness_type,
    triangles_touch,
)
from .poly import MonomialPoly, monomials_up_to


# ---------------------------------------------------------------- local data

@dataclass(frozen=True)
class _LocalData:
    offsets: Tuple[LatticePoint, ...]      # shift v = t.origin + offset, sorted
    L: RationalMatrix                       # phi x dimBB
    pivots: Tuple[int, ...]
    inverse: RationalMatrix                 # inverse of L[:, pivots]
    annihilator: Tuple[Tuple[Fraction, ...], ...]  # rows w with w . c = 0 iff c in rowspace(L)


@lru_cache(maxsize=None)
def _local_data(orient: str, n: DirectionTriple) -> _LocalData:
    B = box_spline(n)
    entries = []
    for s, f in B.nonzero().items():
        if s.orient == orient:
            entries.append((LatticePoint(-s.i, -s.j), f.coeffs))
    entries.sort()
    offsets = tuple(e[0] for e in entries)
    L = RationalMatrix([list(e[1]) for e in entries], dim_bb(n.degree))
    pivots, inv = left_inverse_on_rows(L)
    ann = tuple(tuple(v) for v in kernel_basis(L))
    return _LocalData(offsets, L, tuple(pivots), inv, ann)


@dataclass(frozen=True)
class ActiveSet:
    n: DirectionTriple
    domain: MulticellDomain
    shifts: Tuple[LatticePoint, ...]

    def __len__(self):
        return len(self.shifts)

    def __iter__(self):
        return iter(self.shifts)


def local_shifts(t: TriangleId, n) -> Tuple[LatticePoint, ...]:
    """Shifts v (lexicographic) with B_n(. - v) nonzero on t, in t's level."""
    n = DirectionTriple.of(n)
    return tuple(t.origin + d for d in _local_data(t.orient, n).offsets)


def active_shifts(n, M: MulticellDomain) -> ActiveSet:
    """Supp_n(M): shifts whose translate is nonzero on some triangle of M.

    The support of a box spline is the closure of the set where it does not
    vanish, so a translate is active on M exactly when it is nonzero on some
    triangle of M; translates touching M only along its boundary vanish on
    M and are not counted.
    """
    n = DirectionTriple.of(n)
    shifts = set()
    for t in M.triangles:
        shifts.update(local_shifts(t, n))
    return ActiveSet(n, M, tuple(sorted(shifts)))


def one_ring(t: TriangleId, n) -> frozenset:
    return frozenset(LatticePoint(1 - v[0], 1 - v[1]) for v in local_shifts(t, n))


def local_basis_matrix(t: TriangleId, n) -> RationalMatrix:
    """Row k holds the BB coefficients on t of the k-th local translate."""
    return _local_data(t.orient, DirectionTriple.of(n)).L


@dataclass(frozen=True)
class LocalCoefficients:
    triangle: TriangleId
    n: DirectionTriple
    lam: Dict[LatticePoint, Fraction] = field(hash=False)

    @property
    def values(self) -> Tuple[Fraction, ...]:
        return tuple(self.lam[v] for v in sorted(self.lam))


def in_local_space(f: BBPoly, n) -> bool:
    n = DirectionTriple.of(n)
    if f.degree != n.degree:
        return False
    data = _local_data(f.triangle.orient, n)
    return all(sum((a * c for a, c in zip(w, f.coeffs) if a), Fraction(0)) == 0 for w in data.annihilator)


def lambda_vector(f: BBPoly, n) -> List[Fraction]:
    """lambda-coordinates of f in the order of ``local_shifts``."""
    n = DirectionTriple.of(n)
    if f.degree != n.degree:
        raise DegreeMismatch(f"piece has degree {f.degree}, V_n needs {n.degree}")
    if not in_local_space(f, n):
        raise NotInSpace(f"piece on {f.triangle} is not in V_{tuple(n)}")
    data = _local_data(f.triangle.orient, n)
    sel = [f.coeffs[p] for p in data.pivots]
    k = len(sel)
    return [sum((sel[i] * data.inverse.rows[i][j] for i in range(k) if sel[i]), Fraction(0)) for j in range(k)]


def lambda_extract(f: BBPoly, n) -> LocalCoefficients:
    n = DirectionTriple.of(n)
    vec = lambda_vector(f, n)
    return LocalCoefficients(f.triangle, n, dict(zip(local_shifts(f.triangle, n), vec)))


def from_lambda(t: TriangleId, n, lam: Sequence) -> BBPoly:
    """BB form on t of sum lam_k * (k-th local translate)."""
    n = DirectionTriple.of(n)
    L = _local_data(t.orient, n).L
    cols = dim_bb(n.degree)
    c = [Fraction(0)] * cols
    for a, row in zip(lam, L.rows):
        a = Fraction(a)
        if a:
            for k in range(cols):
                if row[k]:
                    c[k] += a * row[k]
    return BBPoly(t, n.degree, tuple(c))


def space_Vn_basis(n) -> List[MonomialPoly]:
    """phi(n) polynomials spanning V_n (restrictions to Lower(0,0))."""
    n = DirectionTriple.of(n)
    t = TriangleId(0, 0, "L")
    return [from_bb(BBPoly(t, n.degree, row)) for row in local_basis_matrix(t, n).rows]


# ------------------------------------------------------------- spline objects

@dataclass
class SplineFunction:
    """One BB polynomial per triangle of a domain (common degree)."""
    domain: object
    pieces: Dict[TriangleId, BBPoly]

    def __post_init__(self):
        tris = getattr(self.domain, "triangles", None)
        if tris is not None and set(self.pieces) != set(tris):
            raise ValueError("pieces must be given on exactly the domain triangles")
        degs = {f.degree for f in self.pieces.values()}
        if len(degs) > 1:
            raise DegreeMismatch(f"pieces have different degrees {sorted(degs)}")

    @property
    def degree(self) -> int:
        return next(iter(self.pieces.values())).degree if self.pieces else 0

    @classmethod
    def from_polys(cls, domain, polys: Mapping[TriangleId, MonomialPoly], degree: Optional[int] = None):
        if degree is None:
            degree = max((p.degree() for p in polys.values()), default=0)
            degree = max(degree, 0)
        return cls(domain, {t: to_bb(p, t, degree) for t, p in polys.items()})

    def polys(self) -> Dict[TriangleId, MonomialPoly]:
        return {t: from_bb(f) for t, f in self.pieces.items()}

    def to_json(self) -> dict:
        return {"pieces": [self.pieces[t].to_json() for t in sorted(self.pieces)]}

    @classmethod
    def from_json(cls, domain, data) -> "SplineFunction":
        pieces = {}
        for item in data["pieces"]:
            f = BBPoly.from_json(item)
            pieces[f.triangle] = f
        return cls(domain, pieces)


def index_set(d: Sequence[int], types: Iterable[int], degree: int) -> List[Tuple[int, int, int]]:
    """Finite part (|s| <= degree) of the intersection of I_i^d over ``types``.

    Each I_i^d is closed under decreasing s, so the finite part is exactly
    what acts on polynomials of this degree.
    """
    return derivative_index_set(d, types, degree)


def _basis_rank(vectors: List[Sequence[Fraction]], ncols: int) -> int:
    return rank(RationalMatrix(vectors, ncols)) if vectors else 0


def _in_span(c: Sequence[Fraction], basis: List[Sequence[Fraction]]) -> bool:
    if not any(c):
        return True
    ncols = len(c)
    return _basis_rank(basis + [list(c)], ncols) == _basis_rank(basis, ncols)


def _zero(M: RationalMatrix, v: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in M.apply(v))


def _check_degrees(f: SplineFunction, Vbasis: Sequence[MonomialPoly]) -> int:
    deg = f.degree
    vdeg = max((p.degree() for p in Vbasis), default=0)
    if vdeg > deg:
        raise DegreeMismatch(f"pieces of degree {deg} cannot hold polynomials of degree {vdeg}")
    return deg


def _pieces_in_V(f: SplineFunction, Vbasis: Sequence[MonomialPoly], deg: int) -> bool:
    for t, piece in f.pieces.items():
        basis = [list(to_bb(p, t, deg).coeffs) for p in Vbasis]
        if not _in_span(piece.coeffs, basis):
            return False
    return True


def _point_contacts(tris: Iterable[TriangleId]) -> List[Tuple[TriangleId, TriangleId, LatticePoint]]:
    """Pairs of same-level triangles meeting in exactly one vertex."""
    out = []
    for t, u in combinations(sorted(tris), 2):
        if t.level == u.level:
            common = common_vertices(t, u)
            if len(common) == 1:
                out.append((t, u, next(iter(common))))
    return out


def membership_edge_space(f: SplineFunction, d: Sequence[int], Vbasis: Sequence[MonomialPoly]) -> bool:
    """f in S^d(M, V): pieces in V, continuous, C^{d_i} across type-i edges."""
    deg = _check_degrees(f, Vbasis)
    if not _pieces_in_V(f, Vbasis, deg):
        return False
    M = f.domain
    for e, a, b in M.interior_edges():
        r = min(max(d[e.etype - 1], 0), deg)
        C = cr_edge_conditions(e, a, b, deg, r)
        if not _zero(C, f.pieces[a].coeffs + f.pieces[b].coeffs):
            return False
    # continuity where triangles only touch at a vertex
    for t, u in kissing_pairs(M):
        v = next(iter(common_vertices(t, u)))
        C = point_conditions(t, u, v, [(0, 0, 0)], deg)
        if not _zero(C, f.pieces[t].coeffs + f.pieces[u].coeffs):
            return False
    return True


def membership_strongly_regular(f: SplineFunction, d: Sequence[int], Vbasis: Sequence[MonomialPoly]) -> bool:
    """f in the strongly regular space: edge space plus, for every touching
    pair, agreement of D_s at the contact for s in the intersection of the
    I_i^d over the pair's smoothness type."""
    if not membership_edge_space(f, d, Vbasis):
        return False
    deg = f.degree
    tris = sorted(f.domain.triangles)
    for t, u in combinations(tris, 2):
        if not triangles_touch(t, u):
            continue
        e = shared_edge(t, u)
        if e is not None:
            r = min(max(d[e.etype - 1], 0), deg)
            C = cr_edge_conditions(e, t, u, deg, r)
        else:
            I = index_set(d, smoothness_type(t, u), deg)
            C = vertex_conditions(t, u, I, deg)
        if not _zero(C, f.pieces[t].coeffs + f.pieces[u].coeffs):
            return False
    return True


# ------------------------------------------------------------- admissibility

def is_admissible(M: MulticellDomain, n) -> Tuple[bool, List[dict]]:
    n = DirectionTriple.of(n)
    diagnostics: List[dict] = []
    for t, u in kissing_pairs(M):
        diagnostics.append({"kind": "kissing", "triangles": [t.to_json(), u.to_json()]})
    for v in over_concave_vertices(M):
        diagnostics.append({"kind": "over_concave", "vertex": list(v)})
    pieces_of: Dict[LatticePoint, List[TriangleId]] = {}
    for t in M.triangles:
        for v in local_shifts(t, n):
            pieces_of.setdefault(v, []).append(t)
    for v in sorted(pieces_of):
        if not is_edge_connected(pieces_of[v]):
            diagnostics.append({"kind": "disconnected_support", "shift": list(v)})
    return (not diagnostics), diagnostics


# ---------------------------------------------------------- dimension system

class LambdaSystem:
    """Linear constraints on the lambda-coordinates of a set of pieces.

    Each piece (a triangle of some level) owns phi(n) consecutive columns.
    """

    def __init__(self, n: DirectionTriple, triangles: Iterable[TriangleId]):
        self.n = n
        self.triangles = sorted(triangles, key=lambda t: (t.level, t.i, t.j, t.orient))
        self.phi = n.phi
        self.col = {t: k * self.phi for k, t in enumerate(self.triangles)}
        self.ncols = len(self.triangles) * self.phi
        self.rows: List[Dict[int, Fraction]] = []

    def add_pair_rows(self, C: RationalMatrix, t: TriangleId, u: TriangleId,
                      Lt: RationalMatrix, Lu: RationalMatrix):
        """Rows C @ blockdiag(Lt^T, Lu^T) placed on the columns of t and u.

        ``Lt``/``Lu`` map the lambda-coordinates of t/u to the BB vectors
        that C expects (phi x dimBB, one row per lambda coordinate).
        """
        m = Lt.ncols
        for row in C.rows:
            left, right = row[:m], row[m:]
            out: Dict[int, Fraction] = {}
            for base, part, L in ((self.col[t], left, Lt), (self.col[u], right, Lu)):
                nz = [(k, a) for k, a in enumerate(part) if a]
                if not nz:
                    continue
                for j, Lrow in enumerate(L.rows):
                    s = sum((a * Lrow[k] for k, a in nz if Lrow[k]), Fraction(0))
                    if s:
                        out[base + j] = out.get(base + j, Fraction(0)) + s
            out = {k: v for k, v in out.items() if v}
            if out:
                self.rows.append(out)

    def matrix(self) -> RationalMatrix:
        dense = []
        for r in self.rows:
            row = [Fraction(0)] * self.ncols
            for k, v in r.items():
                row[k] = v
            dense.append(row)
        return RationalMatrix(dense, self.ncols)

    def rank(self) -> int:
        return rank(self.matrix()) if self.rows else 0

    def kernel(self) -> List[List[Fraction]]:
        if not self.rows:
            return [[Fraction(int(i == j)) for j in range(self.ncols)] for i in range(self.ncols)]
        return kernel_basis(self.matrix())

    def satisfied(self, x: Sequence[Fraction]) -> bool:
        return all(sum((v * x[k] for k, v in r.items()), Fraction(0)) == 0 for r in self.rows)


def _edge_block(t: TriangleId, u: TriangleId, n: DirectionTriple, r: int) -> RationalMatrix:
    return cr_edge_conditions(shared_edge(t, u), t, u, n.degree, r)


def edge_space_system(M: MulticellDomain, n, d: Optional[Sequence[int]] = None) -> LambdaSystem:
    """Constraints cutting S^d(M, V_n) out of the per-triangle V_n pieces."""
    n = DirectionTriple.of(n)
    d = tuple(n.smoothness if d is None else d)
    sys_ = LambdaSystem(n, M.triangles)
    for e, a, b in M.interior_edges():
        r = min(max(d[e.etype - 1], 0), n.degree)
        sys_.add_pair_rows(_edge_block(a, b, n, r), a, b,
                           local_basis_matrix(a, n), local_basis_matrix(b, n))
    for t, u in kissing_pairs(M):
        v = next(iter(common_vertices(t, u)))
        C = point_conditions(t, u, v, [(0, 0, 0)], n.degree)
        sys_.add_pair_rows(C, t, u, local_basis_matrix(t, n), local_basis_matrix(u, n))
    return sys_


def span_vectors(M: MulticellDomain, n, shifts: Optional[Sequence[LatticePoint]] = None) -> List[List[Fraction]]:
    """lambda-coordinate vectors (over M) of the active translates."""
    n = DirectionTriple.of(n)
    sys_ = LambdaSystem(n, M.triangles)
    shifts = active_shifts(n, M).shifts if shifts is None else shifts
    out = []
    for v in shifts:
        vec = [Fraction(0)] * sys_.ncols
        for t in sys_.triangles:
            loc = local_shifts(t, n)
            if v in loc:
                vec[sys_.col[t] + loc.index(v)] = Fraction(1)
        out.append(vec)
    return out


def completeness_check(M: MulticellDomain, n, d: Optional[Sequence[int]] = None) -> Tuple[int, int, bool]:
    """(dim span of active translates on M, dim S^d(M, V_n), equal)."""
    n = DirectionTriple.of(n)
    if not M.triangles:
        return 0, 0, True
    sys_ = edge_space_system(M, n, d)
    vecs = span_vectors(M, n)
    dim_span = _basis_rank(vecs, sys_.ncols)
    dim_space = sys_.ncols - sys_.rank()
    contained = all(sys_.satisfied(v) for v in vecs)
    return dim_span, dim_space, contained and dim_span == dim_space


def spline_from_lambda(M: MulticellDomain, n, x: Sequence[Fraction]) -> SplineFunction:
    n = DirectionTriple.of(n)
    sys_ = LambdaSystem(n, M.triangles)
    pieces = {t: from_lambda(t, n, x[sys_.col[t]:sys_.col[t] + sys_.phi]) for t in sys_.triangles}
    return SplineFunction(M, pieces)


def random_space_member(M: MulticellDomain, n, rng: random.Random, d=None, kernel=None) -> SplineFunction:
    """Random element of S^d(M, V_n) from small integer kernel combinations."""
    n = DirectionTriple.of(n)
    if kernel is None:
        kernel = edge_space_system(M, n, d).kernel()
    ncols = len(M.triangles) * n.phi
    x = [Fraction(0)] * ncols
    for vec in kernel:
        c = rng.randint(-3, 3)
        if c:
            x = [a + c * b for a, b in zip(x, vec)]
    return spline_from_lambda(M, n, x)


def polynomial_space(degree: int) -> List[MonomialPoly]:
    """Monomial basis of P_degree."""
    return [MonomialPoly({m: 1}) for m in monomials_up_to(degree)]


__all__ = [
    "ActiveSet", "LocalCoefficients", "SplineFunction", "LambdaSystem",
    "active_shifts", "one_ring", "local_basis_matrix", "local_shifts",
    "lambda_extract", "lambda_vector", "from_lambda", "in_local_space",
    "space_Vn_basis", "membership_edge_space", "membership_strongly_regular",
    "index_set", "is_admissible", "completeness_check", "edge_space_system",
    "span_vectors", "spline_from_lambda", "random_space_member", "polynomial_space",
]
