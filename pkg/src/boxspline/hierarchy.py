"""Hierarchical box splines on nested dyadic three-directional grids.

Levels are nested as regions: M^1 inside M^2 inside ... inside M^N = Omega,
with M^l a multicell domain of the level-l grid.  The ring D^l holds the
level-l triangles of M^l not covered by M^(l-1), and H is the union of the
rings.  A spline on H has one polynomial per H triangle, each in the V_n of
that triangle's level.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .bernstein import BBPoly, _multinomial, barycentric, bb_indices, cr_edge_conditions, dim_bb, from_bb, to_bb
from .box_spline import DirectionTriple, TranslateId, box_spline
from .errors import NotInSpace, NotNested, RepresentationFailure
from .exact import RationalMatrix, rank
from .mesh import (
    LatticePoint,
    MulticellDomain,
    TriangleId,
    child_triangles,
    edge_triangles,
    parent_triangle,
    shared_edge,
    triangle_edges,
    triangle_vertices,
)
from .spline_space import (
    LambdaSystem,
    SplineFunction,
    active_shifts,
    from_lambda,
    is_admissible,
    lambda_vector,
    local_basis_matrix,
    local_shifts,
)


def _sort_key(t: TriangleId):
    return (t.level, t.i, t.j, t.orient)


def ancestor(t: TriangleId, level: int) -> TriangleId:
    """The level-``level`` triangle containing t (t itself at its own level)."""
    if level > t.level:
        raise ValueError(f"{t} has no ancestor at finer level {level}")
    while t.level > level:
        t = parent_triangle(t)
    return t


def descendants(t: TriangleId, level: int) -> List[TriangleId]:
    out = [t]
    for _ in range(level - t.level):
        out = [c for u in out for c in child_triangles(u)]
    return sorted(out)


class HierarchicalDomain:
    """Nested level domains M[1..N] with rings D and the mixed mesh H."""

    def __init__(self, levels: Sequence[MulticellDomain]):
        if not levels:
            raise ValueError("a hierarchy needs at least one level")
        self.M: List[MulticellDomain] = list(levels)
        self.N = len(self.M)
        for ell, M in enumerate(self.M, start=1):
            bad = [t for t in M.triangles if t.level != ell]
            if bad:
                raise NotNested(f"{bad[0]} is listed at level {ell}")
        for ell in range(2, self.N + 1):
            for t in sorted(self.M[ell - 2].triangles):
                for c in child_triangles(t):
                    if c not in self.M[ell - 1].triangles:
                        raise NotNested(f"{t} at level {ell - 1} is not covered by level {ell} (missing {c})")
        self.D: List[MulticellDomain] = []
        for ell in range(1, self.N + 1):
            covered = self._refined(ell - 1)
            self.D.append(MulticellDomain((t for t in self.M[ell - 1].triangles if t not in covered), ell))
        self.triangles = frozenset(t for D in self.D for t in D.triangles)

    def _refined(self, ell: int) -> frozenset:
        """M[ell] refined once (empty for ell = 0)."""
        if ell < 1:
            return frozenset()
        return frozenset(c for t in self.M[ell - 1].triangles for c in child_triangles(t))

    def level_domain(self, ell: int) -> MulticellDomain:
        return self.M[ell - 1]

    def ring(self, ell: int) -> MulticellDomain:
        return self.D[ell - 1]

    def in_region(self, t: TriangleId, ell: int) -> bool:
        """Whether the (finer or equal level) triangle t lies in region(M[ell])."""
        if ell < 1:
            return False
        return t.level >= ell and ancestor(t, ell) in self.M[ell - 1].triangles

    def piece_owner(self, t: TriangleId) -> Optional[TriangleId]:
        """The H triangle containing t, or None if t is outside Omega."""
        u = t
        while True:
            if u in self.triangles:
                return u
            if u.level == 1:
                return None
            u = parent_triangle(u)

    def to_json(self) -> dict:
        return {"levels": [{"triangles": [[t.i, t.j, t.orient] for t in sorted(M.triangles)]} for M in self.M]}

    @classmethod
    def from_json(cls, data) -> "HierarchicalDomain":
        if isinstance(data, str):
            data = json.loads(data)
        levels = [MulticellDomain.from_json({**lv, "level": k}) for k, lv in enumerate(data["levels"], start=1)]
        return cls(levels)

    def __repr__(self):
        return f"HierarchicalDomain(N={self.N}, H={len(self.triangles)} triangles)"


def build_hierarchy(levels: Sequence[MulticellDomain]) -> HierarchicalDomain:
    return HierarchicalDomain(levels)


# ------------------------------------------------------------------ Kraft

@dataclass
class KraftBasis:
    hierarchy: HierarchicalDomain
    n: DirectionTriple
    levels: List[List[TranslateId]]
    extra: List[TranslateId] = field(default_factory=list)

    @property
    def members(self) -> List[TranslateId]:
        return [b for lv in self.levels for b in lv] + list(self.extra)

    def __len__(self):
        return len(self.members)

    def with_extra(self, translates: Iterable[TranslateId]) -> "KraftBasis":
        return KraftBasis(self.hierarchy, self.n, self.levels, list(self.extra) + list(translates))

    def to_json(self) -> dict:
        return {"levels": [[list(b.v) for b in lv] for lv in self.levels],
                "counts": [len(lv) for lv in self.levels]}


def _support_triangles(n: DirectionTriple, v, level: int) -> List[TriangleId]:
    return [TriangleId(s.i + v[0], s.j + v[1], s.orient, level) for s in box_spline(n).support()]


def kraft_select(H: HierarchicalDomain, n, rule: str = "open") -> KraftBasis:
    """Per level, the active translates whose support avoids M[l-1].

    ``rule="open"`` drops a translate when it is nonzero on some triangle
    of M[l-1]; ``rule="closed"`` also drops translates whose support only
    touches M[l-1] along edges or at vertices.
    """
    n = DirectionTriple.of(n)
    if rule not in ("open", "closed"):
        raise ValueError("rule must be 'open' or 'closed'")
    out = []
    for ell in range(1, H.N + 1):
        covered = H._refined(ell - 1)
        covered_pts = {p for t in covered for p in triangle_vertices(t)}
        chosen = []
        for v in active_shifts(n, H.M[ell - 1]):
            tris = _support_triangles(n, v, ell)
            if any(t in covered for t in tris):
                continue
            if rule == "closed" and any(p in covered_pts for t in tris for p in triangle_vertices(t)):
                continue
            chosen.append(TranslateId(LatticePoint(*v), n, ell))
        out.append(chosen)
    return KraftBasis(H, n, out)


# ------------------------------------------------------- level transfers

@lru_cache(maxsize=None)
def _restriction(orient: str, di: int, dj: int, child_orient: str, depth: int, degree: int) -> RationalMatrix:
    T = TriangleId(0, 0, orient, 1)
    u = TriangleId(di, dj, child_orient, 1 + depth)
    rows = []
    for k in range(dim_bb(degree)):
        unit = [Fraction(0)] * dim_bb(degree)
        unit[k] = Fraction(1)
        rows.append(list(to_bb(from_bb(BBPoly(T, degree, tuple(unit))), u, degree).coeffs))
    return RationalMatrix(rows, dim_bb(degree)).transpose()


def restriction_matrix(T: TriangleId, u: TriangleId, degree: int) -> RationalMatrix:
    """Matrix taking BB coefficients on T to those of the same polynomial
    on the descendant u (dimBB x dimBB)."""
    depth = u.level - T.level
    if depth < 0 or ancestor(u, T.level) != T:
        raise ValueError(f"{u} is not inside {T}")
    s = 2 ** depth
    return _restriction(T.orient, u.i - s * T.i, u.j - s * T.j, u.orient, depth, degree)


def restrict(f: BBPoly, u: TriangleId) -> BBPoly:
    if u == f.triangle:
        return f
    return BBPoly(u, f.degree, tuple(restriction_matrix(f.triangle, u, f.degree).apply(f.coeffs)))


def _restricted_basis(T: TriangleId, u: TriangleId, n: DirectionTriple) -> RationalMatrix:
    """Rows: BB coefficients on u of the local translates of T."""
    L = local_basis_matrix(T, n)
    if T == u:
        return L
    R = restriction_matrix(T, u, n.degree)
    return RationalMatrix([R.apply(row) for row in L.rows], L.ncols)


def _value_functional(t: TriangleId, degree: int, point) -> List[Fraction]:
    b = barycentric(t, point)
    return [_multinomial(degree, a) * b[0] ** a[0] * b[1] ** a[1] * b[2] ** a[2] for a in bb_indices(degree)]


def _physical(p: LatticePoint, level: int) -> Tuple[Fraction, Fraction]:
    s = Fraction(1, 2 ** (level - 1))
    return p[0] * s, p[1] * s


def _in_closed(t: TriangleId, point) -> bool:
    return all(b >= 0 for b in barycentric(t, point))


# ------------------------------------------------------ the global system

def hierarchical_system(H: HierarchicalDomain, n, d: Optional[Sequence[int]] = None) -> LambdaSystem:
    """Constraints on lambda-coordinates of the H pieces cutting out S^d(H, V_n).

    For every H triangle t of level l and every edge of t, the level-l
    neighbour u across that edge (when in M^l) must join t with C^{d_i}.  If
    u is itself in H the condition is the usual one; otherwise u lies in a
    coarser H triangle T and the polynomial of T restricted to u is used.
    Continuity is additionally imposed at every point where two H pieces
    touch in a single point.
    """
    n = DirectionTriple.of(n)
    d = tuple(n.smoothness if d is None else d)
    deg = n.degree
    sys_ = LambdaSystem(n, H.triangles)
    done = set()
    for t in sorted(H.triangles, key=_sort_key):
        ell = t.level
        for e in triangle_edges(t):
            a, b = edge_triangles(e)
            u = b if a == t else a
            if u not in H.M[ell - 1].triangles:
                continue
            r = min(max(d[e.etype - 1], 0), deg)
            if u in H.triangles:
                key = frozenset((t, u))
                if key in done:
                    continue
                done.add(key)
                sys_.add_pair_rows(cr_edge_conditions(e, t, u, deg, r), t, u,
                                   local_basis_matrix(t, n), local_basis_matrix(u, n))
            else:
                T = H.piece_owner(u)
                sys_.add_pair_rows(cr_edge_conditions(e, t, u, deg, r), t, T,
                                   local_basis_matrix(t, n), _restricted_basis(T, u, n))
    for t, u in _single_point_contacts(H):
        for p in _contact_points(t, u):
            a = _value_functional(t, deg, p)
            b = _value_functional(u, deg, p)
            C = RationalMatrix([a + [-x for x in b]], 2 * dim_bb(deg))
            sys_.add_pair_rows(C, t, u, local_basis_matrix(t, n), local_basis_matrix(u, n))
    return sys_


def _contact_points(t: TriangleId, u: TriangleId) -> List[Tuple[Fraction, Fraction]]:
    pts = {_physical(p, t.level) for p in triangle_vertices(t)} | {_physical(p, u.level) for p in triangle_vertices(u)}
    return sorted(p for p in pts if _in_closed(t, p) and _in_closed(u, p))


def _single_point_contacts(H: HierarchicalDomain) -> List[Tuple[TriangleId, TriangleId]]:
    out = []
    for t, u in combinations(sorted(H.triangles, key=_sort_key), 2):
        if t.level == u.level and shared_edge(t, u) is not None:
            continue
        pts = _contact_points(t, u)
        if len(pts) == 1:
            out.append((t, u))
    return out


def _translate_on(b: TranslateId, T: TriangleId, n: DirectionTriple) -> Optional[BBPoly]:
    """BB form on T (level >= b.level) of the translate, None if zero there."""
    P = ancestor(T, b.level)
    shifts = local_shifts(P, n)
    if b.v not in shifts:
        return None
    lam = [Fraction(int(s == b.v)) for s in shifts]
    return restrict(from_lambda(P, n, lam), T)


def translate_lambda(b: TranslateId, H: HierarchicalDomain, n) -> List[Fraction]:
    """lambda-coordinates over H of a translate that vanishes on the H
    triangles coarser than its own level."""
    n = DirectionTriple.of(n)
    sys_ = LambdaSystem(n, H.triangles)
    vec = [Fraction(0)] * sys_.ncols
    for T in sys_.triangles:
        if T.level < b.level:
            for c in descendants(T, b.level):
                if b.v in local_shifts(c, n):
                    raise ValueError(f"{b} is nonzero on the coarser H triangle {T}")
            continue
        f = _translate_on(b, T, n)
        if f is not None:
            vec[sys_.col[T]:sys_.col[T] + sys_.phi] = lambda_vector(f, n)
    return vec


def _fine_coefficients(b: TranslateId, H: HierarchicalDomain, n: DirectionTriple, finest: int) -> List[Fraction]:
    """BB coefficients of b over every level-``finest`` triangle of Omega."""
    out = []
    for T in sorted(H.triangles, key=_sort_key):
        for c in descendants(T, finest):
            if c.level >= b.level:
                f = _translate_on(b, c, n)
                out.extend(f.coeffs if f is not None else [Fraction(0)] * dim_bb(n.degree))
            else:
                out.extend([Fraction(0)] * dim_bb(n.degree))
    return out


def independence_check(K: KraftBasis, n=None) -> bool:
    """Full column rank of the BB-coefficient matrix of K's members over H."""
    n = DirectionTriple.of(n or K.n)
    members = K.members
    if not members:
        return True
    H = K.hierarchy
    finest = max(H.N, max(b.level for b in members))
    rows = [_fine_coefficients(b, H, n, finest) for b in members]
    return rank(RationalMatrix(rows, len(rows[0]))) == len(members)


def hierarchical_completeness(H: HierarchicalDomain, n, d=None) -> Tuple[int, int, bool, bool]:
    """(dim span K, dim S^d(H, V_n), equal, every level admissible)."""
    n = DirectionTriple.of(n)
    K = kraft_select(H, n)
    sys_ = hierarchical_system(H, n, d)
    vecs = [translate_lambda(b, H, n) for b in K.members]
    dim_span = rank(RationalMatrix(vecs, sys_.ncols)) if vecs else 0
    dim_space = sys_.ncols - sys_.rank()
    contained = all(sys_.satisfied(v) for v in vecs)
    admissible = all(is_admissible(M, n)[0] for M in H.M)
    return dim_span, dim_space, contained and dim_span == dim_space, admissible


# -------------------------------------------------------- representation

def spline_lambda(s: SplineFunction, H: HierarchicalDomain, n) -> List[Fraction]:
    n = DirectionTriple.of(n)
    sys_ = LambdaSystem(n, H.triangles)
    x: List[Fraction] = []
    for T in sys_.triangles:
        try:
            x.extend(lambda_vector(s.pieces[T], n))
        except (NotInSpace, ValueError) as exc:
            raise NotInSpace(f"piece on {T}: {exc}") from None
    return x


def random_hierarchical_member(H: HierarchicalDomain, n, rng: random.Random, kernel=None) -> SplineFunction:
    n = DirectionTriple.of(n)
    sys_ = LambdaSystem(n, H.triangles)
    if kernel is None:
        kernel = hierarchical_system(H, n).kernel()
    x = [Fraction(0)] * sys_.ncols
    for vec in kernel:
        c = rng.randint(-3, 3)
        if c:
            x = [a + c * b for a, b in zip(x, vec)]
    return SplineFunction(H, {T: from_lambda(T, n, x[sys_.col[T]:sys_.col[T] + sys_.phi]) for T in sys_.triangles})


def _level_function_on(coeffs: Mapping[LatticePoint, Fraction], ell: int, T: TriangleId, n: DirectionTriple) -> BBPoly:
    """sum coeffs[v] * (level-ell translate v) on T, level(T) >= ell."""
    P = ancestor(T, ell)
    lam = [coeffs.get(v, Fraction(0)) for v in local_shifts(P, n)]
    return restrict(from_lambda(P, n, lam), T)


def evaluate_representation(coeffs: Sequence[Mapping[LatticePoint, Fraction]], H: HierarchicalDomain, n) -> SplineFunction:
    """The spline sum_l sum_v coeffs[l-1][v] * beta^l_v restricted to H.

    Translates of level l are evaluated on H triangles of level >= l; the
    coarser pieces are covered by M^(l-1), where the sums produced by
    ``represent`` vanish.
    """
    n = DirectionTriple.of(n)
    pieces = {}
    for T in H.triangles:
        acc = BBPoly.zero(T, n.degree)
        for ell, cmap in enumerate(coeffs, start=1):
            if ell <= T.level and cmap:
                acc = acc + _level_function_on(cmap, ell, T, n)
        pieces[T] = acc
    return SplineFunction(H, pieces)


def represent(s: SplineFunction, H: HierarchicalDomain, n, check_membership: bool = True) -> List[Dict[LatticePoint, Fraction]]:
    """Level-by-level coefficients of s in the Kraft basis.

    At level l, h^l is the unique combination of level-l translates active
    on M^l matching s - (h^1 + ... + h^(l-1)) on M^l.  Raises
    RepresentationFailure if that residual is not in the span, if h^l does
    not vanish on M^(l-1), or if the final sum differs from s.
    """
    n = DirectionTriple.of(n)
    if check_membership:
        x = spline_lambda(s, H, n)
        if not hierarchical_system(H, n).satisfied(x):
            raise NotInSpace("spline violates the smoothness conditions of S^d(H, V_n)")
    K = kraft_select(H, n)
    coeffs: List[Dict[LatticePoint, Fraction]] = []
    for ell in range(1, H.N + 1):
        covered = H._refined(ell - 1)
        lam: Dict[LatticePoint, Fraction] = {}
        for u in sorted(H.M[ell - 1].triangles):
            T = H.piece_owner(u)
            target = restrict(s.pieces[T], u)
            for k, cmap in enumerate(coeffs, start=1):
                if cmap:
                    target = target - _level_function_on(cmap, k, u, n)
            if u in covered and not target.is_zero():
                raise RepresentationFailure(ell, f"residual nonzero on {u}, which lies in M^{ell - 1}")
            try:
                vec = lambda_vector(target, n)
            except (NotInSpace, ValueError):
                raise RepresentationFailure(ell, f"residual on {u} is not in V_n") from None
            for v, a in zip(local_shifts(u, n), vec):
                if v in lam and lam[v] != a:
                    raise RepresentationFailure(ell, f"inconsistent coefficient for shift {tuple(v)}: {lam[v]} vs {a}")
                lam[v] = a
        allowed = {b.v for b in K.levels[ell - 1]}
        bad = sorted(v for v, a in lam.items() if a and v not in allowed)
        if bad:
            raise RepresentationFailure(ell, f"nonzero coefficients outside K^{ell}: {[tuple(v) for v in bad]}")
        coeffs.append({v: a for v, a in sorted(lam.items()) if a})
    rebuilt = evaluate_representation(coeffs, H, n)
    for T in H.triangles:
        if rebuilt.pieces[T] != s.pieces[T]:
            raise RepresentationFailure(H.N, f"reconstruction differs on {T}")
    return coeffs


__all__ = [
    "HierarchicalDomain", "KraftBasis", "build_hierarchy", "kraft_select", "independence_check",
    "hierarchical_completeness", "hierarchical_system", "represent", "evaluate_representation",
    "restriction_matrix", "restrict", "translate_lambda", "random_hierarchical_member",
    "spline_lambda", "ancestor", "descendants",
]
