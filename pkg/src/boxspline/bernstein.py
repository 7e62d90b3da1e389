"""Bernstein-Bezier form of polynomials on grid triangles.

A level-``l`` triangle with origin ``(i, j)`` uses local coordinates
``X = 2**(l-1) * x - i`` and ``Y = 2**(l-1) * y - j``.  Its barycentric
coordinates, ordered like ``triangle_vertices``, are

* Lower: ``(1 - X, X - Y, Y)``
* Upper: ``(1 - Y, X, Y - X)``

BB coefficients are stored as a tuple in canonical order: ``(j, k, l)``
with ``j`` running from the degree down to 0, then ``k`` from ``d - j`` down
to 0.  Because BB coefficients only depend on the polynomial relative to
its triangle, translates and dilates of a piece keep their coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Dict, Iterable, List, Sequence, Tuple

from .errors import BadOrder, DegreeTooLow, NotAdjacent, NotVertexContact
from .exact import RationalMatrix
from .mesh import (
    EdgeId,
    TriangleId,
    common_vertices,
    opposite_vertex_index,
    shared_edge,
)
from .poly import MonomialPoly, monomials_up_to

Index3 = Tuple[int, int, int]


@lru_cache(maxsize=None)
def bb_indices(degree: int) -> Tuple[Index3, ...]:
    return tuple((j, k, degree - j - k) for j in range(degree, -1, -1)
                 for k in range(degree - j, -1, -1))


@lru_cache(maxsize=None)
def _index_position(degree: int) -> Dict[Index3, int]:
    return {a: n for n, a in enumerate(bb_indices(degree))}


def dim_bb(degree: int) -> int:
    return (degree + 1) * (degree + 2) // 2


def _multinomial(d: int, a: Index3) -> int:
    return factorial(d) // (factorial(a[0]) * factorial(a[1]) * factorial(a[2]))


def _local_barycentrics(orient: str) -> Tuple[MonomialPoly, MonomialPoly, MonomialPoly]:
    X, Y = MonomialPoly.x(), MonomialPoly.y()
    if orient == "L":
        return 1 - X, X - Y, Y
    return 1 - Y, X, Y - X


@lru_cache(maxsize=None)
def bernstein_basis_local(orient: str, degree: int) -> Tuple[MonomialPoly, ...]:
    """Bernstein polynomials of the reference triangle in local coordinates."""
    b = _local_barycentrics(orient)
    pw = [[bi ** e for e in range(degree + 1)] for bi in b]
    return tuple(pw[0][a[0]] * pw[1][a[1]] * pw[2][a[2]] * _multinomial(degree, a)
                 for a in bb_indices(degree))


@lru_cache(maxsize=None)
def _local_to_bb_matrix(orient: str, degree: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Rows indexed by BB index, columns by ``monomials_up_to(degree)``."""
    # homogenise: X and Y as linear forms in the barycentrics
    if orient == "L":
        X = {(0, 1, 0): 1, (0, 0, 1): 1}
        Y = {(0, 0, 1): 1}
    else:
        X = {(0, 1, 0): 1}
        Y = {(0, 1, 0): 1, (0, 0, 1): 1}
    one = {(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1}

    def mul(p, q):
        out: Dict[Index3, int] = {}
        for a, c in p.items():
            for b, e in q.items():
                k = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
                out[k] = out.get(k, 0) + c * e
        return out

    def power(p, e):
        out = {(0, 0, 0): 1}
        for _ in range(e):
            out = mul(out, p)
        return out

    pos = _index_position(degree)
    monos = monomials_up_to(degree)
    cols = []
    for a, b in monos:
        h = mul(mul(power(X, a), power(Y, b)), power(one, degree - a - b))
        col = [Fraction(0)] * len(pos)
        for idx, c in h.items():
            col[pos[idx]] = Fraction(c, _multinomial(degree, idx))
        cols.append(col)
    return tuple(tuple(r) for r in zip(*cols))


@lru_cache(maxsize=None)
def _bb_to_local_matrix(orient: str, degree: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Rows indexed by monomial, columns by BB index."""
    basis = bernstein_basis_local(orient, degree)
    monos = monomials_up_to(degree)
    return tuple(tuple(bp.coeffs.get(m, Fraction(0)) for bp in basis) for m in monos)


def _matvec(M, v) -> List[Fraction]:
    return [sum((a * x for a, x in zip(row, v) if a and x), Fraction(0)) for row in M]


def _scale(t: TriangleId) -> int:
    return 2 ** (t.level - 1)


def local_poly(p: MonomialPoly, t: TriangleId) -> MonomialPoly:
    """``p`` rewritten in the local coordinates of ``t``."""
    s = Fraction(1, _scale(t))
    return p.compose_affine((s, 0, t.i * s), (0, s, t.j * s))


def physical_poly(q: MonomialPoly, t: TriangleId) -> MonomialPoly:
    s = _scale(t)
    return q.compose_affine((s, 0, -t.i), (0, s, -t.j))


@dataclass(frozen=True)
class BBPoly:
    triangle: TriangleId
    degree: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        c = tuple(Fraction(x) for x in self.coeffs)
        if len(c) != dim_bb(self.degree):
            raise ValueError(f"degree {self.degree} needs {dim_bb(self.degree)} coefficients, got {len(c)}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, t: TriangleId, degree: int) -> "BBPoly":
        return cls(t, degree, (Fraction(0),) * dim_bb(degree))

    def coeff(self, j: int, k: int, l: int) -> Fraction:
        return self.coeffs[_index_position(self.degree)[(j, k, l)]]

    def coeff_map(self) -> Dict[Index3, Fraction]:
        return dict(zip(bb_indices(self.degree), self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "BBPoly") -> "BBPoly":
        _same_frame(self, other)
        return BBPoly(self.triangle, self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "BBPoly") -> "BBPoly":
        _same_frame(self, other)
        return BBPoly(self.triangle, self.degree, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scaled(self, c) -> "BBPoly":
        c = Fraction(c)
        return BBPoly(self.triangle, self.degree, tuple(a * c for a in self.coeffs))

    def moved_to(self, t: TriangleId) -> "BBPoly":
        """Same coefficients attached to another triangle of equal orientation."""
        if t.orient != self.triangle.orient:
            raise ValueError("orientation differs")
        return BBPoly(t, self.degree, self.coeffs)

    def to_json(self) -> dict:
        out = {"triangle": self.triangle.to_json(), "degree": self.degree,
               "coeffs": [{"jkl": list(a), "num": str(c.numerator), "den": str(c.denominator)}
                          for a, c in zip(bb_indices(self.degree), self.coeffs)]}
        if self.triangle.level != 1:
            out["level"] = self.triangle.level
        return out

    @classmethod
    def from_json(cls, data) -> "BBPoly":
        i, j, o = data["triangle"]
        t = TriangleId(int(i), int(j), o, int(data.get("level", 1)))
        d = int(data["degree"])
        cm = {tuple(e["jkl"]): Fraction(int(e["num"]), int(e["den"])) for e in data["coeffs"]}
        return cls(t, d, tuple(cm.get(a, Fraction(0)) for a in bb_indices(d)))


def _same_frame(f: BBPoly, g: BBPoly):
    if f.triangle != g.triangle or f.degree != g.degree:
        raise ValueError("BB polynomials live on different triangles or degrees")


def to_bb(p: MonomialPoly, t: TriangleId, degree: int) -> BBPoly:
    if p.degree() > degree:
        raise DegreeTooLow(f"polynomial of degree {p.degree()} cannot be written in degree {degree}")
    q = local_poly(p, t)
    vec = [q.coeffs.get(m, Fraction(0)) for m in monomials_up_to(degree)]
    return BBPoly(t, degree, tuple(_matvec(_local_to_bb_matrix(t.orient, degree), vec)))


def from_bb(f: BBPoly) -> MonomialPoly:
    vec = _matvec(_bb_to_local_matrix(f.triangle.orient, f.degree), f.coeffs)
    q = MonomialPoly(dict(zip(monomials_up_to(f.degree), vec)))
    return physical_poly(q, f.triangle)


def local_from_bb(f: BBPoly) -> MonomialPoly:
    vec = _matvec(_bb_to_local_matrix(f.triangle.orient, f.degree), f.coeffs)
    return MonomialPoly(dict(zip(monomials_up_to(f.degree), vec)))


@lru_cache(maxsize=None)
def reexpress_matrix(src_orient: str, dst_orient: str, di: int, dj: int, degree: int) -> RationalMatrix:
    """Matrix taking BB coefficients on a source triangle to the BB
    coefficients (on the destination triangle) of the same polynomial.

    ``(di, dj)`` is destination origin minus source origin, in lattice units
    of their common level.
    """
    to_bb_m = _local_to_bb_matrix(dst_orient, degree)
    monos = monomials_up_to(degree)
    cols = []
    for bp in bernstein_basis_local(src_orient, degree):
        # X_src = X_dst + di
        q = bp.compose_affine((1, 0, di), (0, 1, dj))
        cols.append(_matvec(to_bb_m, [q.coeffs.get(m, Fraction(0)) for m in monos]))
    return RationalMatrix([list(r) for r in zip(*cols)], len(cols))


def reexpress(f: BBPoly, t: TriangleId) -> BBPoly:
    """BB form on ``t`` of the polynomial extension of ``f``."""
    if t.level != f.triangle.level:
        return to_bb(from_bb(f), t, f.degree)
    R = reexpress_matrix(f.triangle.orient, t.orient, t.i - f.triangle.i, t.j - f.triangle.j, f.degree)
    return BBPoly(t, f.degree, tuple(R.apply(f.coeffs)))


def directional_derivative(p: MonomialPoly, s: Sequence[int]) -> MonomialPoly:
    return p.derivative(tuple(s))


def cr_edge_conditions(e: EdgeId, t: TriangleId, t2: TriangleId, degree: int, r: int) -> RationalMatrix:
    """Rows over ``(c_t, c_t2)`` whose kernel is the C^r joins across ``e``.

    The difference of the two polynomials is C^r across the edge exactly when
    its BB coefficients on ``t`` with opposite-vertex exponent <= r vanish.
    """
    if shared_edge(t, t2) != e:
        raise NotAdjacent(f"{t} and {t2} do not share the edge {e}")
    if r < -1 or r > degree:
        raise BadOrder(f"order {r} is outside [-1, {degree}]")
    n = dim_bb(degree)
    if r < 0:
        return RationalMatrix([], 2 * n)
    opp = opposite_vertex_index(t, e)
    R = reexpress_matrix(t2.orient, t.orient, t.i - t2.i, t.j - t2.j, degree)
    rows = []
    for row, a in enumerate(bb_indices(degree)):
        if a[opp] <= r:
            left = [Fraction(0)] * n
            left[row] = Fraction(1)
            rows.append(left + [-x for x in R.rows[row]])
    return RationalMatrix(rows, 2 * n)


@lru_cache(maxsize=None)
def _derivative_functional(orient: str, degree: int, s: Tuple[int, int, int], point: Tuple[int, int]) -> Tuple[Fraction, ...]:
    """Linear functional c -> D_s p(point) on BB coefficients (local units)."""
    return tuple(bp.derivative(s).evaluate(*point) for bp in bernstein_basis_local(orient, degree))


def vertex_conditions(t: TriangleId, t2: TriangleId, I: Iterable[Sequence[int]], degree: int) -> RationalMatrix:
    """Rows over ``(c_t, c_t2)`` expressing ``D_s f(v) = D_s f2(v)`` for s in I.

    Derivatives are taken in lattice units of the triangles' level; the
    common scale factor does not change the kernel.
    """
    common = common_vertices(t, t2) if t.level == t2.level else set()
    if len(common) != 1:
        raise NotVertexContact(f"{t} and {t2} do not meet in exactly one vertex")
    v = next(iter(common))
    return point_conditions(t, t2, v, I, degree)


def point_conditions(t: TriangleId, t2: TriangleId, v, I: Iterable[Sequence[int]], degree: int) -> RationalMatrix:
    """Like ``vertex_conditions`` at an explicit common vertex ``v``."""
    rows = []
    pv = (v[0] - t.i, v[1] - t.j)
    pv2 = (v[0] - t2.i, v[1] - t2.j)
    for s in sorted(set(tuple(x) for x in I)):
        if sum(s) > degree:
            continue
        a = _derivative_functional(t.orient, degree, s, pv)
        b = _derivative_functional(t2.orient, degree, s, pv2)
        rows.append(list(a) + [-x for x in b])
    return RationalMatrix(rows, 2 * dim_bb(degree))


def vanishing_order_on_edge(f: BBPoly, e: EdgeId) -> int:
    opp = opposite_vertex_index(f.triangle, e)
    lowest = f.degree + 1
    for a, c in zip(bb_indices(f.degree), f.coeffs):
        if c and a[opp] < lowest:
            lowest = a[opp]
    return lowest


def barycentric(t: TriangleId, point) -> Tuple[Fraction, Fraction, Fraction]:
    s = _scale(t)
    X = Fraction(point[0]) * s - t.i
    Y = Fraction(point[1]) * s - t.j
    if t.orient == "L":
        return 1 - X, X - Y, Y
    return 1 - Y, X, Y - X


def evaluate(f: BBPoly, point) -> Fraction:
    """de Casteljau evaluation at a point in physical coordinates."""
    b1, b2, b3 = barycentric(f.triangle, point)
    d = f.degree
    cur = f.coeff_map()
    for m in range(d, 0, -1):
        nxt = {}
        for j in range(m - 1, -1, -1):
            for k in range(m - 1 - j, -1, -1):
                l = m - 1 - j - k
                nxt[(j, k, l)] = b1 * cur[(j + 1, k, l)] + b2 * cur[(j, k + 1, l)] + b3 * cur[(j, k, l + 1)]
        cur = nxt
    return cur[(0, 0, 0)]


def taylor_derivative(p: MonomialPoly, s: Sequence[int], v) -> Fraction:
    """``D_s p(v)`` via Taylor coefficients at ``v``.

    ``D_s = sum_k C(s3, k) d/dx^(s1+k) d/dy^(s2+s3-k)`` and
    ``d/dx^a d/dy^b p(v) = a! b! T[a, b]``.
    """
    s1, s2, s3 = s
    T = p.translate(-Fraction(v[0]), -Fraction(v[1])).coeffs
    total = Fraction(0)
    for k in range(s3 + 1):
        a, b = s1 + k, s2 + s3 - k
        total += comb(s3, k) * factorial(a) * factorial(b) * T.get((a, b), Fraction(0))
    return total


def degree_raise(f: BBPoly) -> BBPoly:
    d = f.degree
    old = f.coeff_map()
    new = []
    for a in bb_indices(d + 1):
        acc = Fraction(0)
        for m in range(3):
            if a[m]:
                b = list(a)
                b[m] -= 1
                acc += Fraction(a[m], d + 1) * old[tuple(b)]
        new.append(acc)
    return BBPoly(f.triangle, d + 1, tuple(new))


def derivative_index_set(d: Sequence[int], types: Iterable[int], degree: int) -> List[Index3]:
    """All s with |s| <= degree in the intersection of the I_i^d, i in types."""
    conds = {1: lambda s: s[1] + s[2] <= d[0],
             2: lambda s: s[0] + s[2] <= d[1],
             3: lambda s: s[0] + s[1] <= d[2]}
    types = list(types)
    out = []
    for s in product(range(degree + 1), repeat=3):
        if sum(s) <= degree and all(conds[i](s) for i in types):
            out.append(s)
    return sorted(out)
