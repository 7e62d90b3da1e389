"""Type-I box splines built by exact directional convolution.

``B_(1,1,1)`` is the Courant hat on the star of ``(1,1)`` and
``B_n(x) = int_0^1 B_(n - e_i)(x - t e_i) dt``.  The integral is evaluated
per target triangle: the segment from ``x`` to ``x - e_i`` is split where it
crosses grid lines, and each crossing point is an affine function of ``x``,
so every piece of the result is an exact polynomial.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, comb, floor
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Sequence, Tuple

from .bernstein import BBPoly, evaluate as bb_evaluate, from_bb, to_bb
from .errors import InvalidTriple
from .mesh import (
    DIRECTIONS,
    LatticePoint,
    TriangleId,
    child_triangles,
    locate,
    star_positions,
    triangle_vertices,
)
from .poly import MonomialPoly


@dataclass(frozen=True, order=True)
class DirectionTriple:
    n1: int
    n2: int
    n3: int

    def __post_init__(self):
        for v in (self.n1, self.n2, self.n3):
            if not isinstance(v, int) or v < 1:
                raise InvalidTriple(f"direction multiplicities must be integers >= 1, got {tuple(self)}")

    def __iter__(self):
        return iter((self.n1, self.n2, self.n3))

    def __getitem__(self, k):
        return (self.n1, self.n2, self.n3)[k]

    @classmethod
    def of(cls, n) -> "DirectionTriple":
        if isinstance(n, DirectionTriple):
            return n
        if isinstance(n, str):
            return cls.parse(n)
        a, b, c = n
        return cls(int(a), int(b), int(c))

    @classmethod
    def parse(cls, text: str) -> "DirectionTriple":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise InvalidTriple(f"expected three comma-separated integers, got {text!r}")
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise InvalidTriple(f"expected three comma-separated integers, got {text!r}") from None
        return cls(*vals)

    @property
    def total(self) -> int:
        return self.n1 + self.n2 + self.n3

    @property
    def degree(self) -> int:
        return self.total - 2

    @property
    def smoothness(self) -> Tuple[int, int, int]:
        """Edge smoothness vector d(n) = (n2+n3-2, n1+n3-2, n1+n2-2)."""
        return (self.n2 + self.n3 - 2, self.n1 + self.n3 - 2, self.n1 + self.n2 - 2)

    @property
    def global_smoothness(self) -> int:
        return min(self.smoothness)

    @property
    def phi(self) -> int:
        return self.n1 * self.n2 + self.n1 * self.n3 + self.n2 * self.n3

    def minus(self, i: int) -> "DirectionTriple":
        vals = list(self)
        vals[i - 1] -= 1
        return DirectionTriple(*vals)

    def __str__(self):
        return f"({self.n1},{self.n2},{self.n3})"


def triples_up_to(max_n) -> list:
    m = DirectionTriple.of(max_n)
    return [DirectionTriple(a, b, c) for a in range(1, m.n1 + 1)
            for b in range(1, m.n2 + 1) for c in range(1, m.n3 + 1)]


class TranslateId(NamedTuple):
    v: LatticePoint
    n: DirectionTriple
    level: int = 1

    @property
    def reference_point(self) -> LatticePoint:
        return LatticePoint(1 - self.v[0], 1 - self.v[1])


class PiecewisePoly:
    """Map from triangles to BB polynomials of one common degree.

    Missing triangles are zero.  Equality ignores stored zero pieces.
    """

    __slots__ = ("degree", "pieces", "level")

    def __init__(self, degree: int, pieces: Mapping[TriangleId, BBPoly], level: int = 1):
        for t, f in pieces.items():
            if f.degree != degree:
                raise ValueError(f"piece on {t} has degree {f.degree}, expected {degree}")
            if f.triangle != t:
                raise ValueError(f"piece keyed by {t} is attached to {f.triangle}")
            if t.level != level:
                raise ValueError(f"piece on {t} is not on level {level}")
        self.degree = degree
        self.pieces: Dict[TriangleId, BBPoly] = dict(pieces)
        self.level = level

    @classmethod
    def from_monomials(cls, degree: int, polys: Mapping[TriangleId, MonomialPoly], level: int = 1) -> "PiecewisePoly":
        return cls(degree, {t: to_bb(p, t, degree) for t, p in polys.items() if not p.is_zero()}, level)

    def nonzero(self) -> Dict[TriangleId, BBPoly]:
        return {t: f for t, f in self.pieces.items() if not f.is_zero()}

    def support(self) -> frozenset:
        return frozenset(self.nonzero())

    def piece(self, t: TriangleId) -> BBPoly:
        f = self.pieces.get(t)
        return f if f is not None else BBPoly.zero(t, self.degree)

    def monomial(self, t: TriangleId) -> MonomialPoly:
        f = self.pieces.get(t)
        return from_bb(f) if f is not None else MonomialPoly()

    def evaluate(self, point) -> Fraction:
        """Value at a point; on a grid line the piece chosen by ``locate`` is
        used, which is harmless for continuous functions."""
        t = locate(point, self.level)
        f = self.pieces.get(t)
        return bb_evaluate(f, point) if f is not None else Fraction(0)

    __call__ = evaluate

    def __eq__(self, other):
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        return (self.degree == other.degree and self.level == other.level
                and self.nonzero() == other.nonzero())

    def __repr__(self):
        return f"PiecewisePoly(degree={self.degree}, level={self.level}, pieces={len(self.nonzero())})"

    def __add__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        return combine_pieces([(1, self), (1, other)])

    def __sub__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        return combine_pieces([(1, self), (-1, other)])

    def scaled(self, c) -> "PiecewisePoly":
        return PiecewisePoly(self.degree, {t: f.scaled(c) for t, f in self.pieces.items()}, self.level)

    def to_json(self) -> dict:
        return {"degree": self.degree, "level": self.level,
                "pieces": [self.pieces[t].to_json() for t in sorted(self.nonzero())]}

    @classmethod
    def from_json(cls, data) -> "PiecewisePoly":
        if isinstance(data, str):
            data = json.loads(data)
        level = int(data.get("level", 1))
        pieces = {}
        for item in data["pieces"]:
            item = dict(item)
            item.setdefault("level", level)
            f = BBPoly.from_json(item)
            pieces[f.triangle] = f
        return cls(int(data["degree"]), pieces, level)


def combine_pieces(terms: Iterable[Tuple[object, PiecewisePoly]]) -> PiecewisePoly:
    """Linear combination ``sum c * f`` of piecewise polynomials."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty combination")
    degree, level = terms[0][1].degree, terms[0][1].level
    acc: Dict[TriangleId, list] = {}
    for c, f in terms:
        if f.degree != degree or f.level != level:
            raise ValueError("cannot combine piecewise polynomials of different degree or level")
        c = Fraction(c)
        if not c:
            continue
        for t, p in f.pieces.items():
            cur = acc.get(t)
            if cur is None:
                acc[t] = [c * x for x in p.coeffs]
            else:
                for k, x in enumerate(p.coeffs):
                    if x:
                        cur[k] += c * x
    return PiecewisePoly(degree, {t: BBPoly(t, degree, tuple(v)) for t, v in acc.items() if any(v)}, level)


# ---------------------------------------------------------------- construction

def _hat_monomials() -> Dict[TriangleId, MonomialPoly]:
    centre = LatticePoint(1, 1)
    out = {}
    for t in star_positions(centre):
        k = triangle_vertices(t).index(centre)
        coeffs = [0, 0, 0]
        coeffs[k] = 1
        out[t] = from_bb(BBPoly(t, 1, tuple(coeffs)))
    return out


def _crossing_map(a: Tuple[int, int], k: int, e: Tuple[int, int]):
    """Affine map x -> x - ((a.x - k)/(a.e)) e as (X, Y) coefficient triples."""
    ae = a[0] * e[0] + a[1] * e[1]
    X = (1 - Fraction(e[0] * a[0], ae), -Fraction(e[0] * a[1], ae), Fraction(e[0] * k, ae))
    Y = (-Fraction(e[1] * a[0], ae), 1 - Fraction(e[1] * a[1], ae), Fraction(e[1] * k, ae))
    return X, Y


_IDENTITY = ((1, 0, 0), (0, 1, 0))
_LINE_NORMALS = ((1, 0), (0, 1), (-1, 1))  # x = k, y = k, y - x = k


def _centroid(t: TriangleId) -> Tuple[Fraction, Fraction]:
    vs = triangle_vertices(t)
    return Fraction(sum(v[0] for v in vs), 3), Fraction(sum(v[1] for v in vs), 3)


def convolve_monomials(pieces: Mapping[TriangleId, MonomialPoly], i: int) -> Dict[TriangleId, MonomialPoly]:
    """``x -> int_0^1 f(x - t e_i) dt`` for a level-1 piecewise polynomial."""
    e = DIRECTIONS[i]
    src = {t: p for t, p in pieces.items() if not p.is_zero()}
    if not src:
        return {}
    anti = {t: p.antiderivative(i) for t, p in src.items()}
    shift_map = ((1, 0, -e[0]), (0, 1, -e[1]))
    xs = [t.i for t in src]
    ys = [t.j for t in src]
    out: Dict[TriangleId, MonomialPoly] = {}
    normals = [a for a in _LINE_NORMALS if a[0] * e[0] + a[1] * e[1] != 0]
    for ti in range(min(xs), max(xs) + e[0] + 1):
        for tj in range(min(ys), max(ys) + e[1] + 1):
            for orient in "LU":
                T = TriangleId(ti, tj, orient)
                c = _centroid(T)
                cuts = []
                for a in normals:
                    ae = a[0] * e[0] + a[1] * e[1]
                    ac = a[0] * c[0] + a[1] * c[1]
                    # tau = (a.c - k) / ae in (0, 1)
                    lo, hi = sorted((ac - ae, ac))
                    for k in range(ceil(lo), floor(hi) + 1):
                        tau = (ac - k) / ae
                        if 0 < tau < 1:
                            cuts.append((tau, _crossing_map(a, k, e)))
                cuts.sort(key=lambda x: x[0])
                bounds = [(Fraction(0), _IDENTITY)] + cuts + [(Fraction(1), shift_map)]
                acc = MonomialPoly()
                for (ta, ma), (tb, mb) in zip(bounds, bounds[1:]):
                    tm = (ta + tb) / 2
                    S = locate((c[0] - tm * e[0], c[1] - tm * e[1]))
                    F = anti.get(S)
                    if F is None:
                        continue
                    acc = acc + F.compose_affine(*ma) - F.compose_affine(*mb)
                if not acc.is_zero():
                    out[T] = acc
    return out


_build_lock = threading.Lock()


@lru_cache(maxsize=None)
def _monomials(n: DirectionTriple) -> Dict[TriangleId, MonomialPoly]:
    if n == DirectionTriple(1, 1, 1):
        return _hat_monomials()
    if n.n3 > 1:
        return convolve_monomials(_monomials(n.minus(3)), 3)
    if n.n2 > 1:
        return convolve_monomials(_monomials(n.minus(2)), 2)
    return convolve_monomials(_monomials(n.minus(1)), 1)


def box_spline_monomials(n) -> Dict[TriangleId, MonomialPoly]:
    """Pieces of B_n in monomial form (level-1 coordinates)."""
    n = DirectionTriple.of(n)
    with _build_lock:
        return dict(_monomials(n))


def courant_hat() -> PiecewisePoly:
    return box_spline((1, 1, 1))


def convolve_direction(f: PiecewisePoly, i: int) -> PiecewisePoly:
    if f.level != 1:
        raise ValueError("convolution is implemented on the level-1 grid")
    polys = {t: from_bb(p) for t, p in f.nonzero().items()}
    return PiecewisePoly.from_monomials(f.degree + 1, convolve_monomials(polys, i))


def box_spline_in_order(n, order: Sequence[int]) -> PiecewisePoly:
    """B_n built by convolving along the directions listed in ``order``
    (a sequence containing i exactly n_i - 1 times)."""
    n = DirectionTriple.of(n)
    for i in (1, 2, 3):
        if list(order).count(i) != n[i - 1] - 1:
            raise InvalidTriple(f"order {order} does not match {n}")
    polys = _hat_monomials()
    for i in order:
        polys = convolve_monomials(polys, i)
    return PiecewisePoly.from_monomials(n.degree, polys)


_bb_cache: Dict[DirectionTriple, PiecewisePoly] = {}


def _cache_path(n: DirectionTriple) -> Optional[str]:
    d = os.environ.get("BOXSPLINE_CACHE_DIR")
    if not d:
        return None
    return os.path.join(d, f"B_{n.n1}_{n.n2}_{n.n3}.json")


def box_spline(n) -> PiecewisePoly:
    """B_n as a PiecewisePoly on the level-1 grid (memoised)."""
    n = DirectionTriple.of(n)
    hit = _bb_cache.get(n)
    if hit is not None:
        return hit
    path = _cache_path(n)
    f = None
    if path and os.path.exists(path):
        try:
            with open(path) as fh:
                f = PiecewisePoly.from_json(json.load(fh))
        except (OSError, ValueError, KeyError):
            f = None
    if f is None:
        f = PiecewisePoly.from_monomials(n.degree, box_spline_monomials(n))
        if path:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                json.dump(f.to_json(), fh, sort_keys=True)
            os.replace(tmp, path)
    # idempotent insert: concurrent builders produce equal values
    return _bb_cache.setdefault(n, f)


def support(n) -> frozenset:
    return box_spline(n).support()


def zonotope_triangles(n) -> frozenset:
    """Triangles inside the zonotope [0,e1]^n1 + [0,e2]^n2 + [0,e3]^n3."""
    n = DirectionTriple.of(n)
    a, b, c = n
    out = set()
    for i in range(0, a + c):
        for j in range(0, b + c):
            for o in "LU":
                t = TriangleId(i, j, o)
                cx, cy = _centroid(t)
                if 0 <= cx <= a + c and 0 <= cy <= b + c and -b <= cx - cy <= a:
                    out.add(t)
    return frozenset(out)


def translate(f: PiecewisePoly, v) -> PiecewisePoly:
    """The function x -> f(x - v) for a lattice vector v of f's level."""
    return PiecewisePoly(f.degree, {t.shifted(v): p.moved_to(t.shifted(v)) for t, p in f.pieces.items()}, f.level)


def at_level(f: PiecewisePoly, level: int) -> PiecewisePoly:
    """Dilate a level-1 piecewise polynomial onto the level-``level`` grid,
    i.e. x -> f(2**(level-1) x).  BB coefficients are unchanged."""
    if f.level != 1:
        raise ValueError("expected a level-1 function")
    pieces = {}
    for t, p in f.pieces.items():
        u = TriangleId(t.i, t.j, t.orient, level)
        pieces[u] = BBPoly(u, p.degree, p.coeffs)
    return PiecewisePoly(f.degree, pieces, level)


def translate_at_level(n, v, level: int = 1) -> PiecewisePoly:
    """B_n(2**(level-1) x - v)."""
    return at_level(translate(box_spline(n), v), level) if level != 1 else translate(box_spline(n), v)


def derivative_as_difference(n, i: int, coeffs: Mapping) -> Dict[LatticePoint, Fraction]:
    """Coefficients of D_{e_i} sum a_v B_n(. - v) in translates of B_(n - e_i).

    D_{e_i} B_n = B_m - B_m(. - e_i), hence the w-th coefficient is
    a_w - a_(w - e_i).
    """
    n = DirectionTriple.of(n)
    if n[i - 1] < 2:
        raise InvalidTriple(f"n_{i} = 1: no box spline with direction removed")
    e = DIRECTIONS[i]
    out: Dict[LatticePoint, Fraction] = {}
    for v, a in coeffs.items():
        a = Fraction(a)
        v = LatticePoint(*v)
        out[v] = out.get(v, Fraction(0)) + a
        w = v + e
        out[w] = out.get(w, Fraction(0)) - a
    return {v: a for v, a in out.items() if a}


def combine(n, coeffs: Mapping) -> PiecewisePoly:
    """sum a_v B_n(. - v) as a PiecewisePoly."""
    n = DirectionTriple.of(n)
    B = box_spline(n)
    terms = [(a, translate(B, v)) for v, a in coeffs.items() if a]
    if not terms:
        return PiecewisePoly(n.degree, {})
    return combine_pieces(terms)


def differentiate(f: PiecewisePoly, s: Sequence[int]) -> PiecewisePoly:
    """D_s applied piecewise (physical coordinates of f's level)."""
    deg = f.degree - sum(s)
    if deg < 0:
        return PiecewisePoly(0, {}, f.level)
    polys = {t: from_bb(p).derivative(tuple(s)) for t, p in f.pieces.items()}
    return PiecewisePoly.from_monomials(deg, polys, f.level)


def refinement_mask(n) -> Dict[LatticePoint, Fraction]:
    """Coefficients of 2**(2-|n|) (1+z1)^n1 (1+z2)^n2 (1+z1 z2)^n3."""
    n = DirectionTriple.of(n)
    scale = Fraction(1, 2 ** (n.total - 2)) if n.total >= 2 else Fraction(4)
    out: Dict[LatticePoint, Fraction] = {}
    for a in range(n.n1 + 1):
        for b in range(n.n2 + 1):
            for c in range(n.n3 + 1):
                v = LatticePoint(a + c, b + c)
                out[v] = out.get(v, Fraction(0)) + comb(n.n1, a) * comb(n.n2, b) * comb(n.n3, c) * scale
    return out


def dilate(f: PiecewisePoly) -> PiecewisePoly:
    """The level-1 function x -> f(x / 2)."""
    if f.level != 1:
        raise ValueError("expected a level-1 function")
    polys: Dict[TriangleId, MonomialPoly] = {}
    half = Fraction(1, 2)
    for P, p in f.nonzero().items():
        q = from_bb(p).compose_affine((half, 0, 0), (0, half, 0))
        for c in child_triangles(P):
            polys[TriangleId(c.i, c.j, c.orient, 1)] = q
    return PiecewisePoly.from_monomials(f.degree, polys)


def refinement_residual(n) -> PiecewisePoly:
    """B_n(./2) - sum c_v B_n(. - v); zero when the mask is right."""
    n = DirectionTriple.of(n)
    return dilate(box_spline(n)) - combine(n, refinement_mask(n))
