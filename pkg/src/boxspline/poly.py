"""Bivariate polynomials with exact rational coefficients in monomial form."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

Monomial = Tuple[int, int]


class MonomialPoly:
    """Finite sum of ``c * x**a * y**b`` stored as ``{(a, b): c}``.

    Zero coefficients are never stored, so two polynomials are equal
    exactly when their dicts are equal.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Monomial, object] = ()):
        clean: Dict[Monomial, Fraction] = {}
        for (a, b), c in dict(coeffs).items():
            c = Fraction(c)
            if c:
                clean[(int(a), int(b))] = clean.get((int(a), int(b)), Fraction(0)) + c
        self.coeffs = {k: v for k, v in clean.items() if v}

    @classmethod
    def _raw(cls, coeffs: Dict[Monomial, Fraction]) -> "MonomialPoly":
        p = cls.__new__(cls)
        p.coeffs = {k: v for k, v in coeffs.items() if v}
        return p

    @classmethod
    def constant(cls, c) -> "MonomialPoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "MonomialPoly":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "MonomialPoly":
        return cls({(0, 1): 1})

    @classmethod
    def linear(cls, a, b, c) -> "MonomialPoly":
        """``a*x + b*y + c``"""
        return cls({(1, 0): a, (0, 1): b, (0, 0): c})

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return MonomialPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MonomialPoly._raw({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MonomialPoly):
            c = Fraction(other)
            return MonomialPoly._raw({k: v * c for k, v in self.coeffs.items()})
        out: Dict[Monomial, Fraction] = {}
        for (a1, b1), c1 in self.coeffs.items():
            for (a2, b2), c2 in other.coeffs.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return MonomialPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = MonomialPoly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MonomialPoly.constant(other)
        return isinstance(other, MonomialPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for (a, b), c in sorted(self.coeffs.items(), key=lambda kv: (-sum(kv[0]), -kv[0][0])):
            mono = "*".join(s for s in (_pw("x", a), _pw("y", b)) if s)
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(terms)

    # queries --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((a + b for a, b in self.coeffs), default=-1)

    def evaluate(self, x, y) -> Fraction:
        x, y = Fraction(x), Fraction(y)
        return sum((c * x ** a * y ** b for (a, b), c in self.coeffs.items()), Fraction(0))

    __call__ = evaluate

    # calculus -------------------------------------------------------------
    def diff_x(self) -> "MonomialPoly":
        return MonomialPoly._raw({(a - 1, b): c * a for (a, b), c in self.coeffs.items() if a})

    def diff_y(self) -> "MonomialPoly":
        return MonomialPoly._raw({(a, b - 1): c * b for (a, b), c in self.coeffs.items() if b})

    def integrate_x(self) -> "MonomialPoly":
        return MonomialPoly._raw({(a + 1, b): c / (a + 1) for (a, b), c in self.coeffs.items()})

    def integrate_y(self) -> "MonomialPoly":
        return MonomialPoly._raw({(a, b + 1): c / (b + 1) for (a, b), c in self.coeffs.items()})

    def derivative(self, s: Iterable[int]) -> "MonomialPoly":
        """Mixed directional derivative along e1^s1 e2^s2 e3^s3.

        e1 = (1,0), e2 = (0,1), e3 = (1,1) so D_e3 = d/dx + d/dy.
        """
        s1, s2, s3 = s
        p = self
        for _ in range(s1):
            p = p.diff_x()
        for _ in range(s2):
            p = p.diff_y()
        for _ in range(s3):
            p = p.diff_x() + p.diff_y()
        return p

    def antiderivative(self, i: int) -> "MonomialPoly":
        """Some F with D_{e_i} F = self."""
        if i == 1:
            return self.integrate_x()
        if i == 2:
            return self.integrate_y()
        # in (u, w) = (x, y - x) the direction e3 is d/du
        q = self.compose_affine((1, 0, 0), (1, 1, 0))
        return q.integrate_x().compose_affine((1, 0, 0), (-1, 1, 0))

    def compose_affine(self, X, Y) -> "MonomialPoly":
        """Substitute x := X[0]*x + X[1]*y + X[2], y := Y[0]*x + Y[1]*y + Y[2]."""
        if not self.coeffs:
            return self
        lx = {k: Fraction(v) for k, v in zip(((1, 0), (0, 1), (0, 0)), X) if v}
        ly = {k: Fraction(v) for k, v in zip(((1, 0), (0, 1), (0, 0)), Y) if v}
        by_a: Dict[int, Dict[int, Fraction]] = {}
        for (a, b), c in self.coeffs.items():
            by_a.setdefault(a, {})[b] = c
        # Horner in x, inner Horner in y
        result: Dict[Monomial, Fraction] = {}
        for a in range(max(by_a), -1, -1):
            result = _mul_linear(result, lx)
            inner = by_a.get(a)
            if inner:
                q: Dict[Monomial, Fraction] = {}
                for b in range(max(inner), -1, -1):
                    q = _mul_linear(q, ly)
                    cb = inner.get(b)
                    if cb:
                        q[(0, 0)] = q.get((0, 0), 0) + cb
                for k, v in q.items():
                    result[k] = result.get(k, 0) + v
        return MonomialPoly._raw(result)

    def translate(self, dx, dy) -> "MonomialPoly":
        """The polynomial ``p(x - dx, y - dy)``."""
        return self.compose_affine((1, 0, -Fraction(dx)), (0, 1, -Fraction(dy)))

    def to_json(self):
        return [{"ab": [a, b], "num": str(c.numerator), "den": str(c.denominator)}
                for (a, b), c in sorted(self.coeffs.items())]

    @classmethod
    def from_json(cls, data) -> "MonomialPoly":
        return cls({(int(d["ab"][0]), int(d["ab"][1])): Fraction(int(d["num"]), int(d["den"]))
                    for d in data})


def _mul_linear(p: Dict[Monomial, Fraction], lin: Dict[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
    out: Dict[Monomial, Fraction] = {}
    for (a, b), c in p.items():
        for (da, db), l in lin.items():
            k = (a + da, b + db)
            out[k] = out.get(k, 0) + c * l
    return {k: v for k, v in out.items() if v}


def _lift(v) -> MonomialPoly:
    return v if isinstance(v, MonomialPoly) else MonomialPoly.constant(v)


def _pw(name: str, k: int) -> str:
    if k == 0:
        return ""
    return name if k == 1 else f"{name}^{k}"


def monomials_up_to(degree: int):
    """Monomial exponents (a, b) with a + b <= degree in a fixed order."""
    return [(a, t - a) for t in range(degree + 1) for a in range(t, -1, -1)]


def taylor_coefficients(p: MonomialPoly, v) -> Dict[Monomial, Fraction]:
    """Coefficients of p expanded around the point v."""
    return p.translate(-Fraction(v[0]), -Fraction(v[1])).coeffs
