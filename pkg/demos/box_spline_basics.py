"""
Box splines on the three-direction mesh
=======================================

Build a few box splines exactly, look at their Bernstein coefficients and
check the identities they satisfy.
"""

from fractions import Fraction

from boxspline import box_spline, refinement_mask
from boxspline.box_spline import DirectionTriple, combine, dilate, translate
from boxspline.mesh import Lower
from boxspline.spline_space import local_shifts

# the Courant hat is the piecewise linear spline with value 1 at (1,1)
hat = box_spline((1, 1, 1))
print("hat(1,1) =", hat((1, 1)), " hat(1/2,1/2) =", hat((Fraction(1, 2), Fraction(1, 2))))

# convolving once along e1 gives the quadratic C^0 / C^1 spline
B = box_spline((2, 1, 1))
n = DirectionTriple(2, 1, 1)
print(f"B_(2,1,1): degree {n.degree}, smoothness {n.smoothness}, {len(B.support())} triangles")
for t, f in sorted(B.nonzero().items()):
    print(" ", t, [str(c) for c in f.coeffs])

# the translates active on one triangle sum to one there
t = Lower(0, 0)
total = sum((translate(B, v).monomial(t) for v in local_shifts(t, n)), start=type(B.monomial(t))())
print("sum of active translates on", t, "=", total)

# two-scale relation: B(x/2) is a finite combination of integer translates
mask = refinement_mask(n)
print("mask:", {tuple(v): str(c) for v, c in sorted(mask.items())})
print("refinement identity holds:", combine(n, mask) == dilate(B))
