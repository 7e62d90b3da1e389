"""
Spline spaces and completeness
==============================

Count active translates, compare the span of the translates with the full
space of smooth splines, and reproduce two cases where they differ.
"""

from boxspline.box_spline import DirectionTriple, triples_up_to
from boxspline.mesh import Lower, MulticellDomain, Upper, domain_from_rect, star
from boxspline.poly import MonomialPoly
from boxspline.spline_space import (
    SplineFunction,
    active_shifts,
    completeness_check,
    is_admissible,
    membership_edge_space,
    space_Vn_basis,
)

x, y = MonomialPoly.x(), MonomialPoly.y()

# phi(n) = n1 n2 + n1 n3 + n2 n3 translates are nonzero on any one triangle
for n in triples_up_to((2, 2, 2)):
    print(tuple(n), "phi =", n.phi, " counted:", len(active_shifts(n, MulticellDomain([Lower(0, 0)]))))

# on admissible domains the active translates span every smooth spline
for name, M in (("star", star((0, 0))), ("3x3 block", domain_from_rect(0, 0, 3, 3))):
    for n in ((1, 1, 1), (2, 1, 1), (2, 2, 2)):
        ok, _ = is_admissible(M, n)
        print(f"{name:9s} n={n} admissible={ok} (span, space, equal) =", completeness_check(M, n))

# relaxing the smoothness breaks completeness: (0, f) across a diagonal edge
n = DirectionTriple(2, 1, 1)
M = MulticellDomain([Upper(0, 0), Lower(0, 0)])
f = 4 * (x - y) * y + 4 * (1 - x) * (x - y) + (x - y) ** 2
g = SplineFunction.from_polys(M, {Upper(0, 0): MonomialPoly(), Lower(0, 0): f}, 2)
V = space_Vn_basis(n)
print("(0, f) continuous:", membership_edge_space(g, (0, 0, 0), V))
print("(0, f) with the box spline smoothness:", membership_edge_space(g, n.smoothness, V))
print("C^0 space vs span:", completeness_check(M, n, (0, 0, 0)))
