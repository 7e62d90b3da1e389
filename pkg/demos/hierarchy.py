"""
Hierarchical box splines on an L-shaped refinement
==================================================

Refine the missing corner of an L-shaped domain, pick translates level by
level and decompose a random smooth spline in that basis.
"""

import random

from boxspline.hierarchy import (
    build_hierarchy,
    hierarchical_completeness,
    independence_check,
    kraft_select,
    random_hierarchical_member,
    represent,
)
from boxspline.mesh import Lower, MulticellDomain, Upper, domain_from_rect

coarse = MulticellDomain(domain_from_rect(0, 0, 2, 2).triangles - {Lower(1, 1), Upper(1, 1)})
fine = domain_from_rect(0, 0, 4, 4, level=2)
H = build_hierarchy([coarse, fine])
print(H, "ring sizes:", [len(D) for D in H.D])

for n in ((1, 1, 1), (2, 1, 1)):
    K = kraft_select(H, n)
    span, space, equal, admissible = hierarchical_completeness(H, n)
    print(f"n={n}: per-level counts {K.to_json()['counts']}, independent={independence_check(K)}, "
          f"span={span}, space={space}")
    s = random_hierarchical_member(H, n, random.Random(1))
    coeffs = represent(s, H, n)
    for ell, c in enumerate(coeffs, start=1):
        print(f"  level {ell}:", {tuple(v): str(a) for v, a in c.items()})
