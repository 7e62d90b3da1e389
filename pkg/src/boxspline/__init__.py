"""Exact type-I (three-directional) box splines: construction, spline spaces,
contact characterisations and hierarchical bases.

All arithmetic is exact (``fractions.Fraction``).
"""

from .box_spline import DirectionTriple, PiecewisePoly, TranslateId, box_spline, refinement_mask
from .bernstein import BBPoly, from_bb, to_bb
from .errors import BoxSplineError
from .mesh import EdgeId, LatticePoint, Lower, MulticellDomain, TriangleId, Upper
from .poly import MonomialPoly
from .spline_space import SplineFunction, active_shifts, completeness_check, is_admissible

__version__ = "0.1.0"

__all__ = [
    "DirectionTriple", "PiecewisePoly", "TranslateId", "box_spline", "refinement_mask",
    "BBPoly", "from_bb", "to_bb", "BoxSplineError", "EdgeId", "LatticePoint", "Lower",
    "MulticellDomain", "TriangleId", "Upper", "MonomialPoly", "SplineFunction",
    "active_shifts", "completeness_check", "is_admissible",
]
