import json
import random
from fractions import Fraction

import pytest

from boxspline.bernstein import BBPoly, to_bb
from boxspline.box_spline import DirectionTriple, TranslateId, refinement_mask
from boxspline.errors import NotInSpace, NotNested, RepresentationFailure
from boxspline.exact import RationalMatrix, rank
from boxspline.hierarchy import (
    HierarchicalDomain,
    _level_function_on,
    ancestor,
    build_hierarchy,
    descendants,
    evaluate_representation,
    hierarchical_completeness,
    hierarchical_system,
    independence_check,
    kraft_select,
    random_hierarchical_member,
    represent,
    restrict,
    restriction_matrix,
    translate_lambda,
)
from boxspline.mesh import (
    LatticePoint,
    Lower,
    MulticellDomain,
    Upper,
    child_triangles,
    domain_from_rect,
    parent_triangle,
    refine_domain,
)
from boxspline.poly import MonomialPoly
from boxspline.spline_space import SplineFunction, active_shifts, local_shifts

x, y = MonomialPoly.x(), MonomialPoly.y()


def l_shape():
    M1 = MulticellDomain(domain_from_rect(0, 0, 2, 2).triangles - {Lower(1, 1), Upper(1, 1)})
    M2 = domain_from_rect(0, 0, 4, 4, level=2)
    return build_hierarchy([M1, M2])


def test_ancestor_and_descendants():
    t = Upper(3, -2, 3)
    assert ancestor(t, 3) == t
    assert ancestor(t, 2) == parent_triangle(t)
    kids = descendants(Lower(0, 0), 3)
    assert len(kids) == 16 and all(ancestor(k, 1) == Lower(0, 0) for k in kids)
    with pytest.raises(ValueError):
        ancestor(Lower(0, 0), 2)


def test_rings_of_l_shape():
    H = l_shape()
    assert H.N == 2
    assert H.ring(1).triangles == H.level_domain(1).triangles
    # the level-2 ring is the refined missing square
    expected = set(child_triangles(Lower(1, 1))) | set(child_triangles(Upper(1, 1)))
    assert H.ring(2).triangles == expected
    assert len(H.triangles) == 6 + 8


def test_piece_owner_and_region():
    H = l_shape()
    assert H.piece_owner(child_triangles(Lower(0, 0))[2]) == Lower(0, 0)
    fine = child_triangles(Upper(1, 1))[0]
    assert H.piece_owner(fine) == fine
    assert H.piece_owner(Lower(7, 7)) is None
    assert H.in_region(fine, 2) and not H.in_region(fine, 1)
    assert H.in_region(child_triangles(Lower(0, 1))[0], 1)


def test_not_nested():
    M1 = domain_from_rect(0, 0, 2, 2)
    M2 = MulticellDomain(sorted(refine_domain(M1).triangles)[1:], 2)
    with pytest.raises(NotNested):
        build_hierarchy([M1, M2])
    with pytest.raises(NotNested):
        build_hierarchy([refine_domain(M1)])
    with pytest.raises(ValueError):
        HierarchicalDomain([])


def test_json_roundtrip():
    H = l_shape()
    again = HierarchicalDomain.from_json(json.dumps(H.to_json()))
    assert again.triangles == H.triangles and again.N == 2


def test_restriction_matches_direct_conversion():
    p = x ** 2 - 3 * x * y + Fraction(1, 2) * y + 2
    for T in (Lower(0, 0), Upper(2, -1)):
        for u in descendants(T, 3):
            assert restrict(to_bb(p, T, 2), u) == to_bb(p, u, 2)
    with pytest.raises(ValueError):
        restriction_matrix(Lower(0, 0), Upper(0, 0, 2), 2)


# ------------------------------------------------------------------ Kraft

def test_kraft_single_level_is_active_set():
    M = domain_from_rect(0, 0, 2, 2)
    H = build_hierarchy([M])
    for n in ((1, 1, 1), (2, 1, 1)):
        K = kraft_select(H, n)
        assert [b.v for b in K.levels[0]] == list(active_shifts(n, M))
        assert independence_check(K)
        dim_span, dim_space, ok, admissible = hierarchical_completeness(H, n)
        assert ok and admissible and dim_span == len(K)


def test_kraft_levels_avoid_coarser_domain():
    H = l_shape()
    n = DirectionTriple(2, 1, 1)
    K = kraft_select(H, n)
    refined = {c for t in H.level_domain(1).triangles for c in child_triangles(t)}
    for b in K.levels[1]:
        assert b.level == 2
        touched = [t for t in H.level_domain(2).triangles if b.v in local_shifts(t, n)]
        assert touched and not any(t in refined for t in touched)
    assert len(K) == len(K.levels[0]) + len(K.levels[1])


def test_independence_rejects_duplicates():
    H = l_shape()
    K = kraft_select(H, (1, 1, 1))
    assert independence_check(K)
    assert not independence_check(K.with_extra([K.levels[0][0]]))


def test_closed_rule_loses_completeness():
    H = l_shape()
    n = DirectionTriple(1, 1, 1)
    K = kraft_select(H, n, rule="closed")
    sys_ = hierarchical_system(H, n)
    vecs = [translate_lambda(b, H, n) for b in K.members]
    dim_span = rank(RationalMatrix(vecs, sys_.ncols))
    assert dim_span < sys_.ncols - sys_.rank()
    with pytest.raises(ValueError):
        kraft_select(H, n, rule="sideways")


def test_translate_lambda_rejects_coarse_overlap():
    H = l_shape()
    n = DirectionTriple(1, 1, 1)
    with pytest.raises(ValueError):
        translate_lambda(TranslateId(LatticePoint(0, 0), n, 2), H, n)


@pytest.mark.parametrize("n", [(1, 1, 1), (2, 1, 1), (1, 1, 2)])
def test_l_shape_completeness(n):
    dim_span, dim_space, ok, admissible = hierarchical_completeness(l_shape(), n)
    assert admissible and ok and dim_span == dim_space


def test_inadmissible_levels_flagged():
    M1 = MulticellDomain([Lower(0, 0), Upper(1, 1)])
    H = build_hierarchy([M1, refine_domain(M1)])
    assert hierarchical_completeness(H, (1, 1, 1))[3] is False


# ------------------------------------------------------- refinement link

@pytest.mark.parametrize("n", [(1, 1, 1), (2, 1, 1), (2, 2, 1)])
def test_coarse_translate_is_mask_combination(n):
    n = DirectionTriple.of(n)
    v = LatticePoint(1, 0)
    mask = refinement_mask(n)
    fine = {LatticePoint(2 * v[0] + w[0], 2 * v[1] + w[1]): c for w, c in mask.items()}
    for T in descendants(Lower(1, 0), 2) + descendants(Upper(0, 1), 2):
        assert _level_function_on({v: Fraction(1)}, 1, T, n) == _level_function_on(fine, 2, T, n)


# --------------------------------------------------------- representation

@pytest.mark.parametrize("n", [(1, 1, 1), (2, 1, 1)])
def test_represent_random_members(n):
    H = l_shape()
    rng = random.Random(2024)
    kernel = hierarchical_system(H, n).kernel()
    K = kraft_select(H, n)
    for _ in range(6):
        s = random_hierarchical_member(H, n, rng, kernel)
        coeffs = represent(s, H, n)
        assert len(coeffs) == 2
        for ell, cmap in enumerate(coeffs, start=1):
            assert set(cmap) <= {b.v for b in K.levels[ell - 1]}
        assert evaluate_representation(coeffs, H, n).pieces == s.pieces


def test_represent_constant_one():
    H = l_shape()
    n = DirectionTriple(2, 1, 1)
    one = SplineFunction(H, {T: to_bb(MonomialPoly.constant(1), T, n.degree) for T in H.triangles})
    coeffs = represent(one, H, n)
    K = kraft_select(H, n)
    assert coeffs[0] == {b.v: 1 for b in K.levels[0]}
    # the level-2 part fills in what the truncated level-1 sum misses
    assert all(0 < c <= 1 for c in coeffs[1].values())
    assert evaluate_representation(coeffs, H, n).pieces == one.pieces


def test_represent_rejects_non_members():
    H = l_shape()
    n = DirectionTriple(1, 1, 1)
    pieces = {T: BBPoly.zero(T, 1) for T in H.triangles}
    T = sorted(H.ring(2).triangles)[0]
    pieces[T] = to_bb(MonomialPoly.constant(1), T, 1)
    s = SplineFunction(H, pieces)
    with pytest.raises(NotInSpace):
        represent(s, H, n)
    with pytest.raises(RepresentationFailure):
        represent(s, H, n, check_membership=False)
