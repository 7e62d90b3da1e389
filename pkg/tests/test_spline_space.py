import random
from fractions import Fraction

import pytest

from boxspline.bernstein import BBPoly, to_bb
from boxspline.box_spline import DirectionTriple, box_spline, translate, triples_up_to
from boxspline.errors import DegreeMismatch, NotInSpace
from boxspline.exact import RationalMatrix, rank, row_space_equal
from boxspline.mesh import Lower, MulticellDomain, Upper, domain_from_rect, star
from boxspline.poly import MonomialPoly
from boxspline.spline_space import (
    LambdaSystem,
    SplineFunction,
    active_shifts,
    completeness_check,
    edge_space_system,
    from_lambda,
    in_local_space,
    is_admissible,
    lambda_extract,
    lambda_vector,
    local_basis_matrix,
    local_shifts,
    membership_edge_space,
    membership_strongly_regular,
    polynomial_space,
    random_space_member,
    space_Vn_basis,
    span_vectors,
)

x, y = MonomialPoly.x(), MonomialPoly.y()


def bb_rows(polys, t, degree):
    return RationalMatrix([list(to_bb(p, t, degree).coeffs) for p in polys], len(to_bb(polys[0], t, degree).coeffs))


def lambda_of(s: SplineFunction, n) -> list:
    sys_ = LambdaSystem(DirectionTriple.of(n), s.domain.triangles)
    out = []
    for t in sys_.triangles:
        out.extend(lambda_vector(s.pieces[t], n))
    return out


def in_row_space(vec, rows) -> bool:
    if not any(vec):
        return True
    ncols = len(vec)
    base = rank(RationalMatrix(rows, ncols)) if rows else 0
    return rank(RationalMatrix(list(rows) + [vec], ncols)) == base


# ------------------------------------------------------------ local spaces

@pytest.mark.parametrize("n", triples_up_to((3, 3, 3)))
def test_phi_counts(n):
    assert len(active_shifts(n, MulticellDomain([Lower(0, 0)]))) == n.phi
    assert len(local_shifts(Upper(4, -1), n)) == n.phi
    assert rank(local_basis_matrix(Lower(0, 0), n)) == n.phi


def test_phi_222_is_twelve():
    assert len(active_shifts((2, 2, 2), MulticellDomain([Upper(0, 0)]))) == 12


def test_local_shifts_follow_translation():
    n = (2, 1, 1)
    base = local_shifts(Lower(0, 0), n)
    assert local_shifts(Lower(3, -2), n) == tuple((v[0] + 3, v[1] - 2) for v in base)
    assert list(base) == sorted(base)


def test_local_shifts_are_the_nonvanishing_translates():
    n = (2, 2, 1)
    t = Upper(1, 2)
    B = box_spline(n)
    hits = {(t.i - s.i, t.j - s.j) for s in B.support() if s.orient == t.orient}
    assert set(local_shifts(t, n)) == hits


def test_V211_matches_generators():
    # restrictions to Lower(0,0) of the quadratic box spline translates
    f1 = 2 * (x - y) * y + y ** 2
    f2 = 2 * (1 - x) * y + y ** 2
    f3 = (x - y) ** 2
    f4 = (1 - x) ** 2 + 4 * (1 - x) * (x - y) + (x - y) ** 2 + 2 * (1 - x) * y + 2 * (x - y) * y
    f5 = (1 - x) ** 2
    t = Lower(0, 0)
    ours = bb_rows(space_Vn_basis((2, 1, 1)), t, 2)
    theirs = bb_rows([f1, f2, f3, f4, f5], t, 2)
    assert rank(theirs) == 5
    assert row_space_equal(ours, theirs)


def test_lambda_roundtrip():
    rng = random.Random(3)
    for n in ((2, 1, 1), (2, 2, 1), (1, 2, 3)):
        for t in (Lower(0, 0), Upper(2, 1)):
            lam = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(DirectionTriple.of(n).phi)]
            f = from_lambda(t, n, lam)
            assert in_local_space(f, n)
            assert lambda_vector(f, n) == lam


def test_lambda_of_translate_is_unit_vector():
    n = (2, 2, 1)
    t = Upper(0, 0)
    for k, v in enumerate(local_shifts(t, n)):
        f = translate(box_spline(n), v).piece(t)
        assert lambda_vector(f, n) == [int(j == k) for j in range(len(local_shifts(t, n)))]


def test_lambda_errors():
    t = Lower(0, 0)
    with pytest.raises(DegreeMismatch):
        lambda_vector(to_bb(x, t, 1), (2, 1, 1))
    # x*y is quadratic but not in V_(2,1,1) since dim V = 5 < 6
    outside = [p for p in (x * y, x ** 2, y ** 2) if not in_local_space(to_bb(p, t, 2), (2, 1, 1))]
    assert outside
    with pytest.raises(NotInSpace):
        lambda_vector(to_bb(outside[0], t, 2), (2, 1, 1))


# ------------------------------------------------------ worked membership

TRIS = [Lower(1, 1), Upper(1, 0), Lower(0, 0), Upper(0, 0)]
F = [x ** 2, (x - y + 1) ** 2, (y - 2 * x) * (y - 2), 2 * (x - 1) * (y - x) + 2 * x - y ** 2]
G = [MonomialPoly(), y - 1, x ** 2 - 2 * x + y, x ** 2 - y]


def worked(polys):
    return SplineFunction.from_polys(MulticellDomain(TRIS), dict(zip(TRIS, polys)), 2)


def test_worked_example_f():
    s = worked(F)
    assert membership_edge_space(s, (0, 1, 0), polynomial_space(2))
    assert membership_strongly_regular(s, (0, 1, 0), polynomial_space(2))


def test_worked_example_g_edge_space():
    assert membership_edge_space(worked(G), (0, 1, 0), polynomial_space(2))


@pytest.mark.xfail(strict=True, reason="with e3 = (1,1) the e3-derivatives of g agree at (1,1)")
def test_worked_example_g_not_strongly_regular():
    assert not membership_strongly_regular(worked(G), (0, 1, 0), polynomial_space(2))


def test_membership_detects_broken_pieces():
    bad = list(F)
    bad[1] = bad[1] + (x - 1)  # breaks continuity with Lower(0,0) along x = 1
    assert not membership_edge_space(worked(bad), (0, 1, 0), polynomial_space(2))
    assert not membership_edge_space(worked(F), (0, 1, 0), polynomial_space(1) + [x * x])


def test_membership_degree_mismatch():
    s = SplineFunction.from_polys(MulticellDomain([Lower(0, 0)]), {Lower(0, 0): x}, 1)
    with pytest.raises(DegreeMismatch):
        membership_edge_space(s, (0, 0, 0), polynomial_space(2))


# ------------------------------------------------------- completeness

def l_shape():
    return MulticellDomain(domain_from_rect(0, 0, 2, 2).triangles - {Lower(1, 1), Upper(1, 1)})


DOMAINS = {
    "triangle": MulticellDomain([Lower(0, 0)]),
    "diamond": MulticellDomain([Lower(0, 0), Upper(0, 0)]),
    "star": star((0, 0)),
    "block": domain_from_rect(0, 0, 3, 3),
    "lshape": l_shape(),
}


@pytest.mark.parametrize("name", sorted(DOMAINS))
@pytest.mark.parametrize("n", [(1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 2)])
def test_completeness_on_admissible_domains(name, n):
    M = DOMAINS[name]
    assert is_admissible(M, n)[0]
    dim_span, dim_space, ok = completeness_check(M, n)
    assert ok and dim_span == dim_space


def test_dimension_of_single_triangle_and_empty():
    assert completeness_check(MulticellDomain([Upper(0, 0)]), (2, 2, 1)) == (8, 8, True)
    assert completeness_check(MulticellDomain([]), (2, 2, 1)) == (0, 0, True)


def test_inadmissible_domain_reported():
    kiss = MulticellDomain([Lower(0, 0), Upper(1, 1)])
    ok, diag = is_admissible(kiss, (1, 1, 1))
    assert not ok and {d["kind"] for d in diag} >= {"kissing"}
    missing = MulticellDomain(sorted(star((0, 0)).triangles)[1:])
    ok, diag = is_admissible(missing, (1, 1, 1))
    assert not ok and any(d["kind"] == "over_concave" for d in diag)


def test_random_members_satisfy_system():
    rng = random.Random(11)
    M = DOMAINS["lshape"]
    n = (2, 1, 1)
    sys_ = edge_space_system(M, n)
    for _ in range(5):
        s = random_space_member(M, n, rng)
        assert sys_.satisfied(lambda_of(s, n))
        assert in_row_space(lambda_of(s, n), span_vectors(M, n))


# ------------------------------------------------------- counterexamples

def two_triangle_example(first, second):
    B = [(y ** 2 + 3 * x ** 2 + 4 * x, y ** 2 + x), (4 * y ** 2, 4 * y ** 2), (x ** 2, MonomialPoly()), (MonomialPoly(), x ** 2)]
    g = (5 * (y ** 2 + 3 * x ** 2 + 4 * x) + 4 * y ** 2, y ** 2 + x + 2 * (4 * y ** 2))
    M = MulticellDomain([first, second])
    make = lambda pair: SplineFunction.from_polys(M, {first: pair[0], second: pair[1]}, 2)
    return M, [make(b) for b in B], make(g)


@pytest.mark.parametrize("first,second", [(Upper(0, 0), Lower(-1, 0)), (Lower(-1, 0), Upper(0, 0))])
def test_generic_space_is_not_complete(first, second):
    Q = [x, x ** 2, y ** 2]
    M, B, g = two_triangle_example(first, second)
    for b in B:
        assert membership_edge_space(b, (0, 0, 0), Q)
    assert membership_edge_space(g, (0, 0, 0), Q)
    # coefficient vectors in the monomial basis of P2 on both pieces
    basis = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    vec = lambda s: [s.polys()[t].coeffs.get(m, Fraction(0)) for t in (first, second) for m in basis]
    assert rank(RationalMatrix([vec(b) for b in B], 12)) == 4
    assert not in_row_space(vec(g), [vec(b) for b in B])


def diagonal_pair():
    n = (2, 1, 1)
    tri, tri2 = Upper(0, 0), Lower(0, 0)
    f = 4 * (x - y) * y + 4 * (1 - x) * (x - y) + (x - y) ** 2
    M = MulticellDomain([tri, tri2])
    g = SplineFunction.from_polys(M, {tri: MonomialPoly(), tri2: f}, 2)
    return n, tri, tri2, f, M, g


def test_diagonal_pair_generators():
    n, tri, tri2, f, M, g = diagonal_pair()
    f1 = 2 * (x - y) * y + y ** 2
    f2 = 2 * (1 - x) * y + y ** 2
    f4 = (1 - x) ** 2 + 4 * (1 - x) * (x - y) + (x - y) ** 2 + 2 * (1 - x) * y + 2 * (x - y) * y
    f5 = (1 - x) ** 2
    assert f == f1 - f2 + f4 - f5
    # B is unnormalised; against 2B the same coefficient would be 1
    assert box_spline(n).monomial(tri2) * 2 == f1
    assert lambda_extract(g.pieces[tri2], n).lam[(0, 0)] == 2
    assert lambda_extract(g.pieces[tri], n).lam[(0, 0)] == 0


def test_diagonal_pair_continuous_but_not_spanned():
    n, tri, tri2, f, M, g = diagonal_pair()
    lam = lambda_of(g, n)
    assert edge_space_system(M, n, (0, 0, 0)).satisfied(lam)
    assert membership_edge_space(g, (0, 0, 0), space_Vn_basis(n))
    assert not in_row_space(lam, span_vectors(M, n))
    dim_span, dim_space, ok = completeness_check(M, n, (0, 0, 0))
    assert dim_span < dim_space and not ok


def test_diagonal_pair_excluded_by_full_smoothness():
    n, tri, tri2, f, M, g = diagonal_pair()
    assert DirectionTriple.of(n).smoothness == (0, 1, 1)
    assert not edge_space_system(M, n).satisfied(lambda_of(g, n))
    assert not membership_edge_space(g, (0, 1, 1), space_Vn_basis(n))
    k = len(active_shifts(n, M))
    assert completeness_check(M, n) == (k, k, True)


def test_spline_json_roundtrip():
    s = worked(F)
    again = SplineFunction.from_json(s.domain, s.to_json())
    assert again.pieces == s.pieces
    with pytest.raises(ValueError):
        SplineFunction(MulticellDomain(TRIS), {Lower(0, 0): BBPoly.zero(Lower(0, 0), 2)})
