from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from boxspline.errors import (
    EdgeNotInDomain,
    EdgeNotOfTriangle,
    InvalidEdge,
    NotBoundaryVertex,
    NotTouching,
)
from boxspline.mesh import (
    EdgeId,
    LatticePoint,
    Lower,
    MulticellDomain,
    TriangleId,
    Upper,
    child_triangles,
    common_vertices,
    diamond_edge,
    domain_from_rect,
    edge_triangles,
    edge_type,
    is_edge_connected,
    is_over_concave,
    kissing_pairs,
    lettered_star,
    locate,
    opposite_vertex_index,
    parent_triangle,
    refine_domain,
    shared_edge,
    smoothness_type,
    smoothness_type_bfs,
    smoothness_type_table,
    star,
    triangle_edges,
    triangle_vertices,
)

coord = st.integers(-20, 20)
orient = st.sampled_from("LU")
triangles = st.builds(TriangleId, coord, coord, orient)


def test_triangle_vertices():
    assert triangle_vertices(Lower(0, 0)) == ((0, 0), (1, 0), (1, 1))
    assert triangle_vertices(Upper(0, 0)) == ((0, 0), (1, 1), (0, 1))
    assert triangle_vertices(Lower(2, -1)) == ((2, -1), (3, -1), (3, 0))


def test_vertices_are_counterclockwise():
    for t in (Lower(0, 0), Upper(3, -2)):
        a, b, c = triangle_vertices(t)
        assert (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) == 1


def test_edge_types():
    assert edge_type(((0, 0), (1, 0))) == 1
    assert edge_type(((0, 0), (0, 1))) == 2
    assert edge_type(((0, 0), (1, 1))) == 3
    assert edge_type(((1, 1), (0, 0))) == 3
    with pytest.raises(InvalidEdge):
        edge_type(((0, 0), (2, 0)))
    with pytest.raises(InvalidEdge):
        edge_type(((0, 0), (1, -1)))


def test_edge_canonical_order():
    e = EdgeId.between((1, 1), (0, 0))
    assert e.endpoints == ((0, 0), (1, 1)) and e.etype == 3


def test_shared_edge():
    e = shared_edge(Lower(0, 0), Upper(0, 0))
    assert e.endpoints == ((0, 0), (1, 1)) and e.etype == 3
    assert shared_edge(Lower(0, 0), Lower(0, 1)) is None
    assert common_vertices(Lower(0, 0), Lower(0, 1)) == {(1, 1)}
    assert shared_edge(Lower(0, 0), Lower(5, 5)) is None


@given(triangles)
def test_each_edge_has_two_triangles(t):
    for e in triangle_edges(t):
        a, b = edge_triangles(e)
        assert t in (a, b)
        assert shared_edge(a, b) == e


def test_opposite_vertex():
    e = EdgeId.between((0, 0), (1, 1))
    assert triangle_vertices(Lower(0, 0))[opposite_vertex_index(Lower(0, 0), e)] == (1, 0)
    with pytest.raises(EdgeNotOfTriangle):
        opposite_vertex_index(Lower(3, 3), e)


def test_diamond():
    e = EdgeId.between((0, 0), (1, 1))
    M = MulticellDomain([Lower(0, 0), Upper(0, 0)])
    assert diamond_edge(e, M).triangles == M.triangles
    one = MulticellDomain([Lower(0, 0)])
    assert len(diamond_edge(EdgeId.between((0, 0), (1, 0)), one)) == 1
    with pytest.raises(EdgeNotInDomain):
        diamond_edge(EdgeId.between((5, 5), (6, 5)), one)


@given(coord, coord)
def test_star(i, j):
    S = star((i, j))
    assert len(S) == 6
    assert all((i, j) in triangle_vertices(t) for t in S)
    assert len(S.interior_edges()) == 6
    assert star((i + 1, j)).triangles == S.translated((1, 0)).triangles


def test_star_by_enumeration():
    v = LatticePoint(1, 1)
    candidates = [TriangleId(i, j, o) for i in range(-1, 3) for j in range(-1, 3) for o in "LU"]
    assert star(v).triangles == {t for t in candidates if v in triangle_vertices(t)}


def test_smoothness_type_examples():
    assert smoothness_type(Lower(0, 0), Lower(0, 0)) == frozenset()
    assert smoothness_type(Lower(0, 0), Upper(0, 0)) == {3}
    assert smoothness_type(Lower(0, 0), Upper(1, 1)) == {1, 2, 3}
    with pytest.raises(NotTouching):
        smoothness_type(Lower(0, 0), Lower(4, 4))


def test_table_is_symmetric():
    table = smoothness_type_table()
    assert len(table) == 36
    for (a, b), s in table.items():
        assert table[(b, a)] == s
    assert all(table[(a, a)] == frozenset() for a in "ABCDEF")


def test_table_matches_bfs_on_lettered_star():
    table = smoothness_type_table()
    S = lettered_star((0, 0))
    for a, b in combinations("ABCDEF", 2):
        assert smoothness_type(S[a], S[b]) == table[(a, b)]
        assert smoothness_type_bfs(S[a], S[b]) == table[(a, b)]


@given(coord, coord, st.integers(0, 5), st.integers(0, 5))
def test_table_matches_bfs_everywhere(i, j, a, b):
    # every touching pair sits in the star of one of its common vertices
    S = list(star((i, j)))
    t, u = S[a], S[b]
    assert smoothness_type(t, u) == smoothness_type_bfs(t, u)
    assert smoothness_type(t, u) == smoothness_type(u, t)
    shift = (3, -7)
    assert smoothness_type(t.shifted(shift), u.shifted(shift)) == smoothness_type(t, u)


def test_over_concave():
    full = star((0, 0))
    tris = sorted(full.triangles)
    missing_one = MulticellDomain(tris[1:])
    assert is_over_concave((0, 0), missing_one)
    for v in full.boundary_vertices():
        assert not is_over_concave(v, full)
    assert not is_over_concave((0, 0), MulticellDomain([Lower(0, 0)]))
    with pytest.raises(NotBoundaryVertex):
        is_over_concave((0, 0), full)
    with pytest.raises(NotBoundaryVertex):
        is_over_concave((9, 9), full)


def test_kissing_pairs():
    assert len(kissing_pairs(MulticellDomain([Lower(0, 0), Upper(1, 1)]))) == 1
    assert kissing_pairs(MulticellDomain([Lower(0, 0), Upper(0, 0)])) == []
    assert kissing_pairs(star((2, 3))) == []


def test_edge_connected():
    assert is_edge_connected([Lower(0, 0), Upper(0, 0)])
    assert not is_edge_connected([Lower(0, 0), Upper(1, 1)])
    assert is_edge_connected([])


def test_empty_domain():
    M = MulticellDomain([])
    assert len(M) == 0 and not M.edges() and not M.vertices()


def test_json_roundtrip():
    M = domain_from_rect(-1, 0, 2, 2, level=2)
    again = MulticellDomain.from_json(M.to_json())
    assert again.triangles == M.triangles and again.level == 2


def _area(t: TriangleId) -> Fraction:
    return Fraction(1, 2 * 4 ** (t.level - 1))


def _centroid(t: TriangleId):
    s = Fraction(1, 2 ** (t.level - 1))
    vs = triangle_vertices(t)
    return (sum(v[0] for v in vs) * s / 3, sum(v[1] for v in vs) * s / 3)


@given(triangles)
def test_children_tile_parent(t):
    kids = child_triangles(t)
    assert len(set(kids)) == 4
    assert sum(_area(c) for c in kids) == _area(t)
    for c in kids:
        assert c.level == 2
        assert parent_triangle(c) == t
        assert locate(_centroid(c), 1) == t
    grandkids = [g for c in kids for g in child_triangles(c)]
    assert len(set(grandkids)) == 16
    assert all(parent_triangle(parent_triangle(g)) == t for g in grandkids)


def test_refine_domain():
    M = domain_from_rect(0, 0, 2, 2)
    R = refine_domain(M)
    assert R.level == 2 and len(R) == 4 * len(M)
    assert R.triangles == domain_from_rect(0, 0, 4, 4, level=2).triangles
