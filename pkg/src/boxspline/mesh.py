"""Combinatorics of the three-directional (type-I) grid.

The grid at level ``l`` has vertices ``(i, j) / 2**(l-1)`` and is cut by the
lines ``x = k``, ``y = k`` and ``y - x = k`` (in lattice units).  Every unit
square ``[i, i+1] x [j, j+1]`` is split along its NE diagonal into

* ``Lower(i, j)`` with vertices ``(i,j), (i+1,j), (i+1,j+1)`` and
* ``Upper(i, j)`` with vertices ``(i,j), (i+1,j+1), (i,j+1)``,

both listed counterclockwise.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import floor
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

from .errors import (
    AmbiguousSmoothnessType,
    EdgeNotInDomain,
    InvalidEdge,
    NotBoundaryVertex,
    NotTouching,
)

DIRECTIONS = {1: (1, 0), 2: (0, 1), 3: (1, 1)}


class LatticePoint(NamedTuple):
    i: int
    j: int

    def __add__(self, other):  # type: ignore[override]
        return LatticePoint(self.i + other[0], self.j + other[1])

    def __sub__(self, other):
        return LatticePoint(self.i - other[0], self.j - other[1])


@dataclass(frozen=True, order=True)
class TriangleId:
    i: int
    j: int
    orient: str
    level: int = 1

    def __post_init__(self):
        if self.orient not in ("L", "U"):
            raise ValueError(f"orient must be 'L' or 'U', got {self.orient!r}")

    def shifted(self, v) -> "TriangleId":
        return TriangleId(self.i + v[0], self.j + v[1], self.orient, self.level)

    def offset_from(self, other: "TriangleId") -> LatticePoint:
        """Lattice vector taking ``other`` onto ``self`` (same orientation)."""
        return LatticePoint(self.i - other.i, self.j - other.j)

    @property
    def origin(self) -> LatticePoint:
        return LatticePoint(self.i, self.j)

    def to_json(self):
        return [self.i, self.j, self.orient]

    def __repr__(self):
        name = "Lower" if self.orient == "L" else "Upper"
        lvl = "" if self.level == 1 else f", level={self.level}"
        return f"{name}({self.i},{self.j}{lvl})"


def Lower(i: int, j: int, level: int = 1) -> TriangleId:
    return TriangleId(i, j, "L", level)


def Upper(i: int, j: int, level: int = 1) -> TriangleId:
    return TriangleId(i, j, "U", level)


@dataclass(frozen=True, order=True)
class EdgeId:
    endpoints: Tuple[LatticePoint, LatticePoint]
    etype: int
    level: int = 1

    @classmethod
    def between(cls, p, q, level: int = 1) -> "EdgeId":
        p, q = sorted((LatticePoint(*p), LatticePoint(*q)))
        return cls((p, q), _direction_type(p, q), level)


def _direction_type(p, q) -> int:
    d = (q[0] - p[0], q[1] - p[1])
    for k, e in DIRECTIONS.items():
        if d == e or d == (-e[0], -e[1]):
            return k
    raise InvalidEdge(f"points {tuple(p)} and {tuple(q)} do not span a grid edge")


def edge_type(e) -> int:
    """Direction index of an edge; accepts an EdgeId or a pair of points."""
    if isinstance(e, EdgeId):
        p, q = e.endpoints
    else:
        p, q = e
    return _direction_type(p, q)


def triangle_vertices(t: TriangleId) -> Tuple[LatticePoint, LatticePoint, LatticePoint]:
    i, j = t.i, t.j
    if t.orient == "L":
        return LatticePoint(i, j), LatticePoint(i + 1, j), LatticePoint(i + 1, j + 1)
    return LatticePoint(i, j), LatticePoint(i + 1, j + 1), LatticePoint(i, j + 1)


def triangle_edges(t: TriangleId) -> List[EdgeId]:
    a, b, c = triangle_vertices(t)
    return [EdgeId.between(a, b, t.level), EdgeId.between(b, c, t.level),
            EdgeId.between(c, a, t.level)]


def opposite_vertex_index(t: TriangleId, e: EdgeId) -> int:
    """Index (0, 1, 2) of the vertex of ``t`` not on ``e``."""
    verts = triangle_vertices(t)
    ends = set(e.endpoints)
    if e.level != t.level or not ends.issubset(verts):
        from .errors import EdgeNotOfTriangle
        raise EdgeNotOfTriangle(f"{e} is not an edge of {t}")
    for k, v in enumerate(verts):
        if v not in ends:
            return k
    raise AssertionError("unreachable")


def edge_triangles(e: EdgeId) -> Tuple[TriangleId, TriangleId]:
    """The two grid triangles having ``e`` as an edge."""
    (i, j), _ = e.endpoints
    lv = e.level
    if e.etype == 1:
        return Lower(i, j, lv), Upper(i, j - 1, lv)
    if e.etype == 2:
        return Upper(i, j, lv), Lower(i - 1, j, lv)
    return Lower(i, j, lv), Upper(i, j, lv)


def shared_edge(t: TriangleId, t2: TriangleId) -> Optional[EdgeId]:
    if t == t2 or t.level != t2.level:
        return None
    common = set(triangle_vertices(t)) & set(triangle_vertices(t2))
    if len(common) != 2:
        return None
    p, q = common
    return EdgeId.between(p, q, t.level)


def common_vertices(t: TriangleId, t2: TriangleId) -> set:
    return set(triangle_vertices(t)) & set(triangle_vertices(t2))


def triangles_touch(t: TriangleId, t2: TriangleId) -> bool:
    return t.level == t2.level and bool(common_vertices(t, t2))


@dataclass(frozen=True)
class MulticellDomain:
    triangles: FrozenSet[TriangleId]
    level: int = 1

    def __init__(self, triangles: Iterable[TriangleId] = (), level: int = 1):
        tris = frozenset(triangles)
        for t in tris:
            if t.level != level:
                raise ValueError(f"{t} does not live on level {level}")
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "level", level)

    def __len__(self):
        return len(self.triangles)

    def __iter__(self):
        return iter(sorted(self.triangles))

    def __contains__(self, t):
        return t in self.triangles

    def edges(self) -> FrozenSet[EdgeId]:
        return frozenset(e for t in self.triangles for e in triangle_edges(t))

    def vertices(self) -> FrozenSet[LatticePoint]:
        return frozenset(v for t in self.triangles for v in triangle_vertices(t))

    def interior_edges(self) -> List[Tuple[EdgeId, TriangleId, TriangleId]]:
        """Edges with both incident triangles in the domain."""
        out = []
        for e in sorted(self.edges()):
            a, b = edge_triangles(e)
            if a in self.triangles and b in self.triangles:
                out.append((e, a, b))
        return out

    def boundary_vertices(self) -> FrozenSet[LatticePoint]:
        return frozenset(v for v in self.vertices()
                         if not star(v, self.level).triangles <= self.triangles)

    def translated(self, v) -> "MulticellDomain":
        return MulticellDomain((t.shifted(v) for t in self.triangles), self.level)

    def to_json(self) -> dict:
        return {"level": self.level, "triangles": [t.to_json() for t in sorted(self.triangles)]}

    @classmethod
    def from_json(cls, data) -> "MulticellDomain":
        if isinstance(data, str):
            data = json.loads(data)
        level = int(data.get("level", 1))
        return cls((TriangleId(int(i), int(j), str(o), level) for i, j, o in data["triangles"]), level)


def diamond_edge(e: EdgeId, M: MulticellDomain) -> MulticellDomain:
    tris = [t for t in edge_triangles(e) if t in M.triangles]
    if not tris:
        raise EdgeNotInDomain(f"{e} is not an edge of the domain")
    return MulticellDomain(tris, M.level)


def star_positions(v, level: int = 1) -> List[TriangleId]:
    """The six triangles around ``v`` in counterclockwise order.

    Consecutive entries (cyclically) share an edge; the edge between
    positions ``k`` and ``k+1`` has type ``STAR_EDGE_TYPES[k]``.
    """
    a, b = v
    return [Lower(a, b, level), Upper(a, b, level), Lower(a - 1, b, level),
            Upper(a - 1, b - 1, level), Lower(a - 1, b - 1, level), Upper(a, b - 1, level)]


STAR_EDGE_TYPES = (3, 2, 1, 3, 2, 1)


def star(v, level: int = 1) -> MulticellDomain:
    return MulticellDomain(star_positions(v, level), level)


# Smoothness types of the lettered star, rows/columns A..F.
_ST_LETTERS = "ABCDEF"
_ST_TABLE = {
    "A": [set(), {1}, {1, 2}, {1, 2, 3}, {2, 3}, {3}],
    "B": [{1}, set(), {2}, {2, 3}, {1, 2, 3}, {1, 3}],
    "C": [{1, 2}, {2}, set(), {3}, {1, 3}, {1, 2, 3}],
    "D": [{1, 2, 3}, {2, 3}, {3}, set(), {1}, {1, 2}],
    "E": [{2, 3}, {1, 2, 3}, {1, 3}, {1}, set(), {2}],
    "F": [{3}, {1, 3}, {1, 2, 3}, {1, 2}, {2}, set()],
}
# Where each lettered triangle sits in star_positions.
_LETTER_POSITION = {"A": 0, "B": 5, "C": 4, "D": 3, "E": 2, "F": 1}
_POSITION_LETTER = {p: c for c, p in _LETTER_POSITION.items()}


def lettered_star(v=(0, 0), level: int = 1) -> Dict[str, TriangleId]:
    """The star of v with its six triangles named A..F."""
    pos = star_positions(v, level)
    return {c: pos[_LETTER_POSITION[c]] for c in _ST_LETTERS}


def smoothness_type_table() -> Dict[Tuple[str, str], FrozenSet[int]]:
    return {(r, _ST_LETTERS[k]): frozenset(s)
            for r, row in _ST_TABLE.items() for k, s in enumerate(row)}


def smoothness_type(t: TriangleId, t2: TriangleId) -> FrozenSet[int]:
    if t == t2:
        return frozenset()
    common = common_vertices(t, t2) if t.level == t2.level else set()
    if not common:
        raise NotTouching(f"{t} and {t2} do not touch")
    v = min(common)
    pos = star_positions(v, t.level)
    a = _POSITION_LETTER[pos.index(t)]
    b = _POSITION_LETTER[pos.index(t2)]
    return frozenset(_ST_TABLE[a][_ST_LETTERS.index(b)])


def grid_neighbors(t: TriangleId) -> List[TriangleId]:
    """The three triangles sharing an edge with ``t``."""
    out = []
    for e in triangle_edges(t):
        a, b = edge_triangles(e)
        out.append(b if a == t else a)
    return out


def smoothness_type_bfs(t: TriangleId, t2: TriangleId) -> FrozenSet[int]:
    """Brute-force smoothness type: type sets of all shortest chains in G.

    Raises AmbiguousSmoothnessType if two shortest chains disagree.
    """
    if t == t2:
        return frozenset()
    if not triangles_touch(t, t2):
        raise NotTouching(f"{t} and {t2} do not touch")
    dist = {t: 0}
    queue = deque([t])
    while queue:
        u = queue.popleft()
        if u == t2:
            break
        for w in grid_neighbors(u):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    # collect type sets over every shortest chain by walking back
    sets_at: Dict[TriangleId, set] = {}

    def chains(u):
        if u == t:
            return {frozenset()}
        if u in sets_at:
            return sets_at[u]
        acc = set()
        for w in grid_neighbors(u):
            if dist.get(w) == dist[u] - 1:
                et = shared_edge(u, w).etype
                acc |= {s | {et} for s in chains(w)}
        sets_at[u] = acc
        return acc

    found = chains(t2)
    if len(found) != 1:
        raise AmbiguousSmoothnessType(f"{t},{t2}: {sorted(map(sorted, found))}")
    return next(iter(found))


def is_edge_connected(S: Iterable[TriangleId]) -> bool:
    S = set(S)
    if not S:
        return True
    start = next(iter(S))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in grid_neighbors(u):
            if w in S and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(S)


def is_over_concave(v, M: MulticellDomain) -> bool:
    v = LatticePoint(*v)
    tris = star(v, M.level).triangles
    missing = len(tris - M.triangles)
    if v not in M.vertices() or missing == 0:
        raise NotBoundaryVertex(f"{tuple(v)} is not a boundary vertex of the domain")
    return missing == 1


def over_concave_vertices(M: MulticellDomain) -> List[LatticePoint]:
    return sorted(v for v in M.boundary_vertices() if is_over_concave(v, M))


def _linked_around(v, t, t2, M: MulticellDomain) -> bool:
    pos = star_positions(v, M.level)
    a, b = pos.index(t), pos.index(t2)
    for step in (1, -1):
        k = a
        ok = True
        while True:
            k = (k + step) % 6
            if k == b:
                break
            if pos[k] not in M.triangles:
                ok = False
                break
        if ok:
            return True
    return False


def kissing_pairs(M: MulticellDomain) -> List[Tuple[TriangleId, TriangleId]]:
    out = []
    for t, t2 in combinations(sorted(M.triangles), 2):
        common = common_vertices(t, t2)
        if len(common) != 1:
            continue
        v = next(iter(common))
        if not _linked_around(v, t, t2, M):
            out.append((t, t2))
    return out


def child_triangles(t: TriangleId) -> List[TriangleId]:
    i, j, lv = 2 * t.i, 2 * t.j, t.level + 1
    if t.orient == "L":
        return [Lower(i, j, lv), Lower(i + 1, j, lv), Lower(i + 1, j + 1, lv), Upper(i + 1, j, lv)]
    return [Upper(i, j, lv), Upper(i + 1, j + 1, lv), Upper(i, j + 1, lv), Lower(i, j + 1, lv)]


def parent_triangle(t: TriangleId) -> TriangleId:
    if t.level <= 1:
        raise ValueError("level-1 triangles have no parent")
    pi, pj = t.i // 2, t.j // 2
    di, dj = t.i - 2 * pi, t.j - 2 * pj
    if t.orient == "L":
        orient = "U" if (di, dj) == (0, 1) else "L"
    else:
        orient = "L" if (di, dj) == (1, 0) else "U"
    return TriangleId(pi, pj, orient, t.level - 1)


def refine_domain(M: MulticellDomain) -> MulticellDomain:
    return MulticellDomain((c for t in M.triangles for c in child_triangles(t)), M.level + 1)


def locate(point, level: int = 1) -> TriangleId:
    """Triangle containing an interior point given in physical coordinates."""
    s = 2 ** (level - 1)
    x, y = Fraction(point[0]) * s, Fraction(point[1]) * s
    i, j = floor(x), floor(y)
    return TriangleId(i, j, "L" if x - i > y - j else "U", level)


def domain_from_rect(i0: int, j0: int, i1: int, j1: int, level: int = 1) -> MulticellDomain:
    """All triangles of the squares ``[i0, i1) x [j0, j1)``."""
    return MulticellDomain((TriangleId(i, j, o, level) for i in range(i0, i1)
                            for j in range(j0, j1) for o in "LU"), level)
