"""Edge and vertex contact checks between pairs of triangles.

For two touching triangles the smoothness conditions of the contact are
compared with the "lambda agreement" statement: the coefficients of every
translate active on both triangles coincide.  In matrix form

    A_i  = C @ blockdiag(L_t^T, L_t2^T)      (smoothness conditions)
    A_ii = [I_p  0_q  -P  0_q]               (lambda agreement)

over the 2*phi lambda-coordinates, columns ordered as: shared shifts of t,
other shifts of t, shared shifts of t2, other shifts of t2 (each block
lexicographic, so P is the identity).
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .bernstein import BBPoly, cr_edge_conditions, from_bb, vanishing_order_on_edge, vertex_conditions
from .box_spline import DirectionTriple, triples_up_to
from .errors import EdgeNotOfTriangle, NotEdgeContact, NotInSpace, NotTouching
from .exact import RationalMatrix, rref, row_space_equal
from .mesh import (
    EdgeId,
    LatticePoint,
    Lower,
    TriangleId,
    Upper,
    common_vertices,
    opposite_vertex_index,
    shared_edge,
    smoothness_type,
    star_positions,
)
from .poly import MonomialPoly
from .spline_space import from_lambda, in_local_space, index_set, lambda_vector, local_basis_matrix, local_shifts


@dataclass(frozen=True)
class ContactConfig:
    n: DirectionTriple
    t: TriangleId
    t2: TriangleId
    kind: str                       # "edge" or "vertex"
    where: object                   # EdgeId or LatticePoint

    @classmethod
    def between(cls, n, t: TriangleId, t2: TriangleId) -> "ContactConfig":
        n = DirectionTriple.of(n)
        e = shared_edge(t, t2)
        if e is not None:
            return cls(n, t, t2, "edge", e)
        common = common_vertices(t, t2) if t.level == t2.level else set()
        if len(common) == 1:
            return cls(n, t, t2, "vertex", next(iter(common)))
        raise NotTouching(f"{t} and {t2} have no edge or single-vertex contact")

    def label(self) -> str:
        if self.kind == "edge":
            return f"edge{self.where.etype}"
        return "vertex:" + "".join(str(i) for i in sorted(smoothness_type(self.t, self.t2)))


@dataclass(frozen=True)
class ContactMatrices:
    A_i: RationalMatrix
    A_ii: RationalMatrix
    p: int
    q: int
    shared: Tuple[LatticePoint, ...]
    permutation: Tuple[int, ...]    # P as an index map on the shared block


def shared_active(n, t: TriangleId, t2: TriangleId) -> Tuple[List[LatticePoint], int]:
    if t != t2 and not (t.level == t2.level and common_vertices(t, t2)):
        raise NotTouching(f"{t} and {t2} do not touch")
    a = set(local_shifts(t, n))
    shared = sorted(a.intersection(local_shifts(t2, n)))
    return shared, len(shared)


def _conditions(cfg: ContactConfig, d: Optional[Sequence[int]] = None) -> RationalMatrix:
    n = cfg.n
    d = tuple(n.smoothness if d is None else d)
    deg = n.degree
    if cfg.kind == "edge":
        e = cfg.where
        return cr_edge_conditions(e, cfg.t, cfg.t2, deg, min(max(d[e.etype - 1], 0), deg))
    I = index_set(d, smoothness_type(cfg.t, cfg.t2), deg)
    return vertex_conditions(cfg.t, cfg.t2, I, deg)


def _column_order(cfg: ContactConfig) -> Tuple[List[int], List[LatticePoint]]:
    """Permutation of the natural (t shifts, t2 shifts) columns."""
    n = cfg.n
    s1, s2 = local_shifts(cfg.t, n), local_shifts(cfg.t2, n)
    shared, _ = shared_active(n, cfg.t, cfg.t2)
    sh = set(shared)
    phi = len(s1)
    order = ([s1.index(v) for v in shared] + [k for k, v in enumerate(s1) if v not in sh]
             + [phi + s2.index(v) for v in shared] + [phi + k for k, v in enumerate(s2) if v not in sh])
    return order, shared


def build_contact_matrices(cfg: ContactConfig, d: Optional[Sequence[int]] = None,
                           drop_rows: Sequence[int] = ()) -> ContactMatrices:
    """A_i and A_ii for a contact; ``drop_rows`` lists rows of C to remove
    (used to sanity-check that weakened conditions are detected)."""
    n = cfg.n
    C = _conditions(cfg, d)
    if drop_rows:
        gone = set(drop_rows)
        C = RationalMatrix([r for k, r in enumerate(C.rows) if k not in gone], C.ncols)
    Lt = local_basis_matrix(cfg.t, n)
    Lu = local_basis_matrix(cfg.t2, n)
    m = Lt.ncols
    natural = []
    for row in C.rows:
        left, right = row[:m], row[m:]
        out = []
        for part, L in ((left, Lt), (right, Lu)):
            nz = [(k, a) for k, a in enumerate(part) if a]
            out.extend(sum((a * Lrow[k] for k, a in nz if Lrow[k]), Fraction(0)) for Lrow in L.rows)
        natural.append(out)
    order, shared = _column_order(cfg)
    A_i = RationalMatrix([[row[k] for k in order] for row in natural], len(order))
    phi = Lt.nrows
    p = len(shared)
    q = phi - p
    rows = []
    for k in range(p):
        r = [0] * (2 * phi)
        r[k] = 1
        r[phi + k] = -1
        rows.append(r)
    A_ii = RationalMatrix(rows, 2 * phi)
    return ContactMatrices(A_i, A_ii, p, q, tuple(shared), tuple(range(p)))


def condition_count(cfg: ContactConfig, d: Optional[Sequence[int]] = None) -> int:
    """Number of rows of the smoothness condition matrix C."""
    return _conditions(cfg, d).nrows


def verify_contact(cfg: ContactConfig, d: Optional[Sequence[int]] = None, drop_rows: Sequence[int] = ()) -> bool:
    mats = build_contact_matrices(cfg, d, drop_rows)
    same_space = row_space_equal(mats.A_i, mats.A_ii)
    R, piv = rref(mats.A_i)
    literal = R.rows[:len(piv)] == mats.A_ii.rows
    return same_space and literal


def _edge_cfg(cfg: ContactConfig) -> EdgeId:
    if cfg.kind != "edge":
        raise NotEdgeContact(f"{cfg.t} and {cfg.t2} do not share an edge")
    return cfg.where


def edge_contact_equivalence(cfg: ContactConfig, f: BBPoly, f2: BBPoly) -> Tuple[bool, bool]:
    """(pair is C^{d_i(n)} across the edge, lambda agree on shared shifts)."""
    e = _edge_cfg(cfg)
    n = cfg.n
    for g in (f, f2):
        if not in_local_space(g, n):
            raise NotInSpace(f"piece on {g.triangle} is not in V_{tuple(n)}")
    C = cr_edge_conditions(e, cfg.t, cfg.t2, n.degree, n.smoothness[e.etype - 1])
    in_space = all(x == 0 for x in C.apply(f.coeffs + f2.coeffs))
    l1 = dict(zip(local_shifts(cfg.t, n), lambda_vector(f, n)))
    l2 = dict(zip(local_shifts(cfg.t2, n), lambda_vector(f2, n)))
    shared, _ = shared_active(n, cfg.t, cfg.t2)
    lambda_equal = all(l1[v] == l2[v] for v in shared)
    return in_space, lambda_equal


def decompose_pair(cfg: ContactConfig, f: BBPoly, f2: BBPoly) -> Tuple[MonomialPoly, MonomialPoly]:
    """Split f = g + h on t where g copies f2's lambda on shared shifts.

    g is the restriction to t of sum over shared v of lambda_t2(f2)_v B(.-v),
    so (g, f2) has equal lambdas on the shared translates.  When the pair
    is smooth across the edge, h has zero lambdas there as well.
    """
    n = cfg.n
    l2 = dict(zip(local_shifts(cfg.t2, n), lambda_vector(f2, n)))
    lambda_vector(f, n)  # membership check
    shared, _ = shared_active(n, cfg.t, cfg.t2)
    sh = set(shared)
    lam_g = [l2[v] if v in sh else Fraction(0) for v in local_shifts(cfg.t, n)]
    g = from_bb(from_lambda(cfg.t, n, lam_g))
    return g, from_bb(f) - g


def divisibility_criterion(n, i: int, f: BBPoly, e: EdgeId) -> bool:
    """b^{|n| - n_i - 1} divides f, b the barycentric vanishing on e."""
    n = DirectionTriple.of(n)
    opposite_vertex_index(f.triangle, e)
    if e.etype != i:
        raise EdgeNotOfTriangle(f"edge {e} has type {e.etype}, not {i}")
    return vanishing_order_on_edge(f, e) >= n.total - n[i - 1] - 1


# ----------------------------------------------------------------- classes

def edge_classes(level: int = 1) -> List[Tuple[str, TriangleId, TriangleId]]:
    return [("edge1", Lower(0, 0, level), Upper(0, -1, level)),
            ("edge2", Lower(0, 0, level), Upper(1, 0, level)),
            ("edge3", Lower(0, 0, level), Upper(0, 0, level))]


def vertex_classes(level: int = 1) -> List[Tuple[str, TriangleId, TriangleId]]:
    """The nine single-vertex contacts around (0,0) up to translation."""
    pos = star_positions((0, 0), level)
    out = []
    for a in range(6):
        for b in range(a + 2, 6):
            if b - a in (2, 3, 4):
                t, u = pos[a], pos[b]
                out.append((f"vertex{a}{b}", t, u))
    return out


def contact_classes(contacts: str = "all") -> List[Tuple[str, TriangleId, TriangleId]]:
    if contacts == "edge":
        return edge_classes()
    if contacts == "vertex":
        return vertex_classes()
    if contacts == "all":
        return edge_classes() + vertex_classes()
    raise ValueError(f"contacts must be edge, vertex or all, not {contacts!r}")


def _run_case(args) -> dict:
    name, n, t, u = args
    start = time.perf_counter()
    cfg = ContactConfig.between(n, t, u)
    mats = build_contact_matrices(cfg)
    ok = verify_contact(cfg)
    return {"case": name, "n": list(n), "contact": cfg.label(), "p": mats.p, "q": mats.q,
            "pass": bool(ok), "millis": round((time.perf_counter() - start) * 1000, 3)}


def sweep(max_n, contacts: str = "all", jobs: Optional[int] = None) -> List[dict]:
    """Run verify_contact for every n <= max_n and every contact class."""
    cases = [(name, n, t, u) for n in triples_up_to(max_n) for name, t, u in contact_classes(contacts)]
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(cases) < 2:
        results = [_run_case(c) for c in cases]
    else:
        # group by n so each worker builds a box spline once
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_case, cases, chunksize=len(contact_classes(contacts))))
    results.sort(key=lambda r: (r["n"], r["case"]))
    return results


def sweep_summary(results: List[dict]) -> Dict[str, object]:
    return {"cases": len(results), "passed": sum(r["pass"] for r in results),
            "failed": [r for r in results if not r["pass"]]}
