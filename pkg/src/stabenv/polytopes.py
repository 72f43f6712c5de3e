"""Newton polytopes with exact rational vertices and the degree comparator.

Hulls are found by brute force: affine hull by exact row reduction, then
facets through affinely independent point subsets.  Dimensions stay <= 4.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

Point = tuple


def _rref(rows: list[list[Fraction]]):
    """Row-reduce in place; return (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _nullvec(rows: list[list[Fraction]], n: int):
    """A nonzero vector orthogonal to rows (rank n-1), scaled to integers."""
    red, piv = _rref(rows)
    free = [c for c in range(n) if c not in piv]
    if len(free) != 1:
        return None
    f = free[0]
    v = [Fraction(0)] * n
    v[f] = Fraction(1)
    for row, c in zip(red, piv):
        v[c] = -row[f]
    den = 1
    for x in v:
        den = den * x.denominator // _gcd(den, x.denominator)
    v = [x * den for x in v]
    g = 0
    for x in v:
        g = _gcd(g, abs(int(x)))
    return tuple(int(x) // g for x in v)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


class NewtonPolytope:
    """Convex hull of finitely many rational points; stored by its vertices."""

    __slots__ = ("dim", "vertices", "_frame")

    def __init__(self, vertices: Iterable[Point], dim: int):
        self.dim = dim
        self.vertices = tuple(sorted(set(tuple(Fraction(x) for x in v) for v in vertices)))
        self._frame = None

    def is_empty(self) -> bool:
        return not self.vertices

    def __eq__(self, other) -> bool:
        return isinstance(other, NewtonPolytope) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        vs = ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in self.vertices)
        return f"NewtonPolytope[{vs}]"

    def frame(self):
        """(base point, reduced direction basis, pivots, facets in local coordinates)."""
        if self._frame is None:
            self._frame = _frame(list(self.vertices), self.dim)
        return self._frame

    def affine_dim(self) -> int:
        if self.is_empty():
            return -1
        return len(self.frame()[1])

    def contains(self, p: Sequence) -> bool:
        if self.is_empty():
            return False
        p = tuple(Fraction(x) for x in p)
        base, basis, pivots, facets = self.frame()
        local = _local(p, base, basis, pivots)
        if local is None:
            return False
        k = len(basis)
        if k == 0:
            return True
        if k == 1:
            lo, hi = facets
            return lo <= local[0] <= hi
        return all(sum(a * x for a, x in zip(nrm, local)) <= off for nrm, off in facets)

    def issubset(self, other: "NewtonPolytope") -> bool:
        return all(other.contains(v) for v in self.vertices)

    def strict_subset(self, other: "NewtonPolytope") -> bool:
        """self is included in other and some vertex of other lies outside self."""
        if not self.issubset(other):
            return False
        return any(not self.contains(v) for v in other.vertices)

    def translate(self, t: Sequence) -> "NewtonPolytope":
        t = [Fraction(x) for x in t]
        return NewtonPolytope([tuple(a + b for a, b in zip(v, t)) for v in self.vertices], self.dim)

    def minkowski(self, other: "NewtonPolytope") -> "NewtonPolytope":
        if self.is_empty() or other.is_empty():
            return NewtonPolytope([], self.dim)
        pts = {tuple(a + b for a, b in zip(u, v)) for u in self.vertices for v in other.vertices}
        return hull(pts, self.dim)

    def to_json(self) -> list:
        return [[str(x) for x in v] for v in self.vertices]


def _local(p, base, basis, pivots):
    d = [a - b for a, b in zip(p, base)]
    coords = [d[c] for c in pivots]
    # reconstruct and compare
    rec = [sum(coords[i] * basis[i][j] for i in range(len(basis))) for j in range(len(p))]
    if rec != d:
        return None
    return coords


def _frame(points: list[Point], dim: int):
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    diffs = [d for d in diffs if any(d)]
    if diffs:
        basis, pivots = _rref(diffs)
    else:
        basis, pivots = [], []
    k = len(basis)
    locs = [_local(p, base, basis, pivots) for p in points]
    if k == 0:
        return base, basis, pivots, None
    if k == 1:
        xs = [l[0] for l in locs]
        return base, basis, pivots, (min(xs), max(xs))
    facets = set()
    for sub in combinations(range(len(locs)), k):
        p0 = locs[sub[0]]
        rows = [[a - b for a, b in zip(locs[i], p0)] for i in sub[1:]]
        nrm = _nullvec(rows, k)
        if nrm is None:
            continue
        off = sum(a * x for a, x in zip(nrm, p0))
        vals = [sum(a * x for a, x in zip(nrm, l)) for l in locs]
        if all(v <= off for v in vals):
            facets.add((nrm, off))
        if all(v >= off for v in vals):
            facets.add((tuple(-a for a in nrm), -off))
    return base, basis, pivots, sorted(facets)


def hull(points: Iterable[Point], dim: int) -> NewtonPolytope:
    """Extreme points of the convex hull of the given rational points."""
    pts = sorted(set(tuple(Fraction(x) for x in p) for p in points))
    if len(pts) <= 2:
        return NewtonPolytope(pts, dim)
    base, basis, pivots, facets = _frame(pts, dim)
    k = len(basis)
    if k == 0:
        return NewtonPolytope(pts[:1], dim)
    locs = [(_local(p, base, basis, pivots), p) for p in pts]
    if k == 1:
        lo, hi = facets
        return NewtonPolytope([p for l, p in locs if l[0] in (lo, hi)], dim)
    verts = []
    for l, p in locs:
        tight = [nrm for nrm, off in facets if sum(a * x for a, x in zip(nrm, l)) == off]
        if tight and len(_rref([[Fraction(a) for a in n] for n in tight])[1]) == k:
            verts.append(p)
    return NewtonPolytope(verts, dim)


def minkowski(P: NewtonPolytope, Q: NewtonPolytope) -> NewtonPolytope:
    return P.minkowski(Q)


def translate(P: NewtonPolytope, t: Sequence) -> NewtonPolytope:
    return P.translate(t)


def empty(dim: int) -> NewtonPolytope:
    return NewtonPolytope([], dim)


def point(p: Sequence) -> NewtonPolytope:
    return NewtonPolytope([tuple(p)], len(p))


def degree_compare(entry_poly: NewtonPolytope, bound: NewtonPolytope) -> str:
    """'strict', 'non-strict' or 'violated' for entry_poly inside bound."""
    if entry_poly.is_empty():
        return "strict" if not bound.is_empty() else "non-strict"
    if not entry_poly.issubset(bound):
        return "violated"
    return "strict" if entry_poly.strict_subset(bound) else "non-strict"


def interval_compare(entry: tuple | None, bound: tuple | None) -> str:
    """Same verdicts for intervals [lo, hi] (None is empty)."""
    if entry is None:
        return "strict" if bound is not None else "non-strict"
    if bound is None or entry[0] < bound[0] or entry[1] > bound[1]:
        return "violated"
    return "non-strict" if tuple(entry) == tuple(bound) else "strict"


def shift_of(tf, F, xi: Sequence, s, half=None) -> tuple:
    """shift_F: A-weight of det(N^-_F)^(1/2) tensored with the slope restricted to F."""
    from .envelopes import Slope, shift_weight
    return shift_weight(tf, F, xi, Slope.of(s, len(F.parts)), half)


def degree_axiom_check(entry, tf, F2, F, xi: Sequence, s, mode: str = "K", half=None) -> tuple[str, str]:
    """Degree axiom for the entry at (row F2, column F).

    K: deg_A(entry) strictly inside deg_A e_K(N^-_F2) + shift_F2 - shift_F.
    coh: total A-degree of the entry below the rank of N^-_F2.
    OUTPUT: (verdict, human readable detail).
    """
    from .euler import euler_class
    from .torus_fixed import normal_decompose
    _, minus, _ = normal_decompose(tf, F2, xi)
    lp = entry.as_laurent()
    if lp is None:
        return "violated", "entry is not a Laurent polynomial"
    if mode == "coh":
        tidx = lp.reg.torus_indices
        bound = minus.rank()
        if lp.is_zero():
            return "strict", f"zero entry, bound {bound}"
        deg = max(Fraction(sum(k[i] for i in tidx), 2) for k in lp.terms)
        verdict = "strict" if deg < bound else "non-strict" if deg == bound else "violated"
        return verdict, f"A-degree {deg} against bound {bound}"
    base = euler_class(minus, "K").as_laurent().a_degree()
    t = [a - b for a, b in zip(shift_of(tf, F2, xi, s, half), shift_of(tf, F, xi, s, half))]
    bound = base.translate(t)
    P = lp.a_degree()
    return degree_compare(P, bound), f"{P!r} inside {bound!r}"
