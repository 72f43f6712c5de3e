"""Kempf-Ness strata of the unstable locus for cyclic stability.

For theta < 0 a framed representation is semistable iff it is generated by
the in-framing.  Nonemptiness is tested on random integer representations
with exact ranks; a failed search is only a heuristic 'empty'.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .laurent import LaurentExpr
from .polytopes import interval_compare
from .quiver import FramedQuiver, QuiverData, QuiverError, StabilityError, gauge_name, tangent_class

ENTRY_BOUND = 10 ** 6
TRIALS = 8


def _reduce_into(basis: list[list[Fraction]], pivots: list[int], vec: list[Fraction]) -> bool:
    """Add vec to an echelon basis; return True if it enlarged the span."""
    v = list(vec)
    for b, p in zip(basis, pivots):
        if v[p]:
            f = v[p] / b[p]
            v = [x - f * y for x, y in zip(v, b)]
    p = next((i for i, x in enumerate(v) if x), None)
    if p is None:
        return False
    basis.append(v)
    pivots.append(p)
    return True


def generated_dims(Q: FramedQuiver, m: Sequence[int], d_in: Sequence[int], rng: random.Random) -> list[int]:
    """Dimensions of the subrepresentation generated by the framing, for one random sample."""
    n = Q.n
    draw = lambda: Fraction(rng.randint(-ENTRY_BOUND, ENTRY_BOUND))
    spans = [([], []) for _ in range(n)]
    for i in range(n):
        for _ in range(d_in[i]):
            if m[i]:
                _reduce_into(*spans[i], [draw() for _ in range(m[i])])
    maps = []
    for t, h in Q.arrows:
        maps.append((t, h, [[draw() for _ in range(m[t])] for _ in range(m[h])]))
    changed = True
    while changed:
        changed = False
        for t, h, A in maps:
            if not m[h] or not m[t]:
                continue
            for vec in list(spans[t][0]):
                img = [sum(a * x for a, x in zip(row, vec)) for row in A]
                if len(spans[h][0]) < m[h] and _reduce_into(*spans[h], img):
                    changed = True
    return [len(s[0]) for s in spans]


def _reachable(Q: FramedQuiver, d_in: Sequence[int], m: Sequence[int]) -> set[int]:
    seen = {i for i in range(Q.n) if d_in[i] and m[i]}
    todo = list(seen)
    while todo:
        t = todo.pop()
        for a, b in Q.arrows:
            if a == t and m[b] and b not in seen:
                seen.add(b)
                todo.append(b)
    return seen


def semistable_nonempty(Q: FramedQuiver, m: Sequence[int], d_in: Sequence[int] | None = None,
                        seed: int = 0, trials: int = TRIALS) -> str:
    """'nonempty' (witness found), 'empty' (certified), 'empty(heuristic)' or 'undetermined'."""
    if not Q.is_cyclic_stability():
        raise StabilityError("only cyclic stability (theta_i < 0) is supported here")
    d_in = tuple(Q.d_in if d_in is None else d_in)
    m = tuple(m)
    if any(x < 0 for x in m):
        return "empty"
    if not any(m):
        return "nonempty"
    reach = _reachable(Q, d_in, m)
    if any(m[i] and i not in reach for i in range(Q.n)):
        return "empty"
    if not Q.arrows:
        return "nonempty" if all(m[i] <= d_in[i] for i in range(Q.n)) else "empty"
    if trials <= 0:
        return "undetermined"
    for t in range(trials):
        rng = random.Random(seed * 1000003 + t)
        if list(generated_dims(Q, m, d_in, rng)) == list(m):
            return "nonempty"
    return "empty(heuristic)"


def mu_invariant(u: Sequence[int], theta: Sequence) -> tuple[Fraction, int]:
    """(mu^2, sign of (sigma, theta)) for sigma(u) = minus the fundamental cocharacter.

    (sigma, theta) = -sum theta_i u_i and |sigma|^2 = sum |theta_i| u_i.
    """
    if not any(u):
        raise QuiverError("mu is undefined for u = 0")
    pair = -sum(Fraction(t) * x for t, x in zip(theta, u))
    norm2 = sum(abs(Fraction(t)) * x for t, x in zip(theta, u))
    if norm2 == 0:
        raise QuiverError("sigma(u) has zero norm for this theta")
    sign = (pair > 0) - (pair < 0)
    return pair * pair / norm2, sign


def _mu_key(u, theta):
    mu2, sign = mu_invariant(u, theta)
    return (-sign * mu2, tuple(u))


def sigma_theta(Q: FramedQuiver, v: Sequence[int], seed: int = 0) -> list[tuple]:
    """u in Sigma_theta minus 0, ordered by decreasing mu (ties lexicographic)."""
    if not Q.is_cyclic_stability():
        raise StabilityError("Sigma_theta is only supported for cyclic stability")
    out = []
    for u in product(*[range(x + 1) for x in v]):
        if not any(u):
            continue
        m = [a - b for a, b in zip(v, u)]
        if semistable_nonempty(Q, m, seed=seed) == "nonempty":
            out.append(tuple(u))
    return sorted(out, key=lambda u: _mu_key(u, Q.theta))


def sigma_of(u: Sequence[int], v: Sequence[int]) -> list[list[int]]:
    """Diagonal entries of sigma(u): -1 on the first u_i slots, 0 elsewhere."""
    return [[-1] * u[i] + [0] * (v[i] - u[i]) for i in range(len(v))]


@dataclass
class KNStratum:
    u: tuple
    sigma_u: list
    mu_squared: Fraction
    sign: int
    order_position: int
    description: str
    closure_targets: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"u": list(self.u), "mu_squared": str(self.mu_squared), "order": self.order_position,
                "closure_targets": [list(t) for t in self.closure_targets],
                "sigma_u": self.sigma_u, "description": self.description}


def kn_stratify(Q: FramedQuiver, v: Sequence[int], seed: int = 0) -> list[KNStratum]:
    us = sigma_theta(Q, v, seed=seed)
    strata = []
    for pos, u in enumerate(us):
        mu2, sign = mu_invariant(u, Q.theta)
        targets = [w for w in us if w != u and all(a >= b for a, b in zip(w, u))]
        strata.append(KNStratum(u, sigma_of(u, v), mu2, sign, pos,
                                f"Attr_+(F_{list(u)}) in the unstable locus", targets))
    return strata


def sigma_weight(key: tuple, reg, u: Sequence[int]) -> Fraction:
    """Pairing of sigma(u) with a character key in the gauge roots."""
    w = Fraction(0)
    for i, ui in enumerate(u):
        for j in range(ui):
            name = gauge_name(i, j)
            if name in reg:
                w -= Fraction(key[reg.index(name)], 2)
    return w


def window_bounds(data: QuiverData, v: Sequence[int], s: Sequence, cls: LaurentExpr | None = None,
                  seed: int = 0, reg=None) -> list[dict]:
    """Per stratum: interval 1/2 deg_sigma e_K(R - Lie G) + weight_sigma(s).

    With `cls` (a symmetric Laurent polynomial in the gauge roots) each stratum also
    reports 'strict', 'non-strict' or 'violated' for deg_sigma(cls) inside the window.
    """
    if reg is None:
        reg = data.registry(v)
    _, _, T = tangent_class(data, v, reg)
    out = []
    for st in kn_stratify(data.Q, v, seed=seed):
        lo = hi = Fraction(0)
        for k, mult in T.counts.items():
            w = sigma_weight(k, reg, st.u)
            a, b = min(Fraction(0), -w), max(Fraction(0), -w)
            lo += mult * a
            hi += mult * b
        ws = -sum(Fraction(s[i]) * st.u[i] for i in range(len(v)))
        win = (lo / 2 + ws, hi / 2 + ws)
        rec = {"u": st.u, "window": win}
        if cls is not None:
            if cls.is_zero():
                deg = None
            else:
                vals = [sigma_weight(k, reg, st.u) for k in cls.terms]
                deg = (min(vals), max(vals))
            rec["degree"] = deg
            rec["verdict"] = interval_compare(deg, win)
        out.append(rec)
    return out
