"""Framed quivers, torus weightings and virtual characters (KClass).

Conventions: Hom(D_in, V) has weights x / c for an in-line of character c,
Hom(V, D_out) has c' / x, an arrow t -> h with flavour q has q * x_h / x_t,
and Lie(G) is sum_{j,k} x_j / x_k over each node.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .laurent import LaurentExpr, LaurentError, Var, VariableRegistry


class QuiverError(ValueError):
    pass


class StabilityError(QuiverError):
    """Stability parameter outside the supported (cyclic) range."""


class KClass:
    """Virtual torus representation: signed multiset of characters (keys over a registry)."""

    __slots__ = ("reg", "counts")

    def __init__(self, reg: VariableRegistry, counts: Mapping[tuple, int] | None = None):
        self.reg = reg
        self.counts = {k: m for k, m in (counts or {}).items() if m}

    @classmethod
    def from_chars(cls, reg: VariableRegistry, chars: Iterable, sign: int = 1) -> "KClass":
        out: dict = {}
        for c in chars:
            k = _key(c)
            out[k] = out.get(k, 0) + sign
        return cls(reg, out)

    def __add__(self, other: "KClass") -> "KClass":
        out = dict(self.counts)
        for k, m in other.counts.items():
            out[k] = out.get(k, 0) + m
        return KClass(self.reg, out)

    def __neg__(self) -> "KClass":
        return KClass(self.reg, {k: -m for k, m in self.counts.items()})

    def __sub__(self, other: "KClass") -> "KClass":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, KClass) and self.reg == other.reg and self.counts == other.counts

    def __repr__(self) -> str:
        if not self.counts:
            return "KClass(0)"
        parts = []
        for k, m in sorted(self.counts.items(), reverse=True):
            s = LaurentExpr(self.reg, {k: 1}).to_str()
            parts.append(f"{m}*[{s}]" if m != 1 else f"[{s}]")
        return "KClass(" + " + ".join(parts) + ")"

    def items(self):
        return sorted(self.counts.items(), reverse=True)

    def rank(self) -> int:
        return sum(self.counts.values())

    def scale(self, n: int) -> "KClass":
        return KClass(self.reg, {k: m * n for k, m in self.counts.items()})

    def twist(self, char) -> "KClass":
        """Multiply every character by the monomial `char`."""
        c = _key(char)
        return KClass(self.reg, {tuple(a + b for a, b in zip(k, c)): m for k, m in self.counts.items()})

    def dual(self) -> "KClass":
        return KClass(self.reg, {tuple(-e for e in k): m for k, m in self.counts.items()})

    def det(self) -> tuple:
        """Doubled exponent key of det(V) = prod chi^m."""
        n = len(self.reg)
        out = [0] * n
        for k, m in self.counts.items():
            for i, e in enumerate(k):
                out[i] += m * e
        return tuple(out)

    def plus(self) -> "KClass":
        return KClass(self.reg, {k: m for k, m in self.counts.items() if m > 0})

    def minus(self) -> "KClass":
        return KClass(self.reg, {k: -m for k, m in self.counts.items() if m < 0})

    def is_honest(self) -> bool:
        return all(m > 0 for m in self.counts.values())

    def filter(self, pred) -> "KClass":
        return KClass(self.reg, {k: m for k, m in self.counts.items() if pred(k)})

    def substitute(self, mapping) -> "KClass":
        out: dict = {}
        reg = None
        for k, m in self.counts.items():
            e = LaurentExpr(self.reg, {k: 1}).substitute(mapping)
            if not e.is_monomial():
                raise QuiverError("character did not map to a character")
            (nk, c), = e.terms.items()
            if c != 1:
                raise QuiverError("character picked up a scalar under substitution")
            reg = e.reg
            out[nk] = out.get(nk, 0) + m
        if reg is None:
            if mapping:
                tgt = next(iter(mapping.values()))
                reg = tgt.reg if isinstance(tgt, LaurentExpr) else self.reg
            else:
                reg = self.reg
        return KClass(reg, out)

    def a_weight(self, key: tuple) -> tuple:
        return tuple(Fraction(key[i], 2) for i in self.reg.torus_indices)

    def drop_kinds(self, kinds: Sequence[str]) -> "KClass":
        """Forget the exponents of variables of the given kinds."""
        idx = [i for i, v in enumerate(self.reg.vars) if v.kind in kinds]
        out: dict = {}
        for k, m in self.counts.items():
            nk = list(k)
            for i in idx:
                nk[i] = 0
            nk = tuple(nk)
            out[nk] = out.get(nk, 0) + m
        return KClass(self.reg, out)


def _key(c) -> tuple:
    if isinstance(c, LaurentExpr):
        if not c.is_monomial():
            raise QuiverError("a character must be a monomial")
        (k, coef), = c.terms.items()
        if coef != 1:
            raise QuiverError("a character has coefficient 1")
        return k
    return tuple(c)


def char(reg: VariableRegistry, key: tuple) -> LaurentExpr:
    return LaurentExpr(reg, {tuple(key): 1})


@dataclass(frozen=True)
class FramedQuiver:
    nodes: tuple
    arrows: tuple                     # ((tail, head), ...) as node indices
    d_in: tuple
    d_out: tuple
    theta: tuple = ()

    def __post_init__(self):
        n = len(self.nodes)
        if len(self.d_in) != n or len(self.d_out) != n:
            raise QuiverError("framing vectors must have one entry per node")
        for t, h in self.arrows:
            if not (0 <= t < n and 0 <= h < n):
                raise QuiverError(f"arrow ({t},{h}) out of range")
        if any(x < 0 for x in self.d_in + self.d_out):
            raise QuiverError("framing dimensions must be natural numbers")
        if not self.theta:
            object.__setattr__(self, "theta", tuple(Fraction(-1) for _ in self.nodes))
        elif len(self.theta) != n:
            raise QuiverError("theta must have one entry per node")
        else:
            object.__setattr__(self, "theta", tuple(Fraction(t) for t in self.theta))

    @property
    def n(self) -> int:
        return len(self.nodes)

    def adjacency(self) -> list[list[int]]:
        Q = [[0] * self.n for _ in range(self.n)]
        for t, h in self.arrows:
            Q[t][h] += 1
        return Q

    def is_symmetric(self) -> bool:
        Q = self.adjacency()
        return all(Q[i][j] == Q[j][i] for i in range(self.n) for j in range(self.n))

    def is_cyclic_stability(self) -> bool:
        return all(t < 0 for t in self.theta)

    def has_loops(self) -> bool:
        return any(t == h for t, h in self.arrows)


def cartan(Q: FramedQuiver) -> list[list[int]]:
    """C_ij = 2 delta_ij - Q_ij - Q_ji."""
    A = Q.adjacency()
    return [[2 * (i == j) - A[i][j] - A[j][i] for j in range(Q.n)] for i in range(Q.n)]


@dataclass(frozen=True)
class Block:
    """A group of framing lines sharing one torus-A variable (None: A acts trivially)."""
    d_in: tuple
    d_out: tuple
    a_var: str | None = None
    in_weights: tuple = ()            # per node: tuple of extra character strings per line
    out_weights: tuple = ()


@dataclass(frozen=True)
class TorusWeighting:
    blocks: tuple
    arrow_chars: tuple = ()           # flavour character string per arrow ('1' if trivial)
    hbar_placement: str = "out"       # 'out': out-lines carry h^-1; 'in': in-lines carry h; 'none'

    def __post_init__(self):
        if self.hbar_placement not in ("out", "in", "none"):
            raise QuiverError(f"unknown hbar placement {self.hbar_placement!r}")

    @property
    def a_vars(self) -> list[str]:
        out = []
        for b in self.blocks:
            if b.a_var is not None and b.a_var not in out:
                out.append(b.a_var)
        return out


@dataclass(frozen=True)
class QuiverData:
    """Framed quiver together with its torus weighting."""
    Q: FramedQuiver
    W: TorusWeighting
    extra_flavours: tuple = field(default=())

    def __post_init__(self):
        n = self.Q.n
        din = [0] * n
        dout = [0] * n
        for b in self.W.blocks:
            if len(b.d_in) != n or len(b.d_out) != n:
                raise QuiverError("block framing vectors must have one entry per node")
            for i in range(n):
                din[i] += b.d_in[i]
                dout[i] += b.d_out[i]
        if tuple(din) != tuple(self.Q.d_in) or tuple(dout) != tuple(self.Q.d_out):
            raise QuiverError("blocks do not add up to the quiver framing")
        if self.W.arrow_chars and len(self.W.arrow_chars) != len(self.Q.arrows):
            raise QuiverError("one flavour character per arrow is required")

    @classmethod
    def from_blocks(cls, nodes, arrows, blocks, arrow_chars=(), hbar_placement="out", theta=()):
        n = len(nodes)
        din = tuple(sum(b.d_in[i] for b in blocks) for i in range(n))
        dout = tuple(sum(b.d_out[i] for b in blocks) for i in range(n))
        Q = FramedQuiver(tuple(nodes), tuple(tuple(a) for a in arrows), din, dout, tuple(theta))
        return cls(Q, TorusWeighting(tuple(blocks), tuple(arrow_chars), hbar_placement))

    def arrow_char(self, a: int) -> str:
        return self.W.arrow_chars[a] if self.W.arrow_chars else "1"

    def flavour_names(self) -> list[str]:
        names = []
        texts = list(self.W.arrow_chars)
        for b in self.W.blocks:
            for ws in tuple(b.in_weights) + tuple(b.out_weights):
                texts.extend(ws)
        from .laurent import parse_monomial_text
        avars = set(self.W.a_vars)
        for t in texts:
            exps, _ = parse_monomial_text(t) if t.strip() != "1" else ({}, 1)
            for name in exps:
                if name in avars:
                    raise QuiverError("flavour characters may not involve torus-A variables")
                if name != "h" and name not in names:
                    names.append(name)
        for name in self.extra_flavours:
            if name not in names:
                names.append(name)
        return names

    def registry(self, vmax: Sequence[int]) -> VariableRegistry:
        vs = [Var(a, "torus-A", -1, k) for k, a in enumerate(self.W.a_vars)]
        vs.append(Var("h", "flavour", -1, 0))
        vs += [Var(f, "flavour", -1, 1 + k) for k, f in enumerate(self.flavour_names())]
        for i in range(self.Q.n):
            for j in range(vmax[i]):
                vs.append(Var(gauge_name(i, j), "gauge-chern-root", i, j))
        return VariableRegistry(vs)

    def in_lines(self, reg: VariableRegistry, i: int) -> list[tuple[int, LaurentExpr]]:
        """(block index, character of the line) for in-framing lines at node i."""
        out = []
        h = reg.var("h")
        for b_idx, b in enumerate(self.W.blocks):
            for l in range(b.d_in[i]):
                c = reg.var(b.a_var) if b.a_var else reg.one()
                if b.in_weights and b.in_weights[i]:
                    c = c * reg.parse_monomial(b.in_weights[i][l])
                if self.W.hbar_placement == "in":
                    c = c * h
                out.append((b_idx, c))
        return out

    def out_lines(self, reg: VariableRegistry, i: int) -> list[tuple[int, LaurentExpr]]:
        out = []
        h = reg.var("h")
        for b_idx, b in enumerate(self.W.blocks):
            for l in range(b.d_out[i]):
                c = reg.var(b.a_var) if b.a_var else reg.one()
                if b.out_weights and b.out_weights[i]:
                    c = c * reg.parse_monomial(b.out_weights[i][l])
                if self.W.hbar_placement == "out":
                    c = c * h ** -1
                out.append((b_idx, c))
        return out


def gauge_name(i: int, j: int) -> str:
    return f"x{i}_{j}"


def gauge_vars(reg: VariableRegistry, v: Sequence[int]) -> list[list[LaurentExpr]]:
    return [[reg.var(gauge_name(i, j)) for j in range(v[i])] for i in range(len(v))]


def tangent_class(data: QuiverData, v: Sequence[int], reg: VariableRegistry | None = None):
    """OUTPUT: (R, LieG, T = R - LieG) as KClasses in the gauge roots."""
    Q = data.Q
    if reg is None:
        reg = data.registry(v)
    for i in range(Q.n):
        for j in range(v[i]):
            if gauge_name(i, j) not in reg:
                raise QuiverError("registry lacks gauge roots for this dimension vector")
    x = gauge_vars(reg, v)
    R: list = []
    for a, (t, hd) in enumerate(Q.arrows):
        q = reg.parse_monomial(data.arrow_char(a))
        for xt in x[t]:
            for xh in x[hd]:
                R.append(q * xh * xt ** -1)
    for i in range(Q.n):
        for _, c in data.in_lines(reg, i):
            R += [xi * c ** -1 for xi in x[i]]
        for _, c in data.out_lines(reg, i):
            R += [c * xi ** -1 for xi in x[i]]
    lie = [x[i][j] * x[i][k] ** -1 for i in range(Q.n) for j in range(v[i]) for k in range(v[i])]
    Rk = KClass.from_chars(reg, R)
    Lk = KClass.from_chars(reg, lie)
    return Rk, Lk, Rk - Lk


def rep_dimension(Q: FramedQuiver, v: Sequence[int]) -> int:
    """dim R(v, d) by counting Hom spaces."""
    return (sum(v[t] * v[h] for t, h in Q.arrows)
            + sum(v[i] * (Q.d_in[i] + Q.d_out[i]) for i in range(Q.n)))


def symmetrize(Q: FramedQuiver):
    """Symmetric framing c_i = max(d_in, d_out).

    OUTPUT: (symmetrized quiver, list of added Hom blocks as (node, kind, k))
    with kind 'Hom(C^k,V)' (extra in-lines) or 'Hom(V,C^k)' (extra out-lines).
    """
    if not Q.is_symmetric():
        raise QuiverError("symmetrization needs a symmetric adjacency matrix")
    c = tuple(max(a, b) for a, b in zip(Q.d_in, Q.d_out))
    added = []
    for i in range(Q.n):
        if Q.d_in[i] < Q.d_out[i]:
            added.append((i, "Hom(C^k,V)", Q.d_out[i] - Q.d_in[i]))
        elif Q.d_in[i] > Q.d_out[i]:
            added.append((i, "Hom(V,C^k)", Q.d_in[i] - Q.d_out[i]))
    return FramedQuiver(Q.nodes, Q.arrows, c, c, Q.theta), added


def nakajima_polarization(data: QuiverData, r: Sequence[int], reg: VariableRegistry | None = None):
    """T_half = sum_arrows Hom(V_t,V_h) + sum_i (Hom(D_i,V_i) - End V_i),
    T_vir = T_half + h^-1 dual(T_half).  Framing lines D_i are the in-lines.
    """
    Q = data.Q
    if Q.has_loops():
        raise QuiverError("polarization needs a quiver without loops")
    if reg is None:
        reg = data.registry(r)
    x = gauge_vars(reg, r)
    ch: list = []
    for a, (t, hd) in enumerate(Q.arrows):
        q = reg.parse_monomial(data.arrow_char(a))
        ch += [q * xh * xt ** -1 for xt in x[t] for xh in x[hd]]
    for i in range(Q.n):
        ch += [xi * c ** -1 for _, c in data.in_lines(reg, i) for xi in x[i]]
    half = KClass.from_chars(reg, ch)
    half = half - KClass.from_chars(reg, [x[i][j] * x[i][k] ** -1 for i in range(Q.n)
                                          for j in range(r[i]) for k in range(r[i])])
    hinv = reg.var("h") ** -1
    tvir = half + half.dual().twist(hinv)
    return half, tvir


# ----------------------------------------------------------------------------
# Dynkin and minuscule combinatorics

def _leading_minors_positive(C: list[list[int]]) -> bool:
    n = len(C)
    for k in range(1, n + 1):
        M = [[Fraction(C[i][j]) for j in range(k)] for i in range(k)]
        det = Fraction(1)
        for c in range(k):
            p = next((r for r in range(c, k) if M[r][c] != 0), None)
            if p is None:
                return False
            if p != c:
                M[c], M[p] = M[p], M[c]
                det = -det
            det *= M[c][c]
            for r in range(c + 1, k):
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
        if det <= 0:
            return False
    return True


def is_dynkin(Q: FramedQuiver) -> bool:
    """Simply-laced finite type: no loops and positive definite Cartan matrix."""
    if Q.has_loops() or Q.n == 0:
        return False
    return _leading_minors_positive(cartan(Q))


def weyl_orbit(C: list[list[int]], lam: Sequence[int], limit: int = 100000) -> set:
    """Orbit of a weight (fundamental-weight coordinates) under simple reflections."""
    start = tuple(lam)
    seen = {start}
    todo = [start]
    n = len(C)
    while todo:
        mu = todo.pop()
        for i in range(n):
            if mu[i] == 0:
                continue
            nu = tuple(mu[j] - mu[i] * C[i][j] for j in range(n))
            if nu not in seen:
                seen.add(nu)
                todo.append(nu)
                if len(seen) > limit:
                    raise QuiverError("Weyl orbit too large")
    return seen


def tripled(Q: FramedQuiver, e: Sequence[int]) -> FramedQuiver:
    """Doubled arrows plus one loop per node, framed by e on the in side."""
    arrows = list(Q.arrows) + [(h, t) for t, h in Q.arrows] + [(i, i) for i in range(Q.n)]
    return FramedQuiver(Q.nodes, tuple(arrows), tuple(e), tuple(0 for _ in e), Q.theta)


def minuscule_check(Q: FramedQuiver, r: Sequence[int], e: Sequence[int], seed: int = 0) -> dict:
    """Weight test and inequality values u.(e - C r + C u) for u in Sigma_theta minus 0.

    OUTPUT: dict with keys 'minuscule_node', 'is_weight', 'values' [(u, value)],
    'verdict' in {'pass', 'fail', 'empty Nakajima variety'}.
    """
    if not is_dynkin(Q):
        raise QuiverError("minuscule_check needs a Dynkin quiver")
    support = [i for i, x in enumerate(e) if x]
    if len(support) != 1 or e[support[0]] != 1:
        raise QuiverError("framing must be a single fundamental weight")
    i0 = support[0]
    C = cartan(Q)
    n = Q.n
    lam = [1 if i == i0 else 0 for i in range(n)]
    orbit = weyl_orbit(C, lam)
    if any(abs(x) > 1 for mu in orbit for x in mu):
        raise QuiverError(f"node {Q.nodes[i0]} is not minuscule")
    target = tuple(lam[j] - sum(C[j][k] * r[k] for k in range(n)) for j in range(n))
    is_weight = target in orbit
    from .kn_strata import semistable_nonempty
    T = tripled(Q, e)
    Cr = [sum(C[i][k] * r[k] for k in range(n)) for i in range(n)]
    values = []
    for u in product(*[range(x + 1) for x in r]):
        if not any(u):
            continue
        m = [a - b for a, b in zip(r, u)]
        verdict = semistable_nonempty(T, m, seed=seed)
        if verdict != "nonempty":
            continue
        Cu = [sum(C[i][k] * u[k] for k in range(n)) for i in range(n)]
        val = sum(u[i] * (e[i] - Cr[i] + Cu[i]) for i in range(n))
        values.append((tuple(u), val))
    if not is_weight:
        verdict = "empty Nakajima variety"
    else:
        verdict = "pass" if all(v >= 1 for _, v in values) else "fail"
    return {"minuscule_node": i0, "is_weight": is_weight, "weight": target,
            "orbit_size": len(orbit), "values": values, "verdict": verdict}
