"""Torus-fixed components, normal bundles, roots, chambers and the ample order.

A torus A acts through the framing: every block of framing lines carries a
torus-A variable.  Blocks with the same variable form one group; a fixed
component splits each gauge space V_i into pieces indexed by groups.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .kn_strata import semistable_nonempty
from .laurent import LaurentExpr, VariableRegistry
from .quiver import FramedQuiver, KClass, QuiverData, QuiverError, gauge_name, tangent_class


class ResidualError(QuiverError):
    """The fixed component is not a point up to contraction; matrix entries would need residual roots."""


class ChamberError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class FixedComponent:
    parts: tuple          # parts[node][group] = multiplicity

    @property
    def v(self) -> tuple:
        return tuple(sum(p) for p in self.parts)

    def label(self) -> str:
        if len(self.parts) == 1:
            return "[" + "".join(str(k) for k in self.parts[0]) + "]"
        return "[" + "|".join("".join(str(k) for k in p) for p in self.parts) + "]"

    def __repr__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class ChamberSpec:
    xi: tuple
    roots: tuple


def _compositions(total: int, k: int):
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        yield (total,)
        return
    for a in range(total + 1):
        for rest in _compositions(total - a, k - 1):
            yield (a,) + rest


class TorusFixed:
    """Fixed-point data of a QuiverData for a list of gauge dimension vectors."""

    def __init__(self, data: QuiverData, v_list: Sequence[Sequence[int]], seed: int = 0,
                 reg: VariableRegistry | None = None, merge: dict | None = None):
        self.data = data
        self.seed = seed
        self.v_list = [tuple(v) for v in v_list]
        n = data.Q.n
        vmax = [max((v[i] for v in self.v_list), default=0) for i in range(n)]
        self.reg = reg if reg is not None else data.registry(vmax)
        self.flags: list[str] = []
        merge = merge or {}
        rep = lambda a: merge.get(a, a)
        avars = []
        for a in data.W.a_vars:
            if rep(a) not in avars:
                avars.append(rep(a))
        groups: list = [(a, [b for b, blk in enumerate(data.W.blocks)
                             if blk.a_var is not None and rep(blk.a_var) == a]) for a in avars]
        none_blocks = [b for b, blk in enumerate(data.W.blocks) if blk.a_var is None]
        if none_blocks:
            groups.append((None, none_blocks))
        for a, bl in groups:
            if len(bl) > 1:
                self.flags.append(f"blocks {bl} share the torus variable {a}; they are merged into one group")
        self.groups = groups
        self.trivial = not avars
        self._tangent: dict = {}
        self._chars: dict = {}
        self.components: list[FixedComponent] = []
        for v in self.v_list:
            self.components.extend(self._enumerate(v))
        self.components.sort()

    # framing of one group, as its own framed quiver
    def group_quiver(self, g: int) -> FramedQuiver:
        Q = self.data.Q
        din = tuple(sum(self.data.W.blocks[b].d_in[i] for b in self.groups[g][1]) for i in range(Q.n))
        dout = tuple(sum(self.data.W.blocks[b].d_out[i] for b in self.groups[g][1]) for i in range(Q.n))
        return FramedQuiver(Q.nodes, Q.arrows, din, dout, Q.theta)

    def _enumerate(self, v) -> list[FixedComponent]:
        Q = self.data.Q
        ng = len(self.groups)
        per_node = [list(_compositions(v[i], ng)) for i in range(Q.n)]
        out = []
        for choice in product(*per_node):
            ok = True
            for g in range(ng):
                m = [choice[i][g] for i in range(Q.n)]
                res = semistable_nonempty(self.group_quiver(g), m, seed=self.seed)
                if res == "nonempty":
                    continue
                if res not in ("empty",):
                    self.flags.append(f"component {FixedComponent(tuple(choice)).label()}: group {g} verdict {res}")
                ok = False
                break
            if ok:
                out.append(FixedComponent(tuple(choice)))
        return out

    def group_of_root(self, F: FixedComponent, i: int, j: int) -> int:
        acc = 0
        for g, k in enumerate(F.parts[i]):
            acc += k
            if j < acc:
                return g
        raise IndexError("root index out of range")

    def group_weight(self, g: int) -> tuple:
        a = self.groups[g][0]
        return tuple(Fraction(1 if a is not None and self.reg.vars[t].name == a else 0)
                     for t in self.reg.torus_indices)

    def a_wt(self, key: tuple) -> tuple:
        return tuple(Fraction(key[t], 2) for t in self.reg.torus_indices)

    def tangent(self, v) -> tuple:
        v = tuple(v)
        if v not in self._tangent:
            self._tangent[v] = tangent_class(self.data, v, self.reg)
        return self._tangent[v]

    # characters of the roots at a fixed component
    def _group_chars(self, g: int, m: Sequence[int]):
        """Unique generated set of T-characters for group g with node dims m, or None."""
        Q = self.data.Q
        reg = self.reg
        total = sum(m)
        if total == 0:
            return [[] for _ in range(Q.n)]
        sources = []
        for i in range(Q.n):
            for b, c in self.data.in_lines(reg, i):
                if b in self.groups[g][1]:
                    sources.append((i, next(iter(c.terms))))
        if len(set(sources)) != len(sources):
            return None
        verts = set(sources)
        frontier = list(sources)
        preds: dict = {s: set() for s in sources}
        arrows = []
        for a, (t, h) in enumerate(Q.arrows):
            q = reg.parse_monomial(self.data.arrow_char(a))
            arrows.append((t, h, next(iter(q.terms))))
        for _ in range(total):
            new = []
            for (i, k) in frontier:
                for t, h, qk in arrows:
                    if t != i:
                        continue
                    nk = tuple(a - b for a, b in zip(k, qk))
                    w = (h, nk)
                    preds.setdefault(w, set()).add((i, k))
                    if w not in verts:
                        verts.add(w)
                        new.append(w)
            frontier = new
        src = set(sources)
        by_node = [sorted(w for w in verts if w[0] == i) for i in range(Q.n)]
        found = []
        for pick in product(*[combinations(by_node[i], m[i]) for i in range(Q.n)]):
            S = set(w for p in pick for w in p)
            if all(w in src or (preds.get(w, set()) & S) for w in S):
                if _generated(S, src, preds):
                    found.append(pick)
                    if len(found) > 1:
                        return None
        if len(found) != 1:
            return None
        return [[k for (_, k) in found[0][i]] for i in range(Q.n)]

    def root_chars(self, F: FixedComponent) -> list[list[tuple]]:
        """Per node, the character keys of the roots in standard order; ResidualError if not a point."""
        if F in self._chars:
            res = self._chars[F]
        else:
            Q = self.data.Q
            res = [[] for _ in range(Q.n)]
            for g in range(len(self.groups)):
                m = [F.parts[i][g] for i in range(Q.n)]
                ch = self._group_chars(g, m)
                if ch is None:
                    res = None
                    break
                for i in range(Q.n):
                    res[i].extend(sorted(ch[i]))
            if res is not None:
                for i in range(Q.n):
                    if len(set(res[i])) != len(res[i]):
                        res = None
                        break
            self._chars[F] = res
        if res is None:
            raise ResidualError(f"fixed component {F.label()} is not residual-free")
        return res

    def is_residual_free(self, F: FixedComponent) -> bool:
        try:
            self.root_chars(F)
            return True
        except ResidualError:
            return False

    def restriction_map(self, F: FixedComponent, residual: bool = False) -> dict:
        """Gauge root name -> monomial.  With residual=True, roots become a_g * root."""
        reg = self.reg
        out = {}
        if residual or not self.is_residual_free(F):
            for i, p in enumerate(F.parts):
                for j in range(sum(p)):
                    g = self.group_of_root(F, i, j)
                    a = self.groups[g][0]
                    x = reg.var(gauge_name(i, j))
                    out[gauge_name(i, j)] = x * reg.var(a) if a is not None else x
            return out
        for i, keys in enumerate(self.root_chars(F)):
            for j, k in enumerate(keys):
                out[gauge_name(i, j)] = LaurentExpr(reg, {k: 1})
        return out

    def restrict(self, V: KClass, F: FixedComponent) -> KClass:
        return V.substitute(self.restriction_map(F))

    def tangent_at(self, F: FixedComponent) -> KClass:
        return self.restrict(self.tangent(F.v)[2], F)

    def phi_weight(self, F: FixedComponent, key: tuple) -> tuple:
        """A-weight of a gauge character under the cocharacter phi of F."""
        w = list(self.a_wt(key))
        for i, p in enumerate(F.parts):
            for j in range(sum(p)):
                e = key[self.reg.index(gauge_name(i, j))]
                if e:
                    gw = self.group_weight(self.group_of_root(F, i, j))
                    w = [a + Fraction(e, 2) * b for a, b in zip(w, gw)]
        return tuple(w)

    def line_bundle_weight(self, F: FixedComponent, theta: Sequence) -> tuple:
        """A-weight of L = prod det(V_i)^(-theta_i) at F."""
        n = len(self.reg.torus_indices)
        w = [Fraction(0)] * n
        for i, p in enumerate(F.parts):
            for g, k in enumerate(p):
                gw = self.group_weight(g)
                w = [a - Fraction(theta[i]) * k * b for a, b in zip(w, gw)]
        return tuple(w)


def _generated(S, src, preds) -> bool:
    reached = set(w for w in S if w in src)
    changed = True
    while changed:
        changed = False
        for w in S:
            if w not in reached and preds.get(w, set()) & reached:
                reached.add(w)
                changed = True
    return reached == S


def pair(xi: Sequence, w: Sequence) -> Fraction:
    return sum(Fraction(a) * b for a, b in zip(xi, w))


def enumerate_fixed_components(data: QuiverData, v_list, seed: int = 0) -> list[FixedComponent]:
    return TorusFixed(data, v_list, seed=seed).components


def normal_decompose(tf: TorusFixed, F: FixedComponent, xi: Sequence) -> tuple[KClass, KClass, KClass]:
    """(N_plus, N_minus, fixed part) of the tangent class at F for the cocharacter xi."""
    T = tf.tangent_at(F)
    plus, minus, fixed = {}, {}, {}
    for k, m in T.counts.items():
        p = pair(xi, tf.a_wt(k))
        (plus if p > 0 else minus if p < 0 else fixed)[k] = m
    reg = T.reg
    return KClass(reg, plus), KClass(reg, minus), KClass(reg, fixed)


def roots(tf: TorusFixed) -> list[tuple]:
    """A-weights in the moving parts of the tangent classes, up to sign."""
    out = set()
    for F in tf.components:
        for k in tf.tangent_at(F).counts:
            w = tf.a_wt(k)
            if any(w):
                neg = tuple(-x for x in w)
                out.add(max(w, neg))
    return sorted(out)


def validate_chamber(tf: TorusFixed, xi: Sequence) -> ChamberSpec:
    if len(xi) != len(tf.reg.torus_indices):
        raise ChamberError(f"cocharacter needs {len(tf.reg.torus_indices)} entries")
    rs = roots(tf)
    for r in rs:
        if pair(xi, r) == 0:
            raise ChamberError(f"cocharacter {tuple(str(x) for x in xi)} lies on the wall of root {tuple(str(x) for x in r)}")
    return ChamberSpec(tuple(Fraction(x) for x in xi), tuple(rs))


def roots_and_chamber(tf: TorusFixed, xi: Sequence | None = None):
    rs = roots(tf)
    return rs if xi is None else (rs, validate_chamber(tf, xi))


def ample_compare(tf: TorusFixed, F: FixedComponent, F2: FixedComponent, theta: Sequence, xi: Sequence) -> str:
    """'less' if F < F2, 'greater' if F > F2, 'equal' if the pairing vanishes."""
    wa = tf.line_bundle_weight(F, theta)
    wb = tf.line_bundle_weight(F2, theta)
    p = pair(xi, [a - b for a, b in zip(wa, wb)])
    return "less" if p > 0 else "greater" if p < 0 else "equal"


def _a_multiset(lines, reg: VariableRegistry) -> list:
    keep = set(reg.torus_indices)
    out = []
    for _, c in lines:
        k = next(iter(c.terms))
        out.append(tuple(e if i in keep else 0 for i, e in enumerate(k)))
    return sorted(out)


def duality_check(data: QuiverData, v: Sequence[int] | None = None) -> str:
    """'self-dual', 'pseudo-self-dual' or 'neither' (flavour characters ignored)."""
    Q = data.Q
    v = tuple(v) if v is not None and any(v) else tuple(1 for _ in range(Q.n))
    reg = data.registry(v)
    R, _, _ = tangent_class(data, v, reg)
    Rf = R.drop_kinds(["flavour"])
    if Rf == Rf.dual():
        return "self-dual"
    if not Q.is_symmetric():
        return "neither"
    for i in range(Q.n):
        ins = _a_multiset(data.in_lines(reg, i), reg)
        outs = _a_multiset(data.out_lines(reg, i), reg)
        small, big = (ins, outs) if len(ins) <= len(outs) else (outs, ins)
        rest = list(big)
        for c in small:
            if c not in rest:
                return "neither"
            rest.remove(c)
        if not set(big) <= set(small):
            return "neither"
    return "pseudo-self-dual"
