"""Weyl-sum envelope classes, envelope matrices and the identity checkers.

Matrices have columns indexed by the source component F and rows by the
restriction target F'.  Entries between different gauge dimension vectors
are zero.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Callable, Sequence, Union

from .euler import coh_factor, euler_class, k_factor
from .laurent import (FracMatrix, LaurentExpr, RationalFn, VariableRegistry, exact_div,
                      parse_fraction, rf_equal)
from .polytopes import NewtonPolytope, degree_axiom_check, hull
from .quiver import (Block, FramedQuiver, KClass, QuiverData, QuiverError, StabilityError,
                     gauge_name, minuscule_check, nakajima_polarization)
from .torus_fixed import (FixedComponent, TorusFixed, ample_compare, normal_decompose, pair,
                          validate_chamber)


class GenericityError(ValueError):
    """Slope on a wall."""


class EnvelopeError(ValueError):
    pass


# ----------------------------------------------------------------------------
# slopes

@dataclass(frozen=True)
class Slope:
    """One rational number per node."""
    values: tuple

    @classmethod
    def of(cls, s, n: int) -> "Slope":
        if isinstance(s, Slope):
            out = s
        elif isinstance(s, str):
            out = cls(tuple(parse_fraction(t) for t in s.split(",")))
        elif isinstance(s, (int, Fraction)):
            out = cls((Fraction(s),) * n)
        else:
            out = cls(tuple(parse_fraction(t) if isinstance(t, str) else Fraction(t) for t in s))
        if len(out.values) == 1 and n > 1:
            out = cls(out.values * n)
        if len(out.values) != n:
            raise EnvelopeError(f"slope needs {n} entries, got {len(out.values)}")
        return out

    def __add__(self, other) -> "Slope":
        o = other.values if isinstance(other, Slope) else tuple(Fraction(x) for x in other)
        return Slope(tuple(a + b for a, b in zip(self.values, o)))

    def __neg__(self) -> "Slope":
        return Slope(tuple(-a for a in self.values))

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.values)


SlopeLike = Union[Slope, str, Fraction, int, Sequence, Callable]


def _slope_for(s, v, n: int) -> Slope:
    if callable(s) and not isinstance(s, Slope):
        return Slope.of(s(tuple(v)), n)
    return Slope.of(s, n)


def nearest_integer(x: Fraction) -> int:
    """floor(x + 1/2); half-integers are walls."""
    x = Fraction(x)
    if (x + Fraction(1, 2)).denominator == 1:
        raise GenericityError(f"slope value {x} is on a wall (half-integral after shift)")
    return math.floor(x + Fraction(1, 2))


# ----------------------------------------------------------------------------
# cosets W / W^phi as ordered set partitions

def node_cosets(sizes: Sequence[int]) -> list[tuple]:
    """Ordered set partitions of range(sum(sizes)) into blocks of the given sizes.

    OUTPUT: list of maps p with p[j] = root receiving the j-th standard root.
    """
    n = sum(sizes)
    out = []

    def rec(remaining, k, acc):
        if k == len(sizes):
            out.append(tuple(acc))
            return
        for pick in combinations(remaining, sizes[k]):
            rest = [x for x in remaining if x not in pick]
            rec(rest, k + 1, acc + list(pick))

    rec(list(range(n)), 0, [])
    return out


def weyl_cosets(parts: Sequence[Sequence[int]]) -> list[tuple]:
    return list(product(*[node_cosets(p) for p in parts]))


def _ident(parts) -> tuple:
    return tuple(tuple(range(sum(p))) for p in parts)


# ----------------------------------------------------------------------------
# Weyl sums

def _gauge_slots(reg: VariableRegistry, v: Sequence[int]) -> list[tuple[int, int, int]]:
    return [(reg.index(gauge_name(i, j)), i, j) for i in range(len(v)) for j in range(v[i])]


def _canonical(f: LaurentExpr, mode: str):
    """f = unit * canon with canon normalized (lead term 1 in K, lead coefficient 1 in coh)."""
    k, c = f.lead()
    if mode == "K":
        unit = LaurentExpr(f.reg, {k: c})
    else:
        unit = f.reg.const(c)
    return unit, exact_div(f, unit)


def combine_terms(terms: list, reg: VariableRegistry, mode: str) -> RationalFn:
    """Sum of num_t / prod(den factors_t) over a common denominator, with cancellation."""
    if not terms:
        return RationalFn(reg.zero())
    prepared = []
    dmax: Counter = Counter()
    for num, dens in terms:
        cnt: Counter = Counter()
        for f in dens:
            unit, canon = _canonical(f, mode)
            num = exact_div(num, unit)
            cnt[canon] += 1
        prepared.append((num, cnt))
        for k, m in cnt.items():
            dmax[k] = max(dmax[k], m)
    total = reg.zero()
    for num, cnt in prepared:
        t = num
        for f, m in dmax.items():
            if m - cnt[f]:
                t = t * f ** (m - cnt[f])
        total = total + t
    den_list = []
    for f, m in sorted(dmax.items(), key=lambda fm: fm[0].sorted_terms()):
        for _ in range(m):
            q = exact_div(total, f) if not total.is_zero() else total
            if q is not None:
                total = q
            else:
                den_list.append(f)
    den = reg.one()
    for f in den_list:
        den = den * f
    return RationalFn(total, den)


@dataclass
class WeylSum:
    """sum over cosets w of w(base * e(num) / e(den)).

    base: list of (coefficient, keys); in K a term is coefficient * prod of the
    characters, in cohomology coefficient * prod of their linear forms.
    """
    reg: VariableRegistry
    parts: tuple
    mode: str
    base: list
    num: list
    den: list
    cosets: list = field(default_factory=list)

    def __post_init__(self):
        if not self.cosets:
            self.cosets = weyl_cosets(self.parts)
        self.v = tuple(sum(p) for p in self.parts)
        self._slots = _gauge_slots(self.reg, self.v)
        self.out_reg = self.reg if self.mode == "K" else self.reg.additive()

    def _sub(self, key: tuple, coset, target) -> tuple:
        k = list(key)
        acc = [0] * len(k)
        for idx, i, j in self._slots:
            e = k[idx]
            if e:
                k[idx] = 0
                t = target[i][coset[i][j]]
                for a, b in enumerate(t):
                    if b:
                        acc[a] += e * b
        if any(x % 2 for x in acc):
            raise EnvelopeError("restriction produced a quarter exponent")
        return tuple(a + b // 2 for a, b in zip(k, acc))

    def _factor(self, key: tuple) -> LaurentExpr:
        return k_factor(self.reg, key) if self.mode == "K" else coh_factor(self.reg, key)

    def _base_value(self, coset, target) -> LaurentExpr:
        out = self.out_reg.zero()
        for c, keys in self.base:
            if self.mode == "K":
                tot = [0] * len(self.reg)
                for k in keys:
                    tot = [a + b for a, b in zip(tot, self._sub(k, coset, target))]
                out = out + LaurentExpr(self.reg, {tuple(tot): c})
            else:
                t = self.out_reg.const(c)
                for k in keys:
                    t = t * coh_factor(self.reg, self._sub(k, coset, target))
                out = out + t
        return out

    def evaluate(self, target: Sequence[Sequence[tuple]]) -> RationalFn:
        """Substitute root j of node i by the character target[i][j] (doubled key) and sum."""
        terms = []
        for cs in self.cosets:
            num = self._base_value(cs, target)
            if num.is_zero():
                continue
            dead = False
            for k in self.num:
                f = self._factor(self._sub(k, cs, target))
                if f.is_zero():
                    dead = True
                    break
                num = num * f
            if dead:
                continue
            dens = []
            for k in self.den:
                f = self._factor(self._sub(k, cs, target))
                if f.is_zero():
                    raise EnvelopeError("a denominator factor vanishes at this restriction")
                dens.append(f)
            terms.append((num, dens))
        return combine_terms(terms, self.out_reg, self.mode)

    def symbolic(self) -> RationalFn:
        """The class as a rational function of the gauge roots."""
        target = [[self.reg.key_from({gauge_name(i, j): 1}) for j in range(self.v[i])]
                  for i in range(len(self.v))]
        return self.evaluate(target)

    def is_weyl_invariant(self) -> bool:
        S = self.symbolic()
        reg = S.reg
        suffix = "" if self.mode == "K" else "_hat"
        for i, vi in enumerate(self.v):
            for j in range(vi - 1):
                a, b = gauge_name(i, j) + suffix, gauge_name(i, j + 1) + suffix
                swapped = S.substitute({a: reg.var(b), b: reg.var(a)})
                if not rf_equal(S, swapped):
                    return False
        return True


# ----------------------------------------------------------------------------
# Hall envelope classes

def _split_phi(tf: TorusFixed, F: FixedComponent, V: KClass, xi) -> tuple[dict, dict, dict]:
    repl, attr, fixed = {}, {}, {}
    for k, m in V.items():
        p = pair(xi, tf.phi_weight(F, k))
        (repl if p < 0 else attr if p > 0 else fixed)[k] = m
    return repl, attr, fixed


def _per_root_exponents(tf: TorusFixed, F: FixedComponent, counts: dict) -> dict:
    """(node, group) -> exponent of det(class) in each root of that group (must be uniform)."""
    reg = tf.reg
    det = [0] * len(reg)
    for k, m in counts.items():
        det = [a + m * b for a, b in zip(det, k)]
    out = {}
    for i, p in enumerate(F.parts):
        for j in range(sum(p)):
            g = tf.group_of_root(F, i, j)
            e = Fraction(det[reg.index(gauge_name(i, j))], 2)
            if out.setdefault((i, g), e) != e:
                raise EnvelopeError("determinant exponent is not uniform within a block of roots")
    return out


def _chi_key(tf: TorusFixed, F: FixedComponent, s: Slope, expo: dict, sign: int) -> tuple:
    """Character prod det(V_i^(g))^n with n = nearest(s_i + sign * e/2)."""
    reg = tf.reg
    key = [0] * len(reg)
    for i, p in enumerate(F.parts):
        for j in range(sum(p)):
            g = tf.group_of_root(F, i, j)
            n = nearest_integer(s.values[i] + sign * expo.get((i, g), Fraction(0)) / 2)
            key[reg.index(gauge_name(i, j))] = 2 * n
    return tuple(key)


def _expand(counts: dict) -> tuple[list, list]:
    num, den = [], []
    for k, m in counts.items():
        (num if m > 0 else den).extend([k] * abs(m))
    return num, den


def hall_envelope_class(tf: TorusFixed, F: FixedComponent, xi: Sequence, s: SlopeLike = 0,
                        mode: str = "K") -> WeylSum:
    """sum_{w in W/W^phi} w(chi * e(T^{A,phi-repl})); chi is dropped in cohomology.

    INPUT: tf fixed-point data, F a fixed component, xi a cocharacter in the chamber.
    OUTPUT: WeylSum; `chi_key` attribute holds chi (K mode).
    """
    if mode not in ("K", "coh"):
        raise ValueError(f"unknown theory {mode!r}")
    if not tf.data.Q.is_cyclic_stability():
        raise StabilityError("only cyclic stability (theta_i < 0) is supported")
    n = tf.data.Q.n
    T = tf.tangent(F.v)[2]
    if tf.trivial:
        repl = {}
    else:
        validate_chamber(tf, xi)
        repl, _, _ = _split_phi(tf, F, T, xi)
    num, den = _expand(repl)
    base = [(1, [])]
    chi = tf.reg.zero_key()
    if mode == "K":
        sl = _slope_for(s, F.v, n)
        chi = _chi_key(tf, F, sl, _per_root_exponents(tf, F, repl), +1)
        base = [(1, [chi])]
    ws = WeylSum(tf.reg, F.parts, mode, base, num, den)
    ws.chi_key = chi
    return ws


def restrict_to_fixed(tf: TorusFixed, ws: WeylSum, F2: FixedComponent) -> RationalFn:
    """Restriction of a Weyl-symmetric class to a residual-free fixed component."""
    if tuple(F2.v) != tuple(ws.v):
        raise EnvelopeError("block shape mismatch between class and fixed component")
    return ws.evaluate(tf.root_chars(F2))


# ----------------------------------------------------------------------------
# normalizers and envelope matrices

@dataclass
class Normalizer:
    """coh: sign per component; K: +- one character per component (LaurentExpr monomial)."""
    mode: str
    values: dict

    def validate(self):
        for F, x in self.values.items():
            if self.mode == "coh":
                if x not in (1, -1):
                    raise EnvelopeError(f"cohomological normalizer at {F} must be a sign")
            else:
                if not isinstance(x, LaurentExpr) or not x.is_monomial() or \
                        abs(next(iter(x.terms.values()))) != 1:
                    raise EnvelopeError(f"K normalizer at {F} must be +- a character")
        return self

    def value(self, F, reg: VariableRegistry) -> LaurentExpr:
        x = self.values.get(F, 1)
        if isinstance(x, LaurentExpr):
            return x
        return reg.const(x)

    def to_json(self) -> dict:
        return {"mode": self.mode,
                "values": {F.label(): (x.to_json() if isinstance(x, LaurentExpr) else x)
                           for F, x in self.values.items()}}


@dataclass
class EnvelopeMatrix:
    index: list
    entries: list
    chamber: tuple
    slope: object
    theory: str
    mu: tuple
    normalizer: Normalizer | None = None
    setup: object = None
    kind: str = "hall"

    @property
    def n(self) -> int:
        return len(self.index)

    @property
    def reg(self) -> VariableRegistry:
        return self.entries[0][0].reg

    def entry(self, F2: FixedComponent, F: FixedComponent) -> RationalFn:
        return self.entries[self.index.index(F2)][self.index.index(F)]

    def labels(self) -> list[str]:
        return [F.label() for F in self.index]

    def to_frac(self) -> FracMatrix:
        return FracMatrix.from_rf(self.entries)

    def to_json(self) -> dict:
        return {"index": self.labels(),
                "chamber": [str(x) for x in self.chamber],
                "slope": _slope_json(self.slope, self.index),
                "theory": self.theory,
                "mu": list(self.mu),
                "normalizer": self.normalizer.to_json() if self.normalizer else None,
                "variables": self.reg.names,
                "flags": list(getattr(self.setup, "flags", [])),
                "entries": [[x.to_json() for x in row] for row in self.entries]}

    def to_latex(self) -> str:
        return matrix_latex(self.entries)


def _slope_json(s, index) -> object:
    if isinstance(s, Slope):
        return [str(x) for x in s.values]
    if callable(s):
        vs = sorted({F.v for F in index})
        return {",".join(map(str, v)): [str(x) for x in Slope.of(s(v), len(v)).values] for v in vs}
    return str(s)


def matrix_latex(rows: list) -> str:
    body = " \\\\\n".join(" & ".join(x.to_latex() for x in row) for row in rows)
    return "\\begin{pmatrix}\n" + body + "\n\\end{pmatrix}"


def matrix_from_json(reg: VariableRegistry, data: dict) -> list:
    return [[RationalFn.from_json(reg, x) for x in row] for row in data["entries"]]


def _mu(tf: TorusFixed) -> tuple:
    Q = tf.data.Q
    return tuple(b - a for a, b in zip(Q.d_in, Q.d_out))


def _identity(reg: VariableRegistry, n: int) -> list:
    return [[RationalFn(reg.one() if i == j else reg.zero()) for j in range(n)] for i in range(n)]


def envelope_matrix(tf: TorusFixed, xi: Sequence, s: SlopeLike = 0, mode: str = "K",
                    normalizer: Normalizer | None = None) -> EnvelopeMatrix:
    """Hall envelope matrix over tf.components (columns = sources).

    s may be a callable v -> slope, used by the duality check.
    """
    comps = list(tf.components)
    reg = tf.reg if mode == "K" else tf.reg.additive()
    xi = tuple(Fraction(x) for x in xi)
    if tf.trivial:
        M = _identity(reg, len(comps))
    else:
        validate_chamber(tf, xi)
        for F in comps:
            tf.root_chars(F)
        M = [[RationalFn(reg.zero()) for _ in comps] for _ in comps]
        for c, F in enumerate(comps):
            ws = hall_envelope_class(tf, F, xi, s, mode)
            chiF = None
            if mode == "K":
                chiF = LaurentExpr(reg, {ws._sub(ws.chi_key, _ident(F.parts), tf.root_chars(F)): 1})
            for r, F2 in enumerate(comps):
                if F2.v != F.v:
                    continue
                val = restrict_to_fixed(tf, ws, F2)
                if chiF is not None:
                    val = RationalFn(exact_div(val.num, chiF), val.den)
                M[r][c] = val
    out = EnvelopeMatrix(comps, M, xi, s if callable(s) else (Slope.of(s, tf.data.Q.n) if mode == "K" else None),
                         mode, _mu(tf), None, tf)
    if normalizer is not None:
        out = apply_normalizer(out, normalizer)
    return out


def apply_normalizer(M: EnvelopeMatrix, nz: Normalizer) -> EnvelopeMatrix:
    """Scale column F by the normalizer value at F."""
    nz.validate()
    if nz.mode != M.theory:
        raise EnvelopeError("normalizer theory does not match the matrix")
    for F in nz.values:
        if F not in M.index:
            raise EnvelopeError(f"normalizer names an unknown component {F}")
    reg = M.reg
    cols = [nz.value(F, reg) for F in M.index]
    entries = [[x * RationalFn(cols[j]) for j, x in enumerate(row)] for row in M.entries]
    return EnvelopeMatrix(M.index, entries, M.chamber, M.slope, M.theory, M.mu, nz, M.setup, M.kind)


def polarization_normalizer(tf: TorusFixed, xi: Sequence, half_of: Callable | None = None) -> Normalizer:
    """(-1)^{rk T_half,+} (det N^-_F / det T_half,F)^(1/2) per component, moving parts only.

    half_of maps v to a half tangent class; the default is arrows plus in-framing minus End V.
    """
    if half_of is None:
        half_of = lambda v: nakajima_polarization(tf.data, v, tf.reg)[0]
    xi = tuple(Fraction(x) for x in xi)
    vals = {}
    for F in tf.components:
        _, minus, _ = normal_decompose(tf, F, xi)
        hm = tf.restrict(half_of(F.v), F).filter(lambda k: any(tf.a_wt(k)))
        rk_plus = hm.filter(lambda k: pair(xi, tf.a_wt(k)) > 0).rank()
        d = [a - b for a, b in zip(minus.det(), hm.det())]
        if any(x % 2 for x in d):
            raise EnvelopeError("normalizer needs a square root of det N^- / det T_half")
        vals[F] = LaurentExpr(tf.reg, {tuple(x // 2 for x in d): (-1) ** (rk_plus % 2)})
    return Normalizer("K", vals)


# ----------------------------------------------------------------------------
# axioms

def _slope_weight(tf: TorusFixed, F: FixedComponent, s: Slope) -> tuple:
    n = len(tf.reg.torus_indices)
    w = [Fraction(0)] * n
    for i, p in enumerate(F.parts):
        for g, k in enumerate(p):
            gw = tf.group_weight(g)
            w = [a + s.values[i] * k * b for a, b in zip(w, gw)]
    return tuple(w)


def shift_weight(tf: TorusFixed, F: FixedComponent, xi: Sequence, s: Slope, half: KClass | None = None) -> tuple:
    """A-weight of det(N^-_F)^(1/2) (divided by det(N_half)^(1/2) when a polarization is given)
    plus the slope restricted to F."""
    _, minus, _ = normal_decompose(tf, F, xi)
    d = tf.a_wt(minus.det())
    w = [x / 2 for x in d]
    if half is not None:
        hm = tf.restrict(half, F).filter(lambda k: any(tf.a_wt(k)))
        w = [a - x / 2 for a, x in zip(w, tf.a_wt(hm.det()))]
    sw = _slope_weight(tf, F, s)
    return tuple(a + b for a, b in zip(w, sw))


def expected_diagonal(M: EnvelopeMatrix, F: FixedComponent) -> RationalFn:
    tf = M.setup
    _, minus, _ = normal_decompose(tf, F, M.chamber)
    e = euler_class(minus, M.theory)
    if M.normalizer is not None:
        e = e * RationalFn(M.normalizer.value(F, e.reg))
    return e


def verify_axioms(M: EnvelopeMatrix, theta: Sequence | None = None) -> dict:
    """Support, normalization and degree axioms with witnesses."""
    tf = M.setup
    report = {"support": {"ok": True, "witness": None},
              "normalization": {"ok": True, "witness": None},
              "degree": {"ok": True, "witnesses": []}}
    if tf is None or getattr(tf, "trivial", False):
        ident = all(rf_equal(M.entries[i][j], RationalFn(M.reg.one() if i == j else M.reg.zero()))
                    for i in range(M.n) for j in range(M.n))
        report["support"]["ok"] = report["normalization"]["ok"] = ident
        report["ok"] = ident
        return report
    theta = tuple(theta) if theta is not None else tuple(tf.data.Q.theta)
    half_of = getattr(tf, "half", None)
    for c, F in enumerate(M.index):
        for r, F2 in enumerate(M.index):
            x = M.entries[r][c]
            if r == c:
                exp = expected_diagonal(M, F)
                if not rf_equal(x, exp):
                    report["normalization"]["ok"] = False
                    report["normalization"]["witness"] = report["normalization"]["witness"] or \
                        {"component": F.label(), "entry": str(x), "expected": str(exp)}
                continue
            if x.is_zero():
                continue
            if F2.v != F.v or ample_compare(tf, F, F2, theta, M.chamber) != "less":
                report["support"]["ok"] = False
                report["support"]["witness"] = report["support"]["witness"] or \
                    {"row": F2.label(), "column": F.label(), "entry": str(x)}
            if M.normalizer is not None:
                x = x * RationalFn(M.reg.one(), M.normalizer.value(F, M.reg))
            if M.theory == "K":
                s = _slope_for(M.slope, F.v, tf.data.Q.n)
                half = half_of(F.v) if half_of else None
                verdict, detail = degree_axiom_check(x, tf, F2, F, M.chamber, s, "K", half=half)
            else:
                verdict, detail = degree_axiom_check(x, tf, F2, F, M.chamber, None, "coh")
            if verdict != "strict":
                report["degree"]["ok"] = False
                report["degree"]["witnesses"].append({"row": F2.label(), "column": F.label(),
                                                      "verdict": verdict, "detail": detail})
    report["ok"] = all(report[k]["ok"] for k in ("support", "normalization", "degree"))
    return report


# ----------------------------------------------------------------------------
# R-matrices and Yang-Baxter

def rmatrix(M_less: EnvelopeMatrix, M_greater: EnvelopeMatrix) -> list:
    """(M_less)^-1 M_greater."""
    if M_less.labels() != M_greater.labels():
        raise EnvelopeError("envelope matrices have different index sets")
    try:
        inv = M_less.to_frac().inverse()
    except ZeroDivisionError as exc:
        raise EnvelopeError("M_less is singular") from exc
    return (inv @ M_greater.to_frac()).to_rf()


def _frac_identity(reg: VariableRegistry, n: int) -> FracMatrix:
    return FracMatrix([[reg.one() if i == j else reg.zero() for j in range(n)] for i in range(n)])


@dataclass
class ThreeFactor:
    """Three copies of one framing block, weighted by a1, a2, a3."""
    nodes: tuple
    arrows: tuple
    d_in: tuple
    d_out: tuple
    arrow_chars: tuple = ()
    hbar_placement: str = "out"
    theta: tuple = ()
    seed: int = 0

    def __post_init__(self):
        self.avars = ("a1", "a2", "a3")
        self.data = self.block_data((0, 1, 2))
        one = self.block_data((0,))
        n = len(self.nodes)
        states = [tuple(v) for v in product(*[range(x + 1) for x in self.d_in])]
        tf1 = TorusFixed(one, states, seed=self.seed)
        self.states = sorted({F.v for F in tf1.components})
        vmax = [3 * max((st[i] for st in self.states), default=0) for i in range(n)]
        self.reg = self.data.registry(vmax)

    def setup(self) -> TorusFixed:
        vs = sorted({tuple(map(sum, zip(*b))) for b in self.basis()})
        return TorusFixed(self.data, vs, seed=self.seed, reg=self.reg)

    def block_data(self, which: Sequence[int]) -> QuiverData:
        blocks = [Block(tuple(self.d_in), tuple(self.d_out), self.avars[k]) for k in which]
        return QuiverData.from_blocks(self.nodes, self.arrows, blocks, self.arrow_chars,
                                      self.hbar_placement, self.theta)

    def basis(self) -> list[tuple]:
        return list(product(self.states, repeat=3))

    def pair_setup(self, i: int, j: int) -> TorusFixed:
        data = self.block_data((i, j))
        vs = sorted({tuple(a + b for a, b in zip(x, y)) for x in self.states for y in self.states})
        return TorusFixed(data, vs, seed=self.seed, reg=self.reg)

    def chamber(self, i: int, j: int, sign: int = 1) -> tuple:
        xi = [0, 0, 0]
        xi[i], xi[j] = sign, -sign
        return tuple(xi)


def _pair_state(F: FixedComponent) -> tuple:
    return tuple(tuple(p[g] for p in F.parts) for g in range(2))


def r_pair(tf: TorusFixed, tfac: ThreeFactor, i: int, j: int, s: Slope, normalized: bool = False) -> dict:
    """R_ij^s on pair states: {(state_i', state_j'), (state_i, state_j)} -> RationalFn.

    normalized: rescale both envelope matrices by the polarization normalizer first.
    """
    mats = []
    for sign in (1, -1):
        xi = tfac.chamber(i, j, sign)
        nz = polarization_normalizer(tf, xi) if normalized else None
        mats.append(envelope_matrix(tf, xi, s, normalizer=nz))
    Mg, Ml = mats
    R = rmatrix(Ml, Mg)
    st = [_pair_state(F) for F in Mg.index]
    return {(st[a], st[b]): R[a][b] for a in range(len(st)) for b in range(len(st))}


def embed_r(tfac: ThreeFactor, i: int, j: int, slope_of_state: Callable, normalized: bool = False) -> FracMatrix:
    """R_ij on the triple basis; identity on the untouched factor, whose state fixes the slope."""
    m = 3 - i - j
    basis = tfac.basis()
    tf = tfac.pair_setup(i, j)
    cache: dict = {}
    reg = tfac.reg
    rows = []
    for out in basis:
        row = []
        for inp in basis:
            if out[m] != inp[m]:
                row.append(RationalFn(reg.zero()))
                continue
            s = slope_of_state(inp[m])
            if s not in cache:
                cache[s] = r_pair(tf, tfac, i, j, s, normalized)
            R = cache[s]
            row.append(R.get(((out[i], out[j]), (inp[i], inp[j])), RationalFn(reg.zero())))
        rows.append(row)
    return FracMatrix.from_rf(rows)


def _witness(tfac: ThreeFactor, L: FracMatrix, R: FracMatrix, ij) -> dict:
    i, j = ij
    basis = tfac.basis()
    lab = lambda b: "[" + "".join("".join(map(str, st)) for st in b) + "]"
    return {"row": lab(basis[i]), "column": lab(basis[j]),
            "lhs": str(L.entry(i, j).simplify()), "rhs": str(R.entry(i, j).simplify())}


def check_ybe(tfac: ThreeFactor, s: SlopeLike, shifted: bool = False,
              normalization: str | None = None) -> dict:
    """Plain or slope-shifted Yang-Baxter equation on three factors.

    Shifted: R12^{s+mu3+} R13^{s+mu2-} R23^{s+mu1+} = R23^{s+mu1-} R13^{s+mu2+} R12^{s+mu3-}
    with mu+ = (d_in - k)/2, mu- = (k - d_out)/2, k the state of the untouched factor.
    normalization: 'hall' (diagonal = e(N^-)) or 'polarization'; the default is
    'polarization' for the plain equation and 'hall' for the shifted one.
    """
    n = len(tfac.nodes)
    s = Slope.of(s, n)
    if normalization is None:
        normalization = "hall" if shifted else "polarization"
    if normalization not in ("hall", "polarization"):
        raise ValueError(f"unknown normalization {normalization!r}")
    norm = normalization == "polarization"
    if shifted:
        plus = lambda k: s + [Fraction(a - x, 2) for a, x in zip(tfac.d_in, k)]
        minus = lambda k: s + [Fraction(x - b, 2) for b, x in zip(tfac.d_out, k)]
    else:
        plus = minus = lambda k: s
    R12p, R13m, R23p = (embed_r(tfac, 0, 1, plus, norm), embed_r(tfac, 0, 2, minus, norm),
                        embed_r(tfac, 1, 2, plus, norm))
    R23m, R13p, R12m = (embed_r(tfac, 1, 2, minus, norm), embed_r(tfac, 0, 2, plus, norm),
                        embed_r(tfac, 0, 1, minus, norm))
    L = R12p @ R13m @ R23p
    R = R23m @ R13p @ R12m
    ok, ij = L.equals(R)
    return {"verdict": "equal" if ok else "unequal",
            "normalization": normalization,
            "witness": None if ok else _witness(tfac, L, R, ij),
            "basis": ["".join("".join(map(str, st)) for st in b) for b in tfac.basis()]}


# ----------------------------------------------------------------------------
# duality

def canonical_shift(data: QuiverData, v: Sequence[int]) -> tuple:
    """G-part of K/2 = -det(T)/2 per node: -(d_in - d_out + sum_in v_t - sum_out v_h)/2."""
    Q = data.Q
    out = []
    for i in range(Q.n):
        c = Q.d_in[i] - Q.d_out[i]
        c += sum(v[t] for t, h in Q.arrows if h == i) - sum(v[h] for t, h in Q.arrows if t == i)
        out.append(Fraction(-c, 2))
    return tuple(out)


def invariant_function_weights(data: QuiverData, reg: VariableRegistry) -> list[tuple]:
    """A-weights of the generating invariant functions j_c (path) i_b: weight(in) - weight(out).

    Closed cycles carry no A-weight and are included as zero vectors when present.
    """
    Q = data.Q
    reach = [{i} for i in range(Q.n)]
    for i in range(Q.n):
        todo = [i]
        while todo:
            t = todo.pop()
            for a, b in Q.arrows:
                if a == t and b not in reach[i]:
                    reach[i].add(b)
                    todo.append(b)
    tidx = reg.torus_indices
    wt = lambda c: tuple(Fraction(next(iter(c.terms))[k], 2) for k in tidx)
    out = set()
    for i in range(Q.n):
        for _, cin in data.in_lines(reg, i):
            for j in reach[i]:
                for _, cout in data.out_lines(reg, j):
                    out.add(tuple(a - b for a, b in zip(wt(cin), wt(cout))))
    if Q.arrows and any(i in reach[h] for t, h in Q.arrows for i in [t]):
        out.add(tuple(Fraction(0) for _ in tidx))
    return sorted(out)


def check_duality(tf: TorusFixed, xi: Sequence, s: SlopeLike = 0, mode: str = "K") -> dict:
    """transpose(M(-xi, -s)) diag(1/e(N_F)) M(xi, s + K/2) = Id, plus the integrality report."""
    n = tf.data.Q.n
    xi = tuple(Fraction(x) for x in xi)
    neg = tuple(-x for x in xi)
    if mode == "K":
        s0 = Slope.of(s, n)
        sp = lambda v: s0 + canonical_shift(tf.data, v)
        sm = -s0
    else:
        sp = sm = 0
    Mp = envelope_matrix(tf, xi, sp, mode)
    Mm = envelope_matrix(tf, neg, sm, mode)
    reg = Mp.reg
    D = []
    for F in Mp.index:
        if tf.trivial:
            D.append(RationalFn(reg.one()))
            continue
        plus, minus, _ = normal_decompose(tf, F, xi)
        e = euler_class(plus + minus, mode)
        if e.is_zero():
            raise EnvelopeError(f"localization factor vanishes at {F.label()}")
        D.append(RationalFn(e.den, e.num))
    Dm = [[D[i] if i == j else RationalFn(reg.zero()) for j in range(len(D))] for i in range(len(D))]
    P = Mm.to_frac().transpose() @ FracMatrix.from_rf(Dm) @ Mp.to_frac()
    ok = P.is_identity()
    witness = None
    if not ok:
        I = _frac_identity(reg, P.n)
        _, ij = P.equals(I)
        witness = {"row": Mp.index[ij[0]].label(), "column": Mp.index[ij[1]].label(),
                   "entry": str(P.entry(*ij).simplify())}
    weights = invariant_function_weights(tf.data, tf.reg)
    hyp = all(pair(xi, w) <= 0 for w in weights)
    inv_report = integrality(envelope_matrix(tf, xi, s if mode == "K" else 0, mode))
    return {"verdict": "identity" if ok else "fails", "witness": witness,
            "invariant_weights": [[str(x) for x in w] for w in weights],
            "hypothesis_nonpositive": hyp, **inv_report}


def _partitions_in_box(n: int, bound: int):
    """Weakly decreasing exponent vectors of length n with entries in [-bound, bound]."""
    def rec(k, top):
        if k == 0:
            yield ()
            return
        for e in range(top, -bound - 1, -1):
            for rest in rec(k - 1, e):
                yield (e,) + rest
    return rec(n, bound)


def tautological_restrictions(tf: TorusFixed, F: FixedComponent, v: Sequence[int], lam: Sequence,
                              mode: str = "K") -> LaurentExpr:
    """Restriction to F of the monomial symmetric class m_lam (one exponent vector per node).

    K: m_lam in the gauge roots.  coh: m_lam in their additive weights.
    """
    chars = tf.root_chars(F)
    reg = tf.reg if mode == "K" else tf.reg.additive()
    val = reg.one()
    for i, exps in enumerate(lam):
        acc = reg.zero()
        for perm in sorted(set(permutations(exps))):
            term = reg.one()
            for k, e in zip(chars[i], perm):
                if mode == "K":
                    term = term * LaurentExpr(reg, {tuple(e * x for x in k): 1})
                else:
                    term = term * coh_factor(tf.reg, k) ** e
            acc = acc + term
        val = val * acc
    return val


def integrality(M: EnvelopeMatrix, bound: int = 2) -> dict:
    """Does M^-1 send restrictions of integral classes to Laurent polynomial vectors?

    Integral classes are probed by the monomial symmetric tautological classes with
    exponents in [-bound, bound] (nonnegative exponents in coh mode).
    """
    tf = M.setup
    inv = M.to_frac().inverse().to_rf()
    reg = M.reg
    for v in sorted({F.v for F in M.index}):
        rows = [k for k, F in enumerate(M.index) if F.v == v]
        lo = 0 if M.theory == "coh" else bound
        shapes = product(*[[tuple(e for e in lam) for lam in _partitions_in_box(n, bound)
                            if min(lam, default=0) >= -lo] for n in v])
        for lam in shapes:
            vec = [RationalFn(tautological_restrictions(tf, M.index[k], v, lam, M.theory)) for k in rows]
            for r in rows:
                acc = RationalFn(reg.zero())
                for c, x in zip(rows, vec):
                    acc = acc + inv[r][c] * x
                if not acc.is_polynomial():
                    return {"inverse_polynomial": False,
                            "inverse_witness": {"row": M.index[r].label(), "class": [list(l) for l in lam],
                                                "entry": str(acc)}}
    return {"inverse_polynomial": True, "inverse_witness": None}


# ----------------------------------------------------------------------------
# triangle lemma

def _merged_fixed(tf: TorusFixed, xi_face: Sequence) -> tuple[TorusFixed, dict]:
    """Fixed data of the face cocharacter: blocks with equal pairing are merged."""
    data = tf.data
    avars = data.W.a_vars
    names = tf.reg.names
    tidx = tf.reg.torus_indices
    val = {names[t]: Fraction(x) for t, x in zip(tidx, xi_face)}
    rep = {}
    for a in avars:
        rep[a] = next(b for b in avars if val[b] == val[a])
    tfp = TorusFixed(data, tf.v_list, seed=tf.seed, reg=tf.reg, merge=rep)
    return tfp, rep


def _group_roots(tf: TorusFixed, tfp: TorusFixed, F: FixedComponent, C: FixedComponent, rep: dict):
    """Characters of F's roots rearranged into C's standard (merged-group) order."""
    chars = tf.root_chars(F)
    out = []
    for i in range(len(F.parts)):
        per = {g: [] for g in range(len(tfp.groups))}
        for j, k in enumerate(chars[i]):
            a = tf.groups[tf.group_of_root(F, i, j)][0]
            g = next(g for g, (b, _) in enumerate(tfp.groups) if b == rep.get(a, a))
            per[g].append(k)
        out.append([k for g in range(len(tfp.groups)) for k in per[g]])
    return out


def _belongs(tf: TorusFixed, tfp: TorusFixed, F: FixedComponent, C: FixedComponent, rep: dict) -> bool:
    if F.v != C.v:
        return False
    for i in range(len(F.parts)):
        agg = [0] * len(tfp.groups)
        for g, k in enumerate(F.parts[i]):
            a = tf.groups[g][0]
            gp = next(x for x, (b, _) in enumerate(tfp.groups) if b == rep.get(a, a))
            agg[gp] += k
        if tuple(agg) != tuple(C.parts[i]):
            return False
    return True


def _window_basis(tfp: TorusFixed, C: FixedComponent, g: int, t: Sequence[Fraction], rank: int, mode: str):
    """Lift basis for the group-g factor of C, as lists of gauge-root keys (one list per element).

    GL1 factors: characters in the window 1/2 deg e_K(R_sym) + t, where R_sym has the
    in-lines of the group and their duals.  Rank-one factors: prod det^nearest(t).
    """
    reg = tfp.reg
    Q = tfp.data.Q
    offs = []
    for i, p in enumerate(C.parts):
        offs.append((sum(p[:g]), p[g]))
    if mode == "coh":
        gl1 = [i for i in range(Q.n) if offs[i][1] == 1]
        if rank == 1:
            return [[]]
        if len(gl1) != 1 or any(offs[i][1] > 1 for i in range(Q.n)):
            raise EnvelopeError("cohomological lift only implemented for one GL1 factor")
        i = gl1[0]
        k = reg.key_from({gauge_name(i, offs[i][0]): 1})
        return [[k] * n for n in range(rank)]
    if rank == 1:
        key = [0] * len(reg)
        for i, (o, m) in enumerate(offs):
            n = nearest_integer(t[i])
            for j in range(o, o + m):
                key[reg.index(gauge_name(i, j))] = 2 * n
        return [[tuple(key)]]
    if any(m > 1 for _, m in offs):
        raise EnvelopeError("window lift needs GL1 factors or a rank-one factor")
    act = [i for i, (_, m) in enumerate(offs) if m == 1]
    din = tfp.group_quiver(g).d_in
    segs = []
    for i in act:
        e = [Fraction(0)] * len(act)
        e[act.index(i)] = Fraction(1, 2)
        for _ in range(din[i]):
            segs.append([(Fraction(0),) * len(act), tuple(-x for x in e)])
            segs.append([(Fraction(0),) * len(act), tuple(e)])
    for t_, h_ in Q.arrows:
        if t_ in act and h_ in act and t_ != h_:
            e = [Fraction(0)] * len(act)
            e[act.index(h_)] += Fraction(1, 2)
            e[act.index(t_)] -= Fraction(1, 2)
            segs.append([(Fraction(0),) * len(act), tuple(-x for x in e)])
    P = NewtonPolytope([tuple(Fraction(0) for _ in act)], len(act))
    for sg in segs:
        P = P.minkowski(hull(sg, len(act)))
    P = P.translate([t[i] for i in act])
    lo = [math.floor(min(v[k] for v in P.vertices)) for k in range(len(act))]
    hi = [math.ceil(max(v[k] for v in P.vertices)) for k in range(len(act))]
    pts = [p for p in product(*[range(a, b + 1) for a, b in zip(lo, hi)]) if P.contains(p)]
    if len(pts) != rank:
        raise EnvelopeError(f"window has {len(pts)} characters but the factor has rank {rank}")
    out = []
    for p in pts:
        key = [0] * len(reg)
        for i, n in zip(act, p):
            key[reg.index(gauge_name(i, offs[i][0]))] = 2 * n
        out.append([tuple(key)])
    return out


def _sub_setup(tf: TorusFixed, blocks: list[int], m: Sequence[int]) -> TorusFixed:
    d = tf.data
    sub = QuiverData(FramedQuiver(d.Q.nodes, d.Q.arrows,
                                  tuple(sum(d.W.blocks[b].d_in[i] for b in blocks) for i in range(d.Q.n)),
                                  tuple(sum(d.W.blocks[b].d_out[i] for b in blocks) for i in range(d.Q.n)),
                                  d.Q.theta),
                     type(d.W)(tuple(d.W.blocks[b] for b in blocks), d.W.arrow_chars, d.W.hbar_placement),
                     d.extra_flavours)
    return TorusFixed(sub, [tuple(m)], seed=tf.seed, reg=tf.reg)


def triangle_factors(tf: TorusFixed, xi: Sequence, xi_face: Sequence, s: SlopeLike = 0, mode: str = "K"):
    """(M_face, M_quotient) over tf.components: outer envelope of the face with slope s and
    inner envelope of the quotient chamber with slope s' = s (x) det(N^-)^(1/2)."""
    xi = tuple(Fraction(x) for x in xi)
    xi_face = tuple(Fraction(x) for x in xi_face)
    validate_chamber(tf, xi)
    tfp, rep = _merged_fixed(tf, xi_face)
    comps = list(tf.components)
    N = len(comps)
    reg = tf.reg if mode == "K" else tf.reg.additive()
    n = tf.data.Q.n
    zero = RationalFn(reg.zero())
    outer = [[zero] * N for _ in range(N)]
    inner = [[zero] * N for _ in range(N)]
    for C in tfp.components:
        members = [k for k, F in enumerate(comps) if _belongs(tf, tfp, F, C, rep)]
        if not members:
            continue
        T = tfp.tangent(C.v)[2]
        if tfp.trivial:
            repl = {}
        else:
            repl, _, _ = _split_phi(tfp, C, T, xi_face)
        expo = _per_root_exponents(tfp, C, repl)
        sl = _slope_for(s, C.v, n)
        t_of = {g: [sl.values[i] + expo.get((i, g), Fraction(0)) / 2 for i in range(n)]
                for g in range(len(tfp.groups))}
        # inner: tensor product over merged groups
        factor_mats = []
        for g, (a, blocks) in enumerate(tfp.groups):
            m = [C.parts[i][g] for i in range(n)]
            sub = _sub_setup(tf, blocks, m)
            Mg = envelope_matrix(sub, xi, t_of[g], mode)
            factor_mats.append((blocks, Mg))

        def sub_key(F, blocks):
            ai = [tf.groups[gg][0] for gg in range(len(tf.groups))]
            return tuple(tuple(F.parts[i][ai.index(tf.data.W.blocks[b].a_var)] for b in blocks)
                         for i in range(n))

        for q in members:
            for p in members:
                val = RationalFn(reg.one())
                for blocks, Mg in factor_mats:
                    kq, kp = sub_key(comps[q], blocks), sub_key(comps[p], blocks)
                    iq = [F.parts for F in Mg.index].index(kq)
                    ip = [F.parts for F in Mg.index].index(kp)
                    val = val * Mg.entries[iq][ip]
                inner[q][p] = val
        # outer: window lift of the fixed-point idempotents of C
        per_group = []
        for g, (a, blocks) in enumerate(tfp.groups):
            m = [C.parts[i][g] for i in range(n)]
            rank = len(_sub_setup(tf, blocks, m).components)
            per_group.append(_window_basis(tfp, C, g, t_of[g], rank, mode))
        basis = [sum(choice, []) for choice in product(*per_group)]
        if len(basis) != len(members):
            raise EnvelopeError("window basis size does not match the number of fixed points")
        num, den = _expand(repl)
        wsC = WeylSum(tf.reg, C.parts, mode, [(1, [])], num, den)
        idc = _ident(C.parts)
        Bm = []
        for q in members:
            tgt = _group_roots(tf, tfp, comps[q], C, rep)
            Bm.append([WeylSum(tf.reg, C.parts, mode, [(1, b)], [], [], [idc]).evaluate(tgt)
                       for b in basis])
        Binv = FracMatrix.from_rf(Bm).inverse().to_rf()
        for r, F in enumerate(comps):
            if F.v != C.v:
                continue
            H = []
            for b in basis:
                ws = WeylSum(tf.reg, C.parts, mode, [(1, b)], num, den, wsC.cosets)
                H.append(ws.evaluate(tf.root_chars(F)))
            for a, q in enumerate(members):
                acc = RationalFn(reg.zero())
                for k in range(len(basis)):
                    acc = acc + H[k] * Binv[k][a]
                outer[r][q] = acc.simplify()
    return outer, inner


def check_triangle(tf: TorusFixed, xi: Sequence, xi_face: Sequence, s: SlopeLike = 0, mode: str = "K") -> dict:
    """Is M_face(s) . M_quotient(s') equal to M_chamber(s)?"""
    outer, inner = triangle_factors(tf, xi, xi_face, s, mode)
    M = envelope_matrix(tf, xi, s, mode)
    P = FracMatrix.from_rf(outer) @ FracMatrix.from_rf(inner)
    ok, ij = P.equals(M.to_frac())
    out = {"verdict": "equal" if ok else "unequal", "witness": None,
           "chamber": [str(x) for x in xi], "face": [str(x) for x in xi_face]}
    if not ok:
        out["witness"] = {"row": M.index[ij[0]].label(), "column": M.index[ij[1]].label(),
                          "composite": str(P.entry(*ij).simplify()),
                          "direct": str(M.entries[ij[0]][ij[1]])}
    return out


# ----------------------------------------------------------------------------
# minuscule Nakajima varieties

def doubled_data(gamma: QuiverData) -> QuiverData:
    """Arrows of Gamma with weight 1 plus reversed arrows with weight h^-1."""
    Q = gamma.Q
    arrows = tuple(Q.arrows) + tuple((h, t) for t, h in Q.arrows)
    chars = tuple(gamma.arrow_char(a) for a in range(len(Q.arrows))) + ("h^-1",) * len(Q.arrows)
    DQ = FramedQuiver(Q.nodes, arrows, Q.d_in, Q.d_out, Q.theta)
    return QuiverData(DQ, type(gamma.W)(gamma.W.blocks, chars, gamma.W.hbar_placement), gamma.extra_flavours)


class NakajimaFixed(TorusFixed):
    """A-fixed points of a Nakajima variety with minuscule framing per block."""

    def __init__(self, gamma: QuiverData, r_list, seed: int = 0, reg: VariableRegistry | None = None):
        if any(any(b.d_out) for b in gamma.W.blocks):
            raise QuiverError("Nakajima framing is given by in-lines only")
        self.gamma = gamma
        super().__init__(doubled_data(gamma), r_list, seed=seed, reg=reg)

    def _enumerate(self, v) -> list[FixedComponent]:
        from .torus_fixed import _compositions
        Q = self.gamma.Q
        ng = len(self.groups)
        out = []
        for choice in product(*[list(_compositions(v[i], ng)) for i in range(Q.n)]):
            ok = True
            for g in range(ng):
                m = [choice[i][g] for i in range(Q.n)]
                if not any(m):
                    continue
                e = self.group_quiver(g).d_in
                res = minuscule_check(Q, m, e, seed=self.seed)
                if res["verdict"] == "fail":
                    raise QuiverError(f"non-minuscule input: block {g} with r={m}")
                if res["verdict"] != "pass":
                    ok = False
                    break
            if ok:
                out.append(FixedComponent(tuple(choice)))
        return out

    def tangent(self, v) -> tuple:
        v = tuple(v)
        if v not in self._tangent:
            half, tvir = nakajima_polarization(self.gamma, v, self.reg)
            self._tangent[v] = (half, KClass(self.reg), tvir)
        return self._tangent[v]

    def half(self, v) -> KClass:
        return self.tangent(v)[0]


def nakajima_normalizer(nf: NakajimaFixed, xi: Sequence) -> Normalizer:
    """E_F = (-1)^{rk N_half,+} (det N^- / det N_half)^(1/2)."""
    return polarization_normalizer(nf, xi, nf.half)


def attracting_rank(nf: NakajimaFixed, F: FixedComponent, xi: Sequence) -> int:
    _, attr, _ = _split_phi(nf, F, nf.half(F.v), xi)
    return sum(attr.values())


def nakajima_class(nf: NakajimaFixed, F: FixedComponent, xi: Sequence, s: SlopeLike) -> WeylSum:
    """sqrt(h)^{rk attr} sum_w w(chi e_K(T_half^{repl} + h T_half^{attr}))."""
    reg = nf.reg
    half = nf.half(F.v)
    repl, attr, _ = _split_phi(nf, F, half, xi)
    hk = reg.key_from({"h": 1})
    cls: Counter = Counter()
    for k, m in repl.items():
        cls[k] += m
    for k, m in attr.items():
        cls[tuple(a + b for a, b in zip(k, hk))] += m
    num, den = _expand({k: m for k, m in cls.items() if m})
    rk = sum(attr.values())
    moving = dict(repl)
    for k, m in attr.items():
        moving[k] = moving.get(k, 0) + m
    expo = _per_root_exponents(nf, F, moving)
    sl = _slope_for(s, F.v, nf.gamma.Q.n)
    chi = _chi_key(nf, F, sl, expo, -1)
    pref = reg.key_from({"h": Fraction(rk, 2)})
    ws = WeylSum(reg, F.parts, "K", [(1, [chi, pref])], num, den)
    ws.chi_key = chi
    ws.prefactor_rank = rk
    return ws


def nakajima_minuscule_matrix(nf: NakajimaFixed, xi: Sequence, s: SlopeLike = 0) -> EnvelopeMatrix:
    comps = list(nf.components)
    reg = nf.reg
    xi = tuple(Fraction(x) for x in xi)
    nz = None
    if nf.trivial or all(not any(F.v) for F in comps):
        M = _identity(reg, len(comps))
    else:
        validate_chamber(nf, xi)
        M = [[RationalFn(reg.zero()) for _ in comps] for _ in comps]
        for c, F in enumerate(comps):
            ws = nakajima_class(nf, F, xi, s)
            chiF = LaurentExpr(reg, {ws._sub(ws.chi_key, _ident(F.parts), nf.root_chars(F)): 1})
            for r, F2 in enumerate(comps):
                if F2.v == F.v:
                    val = ws.evaluate(nf.root_chars(F2))
                    M[r][c] = RationalFn(exact_div(val.num, chiF), val.den)
        nz = nakajima_normalizer(nf, xi)
    sl = s if callable(s) else Slope.of(s, nf.gamma.Q.n)
    return EnvelopeMatrix(comps, M, xi, sl, "K", _mu(nf), nz, nf, "nakajima")
