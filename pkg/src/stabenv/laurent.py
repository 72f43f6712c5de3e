"""Exact Laurent polynomials with half-integer exponents over Q.

Exponents are stored doubled (as ints), so x^(1/2) is the key entry 1 and
x^-1 is -2.  Coefficients are ints or Fractions.  Everything is immutable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Mapping, Union

KINDS = ("torus-A", "flavour", "gauge-chern-root", "auxiliary")

Number = Union[int, Fraction]


class LaurentError(ValueError):
    pass


def _norm(c: Number) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _div(a: Number, b: Number) -> Number:
    if isinstance(a, int) and isinstance(b, int) and a % b == 0:
        return a // b
    return _norm(Fraction(a) / b)


def _sqrt_exact(c: Number) -> Number:
    c = Fraction(c)
    if c < 0:
        raise LaurentError("square root of a negative coefficient")
    p, q = isqrt(c.numerator), isqrt(c.denominator)
    if p * p != c.numerator or q * q != c.denominator:
        raise LaurentError(f"coefficient {c} has no rational square root")
    return _norm(Fraction(p, q))


def _frac_str(c: Number) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def parse_fraction(s: Union[str, int, Fraction]) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(s.strip())


@dataclass(frozen=True)
class Var:
    name: str
    kind: str
    node: int = -1
    slot: int = -1

    def sort_key(self):
        return (KINDS.index(self.kind), self.node, self.slot, self.name)


class VariableRegistry:
    """Ordered set of variables.  The order is fixed by (kind, node, slot, name)."""

    def __init__(self, variables: Iterable[Var]):
        vs = list(variables)
        for v in vs:
            if v.kind not in KINDS:
                raise LaurentError(f"unknown variable kind {v.kind!r}")
        names = [v.name for v in vs]
        if len(set(names)) != len(names):
            raise LaurentError("variable names must be unique")
        self.vars: tuple[Var, ...] = tuple(sorted(vs, key=Var.sort_key))
        self._index = {v.name: i for i, v in enumerate(self.vars)}
        self.torus_indices = tuple(i for i, v in enumerate(self.vars) if v.kind == "torus-A")

    def __len__(self) -> int:
        return len(self.vars)

    def __eq__(self, other) -> bool:
        return self is other or (isinstance(other, VariableRegistry) and self.vars == other.vars)

    def __hash__(self) -> int:
        return hash(self.vars)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __repr__(self) -> str:
        return "VariableRegistry(" + ", ".join(self.names) + ")"

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.vars]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise LaurentError(f"variable {name!r} not in registry") from None

    def kind_indices(self, kind: str) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.vars) if v.kind == kind)

    def extend(self, more: Iterable[Var]) -> "VariableRegistry":
        return VariableRegistry(list(self.vars) + list(more))

    def additive(self) -> "VariableRegistry":
        """Companion registry of additive weights (name + '_hat')."""
        return _additive(self)

    # constructors
    def zero(self) -> "LaurentExpr":
        return LaurentExpr(self, {})

    def one(self) -> "LaurentExpr":
        return LaurentExpr(self, {self.zero_key(): 1})

    def const(self, c: Number) -> "LaurentExpr":
        c = _norm(Fraction(c))
        return LaurentExpr(self, {self.zero_key(): c} if c else {})

    def zero_key(self) -> tuple[int, ...]:
        return (0,) * len(self.vars)

    def var(self, name: str) -> "LaurentExpr":
        return self.monomial({name: 1})

    def monomial(self, exps: Mapping[str, Union[int, Fraction, str]], coeff: Number = 1) -> "LaurentExpr":
        key = [0] * len(self.vars)
        for name, e in exps.items():
            key[self.index(name)] += _double(parse_fraction(e))
        return LaurentExpr(self, {tuple(key): _norm(Fraction(coeff))} if coeff else {})

    def key_from(self, exps: Mapping[str, Union[int, Fraction]]) -> tuple[int, ...]:
        key = [0] * len(self.vars)
        for name, e in exps.items():
            key[self.index(name)] += _double(parse_fraction(e))
        return tuple(key)

    def parse_monomial(self, text: str) -> "LaurentExpr":
        """Parse 'h^-1*a1/a2', '1' or '2*x^(1/2)' into a monomial."""
        return self.monomial(*parse_monomial_text(text))


@lru_cache(maxsize=None)
def _additive(reg: VariableRegistry) -> VariableRegistry:
    return VariableRegistry(Var(v.name + "_hat", v.kind, v.node, v.slot) for v in reg.vars)


_TOKEN = re.compile(r"\s*([*/])?\s*([A-Za-z_]\w*|\d+)(?:\^(\(-?\d+(?:/\d+)?\)|-?\d+))?\s*")


def parse_monomial_text(text: str) -> tuple[dict[str, Fraction], Fraction]:
    """'h^-1*a1/a2' -> ({'h': -1, 'a1': 1, 'a2': -1}, 1).  Fractional powers need parentheses."""
    exps: dict[str, Fraction] = {}
    coeff = Fraction(1)
    pos = 0
    first = True
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos or (first and m.group(1)) or (not first and not m.group(1)):
            raise LaurentError(f"cannot parse monomial {text!r}")
        first = False
        sign = -1 if m.group(1) == "/" else 1
        e = Fraction(m.group(3).strip("()")) if m.group(3) else Fraction(1)
        base = m.group(2)
        if base.isdigit():
            if e.denominator != 1:
                raise LaurentError(f"fractional power of a number in {text!r}")
            coeff *= Fraction(int(base)) ** int(sign * e)
        else:
            exps[base] = exps.get(base, Fraction(0)) + sign * e
        pos = m.end()
    if first:
        raise LaurentError("empty monomial")
    return exps, coeff


def _double(e: Fraction) -> int:
    d = e * 2
    if d.denominator != 1:
        raise LaurentError(f"exponent {e} has denominator larger than 2")
    return d.numerator


class LaurentExpr:
    """Finite sum of c * prod x_i^(k_i/2) with nonzero rational c."""

    __slots__ = ("reg", "terms", "_hash")

    def __init__(self, reg: VariableRegistry, terms: dict):
        self.reg = reg
        self.terms = terms
        self._hash = None

    # basic predicates
    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.reg.zero_key() in self.terms)

    def constant_value(self) -> Number:
        return self.terms.get(self.reg.zero_key(), 0)

    def __len__(self) -> int:
        return len(self.terms)

    def _check(self, other: "LaurentExpr"):
        if self.reg is not other.reg and self.reg != other.reg:
            raise LaurentError("registry mismatch")

    def _coerce(self, other) -> "LaurentExpr":
        if isinstance(other, LaurentExpr):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.reg.const(other)
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self.terms) < len(other.terms):
            small, big = self.terms, other.terms
        else:
            small, big = other.terms, self.terms
        out = dict(big)
        for k, c in small.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = _norm(v) if isinstance(v, Fraction) else v
            else:
                out.pop(k, None)
        return LaurentExpr(self.reg, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentExpr(self.reg, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return LaurentExpr(self.reg, {})
        out: dict = {}
        get = out.get
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(map(int.__add__, k1, k2))
                out[k] = get(k, 0) + c1 * c2
        return LaurentExpr(self.reg, {k: _norm(c) for k, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c: Number) -> "LaurentExpr":
        c = _norm(Fraction(c))
        if not c:
            return LaurentExpr(self.reg, {})
        return LaurentExpr(self.reg, {k: _norm(v * c) for k, v in self.terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise LaurentError("power must be an integer")
        if n < 0:
            if not self.is_monomial():
                raise LaurentError("negative power of a non-monomial")
            (k, c), = self.terms.items()
            return LaurentExpr(self.reg, {tuple(-e * (-n) for e in k): _norm(Fraction(1) / Fraction(c) ** (-n))})
        result = self.reg.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse_monomial(self) -> "LaurentExpr":
        return self ** -1

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.reg.const(other)
        if not isinstance(other, LaurentExpr):
            return NotImplemented
        return self.reg == other.reg and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # ordering helpers
    def lead(self) -> tuple:
        k = max(self.terms)
        return k, self.terms[k]

    def low(self) -> tuple:
        k = min(self.terms)
        return k, self.terms[k]

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), reverse=True)

    def exponent_box(self) -> tuple[list[int], list[int]]:
        ks = list(self.terms)
        n = len(self.reg)
        lo = [min(k[i] for k in ks) for i in range(n)]
        hi = [max(k[i] for k in ks) for i in range(n)]
        return lo, hi

    # substitution
    def substitute(self, mapping: Mapping[Union[str, int], object]) -> "LaurentExpr":
        """Simultaneous substitution of variables by monomials or rationals.

        INPUT: mapping from variable name (or index) to a monomial LaurentExpr
        (possibly over another registry) or a rational number.
        OUTPUT: LaurentExpr over the target registry.
        """
        if not mapping:
            return self
        target_reg = None
        subs = {}
        for name, tgt in mapping.items():
            i = name if isinstance(name, int) else self.reg.index(name)
            if isinstance(tgt, LaurentExpr):
                if not tgt.is_monomial():
                    raise LaurentError("substitution target must be a monomial or a rational")
                if target_reg is None:
                    target_reg = tgt.reg
                elif tgt.reg != target_reg:
                    raise LaurentError("substitution targets over different registries")
                (k, c), = tgt.terms.items()
                subs[i] = (k, c)
            else:
                subs[i] = (None, _norm(Fraction(tgt)))
        if target_reg is None:
            target_reg = self.reg
        same = target_reg == self.reg
        if not same:
            # untouched variables must exist in the target registry
            keep = [(i, target_reg.index(v.name)) for i, v in enumerate(self.reg.vars)
                    if i not in subs and _has_exponent(self, i)]
        n_t = len(target_reg)
        zero_t = (0,) * n_t
        subs = {i: (zero_t if k is None else k, c) for i, (k, c) in subs.items()}
        out: dict = {}
        cache: dict = {}
        for key, coef in self.terms.items():
            new = [0] * n_t
            c = coef
            if same:
                for i, e in enumerate(key):
                    if e and i not in subs:
                        new[i] += e
            else:
                for i, j in keep:
                    new[j] += key[i]
            for i, (tk, tc) in subs.items():
                e = key[i]
                if not e:
                    continue
                for j, t in enumerate(tk):
                    if t:
                        prod = e * t
                        if prod % 2:
                            raise LaurentError("half exponent landing on a half-exponent target")
                        new[j] += prod // 2
                if tc != 1:
                    ck = (i, e)
                    if ck not in cache:
                        if e % 2:
                            base = _sqrt_exact(tc)
                            cache[ck] = _norm(Fraction(base) ** e)
                        else:
                            cache[ck] = _norm(Fraction(tc) ** (e // 2))
                    c = c * cache[ck]
            k = tuple(new)
            out[k] = out.get(k, 0) + c
        return LaurentExpr(target_reg, {k: _norm(v) for k, v in out.items() if v})

    def permute(self, perm: Mapping[int, int]) -> "LaurentExpr":
        """Rename variables by index permutation (i -> perm[i])."""
        out = {}
        for key, c in self.terms.items():
            new = list(key)
            for i, j in perm.items():
                new[j] = key[i]
            out[tuple(new)] = c
        return LaurentExpr(self.reg, out)

    def evaluate(self, values: Mapping[int, complex]) -> complex:
        """Numeric evaluation; values indexed by variable position."""
        total = 0.0
        for key, c in self.terms.items():
            t = float(c)
            for i, e in enumerate(key):
                if e:
                    t *= values[i] ** (e / 2)
            total += t
        return total

    def a_weight(self) -> tuple[Fraction, ...]:
        """A-exponent of a monomial."""
        if not self.is_monomial():
            raise LaurentError("a_weight needs a monomial")
        (k, _), = self.terms.items()
        return tuple(Fraction(k[i], 2) for i in self.reg.torus_indices)

    def degree_in(self, i: int) -> tuple[Fraction, Fraction]:
        es = [k[i] for k in self.terms]
        return Fraction(min(es), 2), Fraction(max(es), 2)

    # degrees
    def a_degree(self):
        from .polytopes import hull
        pts = {tuple(Fraction(k[i], 2) for i in self.reg.torus_indices) for k in self.terms}
        return hull(pts, dim=len(self.reg.torus_indices))

    def a_degree_along(self, xi: Iterable[Number]):
        xi = list(xi)
        if not self.terms:
            return None
        vals = [sum(Fraction(k[i], 2) * x for i, x in zip(self.reg.torus_indices, xi)) for k in self.terms]
        return (min(vals), max(vals))

    # serialization / display
    def to_json(self) -> list:
        return [[[_frac_str(Fraction(e, 2)) for e in k], _frac_str(c)] for k, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, reg: VariableRegistry, data: list) -> "LaurentExpr":
        terms = {}
        for exps, c in data:
            if len(exps) != len(reg):
                raise LaurentError("exponent vector length mismatch")
            k = tuple(_double(Fraction(e)) for e in exps)
            terms[k] = _norm(Fraction(c))
        return LaurentExpr(reg, {k: c for k, c in terms.items() if c})

    def __repr__(self) -> str:
        return self.to_str()

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.sorted_terms():
            mono = _mono_str(self.reg, k)
            if mono == "1":
                s = str(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}"
            parts.append(s)
        out = parts[0]
        for p in parts[1:]:
            out += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
        return out

    def to_latex(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.sorted_terms():
            mono = _mono_latex(self.reg, k)
            cf = Fraction(c)
            mag = abs(cf)
            cs = "" if (mag == 1 and mono) else (str(mag.numerator) if mag.denominator == 1 else rf"\frac{{{mag.numerator}}}{{{mag.denominator}}}")
            parts.append(("-" if cf < 0 else "+", cs + mono))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sgn, body in parts[1:]:
            s += f" {sgn} {body}"
        return s


def _has_exponent(e: LaurentExpr, i: int) -> bool:
    return any(k[i] for k in e.terms)


def _mono_str(reg: VariableRegistry, key) -> str:
    fs = []
    for v, e in zip(reg.vars, key):
        if not e:
            continue
        f = Fraction(e, 2)
        fs.append(v.name if f == 1 else f"{v.name}^{f}" if f.denominator == 1 else f"{v.name}^({f})")
    return "*".join(fs) if fs else "1"


def _mono_latex(reg: VariableRegistry, key) -> str:
    fs = []
    for v, e in zip(reg.vars, key):
        if not e:
            continue
        f = Fraction(e, 2)
        name = v.name.replace("_hat", "")
        name = r"\hbar" if name == "h" else name
        if v.name.endswith("_hat"):
            name = rf"\hat{{{name}}}"
        fs.append(name if f == 1 else f"{name}^{{{f}}}")
    return " ".join(fs)


def exact_div(a: LaurentExpr, b: LaurentExpr):
    """Return q with a = q*b if it exists in the Laurent ring, else None."""
    a._check(b)
    if b.is_zero():
        raise ZeroDivisionError("division by the zero Laurent polynomial")
    if a.is_zero():
        return a
    if b.is_monomial():
        (kb, cb), = b.terms.items()
        return LaurentExpr(a.reg, {tuple(map(int.__sub__, k, kb)): _div(c, cb) for k, c in a.terms.items()})
    alo, ahi = a.exponent_box()
    blo, bhi = b.exponent_box()
    lo = [x - y for x, y in zip(alo, blo)]
    hi = [x - y for x, y in zip(ahi, bhi)]
    if any(l > h for l, h in zip(lo, hi)):
        return None
    bl, bc = b.lead()
    bterms = list(b.terms.items())
    r = dict(a.terms)
    q = {}
    while r:
        rl = max(r)
        t = tuple(map(int.__sub__, rl, bl))
        for x, l, h in zip(t, lo, hi):
            if x < l or x > h:
                return None
        c = _div(r[rl], bc)
        q[t] = c
        for e, be in bterms:
            k = tuple(map(int.__add__, t, e))
            v = r.get(k, 0) - c * be
            if v:
                r[k] = v
            else:
                r.pop(k, None)
    return LaurentExpr(a.reg, {k: _norm(c) for k, c in q.items()})


class RationalFn:
    """num/den, kept unreduced.  den is scaled so its lex-leading term is 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentExpr, den: LaurentExpr | None = None):
        if den is None:
            den = num.reg.one()
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if den.is_monomial():
            num = exact_div(num, den)
            den = num.reg.one()
        else:
            k, c = den.lead()
            if c != 1 or any(k):
                m = LaurentExpr(den.reg, {k: c})
                num = exact_div(num, m)
                den = exact_div(den, m)
        self.num = num
        self.den = den

    @property
    def reg(self) -> VariableRegistry:
        return self.num.reg

    @classmethod
    def of(cls, x, reg: VariableRegistry | None = None) -> "RationalFn":
        if isinstance(x, RationalFn):
            return x
        if isinstance(x, LaurentExpr):
            return cls(x)
        return cls(reg.const(x))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.as_laurent() is not None

    def as_laurent(self):
        if self.den.is_constant():
            return self.num.scale(Fraction(1) / Fraction(self.den.constant_value()))
        return exact_div(self.num, self.den)

    def simplify(self) -> "RationalFn":
        q = self.as_laurent()
        return RationalFn(q) if q is not None else self

    def _co(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, LaurentExpr):
            return RationalFn(other)
        if isinstance(other, (int, Fraction)):
            return RationalFn(self.reg.const(other))
        return NotImplemented

    def __add__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return RationalFn(self.num + o.num, self.den)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return o
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFn(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._co(other) / self

    def __pow__(self, n: int):
        if n >= 0:
            return RationalFn(self.num ** n, self.den ** n)
        return RationalFn(self.den ** (-n), self.num ** (-n))

    def __eq__(self, other) -> bool:
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return rf_equal(self, o)

    __hash__ = None

    def substitute(self, mapping) -> "RationalFn":
        d = self.den.substitute(mapping)
        if d.is_zero():
            raise ZeroDivisionError("denominator vanishes after substitution")
        return RationalFn(self.num.substitute(mapping), d)

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, reg: VariableRegistry, data: dict) -> "RationalFn":
        return cls(LaurentExpr.from_json(reg, data["num"]), LaurentExpr.from_json(reg, data["den"]))

    def __repr__(self) -> str:
        if self.den == self.den.reg.one():
            return self.num.to_str()
        return f"({self.num.to_str()})/({self.den.to_str()})"

    def to_latex(self) -> str:
        if self.den == self.den.reg.one():
            return self.num.to_latex()
        return rf"\frac{{{self.num.to_latex()}}}{{{self.den.to_latex()}}}"


def rf_equal(p: RationalFn, q: RationalFn) -> bool:
    """Cross-multiplication test p.num*q.den == q.num*p.den."""
    if p.den == q.den:
        return p.num == q.num
    return (p.num * q.den - q.num * p.den).is_zero()


def lp_arith(a: LaurentExpr, b, op: str) -> LaurentExpr:
    """INPUT: a, b and op in {'add','sub','mul','pow'} (b an int for 'pow')."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "pow":
        return a ** b
    raise LaurentError(f"unknown op {op!r}")


def lp_substitute(e: LaurentExpr, mapping) -> LaurentExpr:
    return e.substitute(mapping)


# ----------------------------------------------------------------------------
# matrices

def _blocks(n: int, nonzero) -> list[list[int]]:
    """Connected components of the index graph with edges at nonzero entries."""
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(n):
            if nonzero(i, j):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def bareiss_inverse(P: list[list[LaurentExpr]]):
    """Fraction-free Gauss-Jordan on [P | I].

    OUTPUT: (adj, det) with P^-1 = adj/det.  Raises ZeroDivisionError if P is
    singular.  Pivot: nonzero entry with the fewest terms.
    """
    n = len(P)
    if n == 0:
        raise LaurentError("empty matrix")
    reg = P[0][0].reg
    one, zero = reg.one(), reg.zero()
    A = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(P)]
    prev = one
    for k in range(n):
        cands = [i for i in range(k, n) if not A[i][k].is_zero()]
        if not cands:
            raise ZeroDivisionError("singular matrix")
        p = min(cands, key=lambda i: (len(A[i][k]), i))
        if p != k:
            A[k], A[p] = A[p], A[k]
        piv = A[k][k]
        rowk = A[k]
        for i in range(n):
            if i == k:
                continue
            row = A[i]
            f = row[k]
            new = []
            for j in range(2 * n):
                if j == k:
                    new.append(zero)
                    continue
                v = piv * row[j] - f * rowk[j] if not f.is_zero() else piv * row[j]
                if prev != one:
                    q = exact_div(v, prev)
                    if q is None:
                        raise LaurentError("Bareiss step not exact")
                    v = q
                new.append(v)
            A[i] = new
        prev = piv
    # After fraction-free Gauss-Jordan every diagonal entry equals det.
    det = A[n - 1][n - 1]
    adj = []
    for i in range(n):
        d = A[i][i]
        if d != det:
            # row i still carries an old pivot level: rescale exactly
            row = [exact_div(x * det, d) for x in A[i][n:]]
            if any(x is None for x in row):
                raise LaurentError("inconsistent Bareiss levels")
            adj.append(row)
        else:
            adj.append(A[i][n:])
    return adj, det


class FracMatrix:
    """Square matrix P / (product of den factors) with Laurent entries."""

    __slots__ = ("P", "den")

    def __init__(self, P: list[list[LaurentExpr]], den: list[LaurentExpr] | None = None):
        self.P = P
        self.den = list(den or [])

    @property
    def n(self) -> int:
        return len(self.P)

    @property
    def reg(self) -> VariableRegistry:
        return self.P[0][0].reg

    @classmethod
    def from_rf(cls, M: list[list[RationalFn]]) -> "FracMatrix":
        """Common denominator per row, then folded into one scalar list."""
        n = len(M)
        reg = M[0][0].reg
        dens: list[LaurentExpr] = []
        for row in M:
            for x in row:
                if not x.den.is_constant() and not any(x.den == d for d in dens):
                    dens.append(x.den)
        P = []
        for row in M:
            out = []
            for x in row:
                num = x.num.scale(Fraction(1) / Fraction(x.den.constant_value())) if x.den.is_constant() else x.num
                for d in dens:
                    if x.den.is_constant() or not (x.den == d):
                        num = num * d
                out.append(num)
            P.append(out)
        del reg, n
        return cls(P, dens)

    def denominator(self) -> LaurentExpr:
        d = self.reg.one()
        for f in self.den:
            d = d * f
        return d

    def to_rf(self) -> list[list[RationalFn]]:
        d = self.denominator()
        return [[RationalFn(x, d).simplify() for x in row] for row in self.P]

    def __matmul__(self, other: "FracMatrix") -> "FracMatrix":
        n = self.n
        zero = self.reg.zero()
        P = []
        for i in range(n):
            row = []
            for j in range(n):
                s = zero
                for k in range(n):
                    a = self.P[i][k]
                    if a.is_zero():
                        continue
                    b = other.P[k][j]
                    if b.is_zero():
                        continue
                    s = s + a * b
                row.append(s)
            P.append(row)
        return FracMatrix(P, self.den + other.den).reduce()

    def scale_rows(self, d: list[LaurentExpr]) -> "FracMatrix":
        return FracMatrix([[x * d[i] for x in row] for i, row in enumerate(self.P)], self.den)

    def scale_cols(self, d: list[LaurentExpr]) -> "FracMatrix":
        return FracMatrix([[x * d[j] for j, x in enumerate(row)] for row in self.P], self.den)

    def reduce(self) -> "FracMatrix":
        """Cancel denominator factors that divide every entry."""
        P, den = self.P, list(self.den)
        kept = []
        for f in den:
            if f.is_constant():
                c = f.constant_value()
                P = [[x.scale(Fraction(1) / Fraction(c)) for x in row] for row in P]
                continue
            trial = []
            ok = True
            for row in P:
                r = []
                for x in row:
                    q = exact_div(x, f)
                    if q is None:
                        ok = False
                        break
                    r.append(q)
                if not ok:
                    break
                trial.append(r)
            if ok:
                P = trial
            else:
                kept.append(f)
        return FracMatrix(P, kept)

    def inverse(self) -> "FracMatrix":
        """Block-wise Bareiss inverse."""
        n = self.n
        zero = self.reg.zero()
        blocks = _blocks(n, lambda i, j: not self.P[i][j].is_zero())
        invP = [[zero] * n for _ in range(n)]
        dets = []
        adjs = []
        for blk in blocks:
            sub = [[self.P[i][j] for j in blk] for i in blk]
            adj, det = bareiss_inverse(sub)
            adjs.append((blk, adj, det))
            if not det.is_constant() and not any(det == d for d in dets):
                dets.append(det)
        for blk, adj, det in adjs:
            c = det.constant_value() if det.is_constant() else None
            for a, i in enumerate(blk):
                for b, j in enumerate(blk):
                    x = adj[a][b]
                    if c is not None:
                        x = x.scale(Fraction(1) / Fraction(c))
                    for d in dets:
                        if c is not None or not (d == det):
                            x = x * d
                    invP[i][j] = x
        # (P/den)^-1 = den * P^-1
        dprod = self.denominator()
        invP = [[x * dprod for x in row] for row in invP]
        return FracMatrix(invP, dets).reduce()

    def transpose(self) -> "FracMatrix":
        return FracMatrix([list(r) for r in zip(*self.P)], self.den)

    def equals(self, other: "FracMatrix"):
        """Entrywise comparison.  OUTPUT: (True, None) or (False, (i, j))."""
        da, db = self.denominator(), other.denominator()
        for i in range(self.n):
            for j in range(self.n):
                if not (self.P[i][j] * db - other.P[i][j] * da).is_zero():
                    return False, (i, j)
        return True, None

    def entry(self, i: int, j: int) -> RationalFn:
        return RationalFn(self.P[i][j], self.denominator())

    def is_identity(self) -> bool:
        d = self.denominator()
        zero = self.reg.zero()
        for i in range(self.n):
            for j in range(self.n):
                if not (self.P[i][j] - (d if i == j else zero)).is_zero():
                    return False
        return True


def identity_rf(reg: VariableRegistry, n: int) -> list[list[RationalFn]]:
    return [[RationalFn(reg.one() if i == j else reg.zero()) for j in range(n)] for i in range(n)]


def mat_mul(A: list[list[RationalFn]], B: list[list[RationalFn]]) -> list[list[RationalFn]]:
    return (FracMatrix.from_rf(A) @ FracMatrix.from_rf(B)).to_rf()


def mat_inverse(M: list[list[RationalFn]]) -> list[list[RationalFn]]:
    """Inverse by fraction-free elimination.  Raises ZeroDivisionError if singular."""
    return FracMatrix.from_rf(M).inverse().to_rf()


def mat_equal(A: list[list[RationalFn]], B: list[list[RationalFn]]) -> bool:
    return all(rf_equal(x, y) for ra, rb in zip(A, B) for x, y in zip(ra, rb))
