"""Equivariant Euler classes of KClasses.

K theory: e_K(chi) = 1 - chi^-1, multiplicative, virtual parts divide.
Cohomology: e(chi) = additive weight of chi, a linear form in the '_hat'
companion variables.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping

from .laurent import LaurentExpr, RationalFn, VariableRegistry
from .quiver import KClass


class EulerError(ZeroDivisionError):
    pass


def k_factor(reg: VariableRegistry, key: tuple) -> LaurentExpr:
    """1 - chi^-1 for the character with doubled key."""
    return reg.one() - LaurentExpr(reg, {tuple(-e for e in key): 1})


def coh_factor(reg: VariableRegistry, key: tuple) -> LaurentExpr:
    """Linear form sum_i (k_i/2) * var_i_hat."""
    hreg = reg.additive()
    terms = {}
    n = len(hreg)
    for i, e in enumerate(key):
        if e:
            k = [0] * n
            k[i] = 2
            terms[tuple(k)] = Fraction(e, 2) if e % 2 else e // 2
    return LaurentExpr(hreg, terms)


def euler_class(V: KClass, mode: str = "K") -> RationalFn:
    """Euler class of a virtual class; the negative part goes to the denominator."""
    if mode not in ("K", "coh"):
        raise ValueError(f"unknown theory mode {mode!r}")
    reg = V.reg if mode == "K" else V.reg.additive()
    fac = k_factor if mode == "K" else coh_factor
    num = reg.one()
    den = reg.one()
    for k, m in V.items():
        f = fac(V.reg, k)
        if m > 0:
            num = num * f ** m
        else:
            if f.is_zero():
                raise EulerError("vanishing Euler factor in the negative part")
            den = den * f ** (-m)
    return RationalFn(num, den)


def euler_factors(V: KClass, mode: str = "K") -> tuple[list, list]:
    """(numerator factors, denominator factors) as lists of LaurentExpr with multiplicity."""
    fac = k_factor if mode == "K" else coh_factor
    num, den = [], []
    for k, m in V.items():
        f = fac(V.reg, k)
        (num if m > 0 else den).extend([f] * abs(m))
    return num, den


def det_half(V: KClass) -> LaurentExpr:
    """det(V)^(1/2) as a monomial (must have exponents with denominator <= 2)."""
    d = V.det()
    if any(e % 2 for e in d):
        raise EulerError("det(V)^(1/2) would need quarter exponents")
    return LaurentExpr(V.reg, {tuple(e // 2 for e in d): 1})


def hat_euler_and_det_half(V: KClass) -> tuple[RationalFn, LaurentExpr]:
    """hat e(V) = det(V)^(1/2) * e_K(V); for one character chi^(1/2) - chi^(-1/2)."""
    dh = det_half(V)
    return euler_class(V, "K") * RationalFn(dh), dh


def additive_weight(V: KClass, key: tuple, sample: Mapping[int, float]) -> float:
    return sum(e / 2 * sample.get(i, 0.0) for i, e in enumerate(key) if e)


def k_to_coh_check(V: KClass, sample: Mapping[int, float], eps: float) -> float:
    """|e_K(V)(exp(eps*w)) / eps^r - e(V)(w)| for an honest class V of rank r.

    INPUT: sample maps variable index -> real additive weight.
    """
    if not V.is_honest():
        raise ValueError("k_to_coh_check needs an honest (non-virtual) class")
    r = V.rank()
    kval = 1.0
    cval = 1.0
    for k, m in V.items():
        w = additive_weight(V, k, sample)
        kval *= (-math.expm1(-eps * w)) ** m
        cval *= w ** m
    return abs(kval / eps ** r - cval)


def k_to_coh_reference(V: KClass, sample: Mapping[int, float]) -> float:
    """Natural scale of the first-order residual: |e(V)| * sum |w| (at least 1e-300)."""
    ws = [(additive_weight(V, k, sample), m) for k, m in V.items()]
    prod = 1.0
    for w, m in ws:
        prod *= abs(w) ** m
    return max(prod * sum(abs(w) * m for w, m in ws), 1e-300)
