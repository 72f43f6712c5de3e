from __future__ import annotations

import pytest

from stabenv.envelopes import ThreeFactor
from stabenv.laurent import LaurentExpr, RationalFn, Var, VariableRegistry
from stabenv.quiver import Block, QuiverData
from stabenv.torus_fixed import TorusFixed


def two_block(d_in: int, d_out: int, hbar: str = "out", vmax: int = 2) -> TorusFixed:
    """Single node, no arrows, two framing blocks weighted by a1, a2."""
    blocks = [Block((d_in,), (d_out,), "a1"), Block((d_in,), (d_out,), "a2")]
    data = QuiverData.from_blocks(("0",), (), blocks, (), hbar, (-1,))
    return TorusFixed(data, [(k,) for k in range(vmax + 1)])


def three_factor(d_in: int, d_out: int) -> ThreeFactor:
    return ThreeFactor(("0",), (), (d_in,), (d_out,))


def rf(reg: VariableRegistry, text: str) -> RationalFn:
    """Tiny parser for test oracles: sums/products of monomials written as text.

    Grammar: terms separated by ' + ' or ' - ', each term a product of factors
    '(...)' or monomials; '/' divides by the monomial that follows.
    """
    return RationalFn(poly(reg, text))


def poly(reg: VariableRegistry, text: str) -> LaurentExpr:
    text = text.replace(" ", "")
    out = reg.zero()
    sign, i, start = 1, 0, 0
    depth = 0
    terms = []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start and text[i - 1] not in "^(":
            terms.append((sign, text[start:i]))
            sign = 1 if ch == "+" else -1
            start = i + 1
        elif ch in "+-" and depth == 0 and i == start:
            sign = 1 if ch == "+" else -1
            start = i + 1
    terms.append((sign, text[start:]))
    for sg, t in terms:
        out = out + _product(reg, t).scale(sg)
    return out


def _product(reg: VariableRegistry, t: str) -> LaurentExpr:
    val = reg.one()
    while t:
        if t.startswith("("):
            depth, j = 0, 0
            for j, ch in enumerate(t):
                depth += ch == "("
                depth -= ch == ")"
                if depth == 0:
                    break
            inner = poly(reg, t[1:j])
            t = t[j + 1:]
            if t.startswith("^"):
                k = 1
                while k < len(t) and t[k].isdigit():
                    k += 1
                inner = inner ** int(t[1:k])
                t = t[k:]
            val = val * inner
            t = t.lstrip("*")
        else:
            k = t.find("(")
            mono, t = (t, "") if k < 0 else (t[:k].rstrip("*"), t[k:])
            val = val * reg.parse_monomial(mono)
    return val


@pytest.fixture
def gr12() -> TorusFixed:
    return two_block(1, 2)


@pytest.fixture
def sym11() -> TorusFixed:
    return two_block(1, 1)


@pytest.fixture
def small_reg() -> VariableRegistry:
    return VariableRegistry([Var("a1", "torus-A", -1, 0), Var("a2", "torus-A", -1, 1),
                             Var("h", "flavour", -1, 0), Var("x", "gauge-chern-root", 0, 0)])


# acceptance report: one PASS/FAIL line per criterion, repeated in the terminal summary
ACCEPTANCE: list[str] = []


def record(label: str, ok: bool, detail: str = "") -> bool:
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
    print(line)
    ACCEPTANCE.append(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
