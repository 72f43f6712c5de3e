"""`stab` command line interface.

Input files are UTF-8 JSON:

    {"nodes": ["0"], "arrows": [["0", "1", "q"]],
     "blocks": [{"d_in": [1], "d_out": [2], "a_var": "a1",
                 "framing_weights": {"in": [["1"]], "out": [["b1", "b2"]]}}],
     "hbar_placement": "out", "theta": [-1], "v_max": [2]}

`v_list` may replace `v_max`; `chamber`, `slope` and `face` may be given in the file
(flags win).  Exit codes: 0 computed / identity holds, 1 identity fails,
2 input error, 3 genericity error.
"""
from __future__ import annotations

import json
import sys
from itertools import product

import click

from .envelopes import (EnvelopeError, GenericityError, NakajimaFixed, ThreeFactor,
                        attracting_rank, check_duality, check_triangle, check_ybe, envelope_matrix,
                        matrix_latex, nakajima_minuscule_matrix, polarization_normalizer, rmatrix,
                        verify_axioms)
from .kn_strata import kn_stratify
from .laurent import parse_fraction
from .quiver import Block, QuiverData, QuiverError, StabilityError
from .torus_fixed import ChamberError, TorusFixed

EXIT_OK, EXIT_FAILS, EXIT_INPUT, EXIT_GENERIC = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _node_index(nodes: list, x) -> int:
    if isinstance(x, int) and not isinstance(x, bool):
        if not 0 <= x < len(nodes):
            raise InputError(f"node index {x} out of range")
        return x
    if x in nodes:
        return nodes.index(x)
    raise InputError(f"unknown node {x!r}")


def _weights(fw: dict | None, key: str, d: list) -> tuple:
    if not fw or key not in fw:
        return ()
    w = fw[key]
    if len(w) != len(d) or any(len(w[i]) != d[i] for i in range(len(d))):
        raise InputError(f"framing_weights.{key} must list one character per framing line")
    return tuple(tuple(str(c) for c in row) for row in w)


def parse_config(cfg: dict) -> tuple[QuiverData, list[tuple]]:
    """INPUT: decoded JSON.  OUTPUT: (QuiverData, list of gauge dimension vectors)."""
    if not isinstance(cfg, dict):
        raise InputError("input must be a JSON object")
    for k in ("nodes", "blocks"):
        if k not in cfg:
            raise InputError(f"missing field {k!r}")
    nodes = [str(x) for x in cfg["nodes"]]
    if not nodes or len(set(nodes)) != len(nodes):
        raise InputError("nodes must be a nonempty list of distinct names")
    n = len(nodes)
    arrows, chars = [], []
    for a in cfg.get("arrows", []):
        if not isinstance(a, list) or len(a) not in (2, 3):
            raise InputError("arrows are [from, to, flavour] triples")
        arrows.append((_node_index(nodes, a[0]), _node_index(nodes, a[1])))
        chars.append(str(a[2]) if len(a) == 3 else "1")
    blocks = []
    for b in cfg["blocks"]:
        d_in, d_out = list(b.get("d_in", [])), list(b.get("d_out", []))
        if len(d_in) != n or len(d_out) != n:
            raise InputError("each block needs d_in and d_out with one entry per node")
        if any(not isinstance(x, int) or x < 0 for x in d_in + d_out):
            raise InputError("framing dimensions must be natural numbers")
        fw = b.get("framing_weights")
        blocks.append(Block(tuple(d_in), tuple(d_out), b.get("a_var"),
                            _weights(fw, "in", d_in), _weights(fw, "out", d_out)))
    theta = tuple(parse_fraction(str(t)) for t in cfg.get("theta", [-1] * n))
    data = QuiverData.from_blocks(tuple(nodes), tuple(arrows), blocks, tuple(chars),
                                  cfg.get("hbar_placement", "out"), theta)
    if "v_list" in cfg:
        v_list = [tuple(int(x) for x in v) for v in cfg["v_list"]]
    elif "v_max" in cfg:
        v_list = [tuple(v) for v in product(*[range(int(x) + 1) for x in cfg["v_max"]])]
    else:
        raise InputError("give v_max or v_list")
    if any(len(v) != n or min(v, default=0) < 0 for v in v_list):
        raise InputError("dimension vectors need one natural number per node")
    return data, v_list


def parse_vector(text: str) -> tuple:
    try:
        return tuple(parse_fraction(x.strip()) for x in str(text).split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse vector {text!r}") from exc


def _pick(flag, cfg: dict, key: str, required: bool = True):
    if flag is not None:
        return flag
    if key in cfg:
        v = cfg[key]
        return ",".join(str(x) for x in v) if isinstance(v, list) else str(v)
    if required:
        raise InputError(f"missing --{key}")
    return None


def _emit(payload: dict, fmt: str, latex: str | None = None) -> None:
    if fmt == "latex" and latex is not None:
        click.echo(latex)
    else:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _theory(t: str) -> str:
    return "K" if t.lower() == "k" else "coh"


def _three_factor(data: QuiverData, seed: int) -> ThreeFactor:
    bs = data.W.blocks
    if not bs or any((b.d_in, b.d_out) != (bs[0].d_in, bs[0].d_out) for b in bs):
        raise InputError("the ybe command needs identical framing blocks")
    return ThreeFactor(data.Q.nodes, data.Q.arrows, bs[0].d_in, bs[0].d_out,
                       data.W.arrow_chars, data.W.hbar_placement, data.Q.theta, seed)


common = [
    click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False)),
    click.option("--chamber", default=None, help="cocharacter c1,c2,..."),
    click.option("--slope", default=None, help="p/q or p/q,p/q,... (one per node)"),
    click.option("--theory", type=click.Choice(["coh", "k"], case_sensitive=False), default="k"),
    click.option("--format", "fmt", type=click.Choice(["json", "latex"]), default="json"),
    click.option("--seed", default=0, type=int),
    click.option("--jobs", default=1, type=int, help="accepted for compatibility; evaluation is sequential"),
]


def with_common(f):
    for opt in reversed(common):
        f = opt(f)
    return f


def _load(input_path: str) -> tuple[dict, QuiverData, list]:
    try:
        with open(input_path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    data, v_list = parse_config(cfg)
    return cfg, data, v_list


def _setup(input_path: str, seed: int):
    cfg, data, v_list = _load(input_path)
    return cfg, TorusFixed(data, v_list, seed=seed)


def _slope_arg(slope, cfg, theory) -> object:
    if theory == "coh":
        return 0
    s = _pick(slope, cfg, "slope")
    return ",".join(str(x) for x in parse_vector(s))


@click.group()
def cli() -> None:
    """Envelope matrices, R-matrices and identity checks for framed quiver varieties."""


@cli.command()
@with_common
def envelope(input_path, chamber, slope, theory, fmt, seed, jobs):
    """Envelope matrix for one chamber and slope."""
    cfg, tf = _setup(input_path, seed)
    mode = _theory(theory)
    M = envelope_matrix(tf, parse_vector(_pick(chamber, cfg, "chamber")), _slope_arg(slope, cfg, mode), mode)
    _emit({"command": "envelope", "matrix": M.to_json()}, fmt, M.to_latex())
    return EXIT_OK


@cli.command(name="rmatrix")
@with_common
def rmatrix_cmd(input_path, chamber, slope, theory, fmt, seed, jobs):
    """R = M(-chamber)^-1 M(chamber)."""
    cfg, tf = _setup(input_path, seed)
    mode = _theory(theory)
    xi = parse_vector(_pick(chamber, cfg, "chamber"))
    s = _slope_arg(slope, cfg, mode)
    Mg = envelope_matrix(tf, xi, s, mode)
    Ml = envelope_matrix(tf, tuple(-x for x in xi), s, mode)
    R = rmatrix(Ml, Mg)
    _emit({"command": "rmatrix", "index": Mg.labels(), "variables": Mg.reg.names,
           "entries": [[x.to_json() for x in row] for row in R]}, fmt, matrix_latex(R))
    return EXIT_OK


@cli.command()
@with_common
@click.option("--shifted", is_flag=True, default=False)
@click.option("--normalization", type=click.Choice(["auto", "hall", "polarization"]), default="auto")
def ybe(input_path, chamber, slope, theory, fmt, seed, jobs, shifted, normalization):
    """Plain or slope-shifted Yang-Baxter equation on three copies of the framing block."""
    cfg, data, _ = _load(input_path)
    if _theory(theory) != "K":
        raise InputError("the ybe command works in K theory")
    tfac = _three_factor(data, seed)
    s = ",".join(str(x) for x in parse_vector(_pick(slope, cfg, "slope")))
    res = check_ybe(tfac, s, shifted, None if normalization == "auto" else normalization)
    _emit({"command": "ybe", "shifted": shifted, **res}, fmt)
    return EXIT_OK if res["verdict"] == "equal" else EXIT_FAILS


@cli.command()
@with_common
@click.option("--face", default=None, help="cocharacter of the face, c1,c2,...")
def triangle(input_path, chamber, slope, theory, fmt, seed, jobs, face):
    """Triangle lemma for a chamber and one of its faces."""
    cfg, tf = _setup(input_path, seed)
    mode = _theory(theory)
    res = check_triangle(tf, parse_vector(_pick(chamber, cfg, "chamber")),
                         parse_vector(_pick(face, cfg, "face")), _slope_arg(slope, cfg, mode), mode)
    _emit({"command": "triangle", **res}, fmt)
    return EXIT_OK if res["verdict"] == "equal" else EXIT_FAILS


@cli.command()
@with_common
def duality(input_path, chamber, slope, theory, fmt, seed, jobs):
    """Transpose/duality identity and the integrality report."""
    cfg, tf = _setup(input_path, seed)
    mode = _theory(theory)
    res = check_duality(tf, parse_vector(_pick(chamber, cfg, "chamber")), _slope_arg(slope, cfg, mode), mode)
    _emit({"command": "duality", **res}, fmt)
    return EXIT_OK if res["verdict"] == "identity" else EXIT_FAILS


@cli.command()
@with_common
@click.option("--normalizer", type=click.Choice(["none", "polarization"]), default="none")
def axioms(input_path, chamber, slope, theory, fmt, seed, jobs, normalizer):
    """Support, normalization and degree axioms of the envelope matrix."""
    cfg, tf = _setup(input_path, seed)
    mode = _theory(theory)
    xi = parse_vector(_pick(chamber, cfg, "chamber"))
    nz = polarization_normalizer(tf, xi) if normalizer == "polarization" and mode == "K" else None
    M = envelope_matrix(tf, xi, _slope_arg(slope, cfg, mode), mode, nz)
    rep = verify_axioms(M)
    _emit({"command": "axioms", "index": M.labels(), **rep}, fmt)
    return EXIT_OK if rep["ok"] else EXIT_FAILS


@cli.command()
@with_common
def kn(input_path, chamber, slope, theory, fmt, seed, jobs):
    """Kempf-Ness strata for the largest dimension vector of the input."""
    cfg, data, v_list = _load(input_path)
    v = max(v_list, key=lambda x: (sum(x), x))
    strata = kn_stratify(data.Q, v, seed=seed)
    _emit({"command": "kn", "v": list(v), "strata": [st.to_json() for st in strata]}, fmt)
    return EXIT_OK


@cli.command()
@with_common
def nakajima(input_path, chamber, slope, theory, fmt, seed, jobs):
    """Minuscule Nakajima envelope matrix (blocks give the in-framing of each A-factor)."""
    cfg, data, v_list = _load(input_path)
    nf = NakajimaFixed(data, v_list, seed=seed)
    xi = parse_vector(_pick(chamber, cfg, "chamber"))
    M = nakajima_minuscule_matrix(nf, xi, _slope_arg(slope, cfg, "K"))
    rep = verify_axioms(M)
    ranks = {F.label(): attracting_rank(nf, F, xi) for F in nf.components}
    _emit({"command": "nakajima", "matrix": M.to_json(), "axioms": rep, "prefactor_ranks": ranks},
          fmt, M.to_latex())
    return EXIT_OK if rep["ok"] else EXIT_FAILS


def _error(kind: str, exc: Exception, code: int) -> int:
    click.echo(json.dumps({"error": {"type": kind, "class": type(exc).__name__, "message": str(exc)}},
                          sort_keys=True))
    return code


def run(argv: list[str] | None = None) -> int:
    """Invoke the CLI and return its exit code instead of exiting."""
    try:
        rv = cli.main(args=argv, prog_name="stab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        return _error("usage", exc, EXIT_INPUT)
    except (GenericityError, ChamberError) as exc:
        return _error("genericity", exc, EXIT_GENERIC)
    except StabilityError as exc:
        return _error("unsupported", exc, EXIT_INPUT)
    except (InputError, QuiverError, EnvelopeError, ValueError, KeyError, TypeError, OSError) as exc:
        return _error("input", exc, EXIT_INPUT)
    return rv if isinstance(rv, int) else EXIT_OK


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))
