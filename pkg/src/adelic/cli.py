"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 ansatz caps insufficient,
4 a numeric check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .arith import MultiPoly, RatFunc, Scalar
from .diffop import DiffOp
from .fourier import AnsatzCaps, CapsInsufficient, dimension_table, find_pairs
from .kernelver import (NumericError, cd_kernel, kernel_agreement, nystrom_alignment,
                        verify_commutation_fourier, verify_reflection_symbolic)
from .reflector import find_reflected, find_universal, rotate_to_commuting
from .textio import ParseError, format_operator, format_ratfunc
from .wavefun import ValidationError, WaveFunction, from_spec, involution, is_fixed, validate

EXIT_OK, EXIT_INVALID, EXIT_CAPS, EXIT_NUMERIC = 0, 2, 3, 4

SUBCOMMANDS = ("reflect", "rotate", "universal", "kernel", "verify", "fourier-basis", "involution")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("adelic") / "fixtures" / name))


def resolve_psi_path(text: str) -> Path:
    """A file path, or the name of a packaged fixture (with or without ``.json``)."""
    p = Path(text)
    if p.exists():
        return p
    name = text if text.endswith(".json") else text + ".json"
    f = fixture_path(Path(name).name)
    if f.exists():
        return f
    raise ValidationError(f"no such wave-function file or fixture: {text}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"not a rational number: {text!r}") from None


def _point(text: str | None):
    """``None``/``sym`` stays symbolic, otherwise a rational value."""
    if text is None or text == "sym":
        return None
    return _rational(text)


def load_psi(path: Path, values: dict) -> WaveFunction:
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    wf = from_spec(data)
    used = {k: v for k, v in values.items() if k in wf.params}
    if not used:
        return wf
    h = wf.h.subs({k: MultiPoly.constant(Scalar(v)) for k, v in used.items()})
    rest = [p for p in wf.params if p not in used]
    return validate(h, name=wf.name, params=rest, real=[p for p in wf.real if p in rest], notes=wf.notes)


def _parse_caps(text: str | None):
    if text is None:
        return None, None, None
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 6:
        raise ValidationError("--caps expects ell,m,A,B,C,deg")
    vals = [None if p in ("", "-") else int(p) for p in parts]
    if any(v is not None and v < 0 for v in vals):
        raise ValidationError("--caps entries must be nonnegative")
    ell, m, A, B, C, deg = vals
    caps = AnsatzCaps(A, B, C, 2 if deg is None else deg)
    return ell, m, caps


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adelic", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--psi", action="append", default=[], help="wave-function spec file or fixture name")
    parser.add_argument("--s", default=None, help="rational a/b or 'sym'")
    parser.add_argument("--t", default=None, help="rational a/b or 'sym'")
    parser.add_argument("--r", default=None, help="value for the parameter r")
    parser.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    parser.add_argument("--symbolic-st", action="store_true", help="keep s and t symbolic")
    parser.add_argument("--caps", default=None, help="ell,m,A,B,C,deg (empty entries keep defaults)")
    parser.add_argument("--word", default="a", help="involution word, applied right to left")
    parser.add_argument("--format", choices=("text", "structured"), default="text")
    parser.add_argument("--out", default=None)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _op_struct(op: DiffOp) -> list:
    return [[k, format_ratfunc(c)] for k, c in enumerate(op.coeffs)]


class Emitter:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.records: list = []

    def add(self, key: str, value):
        self.records.append((key, value))

    def render(self) -> str:
        if self.fmt == "structured":
            def conv(v):
                if isinstance(v, DiffOp):
                    return {"var": v.var, "terms": _op_struct(v)}
                if isinstance(v, (list, tuple)):
                    return [conv(x) for x in v]
                if isinstance(v, dict):
                    return {str(k): conv(x) for k, x in v.items()}
                if isinstance(v, RatFunc):
                    return format_ratfunc(v)
                return v
            payload: dict = {}
            for k, v in self.records:
                payload[k] = conv(v)
            return json.dumps(payload, indent=2, sort_keys=False) + "\n"
        lines = []
        for k, v in self.records:
            if isinstance(v, (list, tuple)):
                lines.append(f"{k}:")
                lines.extend(f"  {_text(x)}" for x in v)
            else:
                lines.append(f"{k}: {_text(v)}")
        return "\n".join(lines) + "\n"


def _text(v) -> str:
    if isinstance(v, DiffOp):
        return format_operator(v)
    if isinstance(v, RatFunc):
        return format_ratfunc(v)
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _report(check: str, residual, tolerance, passed: bool) -> dict:
    return {"check": check, "residual": residual, "tolerance": tolerance, "pass": bool(passed)}


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    out = Emitter(args.format)
    try:
        code = _dispatch(args, out)
    except ValidationError as exc:
        print(f"error (wavefun): {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ParseError as exc:
        print(f"error (textio): {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CapsInsufficient as exc:
        print(f"error (reflector): {exc}", file=sys.stderr)
        return EXIT_CAPS
    except NumericError as exc:
        print(f"error (kernelver): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = out.render()
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return code


def _dispatch(args, out: Emitter) -> int:
    values = {}
    if args.r is not None:
        values["r"] = _rational(args.r)
    for item in args.param:
        name, _, val = item.partition("=")
        if not name or not val:
            raise ValidationError(f"--param expects NAME=VALUE, got {item!r}")
        values[name.strip()] = _rational(val.strip())
    if not args.psi:
        raise ValidationError("at least one --psi is required")
    paths = [resolve_psi_path(p) for p in args.psi]
    s = None if args.symbolic_st else _point(args.s)
    t = None if args.symbolic_st else _point(args.t)
    ell, m, caps = _parse_caps(args.caps)
    config = {
        "subcommand": args.subcommand,
        "psi": [p.name for p in paths],
        "s": "sym" if s is None else str(s),
        "t": "sym" if t is None else str(t),
        "params": {k: str(v) for k, v in sorted(values.items())},
        "caps": args.caps or "default",
        "format": args.format,
        "seed": os.environ.get("ADELIC_SEED", "0"),
    }
    out.add("config", config)
    psis = [load_psi(p, values) for p in paths]
    wf = psis[0]
    kw = {"caps": caps}
    if ell is not None:
        kw["ell"] = ell
    cmd = args.subcommand

    if cmd in ("reflect", "universal"):
        res = find_reflected(wf, s, t, **kw) if cmd == "reflect" else find_universal(psis, s, t, **kw)
        out.add("order_cap", res.ell)
        out.add("canonical", res.canonical)
        out.add("solution_space", list(res.solution_space))
        out.add("partner", res.canonical_partners[0])
        out.add("certificates", "concomitants vanish at z=-t and x=s")
        return EXIT_OK

    if cmd == "rotate":
        res = find_reflected(wf, s, t, **kw)
        Rt, C = rotate_to_commuting(res, with_companion=True)
        out.add("canonical", res.canonical)
        out.add("rotated", Rt)
        out.add("companion", C)
        return EXIT_OK

    if cmd == "kernel":
        K = cd_kernel(wf, s)
        out.add("kernel", format_ratfunc(K.rational))
        out.add("exponential", f"exp(({K.alpha})*z+({K.beta})*w)")
        return EXIT_OK

    if cmd == "fourier-basis":
        ell_ = 2 if ell is None else ell
        m_ = ell_ if m is None else m
        basis = find_pairs(wf, ell_, m_, caps)
        table = dimension_table(wf, ell_, m_, caps)
        out.add("dimension", basis.dim)
        out.add("dimensions", {f"{l},{k}": d for (l, k), d in sorted(table.dims.items())})
        out.add("inferred_n", table.n if table.consistent else "inconsistent")
        out.add("pairs", [f"{format_operator(p.R)}  <->  {format_operator(p.L)}" for p in basis.pairs])
        return EXIT_OK

    if cmd == "involution":
        image = involution(wf, args.word)
        out.add("word", args.word)
        out.add("image", format_ratfunc(image.h))
        out.add("fixed", is_fixed(wf, args.word))
        return EXIT_OK

    if cmd == "verify":
        return _verify(wf, s, t, kw, out)
    raise AssertionError(cmd)


def _verify(wf: WaveFunction, s, t, kw, out: Emitter) -> int:
    reports = []
    res = find_reflected(wf, s, t, **kw)
    K = cd_kernel(wf, s)
    worst = 0
    for R in res.solution_space:
        ok, _ = verify_reflection_symbolic(R, K)
        worst = max(worst, 0 if ok else 1)
    reports.append(_report("reflection identity, every member", 0 if worst == 0 else "nonzero", 0, worst == 0))
    if is_fixed(wf, "ac"):
        Rt = rotate_to_commuting(res)
        ok, _ = verify_commutation_fourier(Rt, wf, s, t)
        reports.append(_report("fourier-picture commutation of the rotated canonical", 0 if ok else "nonzero", 0, ok))
    numeric_ok = True
    if s is not None and not wf.params:
        rep = kernel_agreement(wf, s, tol=1e-8)
        rep = _report(rep["check"], float(rep["residual"]), rep["tolerance"], rep["pass"])
        reports.append(rep)
        numeric_ok &= rep["pass"]
        if wf.h == RatFunc(1):
            rep = nystrom_alignment(float(s), float(t) if t is not None else 1.0)
            rep = _report(rep["check"], float(rep["residual"]), rep["tolerance"], rep["pass"])
            reports.append(rep)
            numeric_ok &= rep["pass"]
    else:
        reports.append(_report("numeric checks", "skipped (symbolic s or parameters)", None, True))
    out.add("reports", reports)
    if not all(r["pass"] for r in reports if r["check"].startswith(("reflection", "fourier"))):
        return EXIT_NUMERIC
    return EXIT_OK if numeric_ok else EXIT_NUMERIC


def main() -> None:
    sys.exit(run())
