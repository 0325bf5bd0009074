"""Canonical text for polynomials, rational functions and operators.

Grammar of the input expressions: integers, ``a/b``, the imaginary unit
``i``, symbol names, ``+ - * /``, ``^`` for integer powers, parentheses.
Operators are written ``(<ratfunc>) Dz^3 + (<ratfunc>) Dz^0``.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction

from .arith import I, MultiPoly, RatFunc, Scalar, symbol_key


_VARIABLES = ("x", "z", "w", "y")


def _monomial_text(names, exps) -> str:
    factors = []
    # parameters first, then the spatial/spectral variables
    for n, k in sorted(zip(names, exps), key=lambda p: (p[0] in _VARIABLES, symbol_key(p[0]))):
        if k == 1:
            factors.append(n)
        elif k:
            factors.append(f"{n}^{k}")
    return "*".join(factors)


def _order_key(e):
    return (sum(e), tuple(-k for k in reversed(e)))


def _term_text(c: Scalar, mono: str) -> str:
    if not mono:
        return str(c) if c.im == 0 or c.re == 0 else f"({c.re}{'-' if c.im < 0 else '+'}{_imag(abs(c.im))})"
    if c.im == 0:
        if c.re == 1:
            return mono
        if c.re == -1:
            return "-" + mono
        return f"{c.re}*{mono}"
    if c.re == 0:
        if c.im == 1:
            return "i*" + mono
        if c.im == -1:
            return "-i*" + mono
        return f"{c.im}*i*{mono}"
    return f"({c.re}{'-' if c.im < 0 else '+'}{_imag(abs(c.im))})*{mono}"


def _imag(v: Fraction) -> str:
    return "i" if v == 1 else f"{v}*i"


def format_poly(p: MultiPoly) -> str:
    if p.is_zero():
        return "0"
    names = p.names
    terms = sorted(p.terms().items(), key=lambda kv: _order_key(kv[0]), reverse=True)
    out = ""
    for e, c in terms:
        t = _term_text(c, _monomial_text(names, e))
        if not out:
            out = t
        elif t.startswith("-"):
            out += t
        else:
            out += "+" + t
    return out


def format_ratfunc(f: RatFunc) -> str:
    if f.den.is_constant():
        return format_poly(f.num)
    return f"({format_poly(f.num)})/({format_poly(f.den)})"


class ParseError(ValueError):
    pass


def parse_expr(text: str) -> RatFunc:
    """Parse a rational expression in the grammar above."""
    src = text.strip().replace("^", "**")
    if not src:
        raise ParseError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    return _eval(tree.body, text)


def _eval(node, text) -> RatFunc:
    if isinstance(node, ast.BinOp):
        a = _eval(node.left, text)
        if isinstance(node.op, ast.Pow):
            k = _int_literal(node.right, text)
            return a ** k
        b = _eval(node.right, text)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            if b.is_zero():
                raise ParseError(f"division by zero in {text!r}")
            return a / b
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, text)
        return -v if isinstance(node.op, ast.USub) else v
    elif isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return RatFunc(node.value)
    elif isinstance(node, ast.Name):
        if node.id == "i":
            return RatFunc(MultiPoly.constant(I))
        return RatFunc(MultiPoly.symbol(node.id))
    raise ParseError(f"unsupported syntax in {text!r}")


def _int_literal(node, text) -> int:
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_int_literal(node.operand, text)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    raise ParseError(f"exponent must be an integer literal in {text!r}")


def parse_poly(text: str) -> MultiPoly:
    f = parse_expr(text)
    if not f.is_polynomial():
        raise ParseError(f"{text!r} is not a polynomial")
    return f.num * (Scalar(1) / f.den.constant_value())


_TERM = re.compile(r"D([A-Za-z_]\w*)\^(\d+)$")


def split_top_level(text: str, sep: str = " + ") -> list[str]:
    parts, depth, start, k = [], 0, 0, 0
    while k < len(text):
        ch = text[k]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(sep, k):
            parts.append(text[start:k])
            k += len(sep)
            start = k
            continue
        k += 1
    parts.append(text[start:])
    return parts


def format_operator(op) -> str:
    if op.is_zero():
        return f"(0) D{op.var}^0"
    terms = []
    for k in range(op.order, -1, -1):
        c = op.coeffs[k]
        if not c.is_zero():
            terms.append(f"({format_ratfunc(c)}) D{op.var}^{k}")
    return " + ".join(terms)


def parse_operator(text: str):
    from .diffop import DiffOp

    coeffs: dict = {}
    var = None
    for part in split_top_level(text.strip()):
        part = part.strip()
        if not part.startswith("("):
            raise ParseError(f"operator term must start with '(': {part!r}")
        depth = 0
        for k, ch in enumerate(part):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                break
        coeff, rest = part[1:k], part[k + 1:].strip()
        m = _TERM.match(rest)
        if not m:
            raise ParseError(f"bad derivative marker {rest!r}")
        if var is not None and m.group(1) != var:
            raise ParseError("mixed operator variables")
        var = m.group(1)
        order = int(m.group(2))
        coeffs[order] = coeffs.get(order, RatFunc(0)) + parse_expr(coeff)
    n = max(coeffs)
    return DiffOp(var, [coeffs.get(k, RatFunc(0)) for k in range(n + 1)])
