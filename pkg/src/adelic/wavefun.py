"""Rank-one wave functions ``psi = h(x, z) e^{-xz}`` and the involutions a, b, c, s.

A wave function is entered through its prefactor ``h = N(x, z) / (p(x) q(z))``.
The degree witness ``P`` is read off from ``N = sum_j a_j(x) (-z)^j`` and the
codegree witness ``Ptilde`` (with ``Ptilde psi = ptilde(x) qtilde(z) e^{-xz}``)
is found by a linear search over increasing order.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .arith import MultiPoly, RatFunc, Scalar
from .diffop import DiffOp, QuasiExp
from .linalg import coefficient_rows, nullspace_rows
from .textio import format_poly, parse_expr, parse_poly

X = "x"
Z = "z"
_XS = MultiPoly.symbol(X)
_ZS = MultiPoly.symbol(Z)


class ValidationError(ValueError):
    """The input is outside the supported class of wave functions."""


# --- polynomials in z with coefficients in Q(x, params) ----------------------

def z_coefficients(f: RatFunc, var: str = Z) -> dict:
    """``{k: coefficient}`` for a rational function polynomial in ``var``."""
    if var in f.den.variables():
        raise ValueError(f"denominator depends on {var}")
    inv = RatFunc(MultiPoly.constant(1), f.den)
    return {k: RatFunc(c) * inv for k, c in f.num.coefficients_in(var).items() if not c.is_zero()}


def zpoly_sub(a: dict, b: dict, c: RatFunc) -> dict:
    """``a - c*b``."""
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, RatFunc(0)) - c * v
        if w.is_zero():
            out.pop(k, None)
        else:
            out[k] = w
    return out


def tower(h_num: RatFunc, order: int, x: str = X, z: str = Z) -> list[dict]:
    """``E_j = (D_x - z)^j h_num`` for ``j <= order`` as z-coefficient dicts."""
    zs = RatFunc(MultiPoly.symbol(z))
    out, f = [], h_num
    for j in range(order + 1):
        if j:
            f = f.diff(x) - f * zs
        out.append(z_coefficients(f, z))
    return out


def reduce_tower(g: dict, towers: list[dict], base: int) -> tuple[list, dict]:
    """Divide ``g`` by the triangular family ``towers`` (``E_j`` of z-degree ``base + j``).

    Returns the quotients ``u_j`` and what is left; the remainder only has
    z-degrees below ``base`` or above the top of the tower.
    """
    u = [RatFunc(0)] * len(towers)
    rem = dict(g)
    for j in range(len(towers) - 1, -1, -1):
        d = base + j
        if d not in rem:
            continue
        e = towers[j]
        c = rem[d] / e[d]
        u[j] = c
        rem = zpoly_sub(rem, e, c)
    return u, rem


# --- the wave function -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WaveFunction:
    h: RatFunc
    p: MultiPoly
    q: MultiPoly
    P: DiffOp
    d1: int
    Ptilde: DiffOp | None = None
    ptilde: MultiPoly | None = None
    qtilde: MultiPoly | None = None
    d2: int | None = None
    name: str = ""
    params: tuple = ()
    real: frozenset = frozenset()
    notes: str = ""
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def psi(self) -> QuasiExp:
        return QuasiExp(self.h)

    @property
    def numerator(self) -> MultiPoly:
        """``N = p q h``."""
        f = self.h * RatFunc(self.p * self.q)
        return f.num * (Scalar(1) / f.den.constant_value())

    def has_codegree(self) -> bool:
        return self.Ptilde is not None

    def adjoint(self) -> "WaveFunction":
        """``a(psi)``, computed once."""
        with self._lock:
            if "adjoint" not in self._cache:
                self._cache["adjoint"] = _adjoint(self)
            return self._cache["adjoint"]

    def __eq__(self, other):
        return isinstance(other, WaveFunction) and self.h == other.h

    def __hash__(self):
        return hash(self.h)

    def __repr__(self):
        return f"WaveFunction({self.name or self.h}, d1={self.d1}, d2={self.d2})"


def _split_denominator(den: MultiPoly):
    coeffs = list(den.coefficients_in(Z).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = g.gcd(c)
    p = g
    q = den.exquo(p)
    if X in q.variables() or Z in p.variables():
        raise ValidationError("denominator is not a product of an x-polynomial and a z-polynomial")
    # move constants into q so that p is monic
    lc = p.leading_coefficient()
    if lc != 1:
        p, q = p * (Scalar(1) / lc), q * lc
    return p, q


def degree_witness(h: RatFunc):
    """``(p, q, P)`` with ``p q h = P e^{-xz}`` prefactor."""
    if h.is_zero():
        raise ValidationError("the zero function is not a wave function")
    p, q = _split_denominator(h.den)
    N = (h * RatFunc(p * q))
    if not N.is_polynomial():
        raise ValidationError("internal: numerator did not clear")
    Npoly = N.num * (Scalar(1) / N.den.constant_value())
    coeffs = Npoly.coefficients_in(Z)
    d1 = max(coeffs) if coeffs else 0
    a = [RatFunc(coeffs.get(j, MultiPoly.constant(0)) * ((-1) ** j)) for j in range(d1 + 1)]
    return p, q, DiffOp(X, a)


def codegree_witness(h: RatFunc, p: MultiPoly, q: MultiPoly, d1: int, cap: int):
    """Minimal ``Ptilde`` with ``Ptilde psi = ptilde(x) qtilde(z) e^{-xz}``.

    Write ``Ptilde = ptilde * sum_j b_j D^j``.  Then ``sum_j b_j E_j = q(z) qtilde(z)``
    with ``E_j = (D - z)^j (q h)``; for a trial order ``k`` the unknowns are the
    coefficients of ``qtilde`` and the ``b_j`` follow by triangular division.
    """
    base = RatFunc(q) * h
    dq = q.degree(Z)
    for k in range(cap + 1):
        e = k + d1 - dq
        if e < 0:
            continue
        towers = tower(base, k)
        cols, quotients = [], []
        for i in range(e + 1):
            g = z_coefficients(RatFunc(q * _ZS ** i))
            u, rem = reduce_tower(g, towers, d1)
            cols.append(rem)
            quotients.append(u)
        rows = coefficient_rows(cols, (X, Z))
        null = nullspace_rows(rows, e + 1, modular=False)
        good = [v for v in null if e in v]
        if not good:
            continue
        vec = good[0]
        c = {i: RatFunc(v) for i, v in vec.items()}
        b = [sum((c[i] * quotients[i][j] for i in c), RatFunc(0)) for j in range(k + 1)]
        qt = sum((c[i] * RatFunc(_ZS ** i) for i in c), RatFunc(0))
        lead = qt.num.coefficients_in(Z)[e]
        scale = RatFunc(MultiPoly.constant(1), lead) * RatFunc(qt.den)
        b = [bj * scale for bj in b]
        qt = qt * scale
        # ptilde clears the x-denominators of the b_j
        ptilde = MultiPoly.constant(1)
        for bj in b:
            if not bj.is_zero():
                ptilde = _lcm(ptilde, bj.den)
        lc = ptilde.leading_coefficient()
        if lc != 1:
            ptilde = ptilde * (Scalar(1) / lc)
        Pt = DiffOp(X, [bj * RatFunc(ptilde) for bj in b])
        qtp = qt.num * (Scalar(1) / qt.den.constant_value())
        return Pt, ptilde, qtp, k
    return None


def _lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_constant():
        return b
    if b.is_constant():
        return a
    return a.exquo(a.gcd(b)) * b


def validate(h, *, cap: int | None = None, name: str = "", params=(), real=(), notes: str = "",
             require_codegree: bool = False) -> WaveFunction:
    """Build a :class:`WaveFunction` from its prefactor.

    ``cap`` bounds the codegree search (default ``2*d1 + 4``).  A missing
    codegree witness is only an error when ``require_codegree`` is set; the
    wave function is still usable for everything except the adjoint.
    """
    h = RatFunc.coerce(parse_expr(h) if isinstance(h, str) else h)
    p, q, P = degree_witness(h)
    d1 = P.order
    cap = 2 * d1 + 4 if cap is None else cap
    found = codegree_witness(h, p, q, d1, cap)
    if found is None and require_codegree:
        raise ValidationError(f"codegree witness not found <= {cap}")
    used = set(h.variables()) - {X, Z}
    params = tuple(params) or tuple(sorted(used))
    real = frozenset(real)
    if found is None:
        return WaveFunction(h, p, q, P, d1, name=name, params=params, real=real, notes=notes)
    Pt, pt, qt, d2 = found
    return WaveFunction(h, p, q, P, d1, Pt, pt, qt, d2, name=name, params=params, real=real, notes=notes)


def _rebuild(wf: WaveFunction, h: RatFunc, suffix: str, real=None) -> WaveFunction:
    return validate(h, name=(wf.name + suffix) if wf.name else "", params=wf.params,
                    real=wf.real if real is None else real, notes=wf.notes)


# --- involutions -------------------------------------------------------------

def _normalize_at_infinity(g: RatFunc) -> RatFunc:
    """Divide by the ``x -> infinity`` limit, a function of ``z`` alone."""
    dn, dd = g.num.degree(X), g.den.degree(X)
    if dn != dd:
        raise ValidationError("adjoint has no finite nonzero limit as x -> infinity")
    lead = RatFunc(g.num.coefficients_in(X)[dn], g.den.coefficients_in(X)[dd])
    return g / lead


def _adjoint(wf: WaveFunction) -> WaveFunction:
    if wf.Ptilde is None:
        raise ValidationError("involution a needs a codegree witness, which was not found")
    from .diffop import apply_to_quasiexp, compose, formal_adjoint
    op = compose(formal_adjoint(wf.Ptilde), DiffOp(X, [RatFunc(MultiPoly.constant(1), wf.ptilde)]))
    g = apply_to_quasiexp(op, QuasiExp(RatFunc(1))).prefactor
    return _rebuild(wf, _normalize_at_infinity(g), "*")


def _conj_symbol(name: str) -> str:
    return f"{name}_conj"


def involution(wf: WaveFunction, tag: str) -> WaveFunction:
    """Apply a word in ``a, b, s, c``; letters act right to left like composition."""
    for letter in reversed(tag):
        wf = _involution1(wf, letter)
    return wf


def _involution1(wf: WaveFunction, t: str) -> WaveFunction:
    if t == "a":
        return wf.adjoint()
    if t == "b":
        h = wf.h.subs({X: _ZS, Z: _XS})
        return _rebuild(wf, h, "^b")
    if t == "s":
        h = wf.h.subs({X: -_XS, Z: -_ZS})
        return _rebuild(wf, h, "^s")
    if t == "c":
        h = wf.h.conjugate()
        # parameters not declared real go to their conjugate symbols and back
        swap = {}
        for n in set(h.variables()) - {X, Z}:
            if n in wf.real:
                continue
            if n.endswith("_conj"):
                swap[n] = MultiPoly.symbol(n[: -len("_conj")])
            else:
                swap[n] = MultiPoly.symbol(_conj_symbol(n))
        if swap:
            h = h.subs(swap)
        return _rebuild(wf, h, "^c")
    raise ValueError(f"unknown involution {t!r}")


def is_fixed(wf: WaveFunction, tag: str) -> bool:
    return involution(wf, tag).h == wf.h


# --- spec files --------------------------------------------------------------

def load_spec(path) -> WaveFunction:
    data = json.loads(Path(path).read_text())
    return from_spec(data)


def from_spec(data: dict) -> WaveFunction:
    try:
        num = parse_expr(data["numerator"])
        px = parse_poly(data.get("denominator_x", "1"))
        qz = parse_poly(data.get("denominator_z", "1"))
    except KeyError as exc:
        raise ValidationError(f"spec file lacks field {exc}") from None
    if Z in px.variables() or X in qz.variables():
        raise ValidationError("denominator_x must not contain z and denominator_z must not contain x")
    params, real = [], []
    for entry in data.get("parameters", []):
        if isinstance(entry, str):
            params.append(entry)
        else:
            params.append(entry["name"])
            if entry.get("real"):
                real.append(entry["name"])
    h = num / RatFunc(px * qz)
    return validate(h, name=data.get("name", ""), params=params, real=real, notes=data.get("notes", ""))


def to_spec(wf: WaveFunction) -> dict:
    N = wf.numerator
    return {
        "name": wf.name,
        "numerator": format_poly(N),
        "denominator_x": format_poly(wf.p),
        "denominator_z": format_poly(wf.q),
        "parameters": [{"name": n, "real": True} if n in wf.real else {"name": n} for n in wf.params],
        "notes": wf.notes,
    }
