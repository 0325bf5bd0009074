"""Ordinary differential operators with rational coefficients.

An operator in the variable ``z`` is stored as its left-normal form
``sum_k a_k(z) Dz^k``.  :class:`QuasiExp` represents ``h(x, z) e^{-xz}`` and
is the object every operator ultimately acts on.
"""

from __future__ import annotations

from math import comb
from typing import Mapping, Sequence

from .arith import MultiPoly, RatFunc, Scalar


class DiffOp:
    __slots__ = ("var", "coeffs")

    def __init__(self, var: str, coeffs: Sequence = ()):
        cs = [RatFunc.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.var = var
        self.coeffs = tuple(cs)

    @classmethod
    def d(cls, var: str, k: int = 1) -> "DiffOp":
        return cls(var, [0] * k + [1])

    @classmethod
    def mul(cls, var: str, f) -> "DiffOp":
        return cls(var, [f])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> RatFunc:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else RatFunc(0)

    def leading(self) -> RatFunc:
        return self.coeffs[-1] if self.coeffs else RatFunc(0)

    def _check(self, other: "DiffOp"):
        if not isinstance(other, DiffOp):
            raise TypeError("expected a DiffOp")
        if other.var != self.var and not (self.is_scalar() or other.is_scalar()):
            raise ValueError(f"variable mismatch: D{self.var} vs D{other.var}")

    def is_scalar(self) -> bool:
        return self.order <= 0 and all(self.var not in c.variables() for c in self.coeffs)

    def _as_op(self, other) -> "DiffOp":
        if isinstance(other, DiffOp):
            self._check(other)
            return other if other.var == self.var else DiffOp(self.var, other.coeffs)
        return DiffOp(self.var, [other])

    def __add__(self, other):
        other = self._as_op(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(self.var, [self.coeff(k) + other.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return DiffOp(self.var, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._as_op(other))

    def __rsub__(self, other):
        return self._as_op(other) - self

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return compose(self, other)
        return DiffOp(self.var, [c * RatFunc.coerce(other) for c in self.coeffs])

    def __rmul__(self, other):
        return DiffOp(self.var, [RatFunc.coerce(other) * c for c in self.coeffs])

    def __pow__(self, k: int):
        out = DiffOp(self.var, [1])
        for _ in range(k):
            out = compose(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.var == other.var and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def apply(self, f: RatFunc) -> RatFunc:
        """Act on a rational function of ``var``."""
        out = RatFunc(0)
        g = RatFunc.coerce(f)
        for k, c in enumerate(self.coeffs):
            if k:
                g = g.diff(self.var)
            if not c.is_zero():
                out = out + c * g
        return out

    def map_coeffs(self, fn) -> "DiffOp":
        return DiffOp(self.var, [fn(c) for c in self.coeffs])

    def conjugate(self) -> "DiffOp":
        return self.map_coeffs(RatFunc.conjugate)

    def right_form(self) -> list:
        """Coefficients ``b_k`` with ``self = sum_k Dz^k o b_k``."""
        n = self.order
        b = [RatFunc(0)] * (n + 1)
        rest = self
        for k in range(n, -1, -1):
            b[k] = rest.coeff(k)
            # Dz^k o b = b Dz^k + lower; peel the top term off
            rest = rest - compose(DiffOp.d(self.var, k), DiffOp(self.var, [b[k]]))
        if not rest.is_zero():
            raise AssertionError("right normal form did not terminate")
        return b

    def __repr__(self):
        return f"DiffOp({self})"

    def __str__(self):
        from .textio import format_operator
        return format_operator(self)


def compose(a: DiffOp, b: DiffOp) -> DiffOp:
    """``a o b`` via the Leibniz rule."""
    if a.is_zero() or b.is_zero():
        return DiffOp(a.var)
    if a.var != b.var:
        if b.is_scalar():
            b = DiffOp(a.var, b.coeffs)
        elif a.is_scalar():
            a = DiffOp(b.var, a.coeffs)
        else:
            raise ValueError(f"variable mismatch: D{a.var} vs D{b.var}")
    v = a.var
    # derivs[j][k] = k-th derivative of b_j
    derivs = []
    for bj in b.coeffs:
        row = [bj]
        for _ in range(a.order):
            row.append(row[-1].diff(v) if not row[-1].is_zero() else row[-1])
        derivs.append(row)
    out = [RatFunc(0)] * (a.order + b.order + 1)
    for i, ai in enumerate(a.coeffs):
        if ai.is_zero():
            continue
        for j in range(len(b.coeffs)):
            for k in range(i + 1):
                d = derivs[j][k]
                if d.is_zero():
                    continue
                out[i + j - k] = out[i + j - k] + ai * d * comb(i, k)
    return DiffOp(v, out)


def formal_adjoint(op: DiffOp) -> DiffOp:
    """``R* f = sum_m (-D)^m (a_m f)``."""
    n = op.order
    if n < 0:
        return op
    derivs = []
    for m, am in enumerate(op.coeffs):
        row = [am]
        for _ in range(m):
            row.append(row[-1].diff(op.var) if not row[-1].is_zero() else row[-1])
        derivs.append(row)
    out = []
    for k in range(n + 1):
        acc = RatFunc(0)
        for m in range(k, n + 1):
            d = derivs[m][m - k]
            if not d.is_zero():
                acc = acc + d * ((-1) ** m * comb(m, k))
        out.append(acc)
    return DiffOp(op.var, out)


def substitute(op: DiffOp, alpha=1, beta=0, params: Mapping[str, object] | None = None,
               new_var: str | None = None) -> DiffOp:
    """Change of variable ``var -> alpha*var + beta`` (so ``D -> D/alpha``).

    ``params`` rescales parameters, ``{"t": I}`` meaning ``t -> i*t``.
    ``new_var`` renames the variable afterwards (e.g. ``z -> -w``).
    """
    alpha = Scalar.coerce(alpha)
    beta = Scalar.coerce(beta)
    if alpha.is_zero():
        raise ValueError("substitution scale alpha must be nonzero")
    v = op.var
    target = new_var or v
    values: dict = {}
    if params:
        for name, c in params.items():
            values[name] = MultiPoly.symbol(name) * Scalar.coerce(c)
    values[v] = MultiPoly.symbol(target) * alpha + MultiPoly.constant(beta)
    inv = Scalar(1) / alpha
    out = []
    scale = Scalar(1)
    for c in op.coeffs:
        out.append(c.subs(values) * RatFunc(MultiPoly.constant(scale)))
        scale = scale * inv
    return DiffOp(target, out)


def sign_flip(op: DiffOp, new_var: str | None = None) -> DiffOp:
    """``R(z, Dz) -> R(-z, -Dz)``."""
    return substitute(op, -1, new_var=new_var)


class QuasiExp:
    """``prefactor(a, b) * exp(-a*b)`` for the variable pair ``(a, b)``."""

    __slots__ = ("prefactor", "pair")

    def __init__(self, prefactor, pair: tuple = ("x", "z")):
        self.prefactor = RatFunc.coerce(prefactor)
        self.pair = tuple(pair)

    def __eq__(self, other):
        return isinstance(other, QuasiExp) and self.pair == other.pair and self.prefactor == other.prefactor

    def __hash__(self):
        return hash((self.prefactor, self.pair))

    def __add__(self, other: "QuasiExp"):
        if self.pair != other.pair:
            raise ValueError("different exponential factors")
        return QuasiExp(self.prefactor + other.prefactor, self.pair)

    def __sub__(self, other: "QuasiExp"):
        return self + QuasiExp(-other.prefactor, other.pair)

    def scale(self, f) -> "QuasiExp":
        return QuasiExp(self.prefactor * RatFunc.coerce(f), self.pair)

    def __repr__(self):
        a, b = self.pair
        return f"QuasiExp(({self.prefactor})*exp(-{a}*{b}))"


def _partner(f: QuasiExp, var: str) -> str:
    a, b = f.pair
    if var == a:
        return b
    if var == b:
        return a
    raise ValueError(f"operator variable {var!r} not in the pair {f.pair}")


def apply_to_quasiexp(op: DiffOp, f: QuasiExp) -> QuasiExp:
    """Apply ``op`` to ``f``; ``D`` acts on the prefactor as ``h' - partner*h``."""
    other = MultiPoly.symbol(_partner(f, op.var))
    v = op.var
    g = f.prefactor
    out = RatFunc(0)
    for k, c in enumerate(op.coeffs):
        if k:
            g = g.diff(v) - g * RatFunc(other)
        if not c.is_zero():
            out = out + c * g
    return QuasiExp(out, f.pair)
