"""Bilinear concomitants and the linear conditions they impose at a point.

For ``R = sum_m a_m D^m`` the concomitant is

    C_R(f, g) = sum_{m>=1} sum_{j+k=m-1} (-1)^k f^(j) (a_m g)^(k),

so that ``d/dz C_R(f, g) = (R f) g - f (R* g)``.  Expanding ``(a_m g)^(k)`` by
Leibniz gives a matrix ``M`` with ``C_R = sum_{j,l} f^(j) M[j][l] g^(l)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .arith import MultiPoly, RatFunc
from .diffop import DiffOp, formal_adjoint


class PoleAtPoint(ValueError):
    pass


@dataclass(frozen=True)
class ConcomitantForm:
    var: str
    matrix: tuple   # matrix[j][l] multiplies f^(j) g^(l)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def pair(self, f, g) -> RatFunc:
        """Evaluate the form on two functions of ``var``."""
        fd, gd = _jets(RatFunc.coerce(f), self.var, self.n), _jets(RatFunc.coerce(g), self.var, self.n)
        out = RatFunc(0)
        for j, row in enumerate(self.matrix):
            for l, e in enumerate(row):
                if not e.is_zero():
                    out = out + fd[j] * e * gd[l]
        return out

    def at(self, point) -> tuple:
        """The matrix evaluated at ``var = point``."""
        return tuple(tuple(_eval_at(e, self.var, point) for e in row) for row in self.matrix)

    def is_zero_at(self, point) -> bool:
        return all(e.is_zero() for row in self.at(point) for e in row)


def _jets(f: RatFunc, var: str, n: int) -> list:
    out = [f]
    for _ in range(n):
        out.append(out[-1].diff(var))
    return out


def concomitant(op: DiffOp) -> ConcomitantForm:
    n = max(op.order, 0)
    var = op.var
    jets = [_jets(a, var, n) for a in op.coeffs]
    M = [[RatFunc(0)] * n for _ in range(n)]
    for m in range(1, op.order + 1):
        for j in range(m):
            k = m - 1 - j
            for l in range(k + 1):
                d = jets[m][k - l]
                if not d.is_zero():
                    M[j][l] = M[j][l] + d * ((-1) ** k * comb(k, l))
    return ConcomitantForm(var, tuple(tuple(r) for r in M))


def lagrange_residual(op: DiffOp, f, g) -> RatFunc:
    """``d/dz C_R(f, g) - ((R f) g - f (R* g))``; zero when the form is right."""
    f, g = RatFunc.coerce(f), RatFunc.coerce(g)
    lhs = concomitant(op).pair(f, g).diff(op.var)
    return lhs - (op.apply(f) * g - f * formal_adjoint(op).apply(g))


def _eval_at(e: RatFunc, var: str, point) -> RatFunc:
    if var not in e.variables():
        return e
    value = MultiPoly.coerce(point)
    den = e.den.subs({var: value})
    if den.is_zero():
        raise PoleAtPoint("evaluation point on coefficient pole")
    return RatFunc(e.num.subs({var: value}), den)


def vanishing_conditions(template: Sequence[DiffOp], point) -> list[dict]:
    """Rows ``{unknown index: M[j][l](point)}`` for ``R = sum_u c_u template[u]``.

    One row per matrix entry, so an order-``n`` template gives ``n^2`` rows
    before rank reduction.
    """
    forms = [concomitant(op) for op in template]
    n = max((f.n for f in forms), default=0)
    evaluated = [f.at(point) for f in forms]
    rows = []
    for j in range(n):
        for l in range(n):
            row = {}
            for u, mat in enumerate(evaluated):
                if j < len(mat) and l < len(mat):
                    e = mat[j][l]
                    if not e.is_zero():
                        row[u] = e
            rows.append(row)
    return rows


def condition_bound(order: int) -> int:
    """``ceil(l/2) * ceil((l+1)/2)``."""
    return ((order + 1) // 2) * ((order + 2) // 2)
