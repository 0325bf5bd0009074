"""Slices of the Fourier algebra ``F_z(psi)`` and the anti-isomorphism ``b_psi``.

A pair ``(L, R)`` belongs to the algebra when ``L psi = R psi``.  Writing
``G = q(z) * (prefactor of R psi)``, this says ``G = sum_j u_j(x) E_j`` with
``E_j = (D_x - z)^j (q h)`` of z-degree ``d1 + j``.  Because that family is
triangular in ``z``, ``L`` is recovered from ``R`` by exact division, and only
the coefficients of ``R`` need to be unknowns.  The direct ansatz with
unknowns on both sides is kept as ``method="ansatz"`` for cross-checking.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .arith import MultiPoly, RatFunc
from .diffop import DiffOp, apply_to_quasiexp
from .linalg import coefficient_rows, nullspace_rows
from .textio import format_operator
from .wavefun import X, Z, WaveFunction, reduce_tower, tower, z_coefficients, zpoly_sub

log = logging.getLogger(__name__)

_ZS = MultiPoly.symbol(Z)
_XS = MultiPoly.symbol(X)


class CapsInsufficient(RuntimeError):
    """The ansatz is too small for the requested computation."""


class NotInAlgebra(ValueError):
    """The operator is not in the computed slice of the Fourier algebra."""


@dataclass(frozen=True)
class AnsatzCaps:
    """Denominator exponents and numerator slack of the coefficient ansatz.

    ``None`` means the default for the slice: ``A = m``, ``B = ell``,
    ``C = ell * (1 + deg q)``; numerator degrees are the larger order cap plus
    the denominator degree plus ``slack``.
    """

    A: int | None = None
    B: int | None = None
    C: int | None = None
    slack: int = 2

    def resolve(self, wf: WaveFunction, ell: int, m: int) -> "AnsatzCaps":
        dq = wf.q.degree(Z)
        return AnsatzCaps(
            m if self.A is None else self.A,
            ell if self.B is None else self.B,
            ell * (1 + dq) if self.C is None else self.C,
            self.slack,
        )

    def doubled(self) -> "AnsatzCaps":
        return AnsatzCaps(2 * self.A, 2 * self.B, 2 * self.C, 2 * self.slack)

    def as_tuple(self):
        return (self.A, self.B, self.C, self.slack)


@dataclass(frozen=True)
class BispectralPair:
    L: DiffOp
    R: DiffOp

    @property
    def order(self) -> int:
        return self.R.order

    @property
    def coorder(self) -> int:
        return self.L.order

    def is_constant(self) -> bool:
        return self.R.order <= 0 and self.R.is_scalar()

    def check(self, wf: WaveFunction) -> bool:
        return apply_to_quasiexp(self.L, wf.psi) == apply_to_quasiexp(self.R, wf.psi)

    def scale(self, c) -> "BispectralPair":
        c = RatFunc.coerce(c)
        return BispectralPair(c * self.L, c * self.R)

    def __add__(self, other):
        return BispectralPair(self.L + other.L, self.R + other.R)


@dataclass(frozen=True)
class FourierBasis:
    psi: WaveFunction
    ell: int
    m: int
    caps: AnsatzCaps
    pairs: tuple

    @property
    def dim(self) -> int:
        return len(self.pairs)


# --- R-side ansatz -----------------------------------------------------------

@dataclass(frozen=True)
class _Column:
    order: int
    kind: int       # 1: polynomial part z^k, 0: polar part z^k / D
    k: int

    def sort_key(self):
        return (self.order, self.kind, self.k)


def _r_columns(wf: WaveFunction, ell: int, m: int, caps: AnsatzCaps):
    """Basis of ``{v(z) / D(z) : deg v <= cap}`` per order, split into polynomial and polar parts."""
    D = wf.q ** caps.B * _ZS ** caps.C
    dD = D.degree(Z)
    # z^m pairs with Dx^m, so the co-order also bounds the numerator degree
    cap = max(ell, m) + wf.q.degree(Z) * caps.B + caps.C + caps.slack
    cols = []
    for i in range(ell + 1):
        cols.extend(_Column(i, 1, k) for k in range(cap - dD + 1))
        cols.extend(_Column(i, 0, k) for k in range(min(dD, cap + 1)))
    return cols, D


def _column_coeff(col: _Column, D: MultiPoly) -> RatFunc:
    mono = RatFunc(_ZS ** col.k)
    return mono if col.kind else mono / RatFunc(D)


def _z_split(den: MultiPoly):
    """Split a denominator into its z-free and z-dependent factors."""
    if Z not in den.variables():
        return den, MultiPoly.constant(1)
    coeffs = list(den.coefficients_in(Z).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = g.gcd(c)
    return g, den.exquo(g)


def _zpoly_divmod(num: dict, T: dict) -> tuple[dict, dict]:
    """Long division of z-polynomials with coefficients in Q(x, params)."""
    dT = max(T)
    lt = T[dT]
    quo, rem = {}, dict(num)
    while rem and max(rem) >= dT:
        d = max(rem)
        c = rem[d] / lt
        quo[d - dT] = c
        rem = zpoly_sub(rem, {k + d - dT: v for k, v in T.items()}, c)
    return quo, rem


def _lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_constant():
        return b
    if b.is_constant():
        return a
    return a.exquo(a.gcd(b)) * b


def division_data(wf: WaveFunction, ops, m: int | None = None):
    """Residuals and quotients of ``q R psi`` against the tower of ``psi`` for each ``R``.

    ``R`` lies in the algebra exactly when its residual vanishes, and then the
    quotients are the coefficients of ``L``.  Both are linear in ``R``, so the
    residuals of a family of operators give the rows of a linear system.
    With ``m`` given, co-orders above ``m`` are left in the residual.
    """
    Gs = [RatFunc(wf.q) * apply_to_quasiexp(op, wf.psi).prefactor for op in ops]
    T = MultiPoly.constant(1)
    splits = []
    for g in Gs:
        dx, dz = _z_split(g.den)
        splits.append((dx, dz))
        T = _lcm(T, dz)
    Tz = z_coefficients(RatFunc(T))
    parts = []
    for g, (dx, dz) in zip(Gs, splits):
        if g.is_zero():
            parts.append(({}, {}))
            continue
        num = RatFunc(g.num * T.exquo(dz), dx)
        parts.append(_zpoly_divmod(z_coefficients(num), Tz)[::-1])
    if m is None:
        m = max((max(quo) - wf.d1 for _, quo in parts if quo), default=0)
    m = max(m, 0)
    towers = tower(RatFunc(wf.q) * wf.h, m)
    residuals, quotients = [], []
    for pole, quo in parts:
        u, rem = reduce_tower(quo, towers, wf.d1)
        res = {("pole", k): v for k, v in pole.items()}
        res.update({("tower", k): v for k, v in rem.items()})
        residuals.append(res)
        quotients.append(u)
    return residuals, quotients


def _column_op(col: _Column, D: MultiPoly) -> DiffOp:
    return DiffOp(Z, [0] * col.order + [_column_coeff(col, D)])


def _division_columns(wf: WaveFunction, ell: int, m: int, caps: AnsatzCaps):
    cols, D = _r_columns(wf, ell, m, caps)
    residuals, quotients = division_data(wf, [_column_op(c, D) for c in cols], m)
    return cols, D, residuals, quotients


def _combine(vec: dict, cols, D, quotients, m: int) -> BispectralPair:
    rcoef: dict = {}
    lcoef = [RatFunc(0)] * (m + 1)
    for c, v in vec.items():
        v = RatFunc.coerce(v)
        col = cols[c]
        rcoef[col.order] = rcoef.get(col.order, RatFunc(0)) + v * _column_coeff(col, D)
        for j, u in enumerate(quotients[c]):
            if not u.is_zero():
                lcoef[j] = lcoef[j] + v * u
    n = max(rcoef) + 1 if rcoef else 0
    R = DiffOp(Z, [rcoef.get(i, RatFunc(0)) for i in range(n)])
    return BispectralPair(DiffOp(X, lcoef), R)


# --- echelon form of a span ----------------------------------------------------

def _rref(vectors: list[dict], order: list[int]) -> list[dict]:
    """Reduced row echelon form over Q(params), pivots searched in ``order``."""
    rows = [{c: RatFunc.coerce(v) for c, v in vec.items()} for vec in vectors]
    done = []
    for c in order:
        piv = next((r for r in rows if c in r), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = piv[c].inverse()
        piv = {k: v * inv for k, v in piv.items()}
        new_rows = []
        for r in rows:
            a = r.get(c)
            if a is not None:
                r = _axpy(r, piv, -a)
            if r:
                new_rows.append(r)
        rows = new_rows
        done = [_axpy(d, piv, -d[c]) if c in d else d for d in done]
        done.append(piv)
    return done


def _axpy(r: dict, piv: dict, a: RatFunc) -> dict:
    out = dict(r)
    for k, v in piv.items():
        w = out.get(k, RatFunc(0)) + a * v
        if w.is_zero():
            out.pop(k, None)
        else:
            out[k] = w
    return out


def _pair_key(p: BispectralPair):
    return (0 if p.is_constant() else 1, p.order, p.coorder, format_operator(p.R))


# --- public operations ----------------------------------------------------------

def find_pairs(wf: WaveFunction, ell: int, m: int, caps: AnsatzCaps | None = None, *,
               method: str = "division", verify: bool = True, stabilize: bool = False) -> FourierBasis:
    """Basis of ``F_z^{ell,m}(psi)`` within the coefficient ansatz ``caps``.

    With ``stabilize`` the slice is recomputed once with doubled caps and a
    warning is logged if the dimension grows.
    """
    if ell < 0 or m < 0:
        raise ValueError("orders must be nonnegative")
    caps = (caps or AnsatzCaps()).resolve(wf, ell, m)
    if method == "division":
        pairs = _find_division(wf, ell, m, caps)
    elif method == "ansatz":
        pairs = _find_ansatz(wf, ell, m, caps)
    else:
        raise ValueError(f"unknown method {method!r}")
    if verify:
        for pr in pairs:
            if not pr.check(wf):
                raise AssertionError("computed pair fails L psi = R psi")
    basis = FourierBasis(wf, ell, m, caps, tuple(sorted(pairs, key=_pair_key)))
    if stabilize:
        wider = find_pairs(wf, ell, m, caps.doubled(), method=method, verify=verify)
        if wider.dim != basis.dim:
            log.warning("slice (%d, %d): dimension %d grows to %d under doubled caps",
                        ell, m, basis.dim, wider.dim)
            return wider
    return basis


def _find_division(wf, ell, m, caps) -> list[BispectralPair]:
    cols, D, residuals, quotients = _division_columns(wf, ell, m, caps)
    if not cols:
        raise CapsInsufficient("empty ansatz")
    rows = coefficient_rows(residuals, (X,))
    null = nullspace_rows(rows, len(cols))
    order = sorted(range(len(cols)), key=lambda c: cols[c].sort_key(), reverse=True)
    basis = _rref(null, order)
    return [_combine(v, cols, D, quotients, m) for v in basis]


def _find_ansatz(wf, ell, m, caps) -> list[BispectralPair]:
    """Unknown coefficients on both sides; only practical for small slices."""
    cols, D = _r_columns(wf, ell, m, caps)
    dp = wf.p.degree(X)
    lcap = max(ell, m) + dp * caps.A + caps.slack
    pA = RatFunc(wf.p ** caps.A)
    lcols = [(j, k) for j in range(m + 1) for k in range(lcap + 1)]
    Hx = [wf.h]
    for _ in range(m):
        f = Hx[-1]
        Hx.append(f.diff(X) - f * RatFunc(_ZS))
    Hz = [wf.h]
    for _ in range(ell):
        f = Hz[-1]
        Hz.append(f.diff(Z) - f * RatFunc(_XS))
    columns = [{0: RatFunc(_XS ** k) / pA * Hx[j]} for j, k in lcols]
    columns += [{0: -(_column_coeff(c, D) * Hz[c.order])} for c in cols]
    rows = coefficient_rows(columns, (X, Z))
    null = nullspace_rows(rows, len(columns))
    nl = len(lcols)
    order = sorted(range(nl, len(columns)), key=lambda c: cols[c - nl].sort_key(), reverse=True)
    order += list(range(nl))
    basis = _rref(null, order)
    out = []
    for vec in basis:
        lco = [RatFunc(0)] * (m + 1)
        rco = [RatFunc(0)] * (ell + 1)
        for c, v in vec.items():
            if c < nl:
                j, k = lcols[c]
                lco[j] = lco[j] + v * RatFunc(_XS ** k) / pA
            else:
                col = cols[c - nl]
                rco[col.order] = rco[col.order] + v * _column_coeff(col, D)
        out.append(BispectralPair(DiffOp(X, lco), DiffOp(Z, rco)))
    return out


def b_inverse_psi(wf: WaveFunction, R: DiffOp, m: int | None = None) -> DiffOp:
    """``L`` with ``L psi = R psi``, by exact division; raises :class:`NotInAlgebra`."""
    if R.var != Z:
        raise ValueError("R must be an operator in z")
    if R.is_zero():
        return DiffOp(X)
    G = RatFunc(wf.q) * apply_to_quasiexp(R, wf.psi).prefactor
    dx, dz = _z_split(G.den)
    if not dz.is_constant():
        raise NotInAlgebra("q(z) R psi is not polynomial in z")
    coeffs = z_coefficients(G)
    top = max(coeffs) - wf.d1
    if top < 0:
        raise NotInAlgebra("z-degree of q R psi is below the degree of psi")
    if m is not None and top > m:
        raise NotInAlgebra(f"co-order {top} exceeds {m}")
    towers = tower(RatFunc(wf.q) * wf.h, top)
    u, rem = reduce_tower(coeffs, towers, wf.d1)
    if rem:
        raise NotInAlgebra("R psi is not of the form L psi")
    return DiffOp(X, u)


def b_inverse(basis: FourierBasis, R: DiffOp) -> DiffOp:
    """Inverse of ``b_psi`` on the slice spanned by ``basis``."""
    if R.order > basis.ell:
        raise NotInAlgebra(f"order {R.order} exceeds {basis.ell}")
    return b_inverse_psi(basis.psi, R, basis.m)


def in_algebra(wf: WaveFunction, R: DiffOp) -> bool:
    try:
        b_inverse_psi(wf, R)
    except NotInAlgebra:
        return False
    return True


@dataclass(frozen=True)
class DimensionTable:
    dims: dict
    stable_from: int
    n: int | None
    consistent: bool

    def deficits(self) -> dict:
        return {(l, m): (l + 1) * (m + 1) - d for (l, m), d in self.dims.items()}


def dimension_table(wf: WaveFunction, ell_max: int, m_max: int, caps: AnsatzCaps | None = None,
                    *, ell_min: int = 0, m_min: int = 0) -> DimensionTable:
    """Dimensions of the slices and the inferred ``n`` on the stable range."""
    dims = {}
    for ell in range(ell_min, ell_max + 1):
        for m in range(m_min, m_max + 1):
            dims[(ell, m)] = find_pairs(wf, ell, m, caps, verify=False).dim
    d2 = wf.d2 if wf.d2 is not None else wf.d1
    stable = max(2 * min(wf.d1, d2) - 1, 0)
    deficits = {(l, m): (l + 1) * (m + 1) - d for (l, m), d in dims.items() if l >= stable and m >= stable}
    values = set(deficits.values())
    n = values.pop() if len(values) == 1 else None
    return DimensionTable(dims, stable, n, n is not None)
