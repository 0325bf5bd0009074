"""Closed-form kernels and checks of reflection and commutation identities.

The kernel ``K(z, w) = int_s^oo psi(y, z) psi*(y, w) dy`` is built from a
spectral element ``L psi = pi(z) psi``.  With ``L^T psi* = pi(-w) psi*`` the
Lagrange identity integrates to

    (pi(z) - pi(-w)) K(z, w) = -C_L(psi(., z), psi*(., w); s),

assuming decay at infinity.  Kernels are stored as a rational part times
``exp(alpha z + beta w)``, so operators act on them exactly.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

import numpy as np

from .arith import I, MultiPoly, RatFunc
from .concom import concomitant
from .diffop import DiffOp, apply_to_quasiexp, formal_adjoint, sign_flip, substitute
from .fourier import CapsInsufficient, division_data, _rref
from .linalg import coefficient_rows, nullspace_rows
from .reflector import as_point
from .wavefun import X, Z, ValidationError, WaveFunction, is_fixed

log = logging.getLogger(__name__)

W = "w"
_S = MultiPoly.symbol("s")


class NumericError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralElement:
    L: DiffOp
    pi: MultiPoly


def spectral_element(wf: WaveFunction, max_degree: int | None = None) -> SpectralElement:
    """``L`` and a non-constant polynomial ``pi`` of least degree with ``L psi = pi psi``."""
    cap = max_degree if max_degree is not None else 2 * wf.d1 + 4
    zs = MultiPoly.symbol(Z)
    for k in range(1, cap + 1):
        ops = [DiffOp(Z, [zs ** j]) for j in range(k + 1)]
        residuals, quotients = division_data(wf, ops)
        rows = coefficient_rows(residuals, (X,))
        null = nullspace_rows(rows, k + 1)
        for vec in _rref(null, list(range(k, -1, -1))):
            if k not in vec:
                continue
            vec = {j: RatFunc.coerce(v) / RatFunc.coerce(vec[k]) for j, v in vec.items()}
            pi = RatFunc(0)
            L = DiffOp(X)
            for j, v in vec.items():
                pi = pi + v * RatFunc(zs ** j)
                L = L + DiffOp(X, quotients[j]) * v
            if not pi.is_polynomial():
                continue
            return SpectralElement(L, pi.num)
    raise CapsInsufficient(f"no spectral element with deg pi <= {cap}")


@dataclass(frozen=True)
class Kernel:
    """``rational(z, w) * exp(alpha*z + beta*w)``."""

    rational: RatFunc
    alpha: MultiPoly
    beta: MultiPoly

    def apply(self, op: DiffOp) -> RatFunc:
        """Rational part of ``op`` applied in its own variable (``z`` or ``w``)."""
        if op.var not in (Z, W):
            raise ValueError("kernel operators act in z or w")
        e = RatFunc(self.alpha if op.var == Z else self.beta)
        g = self.rational
        out = RatFunc(0)
        for k, c in enumerate(op.coeffs):
            if k:
                g = g.diff(op.var) + e * g
            if not c.is_zero():
                out = out + c * g
        return out

    def subs(self, values: dict) -> "Kernel":
        vals = {k: MultiPoly.coerce(v) for k, v in values.items()}
        return Kernel(self.rational.subs(vals), self.alpha.subs(vals), self.beta.subs(vals))

    def rotated(self) -> "Kernel":
        """The Fourier-picture form ``K(-iz, iw)``."""
        zs, ws = MultiPoly.symbol(Z), MultiPoly.symbol(W)
        return Kernel(self.rational.subs({Z: zs * (-I), W: ws * I}), self.alpha * (-I), self.beta * I)

    def numeric(self, values: dict) -> complex:
        f = complex(self.rational.evaluate(values))
        a = complex(self.alpha.evaluate(values)) if not self.alpha.is_constant() else complex(self.alpha.constant_value())
        b = complex(self.beta.evaluate(values)) if not self.beta.is_constant() else complex(self.beta.constant_value())
        return f * np.exp(a * complex(values[Z]) + b * complex(values[W]))


def _rename(f: RatFunc, old: str, new: str) -> RatFunc:
    return f.subs({old: MultiPoly.symbol(new)})


def _x_jets(h: RatFunc, partner: str, n: int) -> list:
    """Prefactors of ``D_x^j (h e^{-x*partner})``."""
    out = [h]
    ps = RatFunc(MultiPoly.symbol(partner))
    for _ in range(n):
        f = out[-1]
        out.append(f.diff(X) - f * ps)
    return out


def cd_kernel(wf: WaveFunction, s=None) -> Kernel:
    """Closed form of ``int_s^oo psi(y, z) psi*(y, w) dy``; checked by differentiating in ``s``."""
    sp = as_point(s, "s")
    star = wf.adjoint()
    if star is None:
        raise ValidationError("adjoint wave function is not available (no codegree witness)")
    se = spectral_element(wf)
    neg = se.pi.subs({Z: -MultiPoly.symbol(Z)})
    lhs = apply_to_quasiexp(formal_adjoint(se.L), star.psi).prefactor
    if lhs != star.h * RatFunc(neg):
        raise AssertionError("transposed spectral operator does not act on psi* by pi(-z)")
    n = se.L.order
    M = concomitant(se.L).matrix
    f = _x_jets(wf.h, Z, n)
    g = _x_jets(_rename(star.h, Z, W), W, n)
    C = RatFunc(0)
    for j in range(n):
        for l in range(n):
            if not M[j][l].is_zero():
                C = C + f[j] * M[j][l] * g[l]
    C = C.subs({X: _S})
    den = RatFunc(se.pi) - RatFunc(neg.subs({Z: MultiPoly.symbol(W)}))
    F = -C / den
    K = Kernel(F, -_S, -_S)
    # d/ds K = -psi(s, z) psi*(s, w)
    zw = RatFunc(MultiPoly.symbol(Z) + MultiPoly.symbol(W))
    target = -(wf.h.subs({X: _S}) * _rename(star.h, Z, W).subs({X: _S}))
    if F.diff("s") - zw * F != target:
        raise AssertionError("closed-form kernel fails the fundamental-theorem check")
    return K.subs({"s": sp}) if sp != _S else K


def reflection_residual(R: DiffOp, K: Kernel) -> RatFunc:
    """Rational part of ``R(z, Dz) K - R*(-w, -Dw) K``."""
    lhs = K.apply(R)
    rhs = K.apply(sign_flip(formal_adjoint(R), new_var=W))
    return lhs - rhs


def verify_reflection_symbolic(R: DiffOp, K: Kernel):
    """``(True, 0)`` when the reflection identity holds exactly, else ``(False, residual)``."""
    res = reflection_residual(R, K)
    return res.is_zero(), res


def verify_commutation_fourier(Rt: DiffOp, wf: WaveFunction, s=None, t=None):
    """Off-diagonal Fourier-picture kernel identity and concomitant vanishing at ``t``."""
    if not is_fixed(wf, "ac"):
        raise ValidationError("wave function is not fixed under ac")
    Koff = cd_kernel(wf, s).rotated()
    transpose = substitute(formal_adjoint(Rt), 1, new_var=W)
    res = Koff.apply(Rt) - Koff.apply(transpose)
    conc = concomitant(Rt).is_zero_at(as_point(t, "t"))
    return res.is_zero() and conc, res


# --- numerics ---------------------------------------------------------------

def _numeric_poly(p: MultiPoly, fixed: dict, var: str):
    """Vectorised evaluation in ``var`` with every other symbol fixed to a number."""
    names = p.names
    terms = []
    for e, c in p.terms().items():
        coeff = complex(c)
        k = 0
        for n, d in zip(names, e):
            if n == var:
                k = d
            elif d:
                coeff *= complex(fixed[n]) ** int(d)
        terms.append((int(k), coeff))

    def f(y):
        y = np.asarray(y, dtype=complex)
        out = np.zeros_like(y)
        for k, c in terms:
            out = out + c * y ** k
        return out
    return f


def _check_contour(p: MultiPoly, fixed: dict, s: float):
    """Raise if ``p(y)`` has a real root on ``[s, oo)``."""
    if X not in p.variables():
        return
    coeffs = p.coefficients_in(X)
    deg = max(coeffs)
    poly = [complex(coeffs[k].evaluate(fixed)) if k in coeffs else 0 for k in range(deg, -1, -1)]
    for root in np.roots(poly):
        if abs(root.imag) < 1e-9 and root.real >= s - 1e-12:
            raise NumericError("pole on contour")


def quadrature_kernel(wf: WaveFunction, z: complex, w: complex, s: float, params: dict | None = None,
                      rel_tol: float = 1e-12) -> complex:
    """``int_s^oo h(y, z) h*(y, w) e^{-y(z+w)} dy`` by Gauss-Legendre panels."""
    params = dict(params or {})
    star = wf.adjoint()
    if star is None:
        raise ValidationError("adjoint wave function is not available")
    decay = (z + w).real
    if decay <= 0:
        raise NumericError("divergent kernel")
    fz = {**params, Z: z}
    fw = {**params, Z: w}
    _check_contour(wf.p, params, s)
    _check_contour(star.p, params, s)
    hn, hd = _numeric_poly(wf.h.num, fz, X), _numeric_poly(wf.h.den, fz, X)
    gn, gd = _numeric_poly(star.h.num, fw, X), _numeric_poly(star.h.den, fw, X)
    Y = s + 60.0 / decay
    nodes, weights = np.polynomial.legendre.leggauss(16)

    def integrate(panels: int) -> complex:
        edges = np.linspace(s, Y, panels + 1)
        mid = (edges[1:] + edges[:-1]) / 2
        half = (edges[1:] - edges[:-1]) / 2
        y = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        wts = (half[:, None] * weights[None, :]).ravel()
        vals = hn(y) / hd(y) * gn(y) / gd(y) * np.exp(-y * (z + w))
        return complex(np.sum(wts * vals))

    panels, prev = 8, None
    for _ in range(12):
        cur = integrate(panels)
        if prev is not None and abs(cur - prev) <= rel_tol * abs(cur):
            return cur
        prev, panels = cur, panels * 2
    return cur


def kernel_agreement(wf: WaveFunction, s, params: dict | None = None, points: int = 20,
                     seed: int = 0, tol: float = 1e-10) -> dict:
    """Largest relative error between quadrature and the closed form at random points."""
    params = dict(params or {})
    K = cd_kernel(wf, s)
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(points):
        z, w = rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0)
        exact = K.numeric({**params, Z: z, W: w})
        approx = quadrature_kernel(wf, z, w, float(s), params)
        worst = max(worst, abs(exact - approx) / abs(exact))
    return {"check": f"kernel quadrature ({wf.name or wf.h})", "residual": float(worst),
            "tolerance": tol, "pass": bool(worst <= tol)}


def _diff_matrix(x: np.ndarray) -> np.ndarray:
    """Polynomial differentiation matrix on the nodes ``x`` (barycentric form)."""
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    sign = np.prod(np.sign(diff), axis=1)
    c = sign * np.exp(logw - logw.max())
    D = (c[None, :] / c[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def nystrom_alignment(s: float = 1.0, t: float = 1.0, nodes: int = 200, length: float = 20.0,
                      modes: int = 5, tol: float = 1e-4) -> dict:
    """Top eigenvectors of the exp kernel operator against the even reflected operator.

    The integral operator has kernel ``e^{-s(z+w)}/(z+w)`` on ``[t, t+length]``;
    ``d/dz (z^2 - t^2) d/dz - s^2 z^2`` commutes with it on ``[t, oo)``.
    """
    g, wts = np.polynomial.legendre.leggauss(nodes)
    z = t + (g + 1) * length / 2
    wts = wts * length / 2
    K = np.exp(-s * (z[:, None] + z[None, :])) / (z[:, None] + z[None, :])
    sq = np.sqrt(wts)
    A = sq[:, None] * K * sq[None, :]
    vals, vecs = np.linalg.eigh(A)
    D1 = _diff_matrix(z)
    Dop = D1 @ np.diag(z ** 2 - t ** 2) @ D1 - np.diag(s ** 2 * z ** 2)
    worst = 0.0
    for k in range(1, modes + 1):
        u = vecs[:, -k] / sq        # function values at the nodes
        v = Dop @ u
        lam = np.sum(wts * u * v) / np.sum(wts * u * u)
        r = np.sqrt(np.sum(wts * (v - lam * u) ** 2) / np.sum(wts * v ** 2))
        worst = max(worst, r)
    return {"check": f"nystrom alignment (top {modes}, N={nodes})", "residual": float(worst),
            "tolerance": tol, "pass": bool(worst <= tol)}
