"""Differential operators reflected by the integral operators of wave functions.

An operator ``R(z, Dz)`` in the Fourier algebra of ``psi``, with partner
``L(x, Dx)``, is reflected when the concomitant of ``L`` vanishes at ``x = s``
and the concomitant of ``R`` vanishes at ``z = -t``.  Both conditions are
linear in ``R``, so the reflected operators of a slice form a linear space.

For several wave functions the slice of the first one is intersected with
the algebras of the others: each extra wave function contributes its
division residuals (which must vanish) and its own ``L`` conditions at ``s``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import I, MultiPoly, RatFunc, Scalar
from .concom import concomitant, vanishing_conditions
from .diffop import DiffOp, compose, formal_adjoint, substitute
from .fourier import (AnsatzCaps, BispectralPair, CapsInsufficient, FourierBasis, division_data,
                      find_pairs, _rref, _z_split)
from .linalg import _lcm, coefficient_rows, nullspace_rows
from .textio import _order_key
from .wavefun import X, Z, ValidationError, WaveFunction

log = logging.getLogger(__name__)

CAPS_MESSAGE = ("no non-constant reflected operator found: caps insufficient or input outside "
                "supported class (this contradicts the existence theorem, so the ansatz caps "
                "must be raised or the wave function is not adelic)")


def as_point(v, name: str) -> MultiPoly:
    """A symbolic or rational evaluation point: ``None``/``"sym"`` means the symbol ``name``."""
    if v is None or (isinstance(v, str) and v.strip() in ("sym", name)):
        return MultiPoly.symbol(name)
    if isinstance(v, MultiPoly):
        return v
    return MultiPoly.constant(Scalar(Fraction(v)))


@dataclass(frozen=True)
class ReflectorResult:
    psis: tuple
    s: MultiPoly
    t: MultiPoly
    ell: int
    members: tuple              # BispectralPair for the first wave function, constants removed
    partners: tuple             # per member, the L operator for every wave function
    canonical_index: int
    certificates: dict = field(default_factory=dict)

    @property
    def psi(self) -> WaveFunction:
        return self.psis[0]

    @property
    def solution_space(self) -> list[DiffOp]:
        return [p.R for p in self.members]

    @property
    def canonical(self) -> DiffOp:
        return self.members[self.canonical_index].R

    @property
    def canonical_partners(self) -> tuple:
        return self.partners[self.canonical_index]

    def contains(self, R: DiffOp) -> bool:
        """Exact membership of ``R`` in the span of the members and the constants."""
        return in_span(R, [DiffOp(Z, [1])] + self.solution_space)


def in_span(R: DiffOp, ops: Sequence[DiffOp]) -> bool:
    if R.is_zero():
        return True
    cols = [{k: c for k, c in enumerate(op.coeffs)} for op in ops]
    cols.append({k: -c for k, c in enumerate(R.coeffs)})
    rows = coefficient_rows(cols, (Z,))
    return any(len(cols) - 1 in v for v in nullspace_rows(rows, len(cols)))


def default_order(psis: Sequence[WaveFunction]) -> int:
    out = 1
    for wf in psis:
        if wf.d2 is None:
            raise ValidationError(f"{wf.name or wf.h}: no codegree witness, reflection needs one")
        out = max(out, 2 * min(wf.d1, wf.d2))
    return out


def monic(R: DiffOp) -> DiffOp:
    """Clear parameter denominators and content, then make the first printed term of the top coefficient 1."""
    den = MultiPoly.constant(1)
    content = None
    for c in R.coeffs:
        if c.is_zero():
            continue
        den = _lcm(den, _z_split(c.den)[0])
        part = _z_split(c.num)[0]
        content = part if content is None else content.gcd(part)
    R = R * RatFunc(den, content)
    lead = R.leading().num
    return R * RatFunc(MultiPoly.constant(Scalar(1) / _first_coefficient(lead)))


def _first_coefficient(p: MultiPoly) -> Scalar:
    """Coefficient of the term printed first."""
    terms = p.terms()
    return terms[max(terms, key=_order_key)]


def _solve(psis, basis: FourierBasis, s: MultiPoly, t: MultiPoly):
    pairs = [p for p in basis.pairs if not p.is_constant()]
    if not pairs:
        return [], []
    ops = [p.R for p in pairs]
    rows = vanishing_conditions(ops, -t)
    rows += vanishing_conditions([p.L for p in pairs], s)
    extra_L = []
    for wf in psis[1:]:
        residuals, quotients = division_data(wf, ops)
        rows += coefficient_rows(residuals, (X,))
        Ls = [DiffOp(X, u) for u in quotients]
        extra_L.append(Ls)
        rows += vanishing_conditions(Ls, s)
    rows = [r for r in rows if r]
    null = nullspace_rows(rows, len(pairs))
    # highest-order basis elements are the most significant columns
    echelon = _rref(null, list(range(len(pairs) - 1, -1, -1)))
    members, partners = [], []
    for vec in echelon:
        R = DiffOp(Z)
        Ls = [DiffOp(X) for _ in psis]
        for c, v in vec.items():
            v = RatFunc.coerce(v)
            R = R + pairs[c].R * v
            Ls[0] = Ls[0] + pairs[c].L * v
            for k, Lk in enumerate(extra_L, start=1):
                Ls[k] = Ls[k] + Lk[c] * v
        scale = monic(R)
        factor = RatFunc(0) if R.is_zero() else (scale.leading() / R.leading())
        members.append(BispectralPair(Ls[0] * factor, scale))
        partners.append(tuple(L * factor for L in Ls))
    return members, partners


def find_universal(psis: Sequence[WaveFunction], s=None, t=None, *, ell: int | None = None,
                   caps: AnsatzCaps | None = None, escalate: bool = True) -> ReflectorResult:
    """Operators reflected simultaneously for every wave function in ``psis``."""
    psis = tuple(psis)
    if not psis:
        raise ValueError("at least one wave function is required")
    sp, tp = as_point(s, "s"), as_point(t, "t")
    base = default_order(psis) if ell is None else ell
    attempts = [base, base + 2] if escalate else [base]
    for order in attempts:
        t0 = time.perf_counter()
        basis = find_pairs(psis[0], order, order, caps, verify=False)
        members, partners = _solve(psis, basis, sp, tp)
        log.info("order %d: %d reflected operators (%.2fs)", order, len(members), time.perf_counter() - t0)
        if members:
            idx = min(range(len(members)), key=lambda i: (members[i].order, _coorder(partners[i]), str(members[i].R)))
            res = ReflectorResult(psis, sp, tp, order, tuple(members), tuple(partners), idx)
            return _certify(res)
    raise CapsInsufficient(CAPS_MESSAGE)


def _coorder(Ls) -> int:
    return max(L.order for L in Ls)


def find_reflected(wf: WaveFunction, s=None, t=None, **kw) -> ReflectorResult:
    return find_universal([wf], s, t, **kw)


def _certify(res: ReflectorResult) -> ReflectorResult:
    R = res.canonical
    at_t = concomitant(R).at(-res.t)
    at_s = [concomitant(L).at(res.s) for L in res.canonical_partners]
    ok = all(e.is_zero() for row in at_t for e in row) and all(
        e.is_zero() for m in at_s for row in m for e in row)
    if not ok:
        raise AssertionError("canonical operator fails its concomitant certificate")
    res.certificates.update({"R at -t": at_t, "L at s": tuple(at_s)})
    return res


# --- rotation and adjoints ----------------------------------------------------

def hermitian_adjoint(R: DiffOp) -> DiffOp:
    """Formal adjoint with conjugated coefficients (parameters are real)."""
    return formal_adjoint(R).conjugate()


def rotate(R: DiffOp) -> DiffOp:
    """``R_{s,it}(-iz, i Dz)``."""
    return substitute(R, -I, params={"t": I})


def companion(Rt: DiffOp) -> DiffOp:
    """The self-adjoint operator ``-R R^dagger``."""
    return -compose(Rt, hermitian_adjoint(Rt))


def specialize(op: DiffOp, values: dict) -> DiffOp:
    vals = {k: MultiPoly.coerce(v) for k, v in values.items()}
    return op.map_coeffs(lambda c: c.subs(vals))


def rotate_to_commuting(res: ReflectorResult | DiffOp, *, with_companion: bool = False):
    """Rotated canonical operator, optionally with its self-adjoint companion.

    The rotation substitutes ``t -> i t``, so a numeric ``t`` is handled by
    solving with ``t`` symbolic and specializing after the rotation.
    """
    t_sym = MultiPoly.symbol("t")
    if isinstance(res, ReflectorResult):
        if res.t != t_sym:
            sym = find_universal(res.psis, res.s, None, ell=res.ell, escalate=False)
            Rt = specialize(rotate(sym.canonical), {"t": res.t})
        else:
            Rt = rotate(res.canonical)
    else:
        Rt = rotate(res)
    return (Rt, companion(Rt)) if with_companion else Rt


def divergence_report(R: DiffOp, res: ReflectorResult) -> dict:
    """Which wave functions' algebras (or reflection conditions) reject ``R``."""
    from .fourier import in_algebra
    rejected = [wf.name or str(wf.h) for wf in res.psis if not in_algebra(wf, R)]
    member = res.contains(R)
    return {
        "operator": str(R),
        "in_intersection": member,
        "rejected_by_fourier_algebra": rejected,
        "rejected_by_reflection_conditions": not member and not rejected,
    }


def symmetric_form(f: Sequence) -> DiffOp:
    """``sum_m Dz^m f_m Dz^m``."""
    out = DiffOp(Z)
    for m, fm in enumerate(f):
        d = DiffOp.d(Z, m)
        out = out + compose(compose(d, DiffOp(Z, [fm])), d)
    return out


def is_formally_self_adjoint(R: DiffOp) -> bool:
    return hermitian_adjoint(R) == R
