"""Exact arithmetic over the Gaussian rationals Q(i).

Polynomials are sparse multivariate polynomials backed by FLINT
(``fmpq_mpoly``); a polynomial with non-real coefficients is stored as a
pair ``re + i*im`` of rational polynomials sharing one context.  Rational
functions keep a *real* monic denominator, which makes the representation
canonical without needing gcds over Q(i).

Symbols are ordered globally as ``x < z < w < y < s < t < r`` followed by any
other names in alphabetical order.  Monomials are compared in
degree-reverse-lexicographic order on that sequence.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from flint import fmpq, fmpq_mpoly, fmpq_mpoly_ctx

BASE_SYMBOLS = ("x", "z", "w", "y", "s", "t", "r")


def symbol_key(name: str):
    if name in BASE_SYMBOLS:
        return (0, BASE_SYMBOLS.index(name), "")
    return (1, 0, name)


@lru_cache(maxsize=None)
def _context(names: tuple) -> fmpq_mpoly_ctx:
    return fmpq_mpoly_ctx.get(names, "degrevlex")


def context_for(names: Iterable[str]) -> fmpq_mpoly_ctx:
    return _context(tuple(sorted(set(names), key=symbol_key)))


def _to_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, fmpq):
        return Fraction(int(q.p), int(q.q))
    return Fraction(q)


def _to_fmpq(q) -> fmpq:
    q = _to_fraction(q)
    return fmpq(q.numerator, q.denominator)


class Scalar:
    """A Gaussian rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _to_fraction(re)
        self.im = _to_fraction(im)

    @classmethod
    def coerce(cls, v) -> "Scalar":
        if isinstance(v, Scalar):
            return v
        if isinstance(v, complex):
            return cls(Fraction(v.real), Fraction(v.imag))
        return cls(v)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def __add__(self, o):
        o = Scalar.coerce(o)
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-Scalar.coerce(o))

    def __rsub__(self, o):
        return Scalar.coerce(o) - self

    def __mul__(self, o):
        o = Scalar.coerce(o)
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = Scalar.coerce(o)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero scalar")
        return self * Scalar(o.re / n, -o.im / n)

    def __rtruediv__(self, o):
        return Scalar.coerce(o) / self

    def __pow__(self, k: int):
        out = Scalar(1)
        base = self if k >= 0 else Scalar(1) / self
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, o):
        try:
            o = Scalar.coerce(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_text(self.im)
        sign = "-" if self.im < 0 else "+"
        return f"({self.re}{sign}{_imag_text(abs(self.im))})"


def _imag_text(v: Fraction) -> str:
    if v == 1:
        return "i"
    if v == -1:
        return "-i"
    return f"{v}*i"


I = Scalar(0, 1)


def _unify(a: fmpq_mpoly, b: fmpq_mpoly):
    ca, cb = a.context(), b.context()
    if ca is cb:
        return a, b
    ctx = context_for(ca.names() + cb.names())
    if ca is not ctx:
        a = a.project_to_context(ctx)
    if cb is not ctx:
        b = b.project_to_context(ctx)
    return a, b


class MultiPoly:
    """Multivariate polynomial with Gaussian-rational coefficients.

    Values are immutable.  ``im`` is ``None`` for polynomials with real
    coefficients, which is by far the common case.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: fmpq_mpoly, im: fmpq_mpoly | None = None):
        if im is not None:
            if im.is_zero():
                im = None
            elif im.context() is not re.context():
                re, im = _unify(re, im)
        self.re = re
        self.im = im

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, c, names: Iterable[str] = ()) -> "MultiPoly":
        ctx = context_for(names)
        c = Scalar.coerce(c)
        im = ctx.constant(_to_fmpq(c.im)) if c.im else None
        return cls(ctx.constant(_to_fmpq(c.re)), im)

    @classmethod
    def symbol(cls, name: str) -> "MultiPoly":
        ctx = context_for([name])
        return cls(ctx.gen(0))

    @classmethod
    def from_terms(cls, terms: Mapping[tuple, object], names: tuple) -> "MultiPoly":
        """Build from ``{exponent tuple aligned with names: coefficient}``."""
        ctx = context_for(names)
        order = [names.index(n) for n in ctx.names()]
        re, im = {}, {}
        for exps, c in terms.items():
            c = Scalar.coerce(c)
            e = tuple(exps[k] for k in order)
            if c.re:
                re[e] = _to_fmpq(c.re)
            if c.im:
                im[e] = _to_fmpq(c.im)
        return cls(ctx.from_dict(re), ctx.from_dict(im) if im else None)

    @staticmethod
    def coerce(v) -> "MultiPoly":
        if isinstance(v, MultiPoly):
            return v
        if isinstance(v, fmpq_mpoly):
            return MultiPoly(v)
        return MultiPoly.constant(v)

    # inspection -------------------------------------------------------
    @property
    def names(self) -> tuple:
        return self.re.context().names()

    def variables(self) -> tuple:
        """Names of the symbols that actually occur."""
        used = set()
        for part in (self.re, self.im):
            if part is None:
                continue
            for e in part.monoms():
                used.update(n for n, k in zip(part.context().names(), e) if k)
        return tuple(sorted(used, key=symbol_key))

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im is None

    def is_real(self) -> bool:
        return self.im is None

    def is_constant(self) -> bool:
        return self.re.is_constant() and (self.im is None or self.im.is_constant())

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        re = self.re.coeffs()[0] if not self.re.is_zero() else 0
        im = self.im.coeffs()[0] if self.im is not None else 0
        return Scalar(_to_fraction(re), _to_fraction(im))

    def terms(self) -> dict:
        """``{exponent tuple (aligned with self.names): Scalar}``."""
        out: dict = {}
        for e, c in zip(self.re.monoms(), self.re.coeffs()):
            out[e] = Scalar(_to_fraction(c))
        if self.im is not None:
            for e, c in zip(self.im.monoms(), self.im.coeffs()):
                out[e] = out.get(e, Scalar(0)) + Scalar(0, _to_fraction(c))
        return out

    def degree(self, var: str) -> int:
        if self.is_zero():
            return -1
        if var not in self.names:
            return 0
        k = self.names.index(var)
        d = self.re.degrees()[k] if not self.re.is_zero() else 0
        if self.im is not None:
            d = max(d, self.im.degrees()[k])
        return d

    def total_degree(self) -> int:
        if self.is_zero():
            return -1
        d = self.re.total_degree() if not self.re.is_zero() else 0
        if self.im is not None:
            d = max(d, self.im.total_degree())
        return d

    def leading_coefficient(self) -> Scalar:
        """Coefficient of the leading monomial in degrevlex order."""
        if self.is_zero():
            return Scalar(0)
        if self.im is None:
            return Scalar(_to_fraction(self.re.leading_coefficient()))
        if self.re.is_zero():
            return Scalar(0, _to_fraction(self.im.leading_coefficient()))
        lead = max(self.terms(), key=self._order_key)
        return self.terms()[lead]

    def _order_key(self, e):
        # degrevlex: higher total degree wins; ties broken by the reversed exponents, smaller is bigger
        return (sum(e), tuple(-k for k in reversed(e)))

    def coefficients_in(self, var: str) -> dict:
        """Split as a univariate polynomial in ``var``: ``{k: coefficient}``."""
        if var not in self.names:
            return {0: self} if not self.is_zero() else {}
        k = self.names.index(var)
        buckets: dict = {}
        for e, c in self.terms().items():
            e2 = e[:k] + (0,) + e[k + 1:]
            buckets.setdefault(e[k], {})[e2] = c
        return {d: MultiPoly.from_terms(t, self.names) for d, t in buckets.items()}

    # arithmetic -------------------------------------------------------
    def _pair(self, other):
        other = MultiPoly.coerce(other)
        a, b = self.re, other.re
        if a.context() is not b.context():
            ctx = context_for(self.names + other.names)
            return self.project(ctx), other.project(ctx)
        return self, other

    def project(self, ctx: fmpq_mpoly_ctx) -> "MultiPoly":
        if self.re.context() is ctx:
            return self
        im = self.im.project_to_context(ctx) if self.im is not None else None
        return MultiPoly(self.re.project_to_context(ctx), im)

    def with_names(self, names: Iterable[str]) -> "MultiPoly":
        return self.project(context_for(tuple(self.names) + tuple(names)))

    def __add__(self, other):
        a, b = self._pair(other)
        if a.im is None and b.im is None:
            return MultiPoly(a.re + b.re)
        im = (a.im if a.im is not None else 0) + (b.im if b.im is not None else 0)
        return MultiPoly(a.re + b.re, im if isinstance(im, fmpq_mpoly) else None)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(-self.re, -self.im if self.im is not None else None)

    def __sub__(self, other):
        return self + (-MultiPoly.coerce(other))

    def __rsub__(self, other):
        return MultiPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            q = _to_fmpq(other)
            return MultiPoly(self.re * q, self.im * q if self.im is not None else None)
        if isinstance(other, Scalar):
            return self * MultiPoly.constant(other)
        a, b = self._pair(other)
        if a.im is None and b.im is None:
            return MultiPoly(a.re * b.re)
        if a.im is None:
            return MultiPoly(a.re * b.re, a.re * b.im)
        if b.im is None:
            return MultiPoly(a.re * b.re, a.im * b.re)
        return MultiPoly(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        if self.im is None:
            return MultiPoly(self.re ** k)
        out = MultiPoly.constant(1, self.names)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "MultiPoly":
        return self * MultiPoly.constant(c)

    def conjugate(self) -> "MultiPoly":
        return MultiPoly(self.re, -self.im if self.im is not None else None)

    def norm(self) -> "MultiPoly":
        """``self * conj(self)``, a real polynomial."""
        if self.im is None:
            return MultiPoly(self.re * self.re)
        return MultiPoly(self.re * self.re + self.im * self.im)

    def exquo(self, other) -> "MultiPoly":
        """Exact division; raises ``ArithmeticError`` when not exact."""
        a, b = self._pair(other)
        try:
            if b.im is None:
                return MultiPoly(a.re / b.re, a.im / b.re if a.im is not None else None)
            n = (a * b.conjugate())
            d = b.norm().re
            return MultiPoly(n.re / d, n.im / d if n.im is not None else None)
        except Exception as exc:
            if b.is_zero():
                raise ZeroDivisionError("division by zero polynomial") from exc
            raise ArithmeticError("polynomial division is not exact") from exc

    def diff(self, var: str) -> "MultiPoly":
        if var not in self.names:
            if var not in BASE_SYMBOLS and not var.isidentifier():
                raise ValueError(f"unknown variable {var!r}")
            return MultiPoly.constant(0, self.names)
        return MultiPoly(self.re.derivative(var),
                         self.im.derivative(var) if self.im is not None else None)

    def gcd(self, other) -> "MultiPoly":
        """Greatest common divisor, normalized to leading coefficient 1."""
        a, b = self._pair(other)
        if a.is_zero() and b.is_zero():
            return a
        if a.im is None and b.im is None:
            g = MultiPoly(a.re.gcd(b.re))
        else:
            g = _gaussian_gcd(a, b)
        lc = g.leading_coefficient()
        return g * (Scalar(1) / lc) if lc != 1 else g

    def subs(self, values: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Substitute polynomials for variables (simultaneously)."""
        values = {k: MultiPoly.coerce(v) for k, v in values.items() if k in self.names}
        if not values:
            return self
        names = set(n for n in self.names if n not in values)
        for v in values.values():
            names.update(v.names)
        ctx = context_for(names)
        if all(v.is_real() for v in values.values()):
            gens = [values[n].project(ctx).re if n in values else ctx.gen(ctx.names().index(n))
                    for n in self.names]
            re = self.re.compose(*gens, ctx=ctx) if self.names else ctx.constant(self.re.coeffs()[0] if not self.re.is_zero() else 0)
            im = self.im.compose(*gens, ctx=ctx) if self.im is not None else None
            return MultiPoly(re, im)
        out = MultiPoly.constant(0, names)
        powers: dict = {}
        for e, c in self.terms().items():
            term = MultiPoly.constant(c, names)
            for n, k in zip(self.names, e):
                if not k:
                    continue
                base = values.get(n)
                if base is None:
                    term = term * (MultiPoly.symbol(n) ** k)
                else:
                    key = (n, k)
                    if key not in powers:
                        powers[key] = base ** k
                    term = term * powers[key]
            out = out + term
        return out

    def evaluate(self, values: Mapping[str, object]) -> Scalar:
        """Exact value at Gaussian-rational points for every occurring symbol."""
        vals = {k: MultiPoly.constant(v) for k, v in values.items()}
        missing = [n for n in self.variables() if n not in vals]
        if missing:
            raise ValueError(f"no value for {missing}")
        return self.subs(vals).constant_value()

    def __eq__(self, other):
        try:
            a, b = self._pair(other)
        except (TypeError, ValueError):
            return NotImplemented
        if a.re != b.re:
            return False
        if a.im is None or b.im is None:
            return a.im is None and b.im is None
        return a.im == b.im

    def __hash__(self):
        names = self.names
        items = []
        for e, c in self.terms().items():
            items.append((tuple((n, k) for n, k in zip(names, e) if k), c.re, c.im))
        return hash(frozenset(items))

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        from .textio import format_poly
        return format_poly(self)


def _gaussian_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    # rare path: only reached for polynomials with non-real coefficients
    import sympy

    names = tuple(a.names)
    syms = sympy.symbols(names) if names else ()

    def to_sympy(p: MultiPoly):
        expr = 0
        for e, c in p.terms().items():
            mon = sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)
            for s_, k in zip(syms, e):
                mon *= s_ ** k
            expr += mon
        return sympy.Poly(expr, *syms, domain=sympy.QQ_I) if syms else sympy.Poly(expr, sympy.Symbol("_u"), domain=sympy.QQ_I)

    g = to_sympy(a).gcd(to_sympy(b))
    if not syms:
        return MultiPoly.constant(1)
    terms = {}
    for mon, c in g.terms():
        re, im = sympy.re(c), sympy.im(c)
        terms[tuple(mon)] = Scalar(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
    return MultiPoly.from_terms(terms, names)


def symbols(*names: str):
    out = tuple(MultiPoly.symbol(n) for n in names)
    return out[0] if len(out) == 1 else out


class RatFunc:
    """Canonical fraction ``num/den`` with a real denominator of leading coefficient 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1, *, _normalized: bool = False):
        num = MultiPoly.coerce(num)
        den = MultiPoly.coerce(den)
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def coerce(v) -> "RatFunc":
        if isinstance(v, RatFunc):
            return v
        return RatFunc(MultiPoly.coerce(v))

    # inspection
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.den.is_constant() and self.num.is_constant()

    def is_real(self) -> bool:
        return self.num.is_real()

    def variables(self) -> tuple:
        return tuple(sorted(set(self.num.variables()) | set(self.den.variables()), key=symbol_key))

    def constant_value(self) -> Scalar:
        return self.num.constant_value() / self.den.constant_value()

    # arithmetic
    def __add__(self, other):
        other = RatFunc.coerce(other)
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        if self.den.is_constant() and other.den.is_constant():
            return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)
        g = self.den.gcd(other.den)
        a = self.den.exquo(g)
        b = other.den.exquo(g)
        return RatFunc(self.num * b + other.num * a, a * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-RatFunc.coerce(other))

    def __rsub__(self, other):
        return RatFunc.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                return RatFunc(0)
            return RatFunc(self.num * other, self.den, _normalized=True)
        other = RatFunc.coerce(other)
        if self.den.is_constant() and other.den.is_constant():
            return RatFunc(self.num * other.num, self.den * other.den)
        g1 = self.num.gcd(other.den) if not other.den.is_constant() else None
        g2 = other.num.gcd(self.den) if not self.den.is_constant() else None
        n1, d2 = (self.num.exquo(g1), other.den.exquo(g1)) if g1 is not None and not self.num.is_zero() else (self.num, other.den)
        n2, d1 = (other.num.exquo(g2), self.den.exquo(g2)) if g2 is not None and not other.num.is_zero() else (other.num, self.den)
        return RatFunc(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * RatFunc.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k, _normalized=True)

    def conjugate(self) -> "RatFunc":
        return RatFunc(self.num.conjugate(), self.den, _normalized=True)

    def diff(self, var: str) -> "RatFunc":
        if self.den.is_constant():
            return RatFunc(self.num.diff(var), self.den, _normalized=True)
        dn = self.num.diff(var)
        dd = self.den.diff(var)
        if dd.is_zero():
            return RatFunc(dn, self.den)
        # (n' d - n d') / d^2, with d/gcd(d, d') to keep the size down
        g = self.den.gcd(dd)
        dg = self.den.exquo(g)
        return RatFunc(dn * dg - self.num * dd.exquo(g), dg * self.den)

    def subs(self, values: Mapping[str, object]) -> "RatFunc":
        """Substitute rational functions for variables simultaneously."""
        vals = {k: RatFunc.coerce(v) for k, v in values.items()}
        used = set(self.variables())
        vals = {k: v for k, v in vals.items() if k in used}
        if not vals:
            return self
        if all(v.is_polynomial() for v in vals.values()):
            pv = {k: v.num * (Scalar(1) / v.den.constant_value()) for k, v in vals.items()}
            return RatFunc(self.num.subs(pv), self.den.subs(pv))
        return _subs_rational(self.num, vals) / _subs_rational(self.den, vals)

    def evaluate(self, values: Mapping[str, object]) -> Scalar:
        d = self.den.evaluate(values)
        if d.is_zero():
            raise ZeroDivisionError("evaluation at a pole")
        return self.num.evaluate(values) / d

    def __eq__(self, other):
        try:
            other = RatFunc.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        from .textio import format_ratfunc
        return format_ratfunc(self)


def _subs_rational(p: MultiPoly, vals: Mapping[str, RatFunc]) -> RatFunc:
    names = p.names
    keys = [n for n in names if n in vals]
    idx = [names.index(n) for n in keys]
    buckets: dict = {}
    for e, c in p.terms().items():
        k = tuple(e[i] for i in idx)
        rest = tuple(0 if i in idx else v for i, v in enumerate(e))
        buckets.setdefault(k, {})[rest] = c
    powers: dict = {}
    out = RatFunc(0)
    for k, part in buckets.items():
        term = RatFunc(MultiPoly.from_terms(part, names))
        for n, j in zip(keys, k):
            if j:
                if (n, j) not in powers:
                    powers[(n, j)] = vals[n] ** j
                term = term * powers[(n, j)]
        out = out + term
    return out


def _normalize(num: MultiPoly, den: MultiPoly):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    num, den = num._pair(den)
    if not den.is_real():
        num = num * den.conjugate()
        den = den.norm()
    if num.is_zero():
        return MultiPoly.constant(0, num.names), MultiPoly.constant(1, num.names)
    if not den.re.is_constant():
        g = den.re.gcd(num.re) if not num.re.is_zero() else den.re
        if num.im is not None and not g.is_constant():
            g = g.gcd(num.im)
        if not g.is_constant():
            num = MultiPoly(num.re / g, num.im / g if num.im is not None else None)
            den = MultiPoly(den.re / g)
    lc = den.re.leading_coefficient()
    if lc != 1:
        num = MultiPoly(num.re / lc, num.im / lc if num.im is not None else None)
        den = MultiPoly(den.re / lc)
    return num, den


def ratfunc_normalize(num, den) -> RatFunc:
    return RatFunc(num, den)


def poly_arith(a: MultiPoly, b: MultiPoly | None, op: str, var: str | None = None) -> MultiPoly:
    """Dispatch helper: ``op`` in {"add", "mul", "gcd", "diff"}."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "gcd":
        return a.gcd(b)
    if op == "diff":
        if var is None:
            raise ValueError("diff needs a variable name")
        known = set(a.names) | set(BASE_SYMBOLS) | (set(b.names) if b is not None else set())
        if var not in known:
            raise ValueError(f"unknown variable {var!r}")
        return a.diff(var)
    raise ValueError(f"unknown operation {op!r}")
