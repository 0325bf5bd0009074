"""Hypothesis strategies shared by the property tests."""

from fractions import Fraction

from hypothesis import strategies as st

from adelic.arith import MultiPoly, RatFunc, Scalar
from adelic.diffop import DiffOp

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)
scalars = st.builds(lambda a, b: Scalar(a, b), small, st.sampled_from([Fraction(0), Fraction(0), Fraction(1), Fraction(-1, 2)]))


def polys(names=("z", "w"), max_deg=3, max_terms=4, complex_coeffs=False):
    coeff = scalars if complex_coeffs else small
    exps = st.tuples(*[st.integers(0, max_deg) for _ in names])
    return st.dictionaries(exps, coeff, max_size=max_terms).map(
        lambda d: MultiPoly.from_terms(d, tuple(names)))


nonzero_polys = polys().filter(lambda p: not p.is_zero())


def ratfuncs(names=("z",)):
    return st.builds(RatFunc, polys(names), polys(names, max_deg=2).filter(lambda p: not p.is_zero()))


def operators(var="z", max_order=3, names=("z",)):
    return st.lists(ratfuncs(names), min_size=1, max_size=max_order + 1).map(lambda cs: DiffOp(var, cs))


def poly_operators(var="z", max_order=3, names=("z",)):
    coeffs = polys(names, max_deg=2, max_terms=3).map(RatFunc)
    return st.lists(coeffs, min_size=1, max_size=max_order + 1).map(lambda cs: DiffOp(var, cs))
