import json

import pytest
from hypothesis import given, settings, strategies as st

from adelic.arith import MultiPoly, RatFunc, Scalar
from adelic.diffop import QuasiExp, apply_to_quasiexp
from adelic.textio import parse_expr, parse_operator, parse_poly
from adelic.wavefun import ValidationError, from_spec, involution, is_fixed, to_spec, validate

NAMES = ("exp", "cm1", "dg139", "bessel32", "bessel52")


def test_plain_exponential():
    wf = validate("1")
    assert (wf.d1, wf.d2) == (0, 0)
    assert wf.p == MultiPoly.constant(1) and wf.q == MultiPoly.constant(1)


def test_first_order_witness():
    wf = validate("(x*z-1)/(x*z)")
    assert wf.d1 == 1
    assert wf.p == parse_poly("x") and wf.q == parse_poly("z")
    assert wf.P == parse_operator("(-x) Dx^1 + (-1) Dx^0")


def test_parameter_family(fixtures):
    wf = fixtures["dg139"]
    assert wf.p == parse_poly("x^3+r") and wf.q == parse_poly("z^2")
    assert wf.d1 == 2 and wf.d2 == 2 and "r" in wf.real


@pytest.mark.parametrize("name", NAMES)
def test_degree_witness_reproduces_psi(fixtures, name):
    wf = fixtures[name]
    got = apply_to_quasiexp(wf.P, QuasiExp(1))
    assert got == QuasiExp(wf.h * RatFunc(wf.p * wf.q))


def test_mixed_denominator_rejected():
    with pytest.raises(ValidationError):
        validate("1/(x+z)")


def test_missing_codegree_is_reported():
    with pytest.raises(ValidationError, match="codegree witness not found"):
        validate("(x*z-1)/(x*z)", require_codegree=True)


def test_symmetric_prefactor_fixed_by_b(fixtures):
    cm1 = fixtures["cm1"]
    assert involution(cm1, "b") == cm1
    assert is_fixed(fixtures["exp"], "s")


def test_ac_fixed_cases(fixtures):
    assert is_fixed(fixtures["exp"], "ac")
    assert is_fixed(fixtures["dg139"], "ac")


def test_imaginary_multiplier_breaks_c_symmetry():
    wf = validate(parse_expr("(x*z+1)/(x*z)") * RatFunc(MultiPoly.constant(Scalar(0, 1))))
    assert not is_fixed(wf, "c")
    assert not is_fixed(wf, "ac")


@pytest.mark.parametrize("name", NAMES)
def test_spec_roundtrip(fixtures, name):
    wf = fixtures[name]
    again = from_spec(json.loads(json.dumps(to_spec(wf))))
    assert again == wf and again.real == wf.real


def test_spec_missing_field():
    with pytest.raises(ValidationError):
        from_spec({"denominator_x": "x"})


@settings(max_examples=10)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool))
def test_involutions_on_a_family(c):
    wf = validate((parse_expr("x*z") + RatFunc(MultiPoly.constant(Scalar(c)))) / parse_expr("x*z"))
    assert wf.d1 == 1
    for tag in "bcs":
        assert involution(involution(wf, tag), tag) == wf
    assert involution(wf, "bb") == wf
