import pytest
from hypothesis import given

from adelic.arith import I, RatFunc
from adelic.diffop import DiffOp, QuasiExp, apply_to_quasiexp, compose, formal_adjoint, sign_flip, substitute
from adelic.textio import parse_expr, parse_operator
from strategies import operators, poly_operators, ratfuncs

Dz = DiffOp.d("z")
Z = DiffOp.mul("z", parse_expr("z"))


def test_weyl_relation():
    assert compose(Dz, Z) == compose(Z, Dz) + DiffOp("z", [1])


def test_euler_square():
    E = compose(Z, Dz)
    assert compose(E, E) == parse_operator("(z^2) Dz^2 + (z) Dz^1")


def test_adjoint_of_euler():
    assert formal_adjoint(compose(Z, Dz)) == parse_operator("(-z) Dz^1 + (-1) Dz^0")


def test_sign_flip_and_rotation_of_first_order_example():
    R = parse_operator("(z+t) Dz^1 + (s*z) Dz^0")
    assert sign_flip(R) == parse_operator("(z-t) Dz^1 + (-s*z) Dz^0")
    assert substitute(R, -I, params={"t": I}) == parse_operator("(z-t) Dz^1 + (-i*s*z) Dz^0")


def test_quasi_exponential_action():
    P = parse_operator("(-x) Dx^1 + (-1) Dx^0")
    got = apply_to_quasiexp(P, QuasiExp(1))
    assert got == QuasiExp(parse_expr("x*z-1"))


def test_variable_mismatch():
    with pytest.raises(ValueError):
        compose(Dz, DiffOp.d("x"))
    with pytest.raises(ValueError):
        substitute(Dz, 0)


@given(operators(max_order=2), operators(max_order=2), operators(max_order=2))
def test_composition_is_associative(a, b, c):
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


@given(operators(max_order=2), operators(max_order=2), ratfuncs())
def test_composition_matches_application(a, b, f):
    assert compose(a, b).apply(f) == a.apply(b.apply(f))


@given(operators(), operators())
def test_adjoint_reverses_products(a, b):
    assert formal_adjoint(compose(a, b)) == compose(formal_adjoint(b), formal_adjoint(a))


@given(operators())
def test_adjoint_is_involutive(a):
    assert formal_adjoint(formal_adjoint(a)) == a


@given(poly_operators(), poly_operators())
def test_sign_flip_is_an_automorphism(a, b):
    assert sign_flip(compose(a, b)) == compose(sign_flip(a), sign_flip(b))
    assert sign_flip(sign_flip(a)) == a


@given(poly_operators(max_order=2, names=("z",)), poly_operators(max_order=2, names=("z",)))
def test_quasiexp_action_is_a_module_action(a, b):
    f = QuasiExp(RatFunc(1), ("x", "z"))
    assert apply_to_quasiexp(compose(a, b), f) == apply_to_quasiexp(a, apply_to_quasiexp(b, f))
