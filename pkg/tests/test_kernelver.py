import math

import pytest

from adelic.arith import MultiPoly, Scalar, RatFunc
from adelic.concom import concomitant
from adelic.diffop import DiffOp
from adelic.kernelver import (NumericError, cd_kernel, kernel_agreement, nystrom_alignment, quadrature_kernel,
                              reflection_residual, spectral_element, verify_commutation_fourier,
                              verify_reflection_symbolic)
from adelic.reflector import companion, find_reflected, rotate_to_commuting
from adelic.textio import parse_expr, parse_operator, parse_poly
from adelic.wavefun import ValidationError, validate

EXAMPLE1 = parse_operator("(z+t) Dz^1 + (s*z) Dz^0")


def test_spectral_elements(fixtures):
    se = spectral_element(fixtures["exp"])
    assert se.pi == parse_poly("z") and se.L == parse_operator("(-1) Dx^1")
    se = spectral_element(fixtures["bessel32"])
    assert se.pi == parse_poly("z^2") and se.L == parse_operator("(1) Dx^2 + (-2/x^2) Dx^0")
    se = spectral_element(fixtures["dg139"])
    assert se.pi == parse_poly("z^2")
    assert se.L == parse_operator("(1) Dx^2 + ((-6*x^4+12*r*x)/(x^6+2*r*x^3+r^2)) Dx^0")


def test_exp_kernel_closed_form(fixtures):
    K = cd_kernel(fixtures["exp"])
    assert K.rational == parse_expr("1/(z+w)")
    assert K.alpha == -MultiPoly.symbol("s") and K.beta == -MultiPoly.symbol("s")
    value = K.subs({"s": 1}).numeric({"z": 2, "w": 3})
    assert abs(value - math.exp(-5) / 5) < 1e-15


def test_quadrature_matches_exp_kernel(fixtures):
    got = quadrature_kernel(fixtures["exp"], 2.0, 3.0, 1.0)
    assert abs(got - math.exp(-5) / 5) <= 1e-10 * math.exp(-5) / 5


def test_reflection_identity(fixtures):
    K = cd_kernel(fixtures["exp"])
    assert verify_reflection_symbolic(EXAMPLE1, K)[0]
    assert verify_reflection_symbolic(DiffOp("z", [7]), K)[0]


def test_plain_derivative_fails_only_the_endpoint_condition(fixtures):
    K = cd_kernel(fixtures["exp"])
    D = parse_operator("(1) Dz^1")
    assert reflection_residual(D, K).is_zero()
    assert not concomitant(D).is_zero_at(-MultiPoly.symbol("t"))
    assert not verify_reflection_symbolic(parse_operator("(z) Dz^1"), K)[0]


def test_every_member_reflects(fixtures):
    for name in ("bessel32", "bessel52"):
        wf = fixtures[name]
        K = cd_kernel(wf)
        for R in find_reflected(wf).solution_space:
            assert verify_reflection_symbolic(R, K)[0]


def test_fourier_commutation(fixtures):
    wf = fixtures["exp"]
    Rt = rotate_to_commuting(find_reflected(wf))
    assert verify_commutation_fourier(Rt, wf)[0]
    assert verify_commutation_fourier(companion(Rt), wf)[0]
    assert not verify_commutation_fourier(parse_operator("(1) Dz^1"), wf)[0]


def test_commutation_needs_ac_symmetry():
    wf = validate(parse_expr("(x*z+1)/(x*z)") * RatFunc(MultiPoly.constant(Scalar(0, 1))))
    with pytest.raises(ValidationError):
        verify_commutation_fourier(EXAMPLE1, wf)


def test_kernel_agreement_reports(fixtures):
    rep = kernel_agreement(fixtures["bessel32"], 1, points=5)
    assert set(rep) == {"check", "residual", "tolerance", "pass"}
    assert rep["pass"] and rep["residual"] <= 1e-10


def test_pole_on_contour(fixtures):
    with pytest.raises(NumericError, match="pole on contour"):
        quadrature_kernel(fixtures["dg139"], 1.0, 1.0, 0.5, {"r": -1})


def test_divergent_kernel(fixtures):
    with pytest.raises(NumericError, match="divergent kernel"):
        quadrature_kernel(fixtures["exp"], -1.0, 0.5, 1.0)


def test_no_adjoint_without_codegree(fixtures):
    with pytest.raises(ValidationError):
        cd_kernel(fixtures["cm1"])


def test_nystrom_small():
    rep = nystrom_alignment(nodes=120, modes=3)
    assert rep["pass"], rep
