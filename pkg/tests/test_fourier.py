import itertools

import pytest
from hypothesis import given, settings, strategies as st

from adelic.diffop import compose
from adelic.fourier import (AnsatzCaps, NotInAlgebra, b_inverse, b_inverse_psi, dimension_table,
                            find_pairs, in_algebra)
from adelic.textio import parse_operator


def _spans(ops, target):
    from adelic.reflector import in_span
    return in_span(target, ops)


def test_exp_first_slice(fixtures):
    basis = find_pairs(fixtures["exp"], 1, 1)
    assert basis.dim == 4
    Rs = [p.R for p in basis.pairs]
    for text in ("(1) Dz^0", "(z) Dz^0", "(1) Dz^1", "(z) Dz^1"):
        assert _spans(Rs, parse_operator(text))


def test_b_inverse_on_exponential(fixtures):
    wf = fixtures["exp"]
    assert b_inverse_psi(wf, parse_operator("(z) Dz^0")) == parse_operator("(-1) Dx^1")
    assert b_inverse_psi(wf, parse_operator("(-1) Dz^1")) == parse_operator("(x) Dx^0")


def test_b_inverse_rejects_outside_operator(fixtures):
    with pytest.raises(NotInAlgebra):
        b_inverse_psi(fixtures["bessel32"], parse_operator("(1) Dz^1"))
    assert not in_algebra(fixtures["bessel32"], parse_operator("(z) Dz^0"))
    assert in_algebra(fixtures["bessel32"], parse_operator("(z^2) Dz^0"))


@pytest.mark.parametrize("name", ["exp", "bessel32", "dg139"])
def test_division_agrees_with_ansatz(fixtures, name):
    wf = fixtures[name]
    a = find_pairs(wf, 2, 2, method="division")
    b = find_pairs(wf, 2, 2, method="ansatz")
    assert a.dim == b.dim
    Rb = [p.R for p in b.pairs]
    assert all(_spans(Rb, p.R) for p in a.pairs)


@pytest.mark.parametrize("name", ["exp", "bessel32", "bessel52"])
def test_antihomomorphism(fixtures, name, rng):
    wf = fixtures[name]
    basis = find_pairs(wf, 2, 2)
    pairs = [p for p in basis.pairs if not p.is_constant()]
    for p1, p2 in rng.sample(list(itertools.product(pairs, pairs)), 6):
        R = compose(p1.R, p2.R)
        assert b_inverse_psi(wf, R) == compose(p2.L, p1.L)


def test_b_inverse_respects_slice(fixtures):
    basis = find_pairs(fixtures["exp"], 1, 1)
    with pytest.raises(NotInAlgebra):
        b_inverse(basis, parse_operator("(1) Dz^2"))


def test_stable_under_doubled_caps(fixtures):
    wf = fixtures["bessel32"]
    base = find_pairs(wf, 2, 2)
    wider = find_pairs(wf, 2, 2, AnsatzCaps().resolve(wf, 2, 2).doubled())
    assert base.dim == wider.dim == find_pairs(wf, 2, 2, stabilize=True).dim


def test_small_caps_never_exceed(fixtures):
    wf = fixtures["dg139"]
    tight = find_pairs(wf, 2, 2, AnsatzCaps(2, 2, 2, 0))
    assert tight.dim <= find_pairs(wf, 2, 2).dim


def test_dimension_tables(fixtures):
    exp = dimension_table(fixtures["exp"], 3, 3)
    assert exp.consistent and exp.n == 0
    bessel = dimension_table(fixtures["bessel32"], 3, 3, ell_min=1, m_min=1)
    assert bessel.consistent and bessel.n == 2
    dg = dimension_table(fixtures["dg139"], 4, 4, ell_min=3, m_min=3)
    assert dg.consistent and dg.n == 6


def test_inconsistent_table_is_flagged(fixtures):
    table = dimension_table(fixtures["cm1"], 3, 3, ell_min=1, m_min=1)
    assert not table.consistent and table.n is None


@settings(max_examples=8)
@given(st.integers(0, 3), st.integers(0, 3))
def test_pairs_intertwine(ell, m):
    from adelic.wavefun import validate
    wf = validate("(x*z+1)/(x*z)")
    basis = find_pairs(wf, ell, m, verify=False)
    assert all(p.check(wf) for p in basis.pairs)
    assert all(p.order <= ell and p.coorder <= m for p in basis.pairs)
