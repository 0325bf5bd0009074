import pytest
from hypothesis import given

from adelic.arith import MultiPoly
from adelic.concom import PoleAtPoint, concomitant, condition_bound, lagrange_residual, vanishing_conditions
from adelic.diffop import DiffOp
from adelic.linalg import nullspace_rows
from adelic.textio import parse_expr, parse_operator
from strategies import operators, ratfuncs


def test_first_order_form():
    R = parse_operator("(z+t) Dz^1 + (s*z) Dz^0")
    form = concomitant(R)
    assert form.n == 1 and form.matrix[0][0] == parse_expr("z+t")
    assert form.is_zero_at(-MultiPoly.symbol("t"))


def test_second_order_form():
    a2, a1 = parse_expr("z^3+1"), parse_expr("z*s")
    M = concomitant(DiffOp("z", [0, a1, a2])).matrix
    assert M[0][0] == a1 - a2.diff("z")
    assert M[1][0] == a2 and M[0][1] == -a2 and M[1][1].is_zero()


@given(operators(max_order=3), ratfuncs(), ratfuncs())
def test_lagrange_identity(op, f, g):
    assert lagrange_residual(op, f, g).is_zero()


def _generic_template(order):
    """``sum_k c_{k,j} z^j Dz^k`` with enough monomials to make the conditions generic."""
    ops = []
    for k in range(order + 1):
        for j in range(2 * order + 2):
            ops.append(DiffOp("z", [0] * k + [parse_expr(f"z^{j}")]))
    return ops


@pytest.mark.parametrize("order", range(1, 7))
def test_condition_rank_matches_bound(order):
    ops = _generic_template(order)
    rows = vanishing_conditions(ops, parse_expr("3/2").num)
    null = nullspace_rows(rows, len(ops))
    assert len(ops) - len(null) == condition_bound(order)


def test_bound_values():
    assert [condition_bound(l) for l in range(1, 7)] == [1, 2, 4, 6, 9, 12]


def test_pole_at_point():
    op = DiffOp("z", [0, parse_expr("1/z")])
    with pytest.raises(PoleAtPoint, match="evaluation point on coefficient pole"):
        vanishing_conditions([op], 0)
