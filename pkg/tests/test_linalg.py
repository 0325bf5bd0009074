from fractions import Fraction

from flint import fmpq_mat
from hypothesis import given, strategies as st

from adelic.arith import MultiPoly
from adelic.linalg import LinearSystem, coefficient_rows, nullspace_rows, rank, solve_nullspace, split_monomials
from adelic.textio import parse_expr, parse_poly
from strategies import polys

ints = st.integers(-3, 3)


def matrices(max_rows=5, max_cols=6):
    return st.integers(1, max_cols).flatmap(
        lambda n: st.lists(st.lists(ints, min_size=n, max_size=n), min_size=1, max_size=max_rows))


def _residual_free(rows, vec):
    for r in rows:
        acc = MultiPoly.constant(0)
        for c, v in r.items():
            if c in vec:
                acc = acc + MultiPoly.coerce(v) * vec[c]
        if not acc.is_zero():
            return False
    return True


def test_identity_has_trivial_kernel():
    assert nullspace_rows([{0: 1}, {1: 1}, {2: 1}], 3) == []


def test_symbolic_row():
    s = parse_poly("s")
    (v,) = nullspace_rows([{0: s, 1: -s}], 2)
    assert v[0] == v[1] and not v[0].is_zero()


@given(matrices())
def test_rank_nullity_against_flint(m):
    n = len(m[0])
    rows = [{j: v for j, v in enumerate(r) if v} for r in m]
    null = nullspace_rows(rows, n)
    assert len(null) == n - fmpq_mat(m).rank()
    assert all(_residual_free(rows, v) for v in null)
    assert rank(LinearSystem(tuple(tuple(Fraction(v) for v in r) for r in m))) == fmpq_mat(m).rank()


@given(st.lists(st.lists(polys(("s", "t"), max_deg=2, max_terms=3), min_size=4, max_size=4), min_size=1, max_size=3))
def test_modular_and_exact_paths_agree(m):
    rows = [{j: v for j, v in enumerate(r) if not v.is_zero()} for r in m]
    exact = nullspace_rows(rows, 4, modular=False)
    fast = nullspace_rows(rows, 4, modular=True)
    assert len(exact) == len(fast)
    assert all(_residual_free(rows, v) for v in fast)


def test_solve_nullspace_labels():
    system = LinearSystem(((1, 1, 0),), ("a", "b", "c"))
    assert len(solve_nullspace(system)) == 2


def test_split_and_coefficient_rows():
    parts = split_monomials(parse_poly("x^2*z+3*z+x"), ["x"])
    assert parts[(2,)] == parse_poly("z") and parts[(0,)] == parse_poly("3*z")
    cols = [{0: parse_expr("x/(x+1)")}, {0: parse_expr("1/(x+1)")}, {0: parse_expr("1")}]
    (v,) = nullspace_rows(coefficient_rows(cols, ("x",)), 3)
    assert v[0] == v[1] and v[2] == -v[0]
