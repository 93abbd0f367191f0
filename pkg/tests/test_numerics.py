from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from ssdual.numerics import (
    DimensionMismatch,
    RatMatrix,
    Singular,
    determinant,
    format_rational,
    invert,
    matmul,
    solve,
    to_rational,
    vecmat,
)

small = st.fractions(min_value=-3, max_value=3, max_denominator=5)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n).map(RatMatrix)


A = RatMatrix([[1, 0], ["1/2", "1/2"]])
B = RatMatrix([[1, 0], [-1, 2]])


def test_identity_product():
    m = RatMatrix([[1, 2, 3], ["1/3", 0, -1], [4, 5, "7/2"]])
    assert matmul(RatMatrix.identity(3), m) == m
    assert m @ RatMatrix.identity(3) == m


def test_hand_inverse_pair():
    assert matmul(A, B) == RatMatrix.identity(2)
    assert invert(A) == B
    assert invert(RatMatrix.identity(4)) == RatMatrix.identity(4)


def test_total_order_zeta_inverse_is_bidiagonal():
    zeta = RatMatrix([[1, 1, 1], [0, 1, 1], [0, 0, 1]])
    assert invert(zeta) == RatMatrix([[1, -1, 0], [0, 1, -1], [0, 0, 1]])


def test_determinants():
    assert determinant(RatMatrix.identity(4)) == 1
    assert determinant(A) == F(1, 2)
    # walk on {0,1}^2 with hold 1/2 and each flip 1/4: r1 - r2 - r3 + r4 = 0
    q = F(1, 4)
    P1 = RatMatrix([[F(1, 2), q, q, 0], [q, F(1, 2), 0, q], [q, 0, F(1, 2), q], [0, q, q, F(1, 2)]])
    assert determinant(P1) == 0
    assert determinant(P1 - RatMatrix.identity(4).scale(F(1, 3))) == F(-1, 162)


def test_dimension_errors():
    with pytest.raises(DimensionMismatch):
        matmul(RatMatrix([[1, 2]]), RatMatrix([[1, 2]]))
    with pytest.raises(DimensionMismatch):
        determinant(RatMatrix([[1, 2]]))
    with pytest.raises(DimensionMismatch):
        RatMatrix([[1, 2], [3]])
    with pytest.raises(Singular):
        invert(RatMatrix([[1, 2], [2, 4]]))


def test_rational_parsing_and_format():
    assert to_rational("-2/5") == F(-2, 5)
    assert to_rational(" 7 ") == 7
    assert format_rational(F(1, 3)) == "1/3"
    assert format_rational(F(-2, 5)) == "-2/5"
    assert format_rational(F(14, 2)) == "7"
    with pytest.raises(ValueError):
        to_rational("0.5")
    with pytest.raises(TypeError):
        to_rational(0.5)
    assert to_rational(0.1, allow_float=True) == F(1, 10)


def test_solve_and_vecmat():
    x = solve(A, [1, 1])
    assert tuple(vecmat(x, A.T)) == (1, 1)
    assert vecmat([F(1, 2), F(1, 2)], A) == (F(3, 4), F(1, 4))


def test_scaling_matches_diag_products():
    m = RatMatrix([[1, "1/2", 0], [0, 3, "-1/3"]])
    r, c = [F(2), F(1, 3)], [F(1), F(5), F(-2)]
    assert m.scale_rows(r) == RatMatrix.diag(r) @ m
    assert m.scale_cols(c) == m @ RatMatrix.diag(c)


@given(square(3))
def test_inverse_roundtrip(m):
    if determinant(m) == 0:
        with pytest.raises(Singular):
            invert(m)
        return
    inv = invert(m)
    assert matmul(m, inv) == RatMatrix.identity(3)
    assert matmul(inv, m) == RatMatrix.identity(3)


@given(square(3), square(3))
def test_determinant_multiplicative(a, b):
    assert determinant(matmul(a, b)) == determinant(a) * determinant(b)


@given(square(4))
def test_outputs_are_canonical(m):
    prod = matmul(m, m.T) + m
    for row in prod:
        for x in row:
            assert isinstance(x, F) and x.denominator > 0
