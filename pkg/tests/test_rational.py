from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractels.errors import BadRationalError, SingularMatrixError
from fractels.rational import RationalMatrix as RM
from fractels.rational import format_decimal, format_rational, parse_rational


@pytest.mark.parametrize("text,value", [
    ("3/4", Fr(3, 4)), ("-6/8", Fr(-3, 4)), ("7", Fr(7)), ("1.25", Fr(5, 4)),
    ("-.5", Fr(-1, 2)), ("0.1", Fr(1, 10)), ("+2.", Fr(2)),
])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["", "1/0", "a", "1.2.3", "1e5", "/3", "."])
def test_parse_rational_rejects(bad):
    with pytest.raises(BadRationalError):
        parse_rational(bad)


def test_decimal_input_never_goes_through_binary():
    assert parse_rational("0.1") * 3 == Fr(3, 10)


def test_format():
    assert format_rational(Fr(1151, 125)) == "1151/125"
    assert format_rational(Fr(4, 2)) == "2"
    assert format_decimal(Fr(1151, 125), 4) == "9.2080"
    assert format_decimal(Fr(-1, 3), 3) == "-0.333"
    assert format_decimal(Fr(5, 2), 0) == "2"  # half-even


def test_matrix_basics():
    A = RM([[1, 2], [3, 4]])
    assert A.shape == (2, 2) and A[1, 0] == 3
    assert A.det() == -2
    assert A @ A.inverse() == RM.identity(2)
    assert A.T == RM([[1, 3], [2, 4]])
    assert A.col_sums() == (4, 6) and A.row_sums() == (3, 7)
    assert A.matvec([1, 1]) == (3, 7) and A.vecmat([1, 1]) == (4, 6)
    assert RM.parse(A.to_text()) == A
    assert (A - A) == RM.zeros(2, 2)


def test_singular_inverse():
    with pytest.raises(SingularMatrixError):
        RM([[1, 2], [2, 4]]).inverse()


def test_nullspaces():
    M = RM([[Fr(1, 2), 0], [Fr(1, 2), 1]]) - RM.identity(2)
    assert M.left_nullspace() == [(1, 1)]
    assert RM([[1, 2], [2, 4]]).nullspace() == [(-2, 1)]
    assert RM.identity(3).nullspace() == []


fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def mats(n):
    return st.lists(st.lists(fracs, min_size=n, max_size=n), min_size=n, max_size=n).map(RM)


@settings(max_examples=60, deadline=None)
@given(mats(3), mats(3))
def test_det_multiplicative_and_transpose(A, B):
    assert (A @ B).det() == A.det() * B.det()
    assert (A @ B).T == B.T @ A.T


@settings(max_examples=60, deadline=None)
@given(mats(3))
def test_inverse_or_singular(A):
    if A.det() == 0:
        with pytest.raises(SingularMatrixError):
            A.inverse()
        assert A.rank() < 3
    else:
        assert A.inverse() @ A == RM.identity(3)


@settings(max_examples=60, deadline=None)
@given(mats(3))
def test_nullspace_is_kernel(A):
    for v in A.nullspace():
        assert all(c == 0 for c in A.matvec(v))
    assert len(A.nullspace()) + A.rank() == 3
