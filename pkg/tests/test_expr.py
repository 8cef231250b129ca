from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractels import expr as ex
from fractels.errors import ParseError


@pytest.mark.parametrize("text", ["const:5", "poly:10,1", "poly:0,0,0,1/4", "powsum:1,1,0,1/2",
                                  "powsum:2,1/2,1/4,3,-1,1,0,1/2"])
def test_text_round_trip(text):
    e = ex.parse_expr(text)
    assert e.to_text() == text
    assert ex.parse_expr(e.to_text()).params == e.params


@pytest.mark.parametrize("bad", ["const", "const:1,2", "poly:", "powsum:1,2,3", "sin:1", "poly:x"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        ex.parse_expr(bad)


def test_parse_number_kinds():
    assert ex.parse_number("1/3") == Fr(1, 3)
    assert ex.parse_number("1e-3") == pytest.approx(1e-3)
    assert ex.parse_number("inf") == float("inf")


def test_poly_matches_numpy():
    x = np.linspace(-2, 2, 41)
    c = [1, -3, 0.5, 2]
    assert np.allclose(ex.Poly(c)(x), np.polynomial.polynomial.polyval(x, c), rtol=0, atol=1e-13)


def test_powsum_clamps_rounding_negatives():
    e = ex.PowSum([(1, 1, -0.3, 0.5)])
    assert e(np.array([0.3 - 1e-17]))[0] == 0.0


def test_symbolic_helpers_stay_serialisable():
    p = ex.Poly([1, 2])
    assert isinstance(ex.add(p, ex.Const(3)), ex.Poly)
    assert ex.add(ex.Const(0), ex.Const(0)).is_zero()
    assert isinstance(ex.scale(2, ex.PowSum([(1, 1, 0, 0.5)])), ex.PowSum)
    assert isinstance(ex.compose_affine(p, 2, 1), ex.Poly)
    assert isinstance(ex.as_expr(0), ex.Const)
    with pytest.raises(TypeError):
        ex.Func(np.sin).to_text()


fr = st.fractions(min_value=-4, max_value=4, max_denominator=9)


@settings(max_examples=100, deadline=None)
@given(st.lists(fr, min_size=1, max_size=6), fr, fr, fr)
def test_poly_compose_affine_exact(coeffs, sigma, tau, x):
    # oracle: evaluate p at sigma x + tau directly
    comp = ex.poly_compose_affine(coeffs, sigma, tau)
    direct = sum(c * (sigma * x + tau) ** i for i, c in enumerate(coeffs))
    assert sum(c * x**i for i, c in enumerate(comp)) == direct


@settings(max_examples=50, deadline=None)
@given(st.lists(fr, min_size=1, max_size=5), fr, fr)
def test_compose_affine_powsum_pointwise(coeffs, sigma, tau):
    terms = [(c, 1, 0, i) for i, c in enumerate(coeffs)]
    x = np.linspace(0, 1, 11)
    lhs = ex.compose_affine(ex.PowSum(terms), sigma, tau)(x)
    rhs = ex.Poly(coeffs)(float(sigma) * x + float(tau))
    assert np.allclose(lhs, rhs, atol=1e-9)
