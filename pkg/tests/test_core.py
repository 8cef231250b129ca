from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractels import expr as ex
from fractels.core import (
    UNIT, AffineInY, AffineMap1D, Fractel, GeneralF, Interval, VectorFractel, check_nontrivial,
    compose_fractels, fixture, load_fixtures, parse_fixtures, rb_apply, scalar, verify_fractel,
    verify_vector_fractel,
)
from fractels.errors import (
    DegenerateIntervalError, DomainEscapeError, NonFiniteError, ParseError, UnknownFixtureError,
)

CUBE = scalar("poly:0,0,0,1")
TEN_PLUS_X = scalar("poly:10,1")
H = Fr(1, 2)


def test_interval_rejects_degenerate():
    with pytest.raises(DegenerateIntervalError):
        Interval(1, 1)
    with pytest.raises(DegenerateIntervalError):
        Interval(2, 1)


def test_affine_map_basics():
    l = AffineMap1D(H, Fr(1, 4))
    assert l(Fr(1)) == Fr(3, 4) and l.inverse(Fr(3, 4)) == 1
    assert l.fixed_point() == H
    assert l.image() == Interval(Fr(1, 4), Fr(3, 4))
    with pytest.raises(ValueError):
        AffineMap1D(0, 1)
    neg = AffineMap1D(-H, 1)
    assert neg.image() == Interval(H, 1)


def test_verify_cube():
    rep = verify_fractel(Fractel.affine(H, 0, Fr(1, 8)), CUBE, 1000, 1e-12)
    assert rep.passed and rep.max_residual <= 1e-15


def test_verify_ten_plus_x():
    assert verify_fractel(Fractel.affine(H, 0, H, "const:5"), TEN_PLUS_X, 1000, 1e-12)


def test_trivial_residual_zero():
    rep = verify_fractel(Fractel.trivial(), scalar(np.cos))
    assert rep.max_residual == 0 and rep.passed


def test_wrong_slope_residual_is_one_eighth():
    # max |x^3/4 - x^3/8| on [0, 1] is at x = 1
    rep = verify_fractel(Fractel.affine(H, 0, Fr(1, 4)), CUBE)
    assert not rep.passed
    assert rep.max_residual == pytest.approx(1 / 8, abs=1e-15)


def test_verify_errors():
    with pytest.raises(DomainEscapeError):
        verify_fractel(Fractel.affine(2, 0, 1), CUBE)
    with pytest.raises(NonFiniteError):
        verify_fractel(Fractel.affine(H, 0, 1), scalar(lambda x: 1 / x))
    with pytest.raises(ValueError):
        verify_fractel(Fractel.trivial(), CUBE, grid=1)


@pytest.mark.parametrize("sigma,expected", [(H, True), (1, False), (2, False), (-H, False)])
def test_check_nontrivial(sigma, expected):
    # -1/2 x maps [0, 1] onto [-1/2, 0], outside the domain
    assert check_nontrivial(Fractel.affine(sigma, 0, 1), UNIT) is expected


def test_compose_cube_fractels():
    w = Fractel.affine(H, 0, Fr(1, 8))
    ww = compose_fractels(w, w)
    assert (ww.l.sigma, ww.l.tau, ww.F.s) == (Fr(1, 4), 0, Fr(1, 64))
    assert verify_fractel(ww, CUBE, 1000, 1e-12)


def test_compose_ten_plus_x():
    w = Fractel.affine(H, 0, H, "const:5")
    ww = compose_fractels(w, w)
    assert ww.F.s == Fr(1, 4) and ww.F.lam(np.array([0.3]))[0] == 7.5
    assert verify_fractel(ww, TEN_PLUS_X, 1000, 1e-12)


def test_compose_escape():
    with pytest.raises(DomainEscapeError):
        compose_fractels(Fractel.affine(H, 0, 1, domain=Interval(0, H)), Fractel.affine(1, 0, 1))


def test_rb_apply_examples():
    w = Fractel.affine(H, 0, Fr(1, 8))
    g = scalar(np.cos)
    phi = rb_apply(w, g)
    x = np.linspace(0, 0.5, 11)
    assert np.allclose(phi(x), np.cos(2 * x) / 8, atol=0)
    assert np.allclose(rb_apply(w, CUBE)(x), x**3, atol=1e-16)
    assert np.array_equal(rb_apply(Fractel.trivial(), g)(x), g(x))
    with pytest.raises(DomainEscapeError):
        phi(np.array([0.9]))


def test_general_F_compose_and_trivial_flag():
    w = Fractel(AffineMap1D(H, 0), GeneralF(lambda x, y: y / 8))
    assert not w.is_affine_in_y and Fractel.trivial().is_trivial
    assert verify_fractel(compose_fractels(w, w), CUBE, 500, 1e-14)


def test_fixtures_load_and_select():
    names = [r.name for r in load_fixtures()]
    assert {"ex4_4", "ex4_5", "ex4_6", "sqrt_w1"} <= set(names)
    assert [r.name for r in fixture("ex4_1")] == ["ex4_1_p1", "ex4_1_p2", "ex4_1_p3"]
    with pytest.raises(UnknownFixtureError):
        fixture("nope")


def test_fixture_parse_errors_carry_line():
    with pytest.raises(ParseError, match="line 2"):
        parse_fixtures("# c\nbad 1 2\n")
    with pytest.raises(ParseError, match="line 1"):
        parse_fixtures("a 1/2 0 1/2 const:0 poly:1 1 0\n")


def test_vector_fractel_linear_part():
    comps = tuple(AffineInY(Fr(1, 2**k)) for k in range(4))
    w = VectorFractel(AffineMap1D(H, 0), comps)
    assert w.linear_part().tolist() == [[1, 0, 0, 0], [0, H, 0, 0], [0, 0, Fr(1, 4), 0],
                                       [0, 0, 0, Fr(1, 8)]]
    fs = [scalar(ex.Poly([0] * k + [1])) for k in range(4)]
    assert all(verify_vector_fractel(w, fs, 500, 1e-14))


# -- properties -------------------------------------------------------------

dyadic = st.integers(1, 15).map(lambda n: Fr(n, 16))
slopes = st.integers(-15, 15).map(lambda n: Fr(n, 16))


@st.composite
def maps_in_S(draw):
    sig = draw(dyadic) * draw(st.sampled_from([1, -1]))
    lo = -sig if sig < 0 else Fr(0)
    return AffineMap1D(sig, lo + draw(st.integers(0, 16)) * (1 - abs(sig)) / 16)


def affine_fractel_for(coeffs, l, s):
    p = ex.Poly(coeffs)
    lam = ex.add(ex.compose_affine(p, l.sigma, l.tau), ex.scale(-s, p))
    return Fractel(l, AffineInY(s, lam)), scalar(p)


coeff_lists = st.lists(st.fractions(-3, 3, max_denominator=5), min_size=1, max_size=4)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, maps_in_S(), maps_in_S(), slopes, slopes)
def test_semigroup_closure(coeffs, l1, l2, s1, s2):
    w1, f = affine_fractel_for(coeffs, l1, s1)
    w2, _ = affine_fractel_for(coeffs, l2, s2)
    assert verify_fractel(compose_fractels(w1, w2), f, 500, 1e-10)


@settings(max_examples=40, deadline=None)
@given(coeff_lists, maps_in_S(), slopes)
def test_monoid_identity(coeffs, l, s):
    w, _ = affine_fractel_for(coeffs, l, s)
    x = UNIT.grid(101)
    for c in (compose_fractels(w, Fractel.trivial()), compose_fractels(Fractel.trivial(), w)):
        assert (c.l.sigma, c.l.tau, c.F.s) == (l.sigma, l.tau, s)
        assert np.allclose(c.F.lam(x), w.F.lam(x), atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(maps_in_S(), maps_in_S(), maps_in_S())
def test_map_composition_associative_exact(a, b, c):
    left, right = a.after(b).after(c), a.after(b.after(c))
    assert (left.sigma, left.tau) == (right.sigma, right.tau)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=4), maps_in_S(), slopes)
def test_rb_graph_commutation(coeffs, l, s):
    w = Fractel(l, AffineInY(s, ex.Poly([1, -1])))
    g = scalar(ex.Poly(coeffs))
    x = UNIT.grid(64)
    lx, Fy = w(x, g(x))
    assert np.allclose(rb_apply(w, g)(lx), Fy, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(maps_in_S())
def test_nontrivial_has_interior_fixed_point(l):
    w = Fractel(l, AffineInY(0))
    if check_nontrivial(w, UNIT):
        assert abs(l.sigma) < 1 and 0 <= l.fixed_point() <= 1
