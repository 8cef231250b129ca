"""Exact affine fractels for vectors of polynomial basis functions.

A basis vector is given by a coefficient matrix ``T``: row ``i`` holds the
ascending monomial coefficients of ``f_i``, so ``f(x) = T (1, x, ..., x^k)^T``.
For an affine ``l(x) = sigma x + tau`` the monomials satisfy
``m(l(x)) = M_l m(x)`` with the lower-triangular binomial matrix ``M_l``,
and therefore ``f(l(x)) = M f(x)`` with ``M = T M_l T^-1``.

Matrices here are :class:`~fractels.rational.RationalMatrix`; floats only
appear when a basis vector is evaluated on a grid.

Stochasticity is checked on columns: the shipped hat and B-spline matrices
have nonnegative entries and column sums equal to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import expr as ex
from .core import DEFAULT_GRID, AffineMap1D, Interval, ScalarFunction, UNIT, VectorFractel, scalar
from .errors import DomainEscapeError, EigOneError, NotInSError, NotInvariantError, SingularTError
from .rational import RationalMatrix, parse_rational

F = Fraction


def binomial_matrix(sigma, tau, k: int) -> RationalMatrix:
    """``m[s][t] = C(s, t) tau^(s-t) sigma^t`` for ``0 <= t <= s <= k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    sigma, tau = parse_rational(sigma), parse_rational(tau)
    if sigma == 0:
        raise ValueError("sigma must be nonzero")
    return RationalMatrix([
        [math.comb(s, t) * tau ** (s - t) * sigma**t if t <= s else 0 for t in range(k + 1)]
        for s in range(k + 1)
    ])


# -- named bases ----------------------------------------------------------

BASES = {
    "monomial": RationalMatrix.identity(4),
    "hat": RationalMatrix([[1, -1], [0, 1]]),
    "chebyshev3": RationalMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [-1, 0, 2, 0], [0, -3, 0, 4]]),
    # uniform cubic B-spline pieces on [0, 1]
    "bspline3": RationalMatrix([[0, 0, 0, 1], [1, 3, 3, -3], [4, 0, -6, 3], [1, -3, 3, -1]]).scale(F(1, 6)),
}


def named_basis(name: str) -> RationalMatrix:
    try:
        return BASES[name]
    except KeyError:
        raise KeyError(f"unknown basis {name!r}; choose from {sorted(BASES)}") from None


def basis_polys(T: RationalMatrix) -> list:
    return [ex.Poly(T.row(i)) for i in range(T.rows)]


@dataclass(frozen=True)
class BasisFractel:
    l: AffineMap1D
    M: RationalMatrix
    T: RationalMatrix

    @property
    def sigma(self) -> Fraction:
        return self.l.sigma

    @property
    def tau(self) -> Fraction:
        return self.l.tau

    @property
    def degree(self) -> int:
        return self.T.cols - 1

    def functions(self, domain: Interval = UNIT) -> list:
        return [scalar(p, domain, repr(p)) for p in basis_polys(self.T)]

    def to_vector_fractel(self) -> VectorFractel:
        Mf = self.M.to_numpy()
        return VectorFractel(self.l, F=lambda x, Y: Mf @ Y)

    def __call__(self, x, Y):
        """``(l(x), M Y)`` with ``Y`` of shape (n, ...)."""
        return self.l(x), self.M.to_numpy() @ np.asarray(Y, dtype=float)


def polynomial_identity_holds(T: RationalMatrix, M: RationalMatrix, sigma, tau) -> bool:
    """Exact check that the coefficients of ``f_i(sigma x + tau)`` equal those of ``(M f)_i``.

    Composition goes through :func:`fractels.expr.poly_compose_affine`, not
    through the binomial matrix, so the two sides are computed independently.
    """
    rows = [list(T.row(i)) for i in range(T.rows)]
    for i in range(T.rows):
        lhs = ex.poly_compose_affine(rows[i], sigma, tau)
        lhs += [0] * (T.cols - len(lhs))
        rhs = [sum(M[i, j] * rows[j][c] for j in range(T.rows)) for c in range(T.cols)]
        if [F(v) for v in lhs] != rhs:
            return False
    return True


def basis_fractel(T, sigma, tau) -> BasisFractel:
    """``M`` with ``f(l(x)) = M f(x)`` for the basis rows of ``T``.

    ``T`` may also be a non-square matrix of full row rank (e.g. ``(x, x^2)``);
    then ``M`` exists only if the span of the rows is invariant under ``l``,
    otherwise :class:`NotInvariantError` is raised.
    """
    if isinstance(T, str):
        T = named_basis(T)
    sigma, tau = parse_rational(sigma), parse_rational(tau)
    k = T.cols - 1
    Ml = binomial_matrix(sigma, tau, k)
    TM = T @ Ml
    if T.rows == T.cols:
        if T.det() == 0:
            raise SingularTError("basis matrix T is singular")
        M = TM @ T.inverse()
    else:
        _, pivots = T._rref()
        if len(pivots) != T.rows:
            raise SingularTError("basis rows are linearly dependent")
        Tp = RationalMatrix([[T[i, c] for c in pivots] for i in range(T.rows)])
        M = RationalMatrix([[TM[i, c] for c in pivots] for i in range(T.rows)]) @ Tp.inverse()
        if M @ T != TM:
            raise NotInvariantError("span of the basis is not invariant under l")
    if not polynomial_identity_holds(T, M, sigma, tau):
        raise NotInvariantError("f(l(x)) = M f(x) fails as a polynomial identity")
    return BasisFractel(AffineMap1D(sigma, tau), M, T)


# -- semigroup ------------------------------------------------------------


class Membership(NamedTuple):
    member: bool
    reason: str
    condition: int | None = None

    def __bool__(self):
        return self.member


SPACES = ("poly_k", "pw_linear_half")


def semigroup_member(sigma, tau, space: str = "poly_k") -> Membership:
    """Whether ``l(x) = sigma x + tau`` keeps the space invariant under pullback.

    Every invertible affine self-map of [0, 1] works for polynomials.  For
    functions linear on [0, 1/2] and on [1/2, 1] the image has to avoid the
    breakpoint (conditions 1 and 2) or ``l`` has to fix it (condition 3).
    """
    sigma, tau = parse_rational(sigma), parse_rational(tau)
    if sigma == 0:
        raise NotInSError("sigma = 0 is not invertible")
    lo, hi = sorted((tau, sigma + tau))
    if lo < 0 or hi > 1:
        raise NotInSError(f"l([0,1]) = [{lo}, {hi}] is not inside [0, 1]")
    if space == "poly_k":
        return Membership(True, "polynomials of degree k are closed under affine maps")
    if space != "pw_linear_half":
        raise ValueError(f"unknown space {space!r}; choose from {SPACES}")
    half = F(1, 2)
    if hi <= half:
        return Membership(True, "l([0,1]) lies in [0, 1/2]", 1)
    if lo >= half:
        return Membership(True, "l([0,1]) lies in [1/2, 1]", 2)
    if sigma * half + tau == half:
        return Membership(True, "l(1/2) = 1/2", 3)
    return Membership(False, f"l([0,1]) = [{lo}, {hi}] straddles 1/2 and l(1/2) = "
                             f"{sigma * half + tau}")


# -- fixed points and eigenvectors ------------------------------------------


@dataclass(frozen=True)
class FixedPointReport:
    x_star: object
    residual: object
    f_star: tuple
    eig1_left: tuple | None
    multiplicity: int
    u0_constant: bool | None
    all_fixed: bool = False


def _eval_exact(polys, x):
    return tuple(sum(F(c) * x**i for i, c in enumerate(p.coeffs)) for p in polys)


def fixed_point_analysis(bf: BasisFractel, f=None, grid: int = DEFAULT_GRID,
                         tol: float = 1e-10) -> FixedPointReport:
    """Fixed point of ``l``, the residual of ``M f(x*) = f(x*)`` and a left
    eigenvector of ``M`` for eigenvalue 1.

    With ``f=None`` the basis polynomials of ``bf`` are used and the residual
    is exact.  When several independent left eigenvectors exist the first
    kernel basis vector is returned and ``multiplicity`` counts them.
    ``u0_constant`` tells whether ``c . f`` is constant on the grid, or is
    None when there is no eigenvector.
    """
    sigma, tau = bf.sigma, bf.tau
    all_fixed = sigma == 1
    if all_fixed and tau != 0:
        raise NotInSError("a translation does not map [0, 1] into itself")
    x_star = F(0) if all_fixed else F(tau) / (1 - F(sigma))
    n = bf.M.rows
    if f is None:
        polys = basis_polys(bf.T)
        fx = _eval_exact(polys, x_star)
        funcs = polys
        residual = max(abs(a - b) for a, b in zip(bf.M.matvec(fx), fx))
    else:
        funcs = [scalar(g) for g in f]
        fx = tuple(float(g(np.array([float(x_star)]))[0]) for g in funcs)
        Mf = bf.M.to_numpy() @ np.array(fx)
        residual = float(np.max(np.abs(Mf - np.array(fx))))
    kernel = (bf.M - RationalMatrix.identity(n)).left_nullspace()
    c = kernel[0] if kernel else None
    u0 = None
    if c is not None:
        xs = UNIT.grid(grid)
        vals = sum(float(ci) * g(xs) for ci, g in zip(c, funcs))
        u0 = bool(np.ptp(vals) <= tol)
    return FixedPointReport(x_star, residual, fx, c, len(kernel), u0, all_fixed)


def stochastic_check(M: RationalMatrix) -> bool:
    """Nonnegative entries and every column summing to 1."""
    return (all(v >= 0 for row in M for v in row)
            and all(s == 1 for s in M.col_sums()))


# -- vector-valued approximation ----------------------------------------------


class VectorG:
    """``G(x) = (I - M)^-1 (f((x + tau)/2) - M f(x))`` for a vector ``f``.

    With this G, ``w(x, y) = ((x + tau)/2, M y + (I - M) G(x))`` is a fractel
    for ``f``; :meth:`fractel` builds it.
    """

    def __init__(self, f, M: RationalMatrix, tau, domain: Interval = UNIT):
        n = M.rows
        if len(f) != n:
            raise ValueError(f"need {n} component functions, got {len(f)}")
        IM = RationalMatrix.identity(n) - M
        if IM.det() == 0:
            raise EigOneError("I - M is singular: M has eigenvalue 1")
        self.f = [scalar(g, domain) for g in f]
        self.M = M
        self.tau = tau
        self.domain = domain
        self.l = AffineMap1D(F(1, 2), parse_rational(tau) / 2, domain)
        if not domain.contains_interval(self.l.image(domain)):
            raise DomainEscapeError(f"(x + tau)/2 leaves {domain}")
        self._IM = IM.to_numpy()
        self._IMinv = IM.inverse().to_numpy()
        self._M = M.to_numpy()

    def _stack(self, x):
        return np.stack([g(x) for g in self.f])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lx = self.domain.clip(self.l(x))
        return self._IMinv @ (self._stack(lx) - self._M @ self._stack(x))

    def fractel(self, G=None) -> VectorFractel:
        G = self if G is None else G
        M, IM = self._M, self._IM
        return VectorFractel(self.l, F=lambda x, Y: M @ Y + IM @ G(x))


def vector_valued_G(f, M: RationalMatrix, tau, domain: Interval = UNIT) -> VectorG:
    return VectorG(f, M, tau, domain)


def first_order_G(f, f_prime, M: RationalMatrix, tau, domain: Interval = UNIT):
    """``G(x) ~ f(x) + ((tau - x)/2) (I - M)^-1 f'(c)`` with ``c`` the domain midpoint."""
    n = M.rows
    IM = RationalMatrix.identity(n) - M
    if IM.det() == 0:
        raise EigOneError("I - M is singular: M has eigenvalue 1")
    IMinv = IM.inverse().to_numpy()
    fs = [scalar(g, domain) for g in f]
    mid = np.array([float(domain.midpoint)])
    slope = IMinv @ np.array([float(scalar(g, domain)(mid)[0]) for g in f_prime])
    t = float(tau)

    def G(x):
        x = np.asarray(x, dtype=float)
        return np.stack([g(x) for g in fs]) + np.outer(slope, (t - x) / 2)

    return G


# vector choices for the approximation scheme


def shifted_values(f, shifts, domain: Interval = UNIT) -> list:
    """``(f(x + h_1), f(x + h_2), ...)``."""
    f = scalar(f)
    return [ScalarFunction(lambda x, h=h: f(np.asarray(x) + h), domain, f"f(x+{h})")
            for h in shifts]


def interpolant_vector(f, node_sets, domain: Interval = UNIT) -> list:
    """Polynomial interpolants of ``f`` through each node set."""
    f = scalar(f)
    out = []
    for nodes in node_sets:
        nodes = np.asarray(nodes, dtype=float)
        coeffs = np.polynomial.polynomial.polyfit(nodes, f(nodes), len(nodes) - 1)
        out.append(scalar(ex.Poly(coeffs.tolist()), domain, f"interp{nodes.tolist()}"))
    return out


def basis_plus_function(T: RationalMatrix, f, domain: Interval = UNIT) -> list:
    return [scalar(p, domain) for p in basis_polys(T)] + [scalar(f, domain)]


def function_and_derivative(f, f_prime, domain: Interval = UNIT) -> list:
    return [scalar(f, domain), scalar(f_prime, domain)]
