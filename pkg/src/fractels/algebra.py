"""Building fractels from other fractels.

Sums, scalings and products of functions carry over to their fractels as
long as both fractels share the same ``l``.  The formulas need the functions
themselves, so every operand is a :class:`FractelWithWitness`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import expr as ex
from .core import (
    DEFAULT_GRID,
    AffineInY,
    AffineMap1D,
    Fractel,
    GeneralF,
    Interval,
    ScalarFunction,
    VectorFractel,
    compose_fractels,
    scalar,
    verify_fractel,
    verify_vector_fractel,
)
from .errors import (
    DomainEscapeError,
    MapMismatchError,
    NonFiniteError,
    NotContractiveError,
    VerificationError,
    ZeroScalarError,
    ZeroWitnessError,
)

WITNESS_TOL = 1e-9
ZERO_THRESHOLD = 1e-14


@dataclass(frozen=True)
class FractelWithWitness:
    """A fractel ``w`` together with the function ``f`` it is a fractel for.

    Construction verifies ``w`` against ``f`` on a ``grid``-point sample at
    tolerance ``tol``; pass ``check=False`` to skip this (e.g. when the
    caller verifies on a custom grid).
    """

    w: Fractel
    f: ScalarFunction
    tol: float = WITNESS_TOL
    grid: int = DEFAULT_GRID
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "f", scalar(self.f))
        if self.check:
            rep = verify_fractel(self.w, self.f, self.grid, self.tol)
            if not rep.passed:
                raise VerificationError(
                    f"fractel does not verify for {self.f.label}: "
                    f"max residual {rep.max_residual:.3g} > {self.tol:g}")

    @property
    def l(self) -> AffineMap1D:
        return self.w.l

    @property
    def F(self):
        return self.w.F

    def _derived(self, w, f):
        return FractelWithWitness(w, f, self.tol, self.grid, self.check)


def affine_fractel(f, l: AffineMap1D, s) -> FractelWithWitness:
    """The fractel ``(l, s*y + f(l(x)) - s*f(x))`` that any ``f`` admits."""
    f = scalar(f, l.domain)
    e = ex.as_expr(f)
    lam = ex.add(ex.compose_affine(e, l.sigma, l.tau), ex.scale(-s, e))
    return FractelWithWitness(Fractel(l, AffineInY(s, lam)), f)


def _shared_l(a: FractelWithWitness, b: FractelWithWitness) -> AffineMap1D:
    if not a.l.same_map(b.l):
        raise MapMismatchError(
            f"fractels use different maps: ({a.l.sigma}, {a.l.tau}) vs ({b.l.sigma}, {b.l.tau})")
    return a.l


def _common_domain(a, b) -> Interval:
    try:
        return a.f.domain.intersect(b.f.domain)
    except ValueError:
        raise DomainEscapeError("witness domains do not overlap in an interval") from None


def sum_fractel(a: FractelWithWitness, b: FractelWithWitness) -> FractelWithWitness:
    """``F3(x, y) = F1(x, y - f2(x)) + F2(x, y - f1(x))``, a fractel for f1 + f2."""
    l = _shared_l(a, b)
    dom = _common_domain(a, b)
    f1, f2 = ex.as_expr(a.f), ex.as_expr(b.f)
    F1, F2 = a.F, b.F
    if isinstance(F1, AffineInY) and isinstance(F2, AffineInY):
        lam = ex.add(F1.lam, F2.lam, ex.scale(-F1.s, f2), ex.scale(-F2.s, f1))
        F3 = AffineInY(F1.s + F2.s, lam)
    else:
        F3 = GeneralF(lambda x, y: F1(x, y - f2(x)) + F2(x, y - f1(x)), "sum")
    f3 = ex.add(f1, f2)
    return a._derived(Fractel(l, F3),
                      ScalarFunction(f3, dom, f"({a.f.label}) + ({b.f.label})"))


def scale_fractel(a: FractelWithWitness, c) -> FractelWithWitness:
    """``F4(x, y) = c * F1(x, y / c)``, a fractel for c * f1."""
    if c == 0:
        raise ZeroScalarError("cannot scale a fractel by zero")
    F1 = a.F
    if isinstance(F1, AffineInY):
        F4 = AffineInY(F1.s, ex.scale(c, F1.lam))
    else:
        cf = float(c)
        F4 = GeneralF(lambda x, y: cf * F1(x, y / cf), f"scale {c}")
    f4 = ex.scale(c, a.f)
    return a._derived(Fractel(a.l, F4), ScalarFunction(f4, a.f.domain, f"{c}*({a.f.label})"))


def product_fractel(a: FractelWithWitness, b: FractelWithWitness) -> FractelWithWitness:
    """``F5(x, y) = F1(x, y / f2(x)) * F2(x, y / f1(x))``, a fractel for f1 * f2.

    Both witnesses must stay away from zero (``1e-14``) on the verification
    grid of the common domain.
    """
    l = _shared_l(a, b)
    dom = _common_domain(a, b)
    xs = dom.grid(a.grid)
    for f in (a.f, b.f):
        if np.min(np.abs(f(xs))) < ZERO_THRESHOLD:
            raise ZeroWitnessError(f"{f.label} vanishes on {dom}")
    f1, f2, F1, F2 = a.f, b.f, a.F, b.F
    F5 = GeneralF(lambda x, y: F1(x, y / f2(x)) * F2(x, y / f1(x)), "product")
    f5 = ScalarFunction(lambda x: f1(x) * f2(x), dom, f"({f1.label})*({f2.label})")
    return a._derived(Fractel(l, F5), f5)


def compose_witnessed(a: FractelWithWitness, b: FractelWithWitness) -> FractelWithWitness:
    """``a.w o b.w`` for two fractels of the same function."""
    return a._derived(compose_fractels(a.w, b.w), a.f)


def bijective_fractel(f, f_inv: Callable, l: AffineMap1D) -> Fractel:
    """``(l(x), f(l(f^-1(y))))`` for a strictly monotone ``f`` with inverse."""
    f = scalar(f, l.domain)
    dom = l.domain

    def F(x, y):
        u = np.asarray(f_inv(y), dtype=float)
        if not np.all(np.isfinite(u)) or not np.all(dom.contains(u)):
            raise NonFiniteError(f"f^-1(y) leaves dom(l) = {dom}")
        return f(l(dom.clip(u)))

    return Fractel(l, GeneralF(F, f"bijective {f.label}"))


@dataclass(frozen=True)
class FiberMap:
    """``T2(x, y)`` together with its inverse in ``y``: ``inverse(x, T2(x, y)) = y``."""

    forward: Callable
    inverse: Callable

    @classmethod
    def identity(cls) -> FiberMap:
        return cls(lambda x, y: y, lambda x, y: y)

    @classmethod
    def shift(cls, g) -> FiberMap:
        """``T2(x, y) = g(x) + y``."""
        return cls(lambda x, y: g(x) + y, lambda x, y: y - g(x))


def conjugate_fractel(w: Fractel, T1: AffineMap1D, T2: FiberMap) -> Fractel:
    """``T o w o T^-1`` with ``T(x, y) = (T1(x), T2(x, y))``.

    The result is a fractel for :func:`conjugate_function` of the original
    witness.  Its ``l`` is ``T1 o l o T1^-1``, which must be contractive.
    """
    l = w.l
    sigma = l.sigma  # conjugating an affine map keeps its slope
    if abs(sigma) >= 1:
        raise NotContractiveError("T1 o l o T1^-1 is not contractive")
    tau = T1.sigma * l.tau + T1.tau - sigma * T1.tau
    new_l = AffineMap1D(sigma, tau, T1.image(l.domain))
    F = w.F

    def F_new(x, y):
        u = T1.inverse(x)
        return T2.forward(l(u), F(u, T2.inverse(x, y)))

    return Fractel(new_l, GeneralF(F_new, "conjugated"))


def conjugate_function(f, T1: AffineMap1D, T2: FiberMap) -> ScalarFunction:
    """``x -> T2(T1^-1(x), f(T1^-1(x)))`` on ``T1(dom f)``."""
    f = scalar(f)
    dom = T1.image(f.domain)

    def g(x):
        u = f.domain.clip(T1.inverse(np.asarray(x, dtype=float)))
        return T2.forward(u, f(u))

    return ScalarFunction(g, dom, f"conj({f.label})")


def shift_fractel(f, g, fg_inv: Callable, l: AffineMap1D) -> Fractel:
    """Fractel for ``f`` built from one of the invertible ``f + g``.

    ``(l(x), (f+g)(l((f+g)^-1(g(x) + y))) - g(l(x)))``, realised as the
    conjugation of the bijective fractel of ``f + g`` by ``y -> y - g(x)``.
    """
    f = scalar(f, l.domain)
    g = scalar(g, l.domain)
    fg = ScalarFunction(lambda x: f(x) + g(x), f.domain, f"{f.label} + {g.label}")
    w_fg = bijective_fractel(fg, fg_inv, l)
    T2 = FiberMap(lambda x, y: y - g(x), lambda x, y: y + g(x))
    return conjugate_fractel(w_fg, AffineMap1D.identity(l.domain), T2)


def cartesian_fractel(*parts: FractelWithWitness, shared_l: bool = True):
    """Fractel for ``x -> (f1(x), f2(x), ...)`` (shared ``l``) or for
    ``(x1, x2) -> (f1(x1), f2(x2))`` (``shared_l=False``)."""
    if len(parts) < 2:
        raise ValueError("need at least two fractels")
    if shared_l:
        l = parts[0].l
        for p in parts[1:]:
            if not l.same_map(p.l):
                raise MapMismatchError("shared_l requires identical maps")
        return VectorFractel(l, tuple(p.F for p in parts))
    return ProductFractel(tuple(p.w for p in parts))


@dataclass(frozen=True)
class ProductFractel:
    """``(l1 x l2 x ..., F1 x F2 x ...)`` acting on tuples of points."""

    parts: tuple

    def __call__(self, xs, ys):
        return (tuple(w.l(np.asarray(x, dtype=float)) for w, x in zip(self.parts, xs)),
                tuple(w.F(x, y) for w, x, y in zip(self.parts, xs, ys)))


def verify_product_fractel(pw: ProductFractel, fs, grid: int = 64, tol: float = 1e-10):
    """Check the product identity on a tensor grid; returns the max residual report."""
    fs = [scalar(f) for f in fs]
    axes = [f.domain.grid(grid) for f in fs]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = [m.ravel() for m in mesh]
    ys = [f(p) for f, p in zip(fs, pts)]
    lxs, Fys = pw(pts, ys)
    worst = 0.0
    for f, lx, Fy in zip(fs, lxs, Fys):
        if not np.all(f.domain.contains(lx)):
            raise DomainEscapeError(f"component map leaves {f.domain}")
        worst = max(worst, float(np.max(np.abs(Fy - f(f.domain.clip(lx))))))
    from .core import VerificationReport

    return VerificationReport(worst, worst <= tol)


def composition_condition_holds(f1, l1: AffineMap1D, l2: AffineMap1D,
                                grid: int = DEFAULT_GRID, tol: float = 1e-10) -> bool:
    """Whether ``f1(l1(x)) = l2(x)`` on a grid, so ``(l1, F2)`` serves ``f2 o f1``."""
    f1 = scalar(f1, l1.domain)
    xs = f1.domain.grid(grid)
    lx = l1(xs)
    if not np.all(f1.domain.contains(lx)):
        return False
    return bool(np.max(np.abs(f1(f1.domain.clip(lx)) - l2(xs))) <= tol)


__all__ = [
    "FractelWithWitness", "affine_fractel", "sum_fractel", "scale_fractel",
    "product_fractel", "compose_witnessed", "bijective_fractel", "FiberMap",
    "conjugate_fractel", "conjugate_function", "shift_fractel",
    "cartesian_fractel", "ProductFractel", "verify_product_fractel",
    "composition_condition_holds", "verify_vector_fractel",
]
