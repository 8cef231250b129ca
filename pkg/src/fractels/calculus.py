"""Fractels for derivatives, antiderivatives and fractional integrals.

Everything here works with origin-anchored affine fractels
``w(x, y) = (s*x, g(x) + c*y)`` with ``0 < s < 1``.  The caller supplies
``g'``, ``int_0^x g`` or ``J^alpha g``; the ``numeric_*`` helpers produce
them by finite differences / quadrature when no closed form is at hand.

``s`` and ``c`` may be Fractions, in which case derivative and integral
steps stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from . import expr as ex
from .core import UNIT, AffineInY, AffineMap1D, Fractel, Interval


@dataclass(frozen=True)
class AffineFractelSX:
    s: float
    c: float
    g: ex.Expr = ex.Const(0)
    domain: Interval = UNIT

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        object.__setattr__(self, "g", ex.as_expr(self.g))

    def to_fractel(self) -> Fractel:
        return Fractel(AffineMap1D(self.s, 0, self.domain), AffineInY(self.c, self.g))

    @property
    def contractive(self) -> bool:
        """Whether the y-part contracts, i.e. the fractel can drive a fixed-point iteration."""
        return abs(self.c) < 1


def power_fractel(p: int, s=Fraction(1, 2)) -> AffineFractelSX:
    """``(s x, s^p y)``, a fractel for ``x^p``."""
    return AffineFractelSX(s, s**p)


def derivative_fractel(w: AffineFractelSX, g_prime) -> AffineFractelSX:
    """``(s x, g'(x)/s + (c/s) y)``, a fractel for f'."""
    s = w.s
    return AffineFractelSX(s, w.c / s, ex.scale(1 / s, g_prime), w.domain)


def integral_fractel(w: AffineFractelSX, g_integral) -> AffineFractelSX:
    """``(s x, s int_0^x g + s c y)``, a fractel for ``int_0^x f``."""
    s = w.s
    return AffineFractelSX(s, s * w.c, ex.scale(s, g_integral), w.domain)


def fractional_integral_fractel(w: AffineFractelSX, alpha, Jalpha_g) -> AffineFractelSX:
    """``(s x, s^a J^a g(x) + s^a c y)``, a fractel for ``J^a f``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    sa = w.s**alpha
    return AffineFractelSX(w.s, sa * w.c, ex.scale(sa, Jalpha_g), w.domain)


def riemann_liouville_power(p, alpha):
    """Closed form of ``J^alpha x^p = Gamma(p+1)/Gamma(p+alpha+1) x^(p+alpha)``."""
    k = math.gamma(p + 1) / math.gamma(p + alpha + 1)
    return ex.PowSum([(k, 1, 0, p + alpha)])


# -- numeric fallbacks ------------------------------------------------------


def numeric_derivative(g, h: float = 1e-5):
    """Central difference, error O(h^2)."""
    g = ex.as_expr(g)
    return ex.Func(lambda x: (g(x + h) - g(x - h)) / (2 * h), f"d/dx {g!r}")


def numeric_antiderivative(g, panels: int = 256):
    """``x -> int_0^x g`` by composite Simpson on ``panels`` (even) panels, error O(h^4)."""
    g = ex.as_expr(g)
    panels += panels % 2

    def G(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            t = np.linspace(0.0, xi, panels + 1)
            out[i] = integrate.simpson(g(t), x=t) if xi != 0 else 0.0
        return out

    return ex.Func(G, f"int_0^x {g!r}")


def numeric_fractional_integral(g, alpha: float):
    """``J^alpha g`` by adaptive quadrature with the ``(x - t)^(alpha - 1)`` weight."""
    g = ex.as_expr(g)
    gamma = math.gamma(alpha)

    def J(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            if xi == 0:
                out[i] = 0.0
                continue
            val, _ = integrate.quad(lambda t: float(g(np.array([t]))[0]), 0.0, xi,
                                    weight="alg", wvar=(0.0, alpha - 1.0))
            out[i] = val / gamma
        return out

    return ex.Func(J, f"J^{alpha} {g!r}")
