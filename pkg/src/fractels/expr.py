"""Small closed-form real functions that can be written to and read from text.

These back the lambda parts of affine-in-y fractels and the witness
functions in the fixture table.  Every expression is vectorised: calling it
with a numpy array returns an array.

Text form is ``kind:p1,p2,...``:

``const:c``
    the constant ``c``.
``poly:c0,c1,...,cn``
    ``c0 + c1 x + ... + cn x^n`` (ascending coefficients).
``powsum:c,a,b,p[,c,a,b,p...]``
    ``sum c * (a x + b)**p`` over groups of four parameters.

Parameters accept anything :func:`parse_number` does (``1/2``, ``0.25``,
``-3``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import ParseError
from .rational import format_rational, parse_rational


def parse_number(tok: str):
    """Exact Fraction where the text is rational, float otherwise."""
    tok = tok.strip()
    low = tok.lower()
    if low in ("inf", "+inf", "-inf", "nan"):
        return float(low)
    if "e" in low:
        return float(tok)
    try:
        return parse_rational(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}") from None


def format_number(v) -> str:
    if isinstance(v, Fraction) or isinstance(v, int):
        return format_rational(Fraction(v))
    return repr(float(v))


class Expr:
    kind = "callable"

    def __call__(self, x):
        raise NotImplementedError

    @property
    def params(self) -> tuple:
        return ()

    def to_text(self) -> str:
        if not self.params and self.kind == "callable":
            raise TypeError(f"{self!r} has no text form")
        return f"{self.kind}:" + ",".join(format_number(p) for p in self.params)

    def is_zero(self) -> bool:
        return False

    def __eq__(self, other):
        if self.kind == "callable" or not isinstance(other, Expr):
            return self is other
        return self.kind == other.kind and self.params == other.params

    def __hash__(self):
        return id(self) if self.kind == "callable" else hash((self.kind, self.params))


class Const(Expr):
    kind = "const"

    def __init__(self, c):
        self.c = c

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), float(self.c))

    @property
    def params(self):
        return (self.c,)

    def is_zero(self):
        return self.c == 0

    def __repr__(self):
        return f"Const({format_number(self.c)})"


class Poly(Expr):
    kind = "poly"

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs) if coeffs else (0,)
        self._fc = np.array([float(c) for c in self.coeffs])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        acc = np.full_like(x, self._fc[-1])
        for c in self._fc[-2::-1]:
            acc = acc * x + c
        return acc

    @property
    def params(self):
        return self.coeffs

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __repr__(self):
        return f"Poly({', '.join(format_number(c) for c in self.coeffs)})"


class PowSum(Expr):
    kind = "powsum"

    def __init__(self, terms):
        self.terms = tuple(tuple(t) for t in terms)
        if any(len(t) != 4 for t in self.terms):
            raise ValueError("powsum terms are (c, a, b, p) quadruples")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, a, b, p in self.terms:
            base = float(a) * x + float(b)
            # tiny negative bases from rounding would give nan for fractional p
            if float(p) != int(float(p)):
                base = np.where((base < 0) & (base > -1e-15), 0.0, base)
            out = out + float(c) * np.power(base, float(p))
        return out

    @property
    def params(self):
        return tuple(v for t in self.terms for v in t)

    def __repr__(self):
        return f"PowSum({self.terms})"


class Func(Expr):
    """Wraps an arbitrary vectorised callable; not serialisable."""

    def __init__(self, fn: Callable, label: str = ""):
        self.fn = fn
        self.label = label

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def __repr__(self):
        return f"Func({self.label or self.fn!r})"


def parse_expr(text: str) -> Expr:
    kind, sep, rest = text.strip().partition(":")
    if not sep:
        raise ParseError(f"expression needs 'kind:params', got {text!r}")
    params = [parse_number(t) for t in rest.split(",") if t.strip()]
    if kind == "const":
        if len(params) != 1:
            raise ParseError(f"const takes one parameter, got {text!r}")
        return Const(params[0])
    if kind == "poly":
        if not params:
            raise ParseError(f"poly needs coefficients, got {text!r}")
        return Poly(params)
    if kind == "powsum":
        if not params or len(params) % 4:
            raise ParseError(f"powsum needs groups of four parameters, got {text!r}")
        return PowSum(zip(*[iter(params)] * 4))
    raise ParseError(f"unknown expression kind {kind!r}")


def as_expr(fn) -> Expr:
    if isinstance(fn, Expr):
        return fn
    if isinstance(fn, (int, float, Fraction)):
        return Const(fn)
    if isinstance(fn, str):
        return parse_expr(fn)
    from .core import ScalarFunction

    if isinstance(fn, ScalarFunction):
        return as_expr(fn.eval)
    return Func(fn)


# Symbolic shortcuts keep results serialisable when both sides are simple.


def _poly_coeffs(e: Expr):
    if isinstance(e, Const):
        return (e.c,)
    if isinstance(e, Poly):
        return e.coeffs
    return None


def scale(c, e) -> Expr:
    e = as_expr(e)
    if c == 0:
        return Const(0)
    if c == 1:
        return e
    if isinstance(e, Const):
        return Const(c * e.c)
    if isinstance(e, Poly):
        return Poly(c * k for k in e.coeffs)
    if isinstance(e, PowSum):
        return PowSum((c * k, a, b, p) for k, a, b, p in e.terms)
    return Func(lambda x: c * e(x), f"{c}*({e!r})")


def add(*exprs) -> Expr:
    exprs = [as_expr(e) for e in exprs]
    exprs = [e for e in exprs if not e.is_zero()]
    if not exprs:
        return Const(0)
    if len(exprs) == 1:
        return exprs[0]
    coeffs = [_poly_coeffs(e) for e in exprs]
    if all(c is not None for c in coeffs):
        n = max(len(c) for c in coeffs)
        total = [sum(c[i] if i < len(c) else 0 for c in coeffs) for i in range(n)]
        return Const(total[0]) if n == 1 else Poly(total)
    return Func(lambda x: sum(e(x) for e in exprs), " + ".join(repr(e) for e in exprs))


def compose_affine(e, sigma, tau) -> Expr:
    """``x -> e(sigma * x + tau)``."""
    e = as_expr(e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Poly):
        return Poly(poly_compose_affine(e.coeffs, sigma, tau))
    if isinstance(e, PowSum):
        return PowSum((c, a * sigma, a * tau + b, p) for c, a, b, p in e.terms)
    return Func(lambda x: e(sigma * x + tau), f"({e!r})o({sigma}x+{tau})")


def poly_compose_affine(coeffs, sigma, tau) -> list:
    """Coefficients of ``p(sigma x + tau)`` by Horner's scheme on polynomials.

    Works on any number type; with Fractions the result is exact.
    """
    out = [coeffs[-1]]
    for c in reversed(coeffs[:-1]):
        nxt = [0] * (len(out) + 1)
        for i, v in enumerate(out):
            nxt[i] += v * tau
            nxt[i + 1] += v * sigma
        nxt[0] += c
        out = nxt
    return out
