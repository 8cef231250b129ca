"""Fractels: maps ``w(x, y) = (l(x), F(x, y))`` that send a graph into itself.

A fractel ``w`` is a fractel for ``f`` exactly when ``F(x, f(x)) = f(l(x))``
on ``dom(f)``.  Here ``l`` is always a 1-D affine map and ``F`` is either
affine in ``y`` (``s*y + lam(x)``) or an arbitrary vectorised evaluator.

All evaluators (witness functions, ``lam``, general ``F``) must accept numpy
arrays and return arrays of the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, NamedTuple, Union

import numpy as np

from . import expr as ex
from .errors import (
    DegenerateIntervalError,
    DomainEscapeError,
    NonFiniteError,
    ParseError,
    UnknownFixtureError,
)

ENDPOINT_TOL = 1e-12
DEFAULT_GRID = 1000
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DegenerateIntervalError(f"need lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return (self.lo + self.hi) / 2

    def contains(self, x, tol=ENDPOINT_TOL):
        x = np.asarray(x, dtype=float)
        return (x >= float(self.lo) - tol) & (x <= float(self.hi) + tol)

    def contains_interval(self, other: Interval, tol=ENDPOINT_TOL) -> bool:
        return (float(other.lo) >= float(self.lo) - tol
                and float(other.hi) <= float(self.hi) + tol)

    def intersect(self, other: Interval) -> Interval:
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def clip(self, x):
        return np.clip(x, float(self.lo), float(self.hi))

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(float(self.lo), float(self.hi), n)

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


UNIT = Interval(0, 1)


@dataclass(frozen=True)
class AffineMap1D:
    """``l(x) = sigma * x + tau`` restricted to ``domain``."""

    sigma: float
    tau: float
    domain: Interval = UNIT

    def __post_init__(self):
        if self.sigma == 0:
            raise ValueError("affine map needs sigma != 0")

    @classmethod
    def identity(cls, domain: Interval = UNIT) -> AffineMap1D:
        return cls(1, 0, domain)

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return float(self.sigma) * x + float(self.tau)
        return self.sigma * x + self.tau

    def inverse(self, x):
        if isinstance(x, np.ndarray):
            return (x - float(self.tau)) / float(self.sigma)
        return (x - self.tau) / self.sigma

    def image(self, dom: Interval | None = None) -> Interval:
        dom = dom or self.domain
        a, b = self(dom.lo), self(dom.hi)
        return Interval(min(a, b), max(a, b))

    def after(self, other: AffineMap1D) -> AffineMap1D:
        """``self o other``, defined on ``other.domain``."""
        return AffineMap1D(self.sigma * other.sigma,
                           self.sigma * other.tau + self.tau, other.domain)

    def fixed_point(self):
        if self.sigma == 1:
            return None
        return self.tau / (1 - self.sigma)

    @property
    def is_identity(self) -> bool:
        return self.sigma == 1 and self.tau == 0

    def same_map(self, other: AffineMap1D, tol=ENDPOINT_TOL) -> bool:
        return (abs(float(self.sigma) - float(other.sigma)) <= tol
                and abs(float(self.tau) - float(other.tau)) <= tol)


@dataclass(frozen=True)
class ScalarFunction:
    eval: Callable
    domain: Interval = UNIT
    label: str = ""

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    def restrict(self, domain: Interval) -> ScalarFunction:
        return ScalarFunction(self.eval, domain, self.label)

    def __repr__(self):
        return f"ScalarFunction({self.label or self.eval!r} on {self.domain})"


def scalar(fn, domain: Interval = UNIT, label: str = "") -> ScalarFunction:
    """Wrap ``fn`` (a callable or ``kind:params`` text) as a ScalarFunction."""
    if isinstance(fn, ScalarFunction):
        return fn
    if isinstance(fn, str):
        fn = ex.parse_expr(fn)
    if not label:
        label = fn.to_text() if isinstance(fn, ex.Expr) and fn.kind != "callable" else repr(fn)
    return ScalarFunction(fn, domain, label)


@dataclass(frozen=True)
class AffineInY:
    """``F(x, y) = s * y + lam(x)``."""

    s: float
    lam: ex.Expr = field(default_factory=lambda: ex.Const(0))

    def __post_init__(self):
        object.__setattr__(self, "lam", ex.as_expr(self.lam))

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        return float(self.s) * np.asarray(y, dtype=float) + self.lam(x)

    @property
    def contractive(self) -> bool:
        return abs(self.s) < 1


@dataclass(frozen=True)
class GeneralF:
    eval: Callable
    label: str = ""

    def __call__(self, x, y):
        return self.eval(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


FMap = Union[AffineInY, GeneralF]


@dataclass(frozen=True)
class Fractel:
    l: AffineMap1D
    F: FMap

    @classmethod
    def trivial(cls, domain: Interval = UNIT) -> Fractel:
        return cls(AffineMap1D.identity(domain), AffineInY(1, ex.Const(0)))

    @classmethod
    def affine(cls, sigma, tau, s, lam=None, domain: Interval = UNIT) -> Fractel:
        lam = ex.Const(0) if lam is None else lam
        if isinstance(lam, str):
            lam = ex.parse_expr(lam)
        return cls(AffineMap1D(sigma, tau, domain), AffineInY(s, lam))

    @property
    def is_trivial(self) -> bool:
        return (self.l.is_identity and isinstance(self.F, AffineInY)
                and self.F.s == 1 and self.F.lam.is_zero())

    @property
    def is_affine_in_y(self) -> bool:
        return isinstance(self.F, AffineInY)

    def __call__(self, x, y):
        return self.l(np.asarray(x, dtype=float)), self.F(x, y)


class VerificationReport(NamedTuple):
    max_residual: float
    passed: bool

    def __bool__(self):
        return self.passed


def _check_finite(*arrays, what="value"):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFiniteError(f"non-finite {what} during verification")


def verify_fractel(w: Fractel, f: ScalarFunction, grid: int = DEFAULT_GRID,
                   tol: float = DEFAULT_TOL) -> VerificationReport:
    """Max of ``|F(x, f(x)) - f(l(x))|`` over ``grid`` equispaced points of dom(f)."""
    if grid < 2:
        raise ValueError("grid must be at least 2")
    f = scalar(f)
    xs = f.domain.grid(grid)
    lx = w.l(xs)
    if not np.all(f.domain.contains(lx)):
        bad = xs[~f.domain.contains(lx)][0]
        raise DomainEscapeError(f"l({bad}) = {w.l(bad)} leaves {f.domain}")
    lx = f.domain.clip(lx)
    with np.errstate(all="ignore"):
        fx = f(xs)
        _check_finite(fx, what="f(x)")
        lhs = w.F(xs, fx)
        rhs = f(lx)
    _check_finite(lhs, what="F(x, f(x))")
    _check_finite(rhs, what="f(l(x))")
    resid = float(np.max(np.abs(lhs - rhs)))
    return VerificationReport(resid, resid <= tol)


def check_nontrivial(w: Fractel, dom: Interval) -> bool:
    """True iff l maps ``dom`` strictly inside itself with ``|sigma| < 1``."""
    return abs(w.l.sigma) < 1 and dom.contains_interval(w.l.image(dom))


def compose_fractels(w1: Fractel, w2: Fractel) -> Fractel:
    """``w1 o w2 = (l1 o l2, F1(l2(x), F2(x, y)))``."""
    if not w1.l.domain.contains_interval(w2.l.image()):
        raise DomainEscapeError(
            f"l2 maps {w2.l.domain} to {w2.l.image()}, outside dom(l1) = {w1.l.domain}")
    l = w1.l.after(w2.l)
    F1, F2, l2 = w1.F, w2.F, w2.l
    if isinstance(F1, AffineInY) and isinstance(F2, AffineInY):
        lam = ex.add(ex.compose_affine(F1.lam, l2.sigma, l2.tau), ex.scale(F1.s, F2.lam))
        return Fractel(l, AffineInY(F1.s * F2.s, lam))
    return Fractel(l, GeneralF(lambda x, y: F1(l2(x), F2(x, y)), "composed"))


def rb_apply(w: Fractel, g: ScalarFunction) -> ScalarFunction:
    """The function ``x -> F(l^-1(x), g(l^-1(x)))`` on ``l(dom(g))``."""
    g = scalar(g)
    dom = w.l.image(g.domain)

    def phi(x):
        x = np.asarray(x, dtype=float)
        if not np.all(dom.contains(x)):
            raise DomainEscapeError(f"RB image evaluated outside {dom}")
        u = g.domain.clip(w.l.inverse(x))
        return w.F(u, g(u))

    return ScalarFunction(phi, dom, f"Phi_w({g.label})")


# -- vector-valued fractels -------------------------------------------------


@dataclass(frozen=True)
class VectorFractel:
    """``(l(x), (F_1(x, y_1), ..., F_d(x, y_d)))`` or a general vector F.

    ``components`` holds one FMap per coordinate; ``F`` (if given) replaces
    them with a single callable ``F(x, Y) -> Y`` where ``Y`` has shape (d, n).
    """

    l: AffineMap1D
    components: tuple = ()
    F: Callable | None = None

    def apply_F(self, x, Y):
        x = np.asarray(x, dtype=float)
        if self.F is not None:
            return np.asarray(self.F(x, Y), dtype=float)
        return np.stack([Fi(x, yi) for Fi, yi in zip(self.components, Y)])

    def linear_part(self):
        """Diagonal matrix of slopes when every component is ``s*y``."""
        from .rational import RationalMatrix

        if self.F is not None or not all(
                isinstance(c, AffineInY) and c.lam.is_zero() for c in self.components):
            return None
        return RationalMatrix.diag([c.s for c in self.components])


def verify_vector_fractel(w: VectorFractel, fs, grid: int = DEFAULT_GRID,
                          tol: float = DEFAULT_TOL, domain: Interval | None = None):
    """Componentwise check of ``f(l(x)) = F(x, f(x))``; one report per component."""
    fs = [scalar(f) for f in fs]
    dom = domain or fs[0].domain
    xs = dom.grid(grid)
    lx = w.l(xs)
    if not np.all(dom.contains(lx)):
        raise DomainEscapeError(f"l leaves {dom}")
    lx = dom.clip(lx)
    with np.errstate(all="ignore"):
        Y = np.stack([f(xs) for f in fs])
        lhs = w.apply_F(xs, Y)
        rhs = np.stack([f(lx) for f in fs])
    _check_finite(Y, lhs, rhs)
    reports = []
    for a, b in zip(lhs, rhs):
        r = float(np.max(np.abs(a - b)))
        reports.append(VerificationReport(r, r <= tol))
    return reports


# -- fixture table ---------------------------------------------------------


class FixtureRow(NamedTuple):
    name: str
    fractel: Fractel
    witness: ScalarFunction


def parse_fixtures(text: str) -> list[FixtureRow]:
    """Parse the whitespace table ``name sigma tau s lambda f lo hi``.

    ``lambda`` and ``f`` use the ``kind:params`` text of :mod:`fractels.expr`;
    blank lines and ``#`` comments are ignored.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 8:
            raise ParseError(f"expected 8 columns, got {len(toks)}", lineno)
        name, sig, tau, s, lam, f, lo, hi = toks
        try:
            dom = Interval(ex.parse_number(lo), ex.parse_number(hi))
            w = Fractel.affine(ex.parse_number(sig), ex.parse_number(tau),
                               ex.parse_number(s), ex.parse_expr(lam), dom)
            witness = scalar(ex.parse_expr(f), dom, f)
        except (ParseError, ValueError) as e:
            raise ParseError(str(e), lineno) from None
        rows.append(FixtureRow(name, w, witness))
    return rows


def load_fixtures(path=None) -> list[FixtureRow]:
    if path is None:
        text = resources.files("fractels.data").joinpath("fixtures.tsv").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_fixtures(text)


def fixture(name: str, rows: list[FixtureRow] | None = None) -> list[FixtureRow]:
    """All rows called ``name``; a prefix like ``ex4_1`` selects ``ex4_1_p*`` too."""
    rows = load_fixtures() if rows is None else rows
    hits = [r for r in rows if r.name == name or r.name.startswith(name + "_")]
    if not hits:
        raise UnknownFixtureError(name)
    return hits
