"""Local IFSs of affine-in-y fractels and the functions they reconstruct.

A :class:`LocalIFS` is a list of pieces ``(w_n, D_n)``: the fractel
``w_n(x, y) = (l_n(x), s_n y + lam_n(x))`` acts on points whose x lies in
the piece domain ``D_n``.  When the images ``l_n(D_n)`` tile the base
interval and every ``|s_n| < 1``, the Read-Bajraktarevic operator

    (Phi g)(x) = s_n g(l_n^-1(x)) + lam_n(l_n^-1(x)),   x in l_n(D_n)

is a sup-norm contraction and its fixed point is the reconstructed function.

Two evaluation routes are provided:

* :func:`rb_fixed_point` iterates Phi on a sampled function, reading
  ``g(l_n^-1(x))`` by linear interpolation (the hot loop lives in
  :mod:`fractels.kernels`);
* :func:`evaluate_iterate` evaluates ``Phi^k g0`` exactly at arbitrary
  points by following the preimage orbit, which is what error profiles on
  log-spaced grids need.

The text format written by :func:`dump_ifs` is::

    # comment
    base <lo> <hi>
    <sigma> <tau> <s> <lambda_kind> <lambda_params...> <domain_lo> <domain_hi>

with one piece per line; lambda parameters are separated by spaces and
use the kinds of :mod:`fractels.expr` (``const``, ``poly``, ``powsum``).
Floats are written with 17 significant digits.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate

from . import expr as ex
from . import kernels
from .core import AffineInY, AffineMap1D, Fractel, Interval, ScalarFunction, UNIT, scalar
from .errors import (
    ContractionViolationError,
    DomainEscapeError,
    MapMismatchError,
    NonFiniteError,
    NotContractiveError,
    NotCoveringError,
    ParseError,
)

COVER_TOL = 1e-12
CONFLICT_TOL = 1e-9
DEFAULT_SAMPLES = 2**12 + 1


@dataclass(frozen=True)
class Piece:
    w: Fractel
    domain: Interval

    def __post_init__(self):
        if not isinstance(self.w.F, AffineInY):
            raise TypeError("local IFS pieces need an affine-in-y F")

    @property
    def l(self) -> AffineMap1D:
        return self.w.l

    @property
    def s(self):
        return self.w.F.s

    @property
    def lam(self) -> ex.Expr:
        return self.w.F.lam

    @property
    def image(self) -> Interval:
        return self.w.l.image(self.domain)


class Coverage(NamedTuple):
    covering: bool
    gaps: list
    overlaps: list


@dataclass(frozen=True)
class LocalIFS:
    base: Interval
    pieces: tuple

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise ValueError("a local IFS needs at least one piece")
        for n, p in enumerate(self.pieces):
            if not self.base.contains_interval(p.domain):
                raise DomainEscapeError(f"piece {n}: domain {p.domain} not inside {self.base}")
            if not self.base.contains_interval(p.image):
                raise DomainEscapeError(f"piece {n}: image {p.image} not inside {self.base}")

    @property
    def s_max(self) -> float:
        return max(abs(float(p.s)) for p in self.pieces)

    @property
    def contractive(self) -> bool:
        return self.s_max < 1

    def coverage(self) -> Coverage:
        """Whether the piece images tile the base, overlapping only at endpoints."""
        imgs = sorted((float(p.image.lo), float(p.image.hi)) for p in self.pieces)
        gaps, overlaps = [], []
        reach = float(self.base.lo)
        for lo, hi in imgs:
            if lo > reach + COVER_TOL:
                gaps.append((reach, lo))
            elif lo < reach - COVER_TOL:
                overlaps.append((lo, min(reach, hi)))
            reach = max(reach, hi)
        if reach < float(self.base.hi) - COVER_TOL:
            gaps.append((reach, float(self.base.hi)))
        return Coverage(not gaps and not overlaps, gaps, overlaps)

    @property
    def covering(self) -> bool:
        return self.coverage().covering

    def assign(self, x):
        """Index of the piece whose image holds each x; the last one wins, -1 if none."""
        x = np.asarray(x, dtype=float)
        idx = np.full(x.shape, -1, dtype=np.int64)
        for n, p in enumerate(self.pieces):
            idx[p.image.contains(x, COVER_TOL)] = n
        return idx


@dataclass(frozen=True)
class PiecewiseSample:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise ValueError("xs and ys must be 1-D of equal length")
        if xs.size < 2 or np.any(np.diff(xs) <= 0):
            raise ValueError("xs must be strictly increasing with at least two points")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def on_grid(cls, base: Interval, n: int = DEFAULT_SAMPLES, fn=None) -> PiecewiseSample:
        xs = base.grid(n)
        ys = np.zeros_like(xs) if fn is None else np.asarray(fn(xs), dtype=float)
        return cls(xs, ys)

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)


# -- operators -----------------------------------------------------------------


def set_operator_step(ifs: LocalIFS, points) -> np.ndarray:
    """Union over pieces of ``w_n(points restricted to D_n)``, as an (m, 2) array."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.size == 0:
        return np.empty((0, 2))
    out = []
    for p in ifs.pieces:
        m = p.domain.contains(pts[:, 0])
        if np.any(m):
            x, y = pts[m, 0], pts[m, 1]
            lx, Fy = p.w(x, y)
            out.append(np.column_stack([lx, Fy]))
    if not out:
        return np.empty((0, 2))
    return np.unique(np.vstack(out), axis=0)


@dataclass
class FixedPointRun:
    sample: PiecewiseSample
    changes: np.ndarray
    s_max: float
    conflicts: list = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return int(self.changes.size)

    @property
    def ratios(self) -> np.ndarray:
        c = self.changes
        if c.size < 2:
            return np.empty(0)
        keep = c[:-1] > 1e-13
        return c[1:][keep] / c[:-1][keep]

    @property
    def contraction_ratio(self) -> float:
        """Largest measured ratio of successive sup-changes (nan with < 2 sweeps)."""
        r = self.ratios
        return float(r.max()) if r.size else math.nan


def _check_runnable(ifs: LocalIFS):
    cov = ifs.coverage()
    if not cov.covering:
        raise NotCoveringError(f"pieces do not tile {ifs.base}: gaps {cov.gaps}, "
                               f"overlaps {cov.overlaps}")
    if not ifs.contractive:
        raise NotContractiveError(f"max |s_n| = {ifs.s_max} >= 1")


def _rb_tables(ifs: LocalIFS, xs: np.ndarray):
    """Per-sample piece data: interpolation index/weight of the preimage, s, lam."""
    owner = ifs.assign(xs)
    if np.any(owner < 0):
        raise NotCoveringError(f"x = {xs[owner < 0][0]} is not covered by any piece")
    u = np.empty_like(xs)
    s = np.empty_like(xs)
    lam = np.empty_like(xs)
    for n, p in enumerate(ifs.pieces):
        m = owner == n
        if not np.any(m):
            continue
        un = p.domain.clip(p.l.inverse(xs[m]))
        u[m] = un
        s[m] = float(p.s)
        lam[m] = p.lam(un)
    if not np.all(np.isfinite(lam)):
        raise NonFiniteError("lambda is not finite on the sample grid")
    idx = np.clip(np.searchsorted(xs, u, side="right") - 1, 0, xs.size - 2).astype(np.int64)
    wt = np.clip((u - xs[idx]) / (xs[idx + 1] - xs[idx]), 0.0, 1.0)
    return idx, wt, s, lam


def rb_fixed_point(ifs: LocalIFS, init: PiecewiseSample, iterations: int = 60,
                   tol: float = 1e-12) -> FixedPointRun:
    """Apply the RB operator to ``init`` until ``iterations`` sweeps or a
    sup-change below ``tol``.

    Values at preimages are read by linear interpolation of the current
    sample.  Points claimed by more than one piece take the last piece's
    value; if the pieces disagree there by more than 1e-9 the point and both
    values land in ``conflicts``.
    """
    if iterations < 1:
        raise ValueError("iterations must be positive")
    _check_runnable(ifs)
    xs = init.xs
    if xs[0] > float(ifs.base.lo) + COVER_TOL or xs[-1] < float(ifs.base.hi) - COVER_TOL:
        raise NotCoveringError("initial sample does not span the base interval")
    idx, wt, s, lam = _rb_tables(ifs, xs)
    y, changes = kernels.rb_iterate(idx, wt, s, lam, init.ys.copy(), iterations, tol)
    sample = PiecewiseSample(xs, np.asarray(y))
    return FixedPointRun(sample, np.asarray(changes), ifs.s_max, _conflicts(ifs, sample))


def _conflicts(ifs: LocalIFS, sample: PiecewiseSample):
    xs = sample.xs
    hits = np.stack([p.image.contains(xs, COVER_TOL) for p in ifs.pieces])
    shared = np.nonzero(hits.sum(axis=0) > 1)[0]
    out = []
    for i in shared:
        vals = []
        for n in np.nonzero(hits[:, i])[0]:
            p = ifs.pieces[n]
            u = p.domain.clip(p.l.inverse(xs[i]))
            vals.append(float(p.s) * float(sample(u)) + float(p.lam(np.array([u]))[0]))
        if max(vals) - min(vals) > CONFLICT_TOL:
            out.append((float(xs[i]), vals))
    return out


def rb_fixed_point_vector(base: Interval, pieces, init: np.ndarray, xs: np.ndarray,
                          iterations: int = 60, tol: float = 1e-12):
    """Vector RB iteration ``Y(x) <- M_n Y(l_n^-1 x)`` on samples ``xs``.

    ``pieces`` are ``(l, M, domain)`` with ``M`` a square matrix (RationalMatrix
    or array).  ``init`` has shape (d, len(xs)).  The operator need not be a
    sup-norm contraction (column-stochastic M keep ``e . Y`` fixed), so no
    contractivity check is made; the sweep changes are returned for the caller.
    """
    xs = np.asarray(xs, dtype=float)
    Y = np.array(init, dtype=float)
    imgs = [l.image(dom) for l, _, dom in pieces]
    owner = np.full(xs.shape, -1)
    for n, im in enumerate(imgs):
        owner[im.contains(xs, COVER_TOL)] = n
    if np.any(owner < 0):
        raise NotCoveringError(f"x = {xs[owner < 0][0]} is not covered by any piece")
    Ms = [np.asarray(M.to_numpy() if hasattr(M, "to_numpy") else M, dtype=float)
          for _, M, _ in pieces]
    changes = []
    for _ in range(iterations):
        new = np.empty_like(Y)
        for n, (l, _, dom) in enumerate(pieces):
            m = owner == n
            u = dom.clip(l.inverse(xs[m]))
            vals = np.stack([np.interp(u, xs, row) for row in Y])
            new[:, m] = Ms[n] @ vals
        changes.append(float(np.max(np.abs(new - Y))))
        Y = new
        if changes[-1] < tol:
            break
    return Y, np.array(changes)


def evaluate_iterate(ifs: LocalIFS, xs, depth: int | None = None, init=None,
                     tol: float = 1e-17, max_depth: int = 100_000) -> np.ndarray:
    """``(Phi^depth g0)(x)`` at arbitrary points, with no interpolation.

    Each point follows its preimage orbit ``u -> l_n^-1(u)`` and accumulates
    ``s_1 ... s_{j-1} lam_j(u_j)``.  With ``depth=None`` the orbit runs until
    the product of slopes falls below ``tol``, which evaluates the fixed
    point itself.  ``init`` (default zero) is the starting function ``g0``.
    """
    _check_runnable(ifs)
    x = np.atleast_1d(np.asarray(xs, dtype=float)).copy()
    if not np.all(ifs.base.contains(x)):
        raise DomainEscapeError(f"evaluation points outside {ifs.base}")
    u = ifs.base.clip(x)
    acc = np.zeros_like(u)
    prod = np.ones_like(u)
    live = np.ones(u.shape, dtype=bool)
    steps = max_depth if depth is None else depth
    for _ in range(steps):
        owner = ifs.assign(u)
        for n, p in enumerate(ifs.pieces):
            m = live & (owner == n)
            if not np.any(m):
                continue
            v = p.domain.clip(p.l.inverse(u[m]))
            acc[m] += prod[m] * p.lam(v)
            prod[m] *= float(p.s)
            u[m] = v
        if depth is None:
            live &= np.abs(prod) > tol
            if not np.any(live):
                break
    if init is not None:
        acc += prod * np.asarray(init(u), dtype=float)
    return acc


def as_function(ifs: LocalIFS, label: str = "fixed point") -> ScalarFunction:
    return ScalarFunction(lambda x: evaluate_iterate(ifs, x), ifs.base, label)


# -- fractels of the form ((x + tau)/2, sigma y + (1 - sigma) G(x)) -------------


def fractel_G(g, tau, sigma) -> ex.Expr:
    """``G(x) = (g((x + tau)/2) - sigma g(x)) / (1 - sigma)``."""
    g = ex.as_expr(g)
    if sigma == 1:
        raise ValueError("sigma must differ from 1")
    k = 1 / (1 - sigma)
    return ex.add(ex.scale(k, ex.compose_affine(g, 0.5, tau / 2)), ex.scale(-sigma * k, g))


def halving_sigma(theta) -> float:
    """``2^-theta``; ``theta = inf`` gives the sigma = 0 piece."""
    return 0.0 if math.isinf(theta) else 2.0 ** (-theta)


def build_fractel_for_power_plus_g(alpha, tau, theta, g, domain: Interval = UNIT) -> Fractel:
    """Fractel ``((x + tau)/2, sigma y + (1 - sigma) G(x))`` with ``sigma = 2^-theta``.

    It is a fractel for ``alpha (x - tau)^theta + g(x)`` whatever ``alpha``;
    ``theta = inf`` gives ``sigma = 0`` and ``G = g((x + tau)/2)``.
    """
    if not theta > 0:
        raise ValueError("theta must be positive")
    if not domain.contains(tau):
        raise ValueError(f"tau = {tau} outside {domain}")
    sigma = halving_sigma(theta)
    lam = ex.scale(1 - sigma, fractel_G(g, tau, sigma))
    return Fractel(AffineMap1D(0.5, tau / 2, domain), AffineInY(sigma, lam))


def power_plus_g(alpha, tau, theta, g, domain: Interval = UNIT) -> ScalarFunction:
    """``alpha (x - tau)^theta + g(x)``; fractional powers use ``|x - tau|``."""
    g = ex.as_expr(g)
    if math.isinf(theta):
        return scalar(g, domain)
    integral = float(theta).is_integer()

    def f(x):
        d = x - float(tau)
        p = d ** int(theta) if integral else np.abs(d) ** float(theta)
        return float(alpha) * p + g(x)

    return ScalarFunction(f, domain, f"{alpha}(x-{tau})^{theta} + {g!r}")


RULES = ("mean", "midpoint", "trapezoid")


def approximate_gamma(G, domain: Interval, rule: str) -> float:
    """Constant stand-in for G: its mean (Simpson, 2^10 panels), midpoint value
    or trapezoid average of the endpoint values."""
    G = ex.as_expr(G)
    a, b = float(domain.lo), float(domain.hi)
    if rule == "mean":
        t = np.linspace(a, b, 2**10 + 1)
    elif rule == "midpoint":
        t = np.array([(a + b) / 2])
    elif rule == "trapezoid":
        t = np.array([a, b])
    else:
        raise ValueError(f"unknown rule {rule!r}; choose from {RULES}")
    with np.errstate(all="ignore"):
        vals = G(t)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteError("G is not finite on the domain")
    if rule == "mean":
        return float(integrate.simpson(vals, x=t) / (b - a))
    return float(np.mean(vals))


# -- the square-root example ----------------------------------------------------

SQRT_MODES = ("exact",) + RULES
HALF = Interval(0.5, 1.0)


def sqrt_piece_G(tau, sigma) -> ex.Expr:
    """G for ``sqrt`` on [1/2, 1]: ``(sqrt((x + tau)/2) - sigma sqrt(x)) / (1 - sigma)``."""
    k = 1 / (1 - sigma)
    return ex.PowSum([(k, 0.5, tau / 2, 0.5), (-sigma * k, 1, 0, 0.5)])


def build_sqrt_ifs(sigma2: float = 0.5, sigma3: float = 0.5, mode: str = "exact") -> LocalIFS:
    """Three-piece local IFS on [0, 1] for ``sqrt(x)``.

    Piece 1 is ``(x/2, y/sqrt(2))`` on [0, 1].  Pieces 2 and 3 act on
    [1/2, 1] with ``l(x) = (x + tau)/2``, ``tau = 1/2`` and ``1``, and
    ``F = sigma y + (1 - sigma) G``; ``mode`` keeps G exact or replaces it by
    the constant from :func:`approximate_gamma`.
    """
    if mode not in SQRT_MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {SQRT_MODES}")
    for sg in (sigma2, sigma3):
        if not 0 <= sg <= 0.5:
            raise ValueError(f"sigma must lie in [0, 1/2], got {sg}")
    pieces = [Piece(Fractel(AffineMap1D(0.5, 0.0), AffineInY(2**-0.5)), UNIT)]
    for tau, sg in ((0.5, sigma2), (1.0, sigma3)):
        G = sqrt_piece_G(tau, sg)
        if mode == "exact":
            lam = ex.scale(1 - sg, G)
        else:
            lam = ex.Const((1 - sg) * approximate_gamma(G, HALF, mode))
        pieces.append(Piece(Fractel(AffineMap1D(0.5, tau / 2, HALF), AffineInY(sg, lam)), HALF))
    return LocalIFS(UNIT, tuple(pieces))


# -- error control -----------------------------------------------------------------


def lambda_deviations(exact: LocalIFS, approx: LocalIFS, grid: int = 10_001) -> list:
    """``sup |lam_n - lam~_n|`` per piece on its domain; maps and slopes must agree."""
    if len(exact.pieces) != len(approx.pieces):
        raise MapMismatchError("IFSs have different numbers of pieces")
    devs = []
    for p, q in zip(exact.pieces, approx.pieces):
        if not p.l.same_map(q.l) or p.s != q.s:
            raise MapMismatchError("pieces differ in l or s")
        x = p.domain.grid(grid)
        devs.append(float(np.max(np.abs(p.lam(x) - q.lam(x)))))
    return devs


def error_bound(lambda_devs, s_max: float) -> float:
    """``max ||lam_n - lam~_n|| / (1 - s)``: sup-distance bound between fixed points."""
    if not 0 <= s_max < 1:
        raise ContractionViolationError(f"need 0 <= s < 1, got {s_max}")
    devs = list(lambda_devs)
    return max(devs, default=0.0) / (1 - s_max)


def sup_error(ifs: LocalIFS, reference, grid: int = 10_000, depth=None) -> float:
    ref = scalar(reference, ifs.base)
    x = ifs.base.grid(grid)
    return float(np.max(np.abs(evaluate_iterate(ifs, x, depth) - ref(x))))


class ErrorProfile(NamedTuple):
    xs: np.ndarray
    e: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.e)))

    def max_abs_between(self, lo, hi) -> float:
        m = (self.xs >= lo) & (self.xs <= hi)
        return float(np.max(np.abs(self.e[m])))


def relative_error_profile(ifs: LocalIFS, reference, grid: int = 2000, lo: float = 1e-6,
                           depth: int | None = None) -> ErrorProfile:
    """``e(x) = f_F(x) / f(x) - 1`` on a log-spaced grid from ``lo`` to the base's end.

    ``f_F`` is the fixed point (or ``Phi^depth 0`` when ``depth`` is set).
    """
    ref = scalar(reference, ifs.base)
    lo = max(lo, float(ifs.base.lo))
    if lo <= 0:
        raise ValueError("log grid needs a positive lower end")
    xs = np.geomspace(lo, float(ifs.base.hi), grid)
    r = ref(xs)
    if np.any(r == 0):
        raise ZeroDivisionError("reference vanishes on the grid")
    return ErrorProfile(xs, evaluate_iterate(ifs, xs, depth) / r - 1.0)


def write_profile_csv(profile: ErrorProfile, fh) -> None:
    fh.write("x,e(x)\n")
    for x, e in zip(profile.xs, profile.e):
        fh.write(f"{x:.17g},{e:.17g}\n")


def read_profile_csv(fh) -> ErrorProfile:
    lines = [ln for ln in fh.read().splitlines() if ln and not ln.startswith("#")]
    if not lines or lines[0] != "x,e(x)":
        raise ParseError("missing 'x,e(x)' header")
    rows = [tuple(map(float, ln.split(","))) for ln in lines[1:]]
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return ErrorProfile(arr[:, 0], arr[:, 1])


# -- text serialisation -------------------------------------------------------------


def _fmt(v) -> str:
    return ex.format_number(v) if not isinstance(v, float) else f"{v:.17g}"


def dump_ifs(ifs: LocalIFS) -> str:
    buf = io.StringIO()
    buf.write("# sigma tau s lambda_kind lambda_params... domain_lo domain_hi\n")
    buf.write(f"base {_fmt(ifs.base.lo)} {_fmt(ifs.base.hi)}\n")
    for p in ifs.pieces:
        lam = p.lam
        if lam.kind == "callable":
            raise TypeError(f"lambda {lam!r} has no text form")
        toks = [_fmt(p.l.sigma), _fmt(p.l.tau), _fmt(p.s), lam.kind]
        toks += [_fmt(v) for v in lam.params]
        toks += [_fmt(p.domain.lo), _fmt(p.domain.hi)]
        buf.write(" ".join(toks) + "\n")
    return buf.getvalue()


def load_ifs(text: str) -> LocalIFS:
    base = None
    pieces = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] == "base":
                if len(toks) != 3:
                    raise ParseError("base line needs two numbers")
                base = Interval(ex.parse_number(toks[1]), ex.parse_number(toks[2]))
                continue
            if len(toks) < 7:
                raise ParseError("piece line needs at least 7 fields")
            sigma, tau, s = (ex.parse_number(t) for t in toks[:3])
            lam = ex.parse_expr(toks[3] + ":" + ",".join(toks[4:-2]))
            dom = Interval(ex.parse_number(toks[-2]), ex.parse_number(toks[-1]))
            pieces.append(Piece(Fractel(AffineMap1D(sigma, tau, dom), AffineInY(s, lam)), dom))
        except ParseError as e:
            raise ParseError(str(e), lineno) from None
        except ValueError as e:
            raise ParseError(str(e), lineno) from None
    if base is None:
        raise ParseError("missing 'base lo hi' line")
    return LocalIFS(base, tuple(pieces))
