"""Polynomial evaluation at base-B digit strings, one small matrix product per digit.

For a digit ``n`` the map ``l_n(x) = n + x/B`` equals ``(1 - s) t + s x``
with ``s = 1/B`` and ``t = nB/(B - 1)``, so its binomial matrix factors as
``M_t D_s M_t^-1`` (shift to the fixed point ``t``, scale, shift back).
With ``J(n) = (M_t D_s M_t^-1)^T`` and coefficients ``a = (a_0, ..., a_m)``

    p(d_1.d_2...d_k) = first component of  J(d_k) ... J(d_1) a,

and one more digit costs one more product.  Trailing zeros leave the first
component unchanged.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from statistics import median

import numpy as np

from . import kernels
from .errors import BadDigitError, ParseError
from .poly_fractel import binomial_matrix
from .rational import RationalMatrix, format_rational, parse_rational


@dataclass(frozen=True)
class DigitNumber:
    base: int
    int_digit: int
    frac_digits: tuple = ()

    def __post_init__(self):
        if self.base < 2:
            raise BadDigitError(f"base must be at least 2, got {self.base}")
        object.__setattr__(self, "frac_digits", tuple(self.frac_digits))
        for d in (self.int_digit,) + self.frac_digits:
            if not 0 <= d < self.base:
                raise BadDigitError(f"digit {d} out of range for base {self.base}")

    @classmethod
    def parse(cls, text: str, base: int = 10) -> DigitNumber:
        """``"1.23"``; hex and other bases use ``int(c, base)`` digits (``"a.f"``)."""
        head, _, tail = text.strip().partition(".")
        if len(head) != 1:
            raise BadDigitError(f"need exactly one digit before the point, got {text!r}")
        try:
            digits = [int(c, base) for c in head + tail]
        except ValueError:
            raise BadDigitError(f"{text!r} is not a base-{base} digit string") from None
        return cls(base, digits[0], tuple(digits[1:]))

    @property
    def digits(self) -> tuple:
        return (self.int_digit,) + self.frac_digits

    @property
    def value(self) -> Fraction:
        v = Fraction(0)
        for d in reversed(self.frac_digits):
            v = (v + d) / self.base
        return self.int_digit + v

    def __str__(self):
        sym = "0123456789abcdefghijklmnopqrstuvwxyz"
        tail = "".join(sym[d] for d in self.frac_digits)
        return sym[self.int_digit] + ("." + tail if tail else "")


@lru_cache(maxsize=None)
def make_j_matrix(base: int, degree: int, digit: int) -> RationalMatrix:
    """``J(n) = (M_t D_s M_t^-1)^T`` with ``s = 1/B`` and ``t = nB/(B - 1)``."""
    if base < 2 or degree < 0:
        raise ValueError("need base >= 2 and degree >= 0")
    if not 0 <= digit < base:
        raise BadDigitError(f"digit {digit} out of range for base {base}")
    s = Fraction(1, base)
    t = Fraction(digit * base, base - 1)
    Mt = binomial_matrix(1, t, degree)
    D = RationalMatrix.diag([s**i for i in range(degree + 1)])
    return (Mt @ D @ Mt.inverse()).T


@lru_cache(maxsize=None)
def _j_stack(base: int, degree: int, dtype: str) -> np.ndarray:
    out = np.stack([make_j_matrix(base, degree, n).to_numpy() for n in range(base)])
    out = out.astype(dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class EvalState:
    vector: tuple
    digits_consumed: int
    base: int

    @property
    def value(self):
        return self.vector[0]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.vector)


@dataclass(frozen=True)
class Evaluation:
    value: object
    state: EvalState


def _coeffs(coeffs, exact: bool):
    if exact:
        return tuple(parse_rational(c) if not isinstance(c, float) else Fraction(c) for c in coeffs)
    return tuple(float(c) for c in coeffs)


def start_state(coeffs, base: int = 10, mode: str = "exact") -> EvalState:
    """The state before any digit: the coefficient vector itself."""
    if mode not in ("exact", "float"):
        raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")
    if not len(coeffs):
        raise ValueError("need at least one coefficient")
    return EvalState(_coeffs(coeffs, mode == "exact"), 0, base)


def extend_precision(state: EvalState, next_digit: int) -> EvalState:
    """One more digit: ``v <- J(d) v``."""
    J = make_j_matrix(state.base, len(state.vector) - 1, next_digit)
    if state.exact:
        v = J.matvec(state.vector)
    else:
        Jf = _j_stack(state.base, len(state.vector) - 1, "float64")[next_digit]
        v = tuple(float(c) for c in Jf @ np.array(state.vector))
    return EvalState(tuple(v), state.digits_consumed + 1, state.base)


def eval_digits(coeffs, x, mode: str = "exact", base: int | None = None) -> Evaluation:
    """``p(x)`` for ``p = sum a_i x^i`` and a digit string ``x``.

    ``x`` is a :class:`DigitNumber` or its text (with ``base``, default 10).
    Exact mode returns a Fraction; float mode runs the digit chain through
    the active kernel backend in float64.
    """
    if not isinstance(x, DigitNumber):
        x = DigitNumber.parse(str(x), base or 10)
    elif base is not None and base != x.base:
        raise BadDigitError(f"digit string is base {x.base}, not {base}")
    state = start_state(coeffs, x.base, mode)
    if mode == "exact":
        for d in x.digits:
            state = extend_precision(state, d)
    else:
        J = _j_stack(x.base, len(state.vector) - 1, "float64")
        v = kernels.digit_chain(J, np.array(x.digits, dtype=np.int64), np.array(state.vector))
        state = EvalState(tuple(float(c) for c in v), len(x.digits), x.base)
    return Evaluation(state.value, state)


def direct_value(coeffs, x) -> Fraction:
    """Exact ``sum a_i x^i`` (the reference for :func:`eval_digits`)."""
    xv = x.value if isinstance(x, DigitNumber) else parse_rational(x)
    acc = Fraction(0)
    for c in reversed(_coeffs(coeffs, True)):
        acc = acc * xv + c
    return acc


# -- Horner comparison -----------------------------------------------------------

PRECISIONS = {"f64": np.float64, "f32": np.float32}


@dataclass(frozen=True)
class CompareReport:
    horner_value: float
    digit_ifs_value: float
    exact_value: Fraction
    horner_err: float
    ifs_err: float


def _rel_err(v, exact: Fraction) -> float:
    if not np.isfinite(v):
        return float("inf")
    diff = abs(Fraction(float(v)) - exact)
    return float(diff / abs(exact)) if exact != 0 else float(diff)


def _as_digits(x, digits: int | None) -> DigitNumber:
    if isinstance(x, DigitNumber):
        return x
    if isinstance(x, float):
        if digits is None:
            raise ValueError("a float argument needs a digit count")
        x = f"{x:.{digits}f}"
    return DigitNumber.parse(str(x), 10)


def horner_value(coeffs, x: DigitNumber, precision: str = "f64"):
    dt = PRECISIONS[precision]
    c = np.array([float(v) for v in _coeffs(coeffs, True)], dtype=dt)
    return kernels.horner(c, dt(float(x.value)))


def ifs_value(coeffs, x: DigitNumber, precision: str = "f64"):
    dt = PRECISIONS[precision]
    J = _j_stack(x.base, len(coeffs) - 1, np.dtype(dt).name)
    v = np.array([float(v) for v in _coeffs(coeffs, True)], dtype=dt)
    return kernels.digit_chain(J, np.array(x.digits, dtype=np.int64), v)[0]


def horner_compare(coeffs, x, digits: int | None = None, float_precision: str = "f64") -> CompareReport:
    """Evaluate by Horner's rule and by the digit chain at reduced precision.

    ``f32`` keeps coefficients, matrices and every intermediate in float32.
    Errors are relative to the exact rational value at the decimal ``x``
    (absolute when that value is 0).
    """
    if float_precision not in PRECISIONS:
        raise ValueError(f"precision must be one of {sorted(PRECISIONS)}")
    xd = _as_digits(x, digits)
    exact = direct_value(coeffs, xd)
    h = horner_value(coeffs, xd, float_precision)
    i = ifs_value(coeffs, xd, float_precision)
    return CompareReport(float(h), float(i), exact, _rel_err(h, exact), _rel_err(i, exact))


# -- benchmark table ---------------------------------------------------------------

BENCH_HEADER = "poly_id,x,method,value,rel_err,ns_per_eval"
METHODS = ("horner_f64", "ifs_f64", "horner_f32", "ifs_f32", "ifs_exact")


def parse_poly_file(text: str) -> list:
    """Lines ``c0,c1,...,cm x``; blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise ParseError("expected 'coefficients digit-string'", lineno)
        try:
            coeffs = tuple(parse_rational(c) for c in toks[0].split(","))
            x = DigitNumber.parse(toks[1])
        except ValueError as e:
            raise ParseError(str(e), lineno) from None
        out.append((coeffs, x))
    return out


def _time_ns(fn, reps: int, batches: int = 5) -> float:
    """Median over ``batches`` of the mean time per call."""
    per = max(1, reps // batches)
    samples = []
    for _ in range(batches):
        t0 = time.perf_counter_ns()
        for _ in range(per):
            fn()
        samples.append((time.perf_counter_ns() - t0) / per)
    return median(samples)


def bench_rows(polys, reps: int = 1000) -> list:
    """One row per (polynomial, method): value, relative error, median ns per call.

    Runs single-threaded so timings are not perturbed by other workers.
    """
    rows = []
    for pid, (coeffs, x) in enumerate(polys):
        exact = direct_value(coeffs, x)
        calls = {
            "horner_f64": lambda: horner_value(coeffs, x, "f64"),
            "ifs_f64": lambda: ifs_value(coeffs, x, "f64"),
            "horner_f32": lambda: horner_value(coeffs, x, "f32"),
            "ifs_f32": lambda: ifs_value(coeffs, x, "f32"),
            "ifs_exact": lambda: eval_digits(coeffs, x).value,
        }
        for method in METHODS:
            fn = calls[method]
            v = fn()
            err = _rel_err(float(v), exact) if method != "ifs_exact" else float(abs(v - exact))
            rows.append((pid, str(x), method, v, err, _time_ns(fn, reps)))
    return rows


def write_bench_csv(rows, fh) -> None:
    fh.write(BENCH_HEADER + "\n")
    for pid, x, method, v, err, ns in rows:
        val = format_rational(v) if isinstance(v, Fraction) else f"{float(v):.17g}"
        fh.write(f"{pid},{x},{method},{val},{err:.17g},{ns:.17g}\n")
