"""Exact rational scalars and small dense matrices.

Scalars are :class:`fractions.Fraction`.  :class:`RationalMatrix` is an
immutable row-major matrix of Fractions sized for basis matrices (up to
roughly 16x16), so plain Gauss-Jordan elimination is all that is needed.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

import numpy as np

from .errors import BadRationalError, SingularMatrixError

Rational = Fraction

_DECIMAL = re.compile(r"^([+-]?)(\d*)(?:\.(\d*))?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``num/den``, an integer, or a decimal like ``-1.25`` exactly.

    Decimals are read as ``digits / 10**k`` and never pass through a float.
    """
    if isinstance(text, _RationalABC):
        return Fraction(text)
    s = str(text).strip()
    if not s:
        raise BadRationalError("empty rational")
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            n, d = int(num), int(den)
        except ValueError:
            raise BadRationalError(f"not a rational: {text!r}") from None
        if d == 0:
            raise BadRationalError(f"zero denominator: {text!r}")
        return Fraction(n, d)
    m = _DECIMAL.match(s)
    if m is None or (not m.group(2) and not m.group(3)):
        raise BadRationalError(f"not a rational: {text!r}")
    sign, whole, frac = m.group(1), m.group(2) or "0", m.group(3) or ""
    value = Fraction(int(whole + frac), 10 ** len(frac))
    return -value if sign == "-" else value


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction, digits: int) -> str:
    """Render ``q`` with exactly ``digits`` fractional digits (round half even)."""
    q = Fraction(q)
    if digits <= 0:
        return str(round(q))
    scaled = round(q * 10**digits)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


class RationalMatrix:
    """Immutable dense matrix with :class:`Fraction` entries."""

    __slots__ = ("_rows", "rows", "cols")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(Fraction(v) for v in row) for row in rows)
        if not data or not data[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ValueError("ragged rows")
        self._rows = data
        self.rows = len(data)
        self.cols = width

    # construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RationalMatrix:
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def diag(cls, values: Sequence) -> RationalMatrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def parse(cls, text: str) -> RationalMatrix:
        """Inverse of :meth:`to_text`: one row per line, space separated."""
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        return cls([[parse_rational(tok) for tok in ln.split()] for ln in lines])

    # basic protocol -----------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    def __iter__(self):
        return iter(self._rows)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalMatrix):
            return self._rows == other._rows
        try:
            return self._rows == RationalMatrix(other)._rows
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(v) for v in r) for r in self._rows)
        return f"RationalMatrix([{body}])"

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: RationalMatrix) -> RationalMatrix:
        self._same_shape(other)
        return RationalMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)]
        )

    def __sub__(self, other: RationalMatrix) -> RationalMatrix:
        self._same_shape(other)
        return RationalMatrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)]
        )

    def __neg__(self) -> RationalMatrix:
        return RationalMatrix([[-a for a in r] for r in self._rows])

    def scale(self, c) -> RationalMatrix:
        c = Fraction(c)
        return RationalMatrix([[c * a for a in r] for r in self._rows])

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.col(j) for j in range(other.cols)]
            return RationalMatrix(
                [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows]
            )
        return self.matvec(other)

    def matvec(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for matrix {self.shape}")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self._rows)

    def vecmat(self, v: Sequence) -> tuple[Fraction, ...]:
        """Row vector times matrix, ``v^T M``."""
        return self.transpose().matvec(v)

    def transpose(self) -> RationalMatrix:
        return RationalMatrix(zip(*self._rows))

    T = property(transpose)

    def row_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(r) for r in self._rows)

    def col_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(c) for c in zip(*self._rows))

    def to_numpy(self, dtype=np.float64) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self._rows], dtype=dtype)

    def to_text(self) -> str:
        return "\n".join(" ".join(format_rational(v) for v in r) for r in self._rows)

    def is_lower_triangular(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(i + 1, self.cols))

    def is_upper_triangular(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(min(i, self.cols)))

    # elimination ----------------------------------------------------------

    def _rref(self):
        """Reduced row echelon form and the list of pivot columns."""
        a = [list(r) for r in self._rows]
        pivots = []
        r = 0
        for c in range(self.cols):
            p = next((i for i in range(r, self.rows) if a[i][c] != 0), None)
            if p is None:
                continue
            a[r], a[p] = a[p], a[r]
            piv = a[r][c]
            a[r] = [v / piv for v in a[r]]
            for i in range(self.rows):
                if i != r and a[i][c] != 0:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return a, pivots

    def rank(self) -> int:
        return len(self._rref()[1])

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self._rows]
        n = self.rows
        det = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            det *= a[c][c]
            for i in range(c + 1, n):
                if a[i][c] != 0:
                    f = a[i][c] / a[c][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return det

    def inverse(self) -> RationalMatrix:
        if self.rows != self.cols:
            raise SingularMatrixError("inverse of a non-square matrix")
        n = self.rows
        aug = RationalMatrix(
            [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(self._rows)]
        )
        red, pivots = aug._rref()
        if pivots[:n] != list(range(n)):
            raise SingularMatrixError("matrix is not invertible")
        return RationalMatrix([row[n:] for row in red])

    def nullspace(self) -> list[tuple[Fraction, ...]]:
        """Basis of the right kernel ``{v : M v = 0}``, exact."""
        red, pivots = self._rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for fcol in free:
            v = [Fraction(0)] * self.cols
            v[fcol] = Fraction(1)
            for r, pc in enumerate(pivots):
                v[pc] = -red[r][fcol]
            basis.append(tuple(v))
        return basis

    def left_nullspace(self) -> list[tuple[Fraction, ...]]:
        return self.transpose().nullspace()

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
