"""Fractels: maps that send the graph of a function into itself.

Subpackages of note: :mod:`fractels.core` (types and verification),
:mod:`fractels.algebra`, :mod:`fractels.calculus`, :mod:`fractels.local_ifs`
(reconstruction by fixed-point iteration), :mod:`fractels.poly_fractel` and
:mod:`fractels.digit_eval` (exact polynomial work).
"""

from .core import (
    UNIT,
    AffineInY,
    AffineMap1D,
    Fractel,
    GeneralF,
    Interval,
    ScalarFunction,
    VectorFractel,
    compose_fractels,
    fixture,
    load_fixtures,
    rb_apply,
    scalar,
    verify_fractel,
)
from .errors import FractelError
from .rational import RationalMatrix, parse_rational

__version__ = "0.1.0"

__all__ = [
    "UNIT", "AffineInY", "AffineMap1D", "Fractel", "GeneralF", "Interval",
    "ScalarFunction", "VectorFractel", "compose_fractels", "fixture",
    "load_fixtures", "rb_apply", "scalar", "verify_fractel", "FractelError",
    "RationalMatrix", "parse_rational", "__version__",
]
