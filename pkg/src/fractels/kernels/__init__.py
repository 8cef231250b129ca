"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly, unless the environment
variable ``FRACTELS_DISABLE_NUMBA`` is set to a non-empty value other than
``0``.  Both backends stay importable for benchmarking via
:func:`get_backend`.
"""

import os

from . import _numpy

numpy_backend = _numpy

numba_backend = None
try:
    from . import _numba as numba_backend
except ImportError:  # numba missing or broken
    numba_backend = None

NUMBA_DISABLED = os.environ.get("FRACTELS_DISABLE_NUMBA", "") not in ("", "0")

_active = numpy_backend if NUMBA_DISABLED or numba_backend is None else numba_backend

BACKEND = _active.NAME
rb_iterate = _active.rb_iterate
digit_chain = _active.digit_chain
horner = _active.horner


def get_backend(name=None):
    """The kernel module called ``name`` ("numba" / "numpy"), or the active one."""
    if name is None:
        return _active
    if name == "numpy":
        return numpy_backend
    if name == "numba":
        if numba_backend is None:
            raise RuntimeError("numba backend unavailable")
        return numba_backend
    raise ValueError(f"unknown backend {name!r}")


__all__ = ["BACKEND", "rb_iterate", "digit_chain", "horner", "get_backend",
           "numpy_backend", "numba_backend"]
