"""numba-compiled kernels (nopython, no fastmath so rounding is IEEE)."""

from numba import njit

from . import _loops

NAME = "numba"

_opts = dict(cache=True, nogil=True, fastmath=False)

rb_iterate = njit(**_opts)(_loops.rb_iterate)
digit_chain = njit(**_opts)(_loops.digit_chain)
horner = njit(**_opts)(_loops.horner)
