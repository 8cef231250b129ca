"""Scalar-loop kernels.

These are written for numba's nopython mode; ``_numba`` compiles them as
they are.  They also run (slowly) as plain Python, which the tests use as a
reference for the vectorised fallbacks.
"""

import numpy as np


def rb_iterate(idx, wt, s, lam, y0, max_iter, tol):
    """Iterate ``y <- s * interp(y, u) + lam`` on a fixed sample grid.

    ``idx``/``wt`` encode linear interpolation at the preimages ``u``:
    ``interp(y, u)[i] = (1 - wt[i]) * y[idx[i]] + wt[i] * y[idx[i] + 1]``.
    Stops after ``max_iter`` sweeps or once the sup-change drops below ``tol``.
    Returns the final samples and the sup-change of every sweep.
    """
    n = y0.shape[0]
    y = y0.copy()
    ynew = np.empty_like(y)
    changes = np.zeros(max_iter)
    done = 0
    for it in range(max_iter):
        diff = 0.0
        for i in range(n):
            j = idx[i]
            v = s[i] * ((1.0 - wt[i]) * y[j] + wt[i] * y[j + 1]) + lam[i]
            ynew[i] = v
            d = abs(v - y[i])
            if d > diff:
                diff = d
        y, ynew = ynew, y
        changes[it] = diff
        done = it + 1
        if diff < tol:
            break
    return y, changes[:done]


def digit_chain(J, digits, v):
    """``J[d_k] ... J[d_1] v``; the dtype of ``J`` and ``v`` is kept throughout."""
    n = v.shape[0]
    cur = v.copy()
    nxt = np.empty_like(cur)
    for d in digits:
        for i in range(n):
            acc = J[d, i, 0] * cur[0]
            for k in range(1, n):
                acc = acc + J[d, i, k] * cur[k]
            nxt[i] = acc
        cur, nxt = nxt, cur
    return cur


def horner(coeffs, x):
    """``coeffs[0] + coeffs[1] x + ...`` by Horner's rule in the dtype of ``coeffs``."""
    m = coeffs.shape[0]
    acc = coeffs[m - 1]
    for i in range(m - 2, -1, -1):
        acc = acc * x + coeffs[i]
    return acc
