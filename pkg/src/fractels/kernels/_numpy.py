"""Vectorised numpy versions of the kernels in ``_loops``.

Operation order matches the loops so results agree bit for bit.
"""

import numpy as np

from ._loops import horner  # scalar loop; numpy scalars keep their dtype

NAME = "numpy"


def rb_iterate(idx, wt, s, lam, y0, max_iter, tol):
    y = y0.copy()
    one_minus = 1.0 - wt
    nxt_idx = idx + 1
    changes = []
    for _ in range(max_iter):
        ynew = s * (one_minus * y[idx] + wt * y[nxt_idx]) + lam
        diff = float(np.max(np.abs(ynew - y)))
        y = ynew
        changes.append(diff)
        if diff < tol:
            break
    return y, np.array(changes)


def digit_chain(J, digits, v):
    cur = v.copy()
    n = cur.shape[0]
    for d in digits:
        Jd = J[d]
        acc = Jd[:, 0] * cur[0]
        for k in range(1, n):
            acc = acc + Jd[:, k] * cur[k]
        cur = acc
    return cur


__all__ = ["rb_iterate", "digit_chain", "horner"]
