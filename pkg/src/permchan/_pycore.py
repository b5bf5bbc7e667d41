"""Pure-Python/numpy twins of the routines in ``_core.pyx``.

Outputs match the compiled versions exactly for identical inputs.
"""

import numpy as np


def sample_rows(rows, cdf, u):
    rows = np.asarray(rows, dtype=np.int64)
    u = np.asarray(u, dtype=np.float64)
    out = np.empty(rows.shape[0], dtype=np.int64)
    last = cdf.shape[1] - 1
    for r in np.unique(rows):
        mask = rows == r
        # number of interior cdf entries <= u, i.e. the compiled linear scan
        out[mask] = np.searchsorted(cdf[r, :last], u[mask], side="right")
    return out


def shuffle(a, u):
    vals = a.tolist()
    for i in range(len(vals) - 1, 0, -1):
        j = min(int(u[i] * (i + 1)), i)
        vals[i], vals[j] = vals[j], vals[i]
    a[:] = vals


def bincount(a, size):
    return np.bincount(a, minlength=size).astype(np.int64)
