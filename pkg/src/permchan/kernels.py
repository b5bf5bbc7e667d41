"""Backend selection for the sampling kernels.

The compiled extension ``permchan._core`` is used when it imports; otherwise
the numpy fallback in ``permchan._pycore`` takes over. Setting
``PERMCHAN_PURE_PYTHON=1`` forces the fallback. Both backends consume the
same caller-drawn uniforms, so results never depend on which one is active.
"""

import os

import numpy as np

from permchan import _pycore

if os.environ.get("PERMCHAN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pycore
else:
    try:
        from permchan import _core as _impl
    except ImportError:
        _impl = _pycore

BACKEND = "python" if _impl is _pycore else "compiled"


def cumulative(matrix):
    """Row-wise CDF table with the last column pinned to exactly 1."""
    cdf = np.cumsum(np.asarray(matrix, dtype=np.float64), axis=1)
    cdf[:, -1] = 1.0
    return np.ascontiguousarray(cdf)


def sample_rows(rows, cdf, u):
    """Draw one column index per entry of ``rows`` by inverse-CDF lookup."""
    return _impl.sample_rows(np.ascontiguousarray(rows, dtype=np.int64), cdf,
                             np.ascontiguousarray(u, dtype=np.float64))


def shuffle(a, u):
    """In-place Fisher-Yates shuffle; ``u[i]`` picks the swap partner of ``i``."""
    _impl.shuffle(a, np.ascontiguousarray(u, dtype=np.float64))


def bincount(a, size):
    return _impl.bincount(np.ascontiguousarray(a, dtype=np.int64), size)
