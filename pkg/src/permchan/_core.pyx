# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for symbol sampling, shuffling and counting.

All randomness is supplied by the caller as arrays of uniforms in [0, 1),
so these routines and their pure-Python twins in ``_pycore`` are
bit-for-bit interchangeable.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def sample_rows(const cnp.int64_t[::1] rows, const double[:, ::1] cdf,
                const double[::1] u):
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t width = cdf.shape[1]
    cdef Py_ssize_t i, j
    cdef cnp.int64_t r
    cdef double v
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    with nogil:
        for i in range(n):
            r = rows[i]
            v = u[i]
            j = 0
            while j < width - 1 and cdf[r, j] <= v:
                j += 1
            o[i] = j
    return out


def shuffle(cnp.int64_t[::1] a, const double[::1] u):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef cnp.int64_t tmp
    with nogil:
        i = n - 1
        while i > 0:
            j = <Py_ssize_t>(u[i] * (i + 1))
            if j > i:
                j = i
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp
            i -= 1


def bincount(const cnp.int64_t[::1] a, Py_ssize_t size):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    out = np.zeros(size, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    with nogil:
        for i in range(n):
            o[a[i]] += 1
    return out
