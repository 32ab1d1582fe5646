# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: row scatter-adds and edge-wise clipped dot sums.

Same contracts and accumulation order as fggcd._kernels.pure.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def scatter_add_rows(cnp.float64_t[:, ::1] out, cnp.int64_t[::1] index,
                     cnp.float64_t[:, ::1] rows):
    cdef Py_ssize_t m = index.shape[0]
    cdef Py_ssize_t e = out.shape[1]
    cdef Py_ssize_t i, j, r
    for i in range(m):
        r = index[i]
        for j in range(e):
            out[r, j] += rows[i, j]
    return np.asarray(out)


def scatter_add_vec(cnp.float64_t[::1] out, cnp.int64_t[::1] index,
                    cnp.float64_t[::1] values):
    cdef Py_ssize_t m = index.shape[0]
    cdef Py_ssize_t i
    for i in range(m):
        out[index[i]] += values[i]
    return np.asarray(out)


def clipped_edge_dot_sums(cnp.float64_t[:, ::1] z, cnp.int64_t[::1] src,
                          cnp.int64_t[::1] dst, Py_ssize_t n):
    cdef Py_ssize_t m = src.shape[0]
    cdef Py_ssize_t e = z.shape[1]
    cdef Py_ssize_t i, j
    cdef cnp.float64_t d
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sums = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] sv = sums
    for i in range(m):
        d = 0.0
        for j in range(e):
            d += z[src[i], j] * z[dst[i], j]
        if d > 0.0:
            sv[src[i]] += d
    return sums
