# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense kernels for the unitary interpreter."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def apply_local(const double complex[:, ::1] m, const double complex[:, ::1] g,
                Py_ssize_t left, Py_ssize_t right):
    """Return (I_left (x) g (x) I_right) @ m without forming the Kronecker product."""
    cdef Py_ssize_t gd = g.shape[0]
    cdef Py_ssize_t cols = m.shape[1]
    cdef Py_ssize_t rc = right * cols
    cdef Py_ssize_t l, i, j, k, src, dst
    cdef double complex coef
    out_arr = np.zeros((m.shape[0], cols), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef const double complex* mp = &m[0, 0]
    cdef double complex* op = &out[0, 0]
    with nogil:
        for l in range(left):
            for i in range(gd):
                dst = (l * gd + i) * rc
                for j in range(gd):
                    coef = g[i, j]
                    if coef == 0:
                        continue
                    src = (l * gd + j) * rc
                    for k in range(rc):
                        op[dst + k] = op[dst + k] + coef * mp[src + k]
    return out_arr


def kron(const double complex[:, ::1] a, const double complex[:, ::1] b):
    cdef Py_ssize_t ar = a.shape[0], ac = a.shape[1]
    cdef Py_ssize_t br = b.shape[0], bc = b.shape[1]
    cdef Py_ssize_t i, j, k, l
    cdef double complex x
    out_arr = np.empty((ar * br, ac * bc), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    with nogil:
        for i in range(ar):
            for j in range(ac):
                x = a[i, j]
                for k in range(br):
                    for l in range(bc):
                        out[i * br + k, j * bc + l] = x * b[k, l]
    return out_arr


def controlled(const double complex[:, ::1] u):
    """Block matrix |0><0| (x) I + |1><1| (x) u."""
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, j
    out_arr = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i, i] = 1.0
            for j in range(n):
                out[n + i, n + j] = u[i, j]
    return out_arr


def max_abs_diff(const double complex[:, ::1] a, const double complex[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0] * a.shape[1]
    cdef Py_ssize_t k
    cdef const double complex* ap = &a[0, 0]
    cdef const double complex* bp = &b[0, 0]
    cdef double best = 0.0, d, re, im
    with nogil:
        for k in range(n):
            re = ap[k].real - bp[k].real
            im = ap[k].imag - bp[k].imag
            d = re * re + im * im
            if d > best:
                best = d
    return best ** 0.5
