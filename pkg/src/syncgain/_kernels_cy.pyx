# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels for linear flows.

Same contracts as ``_kernels_py``; the stepping loop runs without Python
overhead.  Matrix-vector products use a plain C loop below the BLAS
crossover dimension and ``dgemv`` above it, so the kernel wins at small
state dimensions without losing to BLAS at large ones.
"""

from libc.math cimport isfinite

from scipy.linalg.cython_blas cimport dgemv

import numpy as np

cdef Py_ssize_t BLAS_CROSSOVER = 64


cdef void _matvec(const double[:, ::1] m, const double[::1] x, double[::1] y) noexcept nogil:
    cdef Py_ssize_t i, j, d = m.shape[0]
    cdef double acc
    if d >= BLAS_CROSSOVER:
        _matvec_blas(m, x, y)
    else:
        for i in range(d):
            acc = 0.0
            for j in range(d):
                acc += m[i, j] * x[j]
            y[i] = acc


cdef void _matvec_blas(const double[:, ::1] m, const double[::1] x, double[::1] y) noexcept nogil:
    # row-major m viewed column-major is m^T; trans="T" undoes that
    cdef int d = <int> m.shape[0]
    cdef int inc = 1
    cdef double one = 1.0, zero = 0.0
    dgemv("T", &d, &d, &one, <double*> &m[0, 0], &d, <double*> &x[0], &inc, &zero, &y[0], &inc)


cdef bint _all_finite(const double[::1] x) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(x.shape[0]):
        if not isfinite(x[i]):
            return False
    return True


def rk4_path(m, x0, double h, Py_ssize_t n_steps, Py_ssize_t stride):
    """Classical fourth-order Runge-Kutta samples of ``x' = m x``.

    Returns ``(out, bad_step)``: ``out`` holds the state every ``stride``
    steps (``n_steps // stride + 1`` rows); ``bad_step`` is the 1-based
    index of the first step producing a non-finite state, or -1.
    """
    cdef const double[:, ::1] mv = np.ascontiguousarray(m, dtype=np.float64)
    x_arr = np.array(x0, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef Py_ssize_t d = x.shape[0]
    out_arr = np.zeros((n_steps // stride + 1, d))
    cdef double[:, ::1] out = out_arr
    k1_arr = np.empty(d); k2_arr = np.empty(d)
    k3_arr = np.empty(d); k4_arr = np.empty(d)
    tmp_arr = np.empty(d)
    cdef double[::1] k1 = k1_arr, k2 = k2_arr, k3 = k3_arr, k4 = k4_arr, tmp = tmp_arr
    cdef double half = 0.5 * h, sixth = h / 6.0
    cdef Py_ssize_t step, i
    cdef Py_ssize_t bad = -1

    with nogil:
        for i in range(d):
            out[0, i] = x[i]
        for step in range(1, n_steps + 1):
            _matvec(mv, x, k1)
            for i in range(d):
                tmp[i] = x[i] + half * k1[i]
            _matvec(mv, tmp, k2)
            for i in range(d):
                tmp[i] = x[i] + half * k2[i]
            _matvec(mv, tmp, k3)
            for i in range(d):
                tmp[i] = x[i] + h * k3[i]
            _matvec(mv, tmp, k4)
            for i in range(d):
                x[i] = x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not _all_finite(x):
                bad = step
                break
            if step % stride == 0:
                for i in range(d):
                    out[step // stride, i] = x[i]
    return out_arr, bad


def propagate_path(r, x0, Py_ssize_t n_steps, Py_ssize_t stride):
    """Samples of the recurrence ``x <- r x`` (one-step propagator mode)."""
    cdef const double[:, ::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    x_arr = np.array(x0, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef Py_ssize_t d = x.shape[0]
    out_arr = np.zeros((n_steps // stride + 1, d))
    cdef double[:, ::1] out = out_arr
    next_arr = np.empty(d)
    cdef double[::1] nxt = next_arr
    cdef Py_ssize_t step, i
    cdef Py_ssize_t bad = -1

    with nogil:
        for i in range(d):
            out[0, i] = x[i]
        for step in range(1, n_steps + 1):
            _matvec(rv, x, nxt)
            for i in range(d):
                x[i] = nxt[i]
            if not _all_finite(x):
                bad = step
                break
            if step % stride == 0:
                for i in range(d):
                    out[step // stride, i] = x[i]
    return out_arr, bad
