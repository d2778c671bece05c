# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython twins of the hot kernels in ``_kernels_py``.

Single pass per point, no intermediate arrays; see the pure-Python module
for the maths.  Selected at import time by :mod:`husimi_kit.backend`.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()

BACKEND = "compiled"


def hermite_functions(x, int nmax):
    x_arr = np.ascontiguousarray(x, dtype=np.float64)
    shape = x_arr.shape
    cdef double[::1] xv = x_arr.ravel()
    cdef Py_ssize_t m = xv.shape[0]
    out = np.empty((nmax + 1, m), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double h0 = 0.7511255444649425  # pi**-0.25
    cdef Py_ssize_t j, n
    cdef double xi, c1, c2
    for j in range(m):
        xi = xv[j]
        o[0, j] = h0 * exp(-0.5 * xi * xi)
    if nmax >= 1:
        c1 = sqrt(2.0)
        for j in range(m):
            o[1, j] = c1 * xv[j] * o[0, j]
    for n in range(1, nmax):
        c1 = sqrt(2.0 / (n + 1))
        c2 = sqrt(n / (n + 1.0))
        for j in range(m):
            o[n + 1, j] = c1 * xv[j] * o[n, j] - c2 * o[n - 1, j]
    return out.reshape((nmax + 1,) + shape)


def coherent_amplitudes(z, int dim):
    z_arr = np.ascontiguousarray(z, dtype=np.complex128)
    cdef double complex[::1] zv = z_arr.ravel()
    cdef Py_ssize_t m = zv.shape[0]
    out = np.empty((m, dim), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t k, n
    cdef double complex zk, c
    cdef double w
    for k in range(m):
        zk = zv[k]
        w = exp(-0.5 * (zk.real * zk.real + zk.imag * zk.imag))
        c = w
        o[k, 0] = c
        for n in range(1, dim):
            c = c * zk / sqrt(<double> n)
            o[k, n] = c
    return out
