# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: dilogarithm primitive, functional, gradient, Hessian."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, atan, cosh, fabs, M_PI

from ._dilog_series import CATALAN as _CATALAN, gd_integral_coefficients

cnp.import_array()

DEF NCOEF = 60
cdef double COEF[NCOEF]
cdef double CAT = _CATALAN
for _i, _c in enumerate(gd_integral_coefficients(NCOEF)):
    COEF[_i] = _c


cdef inline double _f(double x) nogil:
    cdef double ax = fabs(x), acc, x2, e, ek, term, out
    cdef int i, k, sign
    if ax < 1.0:
        x2 = x * x
        acc = 0.0
        for i in range(NCOEF - 1, -1, -1):
            acc = acc * x2 + COEF[i]
        return CAT + M_PI * x / 4.0 + 0.5 * acc * x2
    e = exp(-ax)
    e2 = e * e
    ek = e
    out = 0.0
    sign = 1
    k = 1
    while k < 80:
        out += sign * ek / (k * k)
        ek *= e2
        sign = -sign
        k += 2
    if x > 0:
        out += M_PI * x / 2.0
    return out


def dilog_f(double x):
    return _f(x)


def dilog_f_array(x):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = _f(xv[i])
    return out.reshape(np.shape(x))


def functional(double[::1] rho, cnp.int64_t[::1] ei, cnp.int64_t[::1] ej, double[::1] phi):
    cdef Py_ssize_t e, j
    cdef double total = 0.0, d, s
    with nogil:
        for e in range(ei.shape[0]):
            d = rho[ej[e]] - rho[ei[e]]
            s = rho[ej[e]] + rho[ei[e]]
            total += _f(d) + _f(-d) - _f(s) - _f(-s) - M_PI * s
        for j in range(rho.shape[0]):
            total += phi[j] * rho[j]
    return total


def gradient(double[::1] rho, cnp.int64_t[::1] ei, cnp.int64_t[::1] ej, double[::1] phi):
    out = np.array(phi, dtype=np.float64, copy=True)
    cdef double[::1] g = out
    cdef Py_ssize_t e
    cdef double rj, rk, es, ed
    with nogil:
        for e in range(ei.shape[0]):
            rj = rho[ei[e]]
            rk = rho[ej[e]]
            es = 2.0 * atan(exp(rk + rj))
            # atan(e^x) + atan(e^-x) = pi/2
            ed = 2.0 * atan(exp(rk - rj))
            g[ei[e]] -= ed + es
            g[ej[e]] -= M_PI - ed + es
    return out


def ones_derivative(double[::1] rho, cnp.int64_t[::1] ei, cnp.int64_t[::1] ej, double[::1] phi, double t):
    cdef Py_ssize_t e, j
    cdef double d1 = 0.0, d2 = 0.0, s
    with nogil:
        for j in range(phi.shape[0]):
            d1 += phi[j]
        for e in range(ei.shape[0]):
            s = rho[ei[e]] + rho[ej[e]] + 2.0 * t
            d1 -= M_PI + 4.0 * atan(exp(s))
            d2 -= 4.0 / cosh(s)
    return d1, d2


def hessian(double[::1] rho, cnp.int64_t[::1] ei, cnp.int64_t[::1] ej):
    cdef Py_ssize_t n = rho.shape[0], e, a, b
    out = np.zeros((n, n))
    cdef double[:, ::1] h = out
    cdef double p, q
    with nogil:
        for e in range(ei.shape[0]):
            a = ei[e]
            b = ej[e]
            p = 1.0 / cosh(rho[b] - rho[a])
            q = 1.0 / cosh(rho[b] + rho[a])
            h[a, a] += p - q
            h[b, b] += p - q
            h[a, b] -= p + q
            h[b, a] -= p + q
    return out
