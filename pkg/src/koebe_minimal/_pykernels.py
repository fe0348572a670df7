"""Pure numpy implementation of the hot kernels (fallback backend)."""
import numpy as np

from ._dilog_series import CATALAN, gd_integral_coefficients

_COEF = np.array(gd_integral_coefficients())
_ODD = np.arange(1, 80, 2, dtype=float)
_ODD_SIGN = np.where((_ODD.astype(int) // 2) % 2 == 0, 1.0, -1.0)


def _f_negative(x):
    # x <= -1: sum over odd k of (-1)^((k-1)/2) e^{kx} / k^2
    return (_ODD_SIGN / _ODD**2 * np.exp(np.multiply.outer(x, _ODD))).sum(axis=-1)


def _f_central(x):
    x2 = x * x
    acc = np.zeros_like(x)
    for c in _COEF[::-1]:
        acc = acc * x2 + c
    return CATALAN + np.pi * x / 4.0 + 0.5 * acc * x2


def dilog_f_array(x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.empty_like(x)
    small = ax < 1.0
    out[small] = _f_central(x[small])
    big = ~small
    out[big] = _f_negative(-ax[big])
    pos = big & (x > 0)
    out[pos] += np.pi * x[pos] / 2.0
    return out


def dilog_f(x):
    return float(dilog_f_array(np.array([x], dtype=float))[0])


def functional(rho, ei, ej, phi):
    rj, rk = rho[ei], rho[ej]
    d = rk - rj
    s = rj + rk
    F = dilog_f_array
    edge = F(d) + F(-d) - F(s) - F(-s) - np.pi * s
    return float(edge.sum() + np.dot(phi, rho))


def gradient(rho, ei, ej, phi):
    rj, rk = rho[ei], rho[ej]
    aj = np.arctan(np.exp(rk - rj)) + np.arctan(np.exp(rk + rj))
    ak = np.arctan(np.exp(rj - rk)) + np.arctan(np.exp(rk + rj))
    g = np.array(phi, dtype=float, copy=True)
    np.subtract.at(g, ei, 2.0 * aj)
    np.subtract.at(g, ej, 2.0 * ak)
    return g


def ones_derivative(rho, ei, ej, phi, t):
    """d/dt S(rho + t) and d^2/dt^2 S(rho + t)."""
    s = rho[ei] + rho[ej] + 2.0 * t
    d1 = float(np.sum(phi)) - float(np.sum(np.pi + 4.0 * np.arctan(np.exp(s))))
    d2 = -float(np.sum(4.0 / np.cosh(s)))
    return d1, d2


def hessian(rho, ei, ej):
    n = len(rho)
    rj, rk = rho[ei], rho[ej]
    a = 1.0 / np.cosh(rk - rj)
    b = 1.0 / np.cosh(rk + rj)
    h = np.zeros((n, n))
    np.add.at(h, (ei, ei), a - b)
    np.add.at(h, (ej, ej), a - b)
    np.add.at(h, (ei, ej), -a - b)
    np.add.at(h, (ej, ei), -a - b)
    return h
