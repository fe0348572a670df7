"""Series data for ``F(x) = Im Li2(i e^x)``, shared by both kernel backends.

Near zero ``F(x) = G + pi x / 4 + (1/2) int_0^x gd(u) du`` with ``G`` Catalan's
constant and ``gd`` the Gudermannian, whose Maclaurin coefficients are the
Euler (secant) numbers.  The series has radius pi/2; it is used on
``|x| < 1``.
"""
from fractions import Fraction
from math import comb, factorial

CATALAN = 0.91596559417721901505460351493238411077414937428167
N_TERMS = 60


def _euler_numbers(n: int) -> list[int]:
    """Signed Euler numbers E_0, E_2, ..., E_{2(n-1)}."""
    e = [1]
    for m in range(1, n):
        e.append(-sum(comb(2 * m, 2 * k) * e[k] for k in range(m)))
    return e


def gd_integral_coefficients(n: int = N_TERMS) -> list[float]:
    """Coefficients c_n of ``int_0^x gd = sum c_n x^(2n+2)``."""
    return [float(Fraction(e, factorial(2 * i + 2))) for i, e in enumerate(_euler_numbers(n))]
