"""Power-series coefficients of the Riemann-Siegel correction functions.

With p the fractional part of sqrt(t / 2 pi) and z = p - 1/2,

    psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
           = -cos(2 pi z^2 - 5 pi / 8) / cos(2 pi z),

which is entire.  Its Taylor series about z = 0 is obtained by dividing the
numerator and denominator series in high precision, and the correction
functions C_0..C_2 are fixed linear combinations of derivatives of psi.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np

_N_TERMS = 110
_TRUNC = 1e-19  # |c_j| (1/2)^j below this is dropped; |z| <= 1/2


def _psi_series() -> list:
    two_pi = 2 * mpmath.pi
    c5, s5 = mpmath.cos(5 * mpmath.pi / 8), mpmath.sin(5 * mpmath.pi / 8)
    num = [mpmath.mpf(0)] * _N_TERMS
    den = [mpmath.mpf(0)] * _N_TERMS
    # cos(a - b) = cos a cos b + sin a sin b with a = 2 pi z^2, b = 5 pi / 8
    for j in range(_N_TERMS):
        if 4 * j < _N_TERMS:
            num[4 * j] += c5 * (-1) ** j * two_pi ** (2 * j) / mpmath.factorial(2 * j)
        if 4 * j + 2 < _N_TERMS:
            num[4 * j + 2] += s5 * (-1) ** j * two_pi ** (2 * j + 1) / mpmath.factorial(2 * j + 1)
        if 2 * j < _N_TERMS:
            den[2 * j] = (-1) ** j * two_pi ** (2 * j) / mpmath.factorial(2 * j)
    out = [mpmath.mpf(0)] * _N_TERMS
    for k in range(_N_TERMS):
        acc = num[k] - sum(den[j] * out[k - j] for j in range(1, k + 1))
        out[k] = acc / den[0]
    return [-c for c in out]


def _deriv(coeffs: list, m: int) -> list:
    c = list(coeffs)
    for _ in range(m):
        c = [(j + 1) * c[j + 1] for j in range(len(c) - 1)]
    return c


def _combine(terms) -> list:
    n = min(len(c) for _, c in terms)
    return [sum(w * c[j] for w, c in terms) for j in range(n)]


@lru_cache(maxsize=1)
def correction_coefficients() -> np.ndarray:
    """Float coefficients of C_0..C_2 in powers of z, shape (3, degree + 1)."""
    with mpmath.workdps(80):
        psi = _psi_series()
        pi2 = mpmath.pi**2
        d = {m: _deriv(psi, m) for m in (0, 2, 3, 6)}
        polys = [
            d[0],
            _combine([(-1 / (96 * pi2), d[3])]),
            _combine([(1 / (64 * pi2), d[2]), (1 / (18432 * pi2**2), d[6])]),
        ]
        degree = 0
        for poly in polys:
            for j, c in enumerate(poly):
                if abs(c) * mpmath.mpf(0.5) ** j > _TRUNC:
                    degree = max(degree, j)
        out = np.zeros((len(polys), degree + 1))
        for i, poly in enumerate(polys):
            for j in range(min(degree + 1, len(poly))):
                out[i, j] = float(poly[j])
    return out


@lru_cache(maxsize=1)
def correction_maxima() -> np.ndarray:
    """sup |C_k(z)| over z in [-1/2, 1/2], from a dense float sample."""
    coef = correction_coefficients()
    z = np.linspace(-0.5, 0.5, 20001)
    return np.array([np.max(np.abs(np.polynomial.polynomial.polyval(z, c))) for c in coef])
