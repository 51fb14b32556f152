"""Double-double kernels used by the Z(t) and theta(t) evaluators.

A double-double number is the unevaluated sum ``hi + lo`` of two float64
values with ``|lo| <= ulp(hi) / 2``.  Only the handful of operations the
phase computations need are provided; all are numba-compiled and release
the GIL so they can be driven from a thread pool.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np
from numba import njit

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker splitting constant


def _dd_const(x: mpmath.mpf) -> tuple[float, float]:
    hi = float(x)
    lo = float(x - mpmath.mpf(hi))
    return hi, lo


with mpmath.workdps(50):
    PI_HI, PI_LO = _dd_const(mpmath.pi)
    TWOPI_HI, TWOPI_LO = _dd_const(2 * mpmath.pi)
    LN2_HI, LN2_LO = _dd_const(mpmath.log(2))
    LN2PI_HI, LN2PI_LO = _dd_const(mpmath.log(2 * mpmath.pi))
    PI8_HI, PI8_LO = _dd_const(mpmath.pi / 8)

_LOG_TABLE_BITS = 12
_LOG_TABLE_BASE = 1 << (_LOG_TABLE_BITS - 1)  # 2048


@lru_cache(maxsize=1)
def log_table() -> np.ndarray:
    """ln(q) for q in [2048, 4096] as an (2049, 2) array of (hi, lo) pairs."""
    out = np.empty((_LOG_TABLE_BASE + 1, 2))
    with mpmath.workdps(40):
        for i in range(_LOG_TABLE_BASE + 1):
            out[i] = _dd_const(mpmath.log(_LOG_TABLE_BASE + i))
    return out


@njit(cache=True, nogil=True)
def two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


@njit(cache=True, nogil=True)
def quick_two_sum(a, b):
    s = a + b
    e = b - (s - a)
    return s, e


@njit(cache=True, nogil=True)
def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


@njit(cache=True, nogil=True)
def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


@njit(cache=True, nogil=True)
def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e += t
    s, e = quick_two_sum(s, e)
    e += f
    return quick_two_sum(s, e)


@njit(cache=True, nogil=True)
def dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e += al * b
    return quick_two_sum(p, e)


@njit(cache=True, nogil=True)
def log_dd(x, table):
    """Natural log of a positive double, accurate to about 1e-24 absolute.

    x is written as a * (1 + u) with a carrying only 12 significant bits, so
    ln(a) comes from the table plus a multiple of ln 2 and ln(1 + u) from a
    short series in |u| <= 2**-13.
    """
    m, e = math.frexp(x)
    q = int(round(m * 4096.0))
    k = e - 12
    a = math.ldexp(float(q), k)
    d = x - a  # exact (Sterbenz)
    u = d / a
    p, pe = two_prod(u, a)
    u_lo = ((d - p) - pe) / a
    tail = u * u * (-0.5 + u * (1.0 / 3.0 + u * (-0.25 + u * (0.2 + u * (-1.0 / 6.0)))))
    kh, kl = two_prod(float(k), LN2_HI)
    kl += float(k) * LN2_LO
    bh, bl = dd_add(table[q - 2048, 0], table[q - 2048, 1], kh, kl)
    return dd_add(bh, bl, u, u_lo + tail)


@njit(cache=True, nogil=True)
def reduce_2pi(hi, lo):
    """Reduce a double-double phase to a double in [-pi, pi]."""
    k = math.floor(hi / TWOPI_HI + 0.5)
    p, pe = two_prod(k, TWOPI_HI)
    pe += k * TWOPI_LO
    rh, rl = dd_add(hi, lo, -p, -pe)
    return rh + rl


@njit(cache=True, nogil=True)
def theta_dd(t, table):
    """Asymptotic theta(t) as a double-double; valid for t >= 50."""
    lh, ll = log_dd(t, table)
    lh, ll = dd_add(lh, ll, -LN2PI_HI, -LN2PI_LO)
    half = 0.5 * t
    ph, pl = dd_mul_d(lh, ll, half)
    ph, pl = dd_add(ph, pl, -half, 0.0)
    ph, pl = dd_add(ph, pl, -PI8_HI, -PI8_LO)
    r = 1.0 / t
    r2 = r * r
    corr = r * (1.0 / 48.0 + r2 * (7.0 / 5760.0 + r2 * (31.0 / 80640.0 + r2 * (127.0 / 430080.0))))
    return dd_add(ph, pl, corr, 0.0)


@njit(cache=True, nogil=True)
def theta_deriv(t, table):
    lh, ll = log_dd(t, table)
    lh, ll = dd_add(lh, ll, -LN2PI_HI, -LN2PI_LO)
    r2 = 1.0 / (t * t)
    corr = r2 * (1.0 / 48.0 + r2 * (7.0 / 1920.0 + r2 * (31.0 / 16128.0 + r2 * (127.0 / 61440.0))))
    return 0.5 * (lh + ll) - corr


@njit(cache=True, nogil=True)
def dd_div_dd(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = two_prod(q1, bh)
    pl += q1 * bl
    rh, rl = dd_add(ah, al, -ph, -pl)
    q2 = (rh + rl) / bh
    return quick_two_sum(q1, q2)


@njit(cache=True, nogil=True)
def phase_angle(ah, al, bh, bl):
    """Angle in [-pi, pi] of the double-double phase a - b given in turns.

    The fractional turn is kept as a double-double and only the final angle
    is rounded; rounding the turn first correlates the angle error with the
    angle and biases long cosine sums at the 1e-14 level.
    """
    s, e = two_sum(ah, -bh)
    fh = s - math.floor(s)
    fh, fl = quick_two_sum(fh, e + (al - bl))
    fh -= math.floor(fh + 0.5)
    p, pe = two_prod(TWOPI_HI, fh)
    return p + (pe + (TWOPI_HI * fl + TWOPI_LO * fh))


@njit(cache=True, nogil=True)
def turns_table_range(n_lo, n_hi, table):
    """(hi, lo) of ln(n) / (2 pi) for the integers n_lo..n_hi-1."""
    n = n_hi - n_lo
    out_hi = np.empty(n)
    out_lo = np.empty(n)
    for i in range(n):
        h, l = log_dd(float(n_lo + i), table)
        h, l = dd_div_dd(h, l, TWOPI_HI, TWOPI_LO)
        out_hi[i] = h
        out_lo[i] = l
    return out_hi, out_lo
