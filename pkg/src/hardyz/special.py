"""Evaluation of theta(t), theta'(t) and Hardy's Z(t).

Two independent routes to Z are provided:

* :func:`rs_z` / :func:`rs_z_array` -- the Riemann-Siegel main sum plus up to
  two correction terms, in float64 with double-double phase reduction and
  compensated summation of the cosine sum.
* :func:`z_oracle` / :func:`z_oracle_array` -- Re[exp(i theta) zeta(1/2 + it)]
  with zeta summed by Euler-Maclaurin, either in mpmath at arbitrary
  precision or, for large t, by a compiled double-double kernel.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import mpmath
import numpy as np
from numba import njit

from . import _dd
from ._dd import TWOPI_HI, TWOPI_LO, dd_div_dd, phase_angle, theta_dd, theta_deriv, two_prod
from ._parallel import run_chunked
from ._rscoef import correction_coefficients, correction_maxima
from .errors import DomainError, PrecisionUnreachableError

THETA_T_MIN = 1.0
ASYMPTOTIC_T_MIN = 50.0
RS_T_MIN = 50.0
ORACLE_T_MIN = 2.0

#: err_bound = RS_SAFETY * (2 pi / t)^(1/4 + order/2) * sup|C_order|
RS_SAFETY = 2.0
#: largest digits count the compiled Euler-Maclaurin backend will accept
COMPILED_MAX_DIGITS = 13
#: above this t the mpmath backend is too slow to be useful
MPMATH_T_MAX = 2.0e5


@dataclass(frozen=True)
class ThetaValue:
    t: float
    value: float
    deriv: float
    value_lo: float = 0.0  # low word of the double-double value


@dataclass(frozen=True)
class ZValue:
    t: float
    value: float
    err_bound: float
    n_terms: int
    imag_residual: float = 0.0


@dataclass(frozen=True)
class EvalConfig:
    """Riemann-Siegel remainder order and oracle precision."""

    remainder_order: int = 2
    oracle_digits: int = 20

    def __post_init__(self):
        if self.remainder_order not in (0, 1, 2):
            raise DomainError(f"remainder_order must be 0, 1 or 2, got {self.remainder_order}")
        if self.oracle_digits < 15:
            raise DomainError(f"oracle_digits must be >= 15, got {self.oracle_digits}")


DEFAULT_CONFIG = EvalConfig()


# -- evaluation counter -----------------------------------------------------

_count_lock = threading.Lock()
_z_evals = 0


def _bump(n: int) -> None:
    global _z_evals
    with _count_lock:
        _z_evals += n


def z_eval_count() -> int:
    """Number of Riemann-Siegel Z evaluations since the last reset."""
    return _z_evals


def reset_z_eval_count() -> None:
    global _z_evals
    with _count_lock:
        _z_evals = 0


# -- tables of ln(n) / 2 pi and n^(-1/2) -----------------------------------


class _IntegerLogs:
    """Grow-only cache of double-double ln(n) / 2 pi and 1/sqrt(n), indexed by n."""

    def __init__(self):
        self._lock = threading.Lock()
        self.hi = np.zeros(1)
        self.lo = np.zeros(1)
        self.rsqrt = np.zeros(1)

    def upto(self, n_max: int):
        if n_max < len(self.hi):
            return self.hi, self.lo, self.rsqrt
        with self._lock:
            size = len(self.hi)
            if n_max >= size:
                new = max(n_max + 1, 2 * size, 4096)
                h, l = _dd.turns_table_range(size, new, _dd.log_table())
                self.hi = np.concatenate([self.hi, h])
                self.lo = np.concatenate([self.lo, l])
                self.rsqrt = np.concatenate([self.rsqrt, 1.0 / np.sqrt(np.arange(size, new, dtype=float))])
                if size == 1:
                    self.hi[0] = self.lo[0] = self.rsqrt[0] = 0.0
            return self.hi, self.lo, self.rsqrt


_LOGS = _IntegerLogs()


def rs_terms(t: float) -> int:
    """floor(sqrt(t / 2 pi)), corrected for rounding near perfect squares."""
    n = int(math.sqrt(t / TWOPI_HI))
    if (n + 1) * (n + 1) * TWOPI_HI <= t:
        n += 1
    elif n * n * TWOPI_HI > t:
        n -= 1
    return n


# -- theta ------------------------------------------------------------------


def _theta_mp(t: float, dps: int = 30):
    """theta and theta' from mpmath log-gamma/digamma (oracle path)."""
    with mpmath.workdps(dps):
        z = mpmath.mpc(0.25, 0.5 * t)
        val = mpmath.im(mpmath.loggamma(z)) - 0.5 * t * mpmath.log(mpmath.pi)
        der = 0.5 * mpmath.re(mpmath.digamma(z)) - 0.5 * mpmath.log(mpmath.pi)
        return val, der


def theta(t: float) -> ThetaValue:
    """theta(t) = Im ln Gamma(1/4 + it/2) - (t/2) ln pi and its derivative.

    The Stirling series is used for t >= 50 and mpmath's log-gamma below.
    """
    t = float(t)
    if not t >= THETA_T_MIN or not math.isfinite(t):
        raise DomainError(f"theta: t must be >= {THETA_T_MIN}, got {t}")
    if t < ASYMPTOTIC_T_MIN:
        val, der = _theta_mp(t)
        hi = float(val)
        return ThetaValue(t, hi, float(der), float(val - hi))
    table = _dd.log_table()
    hi, lo = theta_dd(t, table)
    return ThetaValue(t, hi, theta_deriv(t, table), lo)


@njit(cache=True, nogil=True)
def _theta_kernel(ts, lo, hi, table, out_hi, out_lo, out_d):
    for i in range(lo, hi):
        h, l = theta_dd(ts[i], table)
        out_hi[i] = h
        out_lo[i] = l
        out_d[i] = theta_deriv(ts[i], table)


def theta_array(ts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised asymptotic theta: returns (hi, lo, deriv); requires t >= 50."""
    ts = np.ascontiguousarray(ts, dtype=float)
    if ts.size and not np.all(ts >= ASYMPTOTIC_T_MIN):
        raise DomainError(f"theta_array: all t must be >= {ASYMPTOTIC_T_MIN}")
    out_hi, out_lo, out_d = (np.empty_like(ts) for _ in range(3))
    table = _dd.log_table()
    flat = [a.reshape(-1) for a in (ts, out_hi, out_lo, out_d)]
    run_chunked(lambda a, b: _theta_kernel(flat[0], a, b, table, *flat[1:]), ts.size)
    return out_hi, out_lo, out_d


# -- Riemann-Siegel ---------------------------------------------------------


@njit(cache=True, nogil=True)
def _horner(c, z):
    acc = 0.0
    for j in range(c.shape[0] - 1, -1, -1):
        acc = acc * z + c[j]
    return acc


@njit(cache=True, nogil=True)
def _rs_z_kernel(ts, lo, hi, order, coef, cmax, turn_hi, turn_lo, rsq, table, out_v, out_e, out_n):
    for i in range(lo, hi):
        t = ts[i]
        s = math.sqrt(t / TWOPI_HI)
        n_terms = int(s)
        if (n_terms + 1) * (n_terms + 1) * TWOPI_HI <= t:
            n_terms += 1
        elif n_terms * n_terms * TWOPI_HI > t:
            n_terms -= 1
        th, tl = theta_dd(t, table)
        th, tl = dd_div_dd(th, tl, TWOPI_HI, TWOPI_LO)
        acc = 0.0
        comp = 0.0
        for n in range(1, n_terms + 1):
            ph, pl = two_prod(t, turn_hi[n])
            pl += t * turn_lo[n]
            x = rsq[n] * math.cos(phase_angle(th, tl, ph, pl))
            tot = acc + x
            if abs(acc) >= abs(x):
                comp += (acc - tot) + x
            else:
                comp += (x - tot) + acc
            acc = tot
        value = 2.0 * (acc + comp)
        p = min(max(s - n_terms, 0.0), 1.0)
        z = p - 0.5
        a = math.sqrt(TWOPI_HI / t)
        base = math.sqrt(a)
        sign = 1.0 if (n_terms - 1) % 2 == 0 else -1.0
        corr = 0.0
        ak = 1.0
        for k in range(order):
            corr += _horner(coef[k], z) * ak
            ak *= a
        value += sign * base * corr
        out_v[i] = value
        out_e[i] = 2.0 * base * ak * cmax[order] + 8.0 * math.sqrt(n_terms) * 2.3e-16
        out_n[i] = n_terms


def _rs_eval(ts: np.ndarray, order: int):
    ts = np.ascontiguousarray(ts, dtype=float).reshape(-1)
    if ts.size and not np.all(ts >= RS_T_MIN):
        bad = ts[~(ts >= RS_T_MIN)][0]
        raise DomainError(f"rs_z: t must be >= {RS_T_MIN}, got {bad}")
    out_v, out_e = np.empty_like(ts), np.empty_like(ts)
    out_n = np.empty(ts.shape, dtype=np.int64)
    if ts.size == 0:
        return out_v, out_e, out_n
    turn_hi, turn_lo, rsq = _LOGS.upto(rs_terms(float(ts.max())) + 1)
    coef = correction_coefficients()
    cmax = correction_maxima()
    table = _dd.log_table()
    run_chunked(
        lambda a, b: _rs_z_kernel(ts, a, b, order, coef, cmax, turn_hi, turn_lo, rsq, table, out_v, out_e, out_n),
        ts.size,
    )
    _bump(ts.size)
    return out_v, out_e, out_n


def rs_z(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> ZValue:
    """Z(t) by the Riemann-Siegel formula with ``cfg.remainder_order`` corrections."""
    v, e, n = _rs_eval(np.array([float(t)]), cfg.remainder_order)
    return ZValue(float(t), float(v[0]), float(e[0]), int(n[0]))


def rs_z_array(ts, cfg: EvalConfig = DEFAULT_CONFIG, with_bounds: bool = False):
    """Vectorised :func:`rs_z`; returns values (and error bounds if asked)."""
    arr = np.asarray(ts, dtype=float)
    v, e, _ = _rs_eval(arr, cfg.remainder_order)
    v = v.reshape(arr.shape)
    if with_bounds:
        return v, e.reshape(arr.shape)
    return v


def rs_error_constant(order: int) -> float:
    """C such that err_bound <= C t^(-1/4 - order/2) (plus float rounding)."""
    return RS_SAFETY * (2 * math.pi) ** (0.25 + 0.5 * order) * correction_maxima()[order]


# -- Euler-Maclaurin oracle -------------------------------------------------


def _bernoulli_ratios(k_max: int = 120) -> np.ndarray:
    """B_{2k} / (2k)! for k = 1..k_max."""
    with mpmath.workdps(30):
        return np.array([float(mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)) for k in range(1, k_max + 1)])


_BERN = _bernoulli_ratios()


@njit(cache=True, nogil=True)
def _em_zeta_kernel(t, n_cut, turn_hi, turn_lo, rsq, bern):
    """zeta(1/2 + it) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2 + Bernoulli tail.

    Returns (re, im, tail_bound).
    """
    re_acc = 0.0
    re_c = 0.0
    im_acc = 0.0
    im_c = 0.0
    for n in range(1, n_cut):
        ph, pl = two_prod(t, turn_hi[n])
        pl += t * turn_lo[n]
        r = phase_angle(ph, pl, 0.0, 0.0)
        x = rsq[n] * math.cos(r)
        y = -rsq[n] * math.sin(r)
        tot = re_acc + x
        if abs(re_acc) >= abs(x):
            re_c += (re_acc - tot) + x
        else:
            re_c += (x - tot) + re_acc
        re_acc = tot
        tot = im_acc + y
        if abs(im_acc) >= abs(y):
            im_c += (im_acc - tot) + y
        else:
            im_c += (y - tot) + im_acc
        im_acc = tot
    s = complex(0.5, t)
    nf = float(n_cut)
    ph, pl = two_prod(t, turn_hi[n_cut])
    pl += t * turn_lo[n_cut]
    r = phase_angle(ph, pl, 0.0, 0.0)
    n_pow = rsq[n_cut] * complex(math.cos(r), -math.sin(r))  # N^-s
    total = n_pow * nf / (s - 1.0) + 0.5 * n_pow
    fac = s * n_pow / nf
    last = 0.0
    for k in range(1, bern.shape[0] + 1):
        term = bern[k - 1] * fac
        total += term
        last = abs(term)
        if last < 1e-22:
            break
        fac = fac * (s + (2 * k - 1)) * (s + 2 * k) / (nf * nf)
    return re_acc + re_c + total.real, im_acc + im_c + total.imag, 2.0 * last


def _theta_mod_2pi(t: float) -> float:
    with mpmath.workdps(40):
        val, _ = _theta_mp(t, 40)
        return float(mpmath.fmod(val, 2 * mpmath.pi))


def _oracle_compiled(t: float, digits: int) -> ZValue:
    # Bernoulli terms then shrink by (t / 2 pi N)^2 ~ 0.69 per step
    n_cut = int(0.6 * t / math.pi) + 16
    turn_hi, turn_lo, rsq = _LOGS.upto(n_cut + 1)
    zr, zi, tail = _em_zeta_kernel(t, n_cut, turn_hi, turn_lo, rsq, _BERN)
    th = _theta_mod_2pi(t)
    c, s = math.cos(th), math.sin(th)
    value = c * zr - s * zi
    imag = s * zr + c * zi
    rounding = 2.0 * math.sqrt(n_cut) * (t * 7e-24 + 2.3e-16) + 4.6e-16 * math.hypot(zr, zi)
    bound = tail + rounding
    if bound > 10.0 ** (-digits + 2):
        raise PrecisionUnreachableError(
            f"compiled oracle reaches only ~{bound:.1e} at t={t}, {digits} digits requested"
        )
    return ZValue(t, value, bound, n_cut, imag)


def _oracle_mpmath(t: float, digits: int) -> ZValue:
    if t > MPMATH_T_MAX:
        raise PrecisionUnreachableError(
            f"arbitrary-precision Euler-Maclaurin is limited to t <= {MPMATH_T_MAX:g}; "
            f"request <= {COMPILED_MAX_DIGITS} digits for t={t}"
        )
    with mpmath.workdps(digits + 10):
        s = mpmath.mpc(0.5, t)
        # a = 2 keeps mpmath on its Euler-Maclaurin (Hurwitz) path
        zeta = 1 + mpmath.zeta(s, 2)
        th, _ = _theta_mp(t, digits + 10)
        w = mpmath.expj(th) * zeta
        return ZValue(t, float(w.real), 10.0 ** (-digits), 0, float(w.imag))


def z_oracle(t: float, digits: int = 20, backend: str = "auto") -> ZValue:
    """Independent Z(t) = Re[exp(i theta) zeta(1/2 + it)] via Euler-Maclaurin.

    ``backend`` is ``"mpmath"`` (arbitrary precision, t <= 2e5),
    ``"compiled"`` (double-double kernel, at most 13 digits) or ``"auto"``.
    ``n_terms`` of the result is the Euler-Maclaurin cut for the compiled
    backend and 0 for mpmath.
    """
    t = float(t)
    if not t >= ORACLE_T_MIN:
        raise DomainError(f"z_oracle: t must be >= {ORACLE_T_MIN}, got {t}")
    if digits < 1:
        raise DomainError("z_oracle: digits must be positive")
    if backend == "auto":
        backend = "compiled" if (digits <= COMPILED_MAX_DIGITS and t >= 1e4) else "mpmath"
    if backend == "compiled":
        if digits > COMPILED_MAX_DIGITS:
            raise PrecisionUnreachableError(
                f"compiled oracle supports at most {COMPILED_MAX_DIGITS} digits, got {digits}"
            )
        return _oracle_compiled(t, digits)
    if backend == "mpmath":
        return _oracle_mpmath(t, digits)
    raise ValueError(f"unknown oracle backend {backend!r}")


def z_oracle_array(ts, digits: int = 10, backend: str = "auto") -> np.ndarray:
    return np.array([z_oracle(t, digits, backend).value for t in np.asarray(ts, dtype=float).reshape(-1)])
