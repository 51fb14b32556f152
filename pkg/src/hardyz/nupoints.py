"""Shifted Gram points: solutions of theta(t) = pi * nu + tau."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from numba import njit

from . import _dd
from ._dd import PI_HI, PI_LO, dd_add, theta_dd, theta_deriv, two_prod
from ._parallel import run_chunked
from .errors import DomainError, NoConvergenceError
from .special import ASYMPTOTIC_T_MIN, _theta_mp, theta

#: relative residual accepted from the solver
SOLVER_RTOL = 1e-10
#: abscissae this close to a window edge count as lying on it
EDGE_TOL = 1e-9

_HALF_PI = 0.5 * math.pi
_THETA_AT_50 = theta(ASYMPTOTIC_T_MIN).value
# theta has its minimum near t = 6.29; below that the nu-points are not defined
_T_FLOOR = 6.5


@dataclass(frozen=True)
class NuPoint:
    nu: int
    tau: float
    t: float


@dataclass(frozen=True)
class WindowSpec:
    """The window [T, T + H] and which nu-indices to keep."""

    T: float
    H: float
    parity: str = "all"

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T >= 1000.0):
            raise DomainError(f"WindowSpec.T must be >= 1000, got {self.T}")
        if not (0.0 < self.H <= self.T):
            raise DomainError(f"WindowSpec.H must satisfy 0 < H <= T, got {self.H}")
        if self.parity not in ("all", "even", "odd"):
            raise DomainError(f"WindowSpec.parity must be all/even/odd, got {self.parity!r}")


def canonical_target(nu, tau):
    """Rewrite (nu, tau) so that tau lies in (-pi/2, pi/2].

    pi * nu + tau is unchanged, and the two labels of a shared endpoint such as
    t_{2k}(pi/2) = t_{2k+1}(-pi/2) map to the same pair, so the solver returns
    bit-identical abscissae for them.
    """
    nu = np.array(nu, dtype=np.int64, copy=True)
    tau = np.array(tau, dtype=float, copy=True)
    nu, tau = np.broadcast_arrays(nu, tau)
    nu, tau = nu.copy(), tau.copy()
    up = tau > _HALF_PI
    nu[up] += 1
    tau[up] -= math.pi
    down = tau <= -_HALF_PI
    nu[down] -= 1
    tau[down] += math.pi
    return nu, tau


@njit(cache=True, nogil=True)
def _target_dd(nu, tau):
    p, pe = two_prod(float(nu), PI_HI)
    pe += float(nu) * PI_LO
    return dd_add(p, pe, tau, 0.0)


@njit(cache=True, nogil=True)
def _ulp(x):
    m, e = math.frexp(x)
    return math.ldexp(1.0, e - 53)


@njit(cache=True, nogil=True)
def _initial_guess(phi):
    # invert theta ~ (t/2) ln(t / 2 pi e) - pi/8 by fixed-point iteration in x = t / (2 pi e)
    c = (phi + math.pi / 8.0) / (math.pi * math.e)
    x = c / math.log(c) if c > math.e else math.e
    for _ in range(2):
        x = c / math.log(x)
    return 2.0 * math.pi * math.e * x


@njit(cache=True, nogil=True)
def _residual(t, gh, gl, table):
    th, tl = theta_dd(t, table)
    rh, rl = dd_add(th, tl, -gh, -gl)
    return rh + rl


@njit(cache=True, nogil=True)
def _polish(t, gh, gl, table):
    """Walk to the neighbouring double with the smallest |residual|."""
    res = _residual(t, gh, gl, table)
    for _ in range(8):
        step = _ulp(t) if res < 0.0 else -_ulp(t)
        r2 = _residual(t + step, gh, gl, table)
        if abs(r2) >= abs(res):
            break
        t += step
        res = r2
    return t, res


@njit(cache=True, nogil=True)
def _solve_kernel(nus, taus, lo, hi, table, t_floor, out_t, out_res, out_ok):
    for i in range(lo, hi):
        gh, gl = _target_dd(nus[i], taus[i])
        t = max(_initial_guess(gh), t_floor)
        a = t_floor
        b = math.inf
        ok = False
        res = math.inf
        for _ in range(100):
            res = _residual(t, gh, gl, table)
            if res == 0.0:
                ok = True
                break
            if res < 0.0:
                a = max(a, t)
            else:
                b = min(b, t)
            step = res / theta_deriv(t, table)
            t_new = t - step
            if not (a < t_new < b):
                t_new = 0.5 * (a + b) if b < math.inf else 2.0 * t
            if abs(t_new - t) <= 2.0 * _ulp(t):
                t, res = _polish(t_new, gh, gl, table)
                ok = True
                break
            t = t_new
        out_t[i] = t
        out_res[i] = res
        out_ok[i] = ok and abs(res) <= 1e-10 * abs(gh)


def _solve_small(nu: int, tau: float) -> tuple[float, float]:
    """Bisection on mpmath theta for targets below theta(50)."""
    target = math.pi * nu + tau
    a, b = _T_FLOOR, ASYMPTOTIC_T_MIN
    with mpmath.workdps(30):
        tgt = mpmath.pi * nu + tau
        if _theta_mp(a)[0] > tgt:
            raise DomainError(f"nu-point target {target:.6g} lies below the monotone range of theta")
        for _ in range(200):
            m = 0.5 * (a + b)
            if m in (a, b):
                break
            if _theta_mp(m)[0] < tgt:
                a = m
            else:
                b = m
        ra = abs(float(_theta_mp(a)[0] - tgt))
        rb = abs(float(_theta_mp(b)[0] - tgt))
    return (a, ra) if ra <= rb else (b, rb)


def _check_inputs(nus, taus):
    if np.any(nus < 1):
        raise DomainError("nu must be >= 1")
    if np.any(~np.isfinite(taus)) or np.any(np.abs(taus) > math.pi):
        raise DomainError("tau must lie in [-pi, pi]")


def solve_nu_array(nus, tau) -> np.ndarray:
    """Abscissae t_nu(tau) for an array of indices (tau scalar or array)."""
    nus_in = np.asarray(nus, dtype=np.int64)
    taus_in = np.broadcast_to(np.asarray(tau, dtype=float), nus_in.shape)
    _check_inputs(nus_in, taus_in)
    cnu, ctau = canonical_target(nus_in.reshape(-1), taus_in.reshape(-1))
    cnu = np.ascontiguousarray(cnu)
    ctau = np.ascontiguousarray(ctau)
    out_t = np.empty(cnu.shape)
    out_res = np.empty(cnu.shape)
    out_ok = np.zeros(cnu.shape, dtype=np.bool_)
    phi = math.pi * cnu + ctau
    big = phi >= _THETA_AT_50
    idx_big = np.flatnonzero(big)
    if idx_big.size:
        table = _dd.log_table()
        sub_nu, sub_tau = cnu[idx_big], ctau[idx_big]
        sub_t, sub_res = np.empty(idx_big.size), np.empty(idx_big.size)
        sub_ok = np.zeros(idx_big.size, dtype=np.bool_)
        run_chunked(
            lambda a, b: _solve_kernel(sub_nu, sub_tau, a, b, table, ASYMPTOTIC_T_MIN, sub_t, sub_res, sub_ok),
            idx_big.size,
        )
        out_t[idx_big], out_res[idx_big], out_ok[idx_big] = sub_t, sub_res, sub_ok
    for i in np.flatnonzero(~big):
        out_t[i], out_res[i] = _solve_small(int(cnu[i]), float(ctau[i]))
        out_ok[i] = out_res[i] <= SOLVER_RTOL * max(abs(phi[i]), 1.0)
    if not np.all(out_ok):
        i = int(np.flatnonzero(~out_ok)[0])
        nu_bad = int(nus_in.reshape(-1)[i])
        raise NoConvergenceError(
            f"nu-point solver failed for nu={nu_bad}, tau={taus_in.reshape(-1)[i]}: "
            f"residual {out_res[i]:.3e} at t={out_t[i]!r}",
            bracket=(float(np.nextafter(out_t[i], -math.inf)), float(np.nextafter(out_t[i], math.inf))),
            nu=nu_bad,
        )
    return out_t.reshape(nus_in.shape)


def solve_nu_point(nu: int, tau: float = 0.0) -> NuPoint:
    """Solve theta(t) = pi * nu + tau (Newton with a bisection safeguard)."""
    t = solve_nu_array(np.array([nu]), tau)[0]
    return NuPoint(int(nu), float(tau), float(t))


def theta_residual(p: NuPoint) -> float:
    """theta(p.t) - (pi * nu + tau) evaluated in double-double."""
    th = theta(p.t)
    cnu, ctau = canonical_target(np.array([p.nu]), np.array([p.tau]))
    gh, gl = _target_dd(int(cnu[0]), float(ctau[0]))
    rh, rl = dd_add(th.value, th.value_lo, -gh, -gl)
    return rh + rl


def index_range(T: float, H: float, tau: float) -> tuple[int, int]:
    """Indices nu whose point t_nu(tau) may fall in [T, T + H], padded by one."""
    lo = theta(T).value
    hi = theta(T + H).value
    return int(math.floor((lo - tau) / math.pi)) - 1, int(math.ceil((hi - tau) / math.pi)) + 1


def window_arrays(w: WindowSpec, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """(nus, ts) of the window's nu-points in increasing t."""
    if not -math.pi <= tau <= math.pi:
        raise DomainError(f"tau must lie in [-pi, pi], got {tau}")
    n0, n1 = index_range(w.T, w.H, tau)
    nus = np.arange(max(n0, 1), n1 + 1, dtype=np.int64)
    ts = solve_nu_array(nus, tau)
    keep = (ts >= w.T - EDGE_TOL) & (ts < w.T + w.H - EDGE_TOL)
    if w.parity == "even":
        keep &= nus % 2 == 0
    elif w.parity == "odd":
        keep &= nus % 2 == 1
    return nus[keep], ts[keep]


def enumerate_window(w: WindowSpec, tau: float = 0.0) -> list[NuPoint]:
    """All nu-points t_nu(tau) in [T, T + H] of the requested parity.

    Points within 1e-9 of the left edge are included and points within 1e-9
    of the right edge excluded, so adjacent windows partition a long range.
    """
    nus, ts = window_arrays(w, tau)
    return [NuPoint(int(n), float(tau), float(t)) for n, t in zip(nus, ts)]


def expected_count(T: float, H: float) -> float:
    """Main term (H / 2 pi) ln(T / 2 pi) of the nu-point count."""
    return H / (2 * math.pi) * math.log(T / (2 * math.pi))


def mean_gap(T: float) -> float:
    """Main term 2 pi / ln(T / 2 pi) of consecutive nu-point spacing."""
    return 2 * math.pi / math.log(T / (2 * math.pi))
