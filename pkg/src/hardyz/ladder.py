"""A numerical Jacob's ladder: phi_1 with d phi_1 / dt = omega(t) Z(t)^2.

Integrals of f(phi_1(t)) omega(t) Z(t)^2 over a pulled-back set equal plain
integrals of f over the original set, which lets the second-order results of
:mod:`hardyz.quad` be re-derived as third-order ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre
from scipy.interpolate import PchipInterpolator

from . import quad
from .errors import CoverageError, DomainError, HardyZError, NoConvergenceError
from .nupoints import WindowSpec, mean_gap
from .quad import (
    DEFAULT_TOL,
    DEFAULT_TOLERANCES,
    NODES,
    PANELS_PER_GAP,
    IntegralResult,
    Tolerances,
    VerificationReport,
    _Cell,
    cached_integral,
    cached_partition,
    cached_sets,
    error_budget_scale,
    integrate_panels,
    make_report,
    rs_breakpoints,
)
from .sets import DisjointIntervalSet
from .special import ASYMPTOTIC_T_MIN, DEFAULT_CONFIG, EvalConfig, rs_z_array

OMEGA_MODE = "inverse_log"
#: |phi_1(reverse_point(y)) - y| allowed
REVERSE_TOL = 1e-8
#: phi_1 carries ~1 ulp of absolute rounding, which Z' turns into relative noise
#: near 1e-9 in Z(phi_1(t)); tighter panel tolerances only buy noise
THIRD_ORDER_TOL = 1e-8


def omega(t):
    """Weight 1 / ln t (the {1 + O(ln ln t / ln t)} factor is dropped)."""
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr >= ASYMPTOTIC_T_MIN)):
        raise DomainError(f"omega: t must be >= {ASYMPTOTIC_T_MIN}")
    out = 1.0 / np.log(arr)
    return float(out) if out.ndim == 0 else out


# Node values -> coefficients of the antiderivative (from -1) and of the
# interpolant itself, both in the Legendre basis on [-1, 1].
_VINV = np.linalg.inv(legendre.legvander(NODES, 14))
_INTEG = np.column_stack([legendre.legint(_VINV[:, j], lbnd=-1) for j in range(15)])


@dataclass
class LadderGrid:
    """phi_1 on [ts[0], ts[-1]] as a piecewise degree-15 polynomial.

    ``phis[k] = phi_1(ts[k])``.  On panel k, phi_1 is phis[k] plus the exact
    antiderivative of the degree-14 interpolant of omega Z^2 through the
    Gauss-Kronrod nodes, so its integral over the panel is the K15 value.
    """

    ts: np.ndarray
    phis: np.ndarray
    omega_mode: str
    anti: np.ndarray  # (n_panels, 16) antiderivative coefficients, scaled by h
    deriv: np.ndarray  # (n_panels, 15) interpolant coefficients
    panel_err: np.ndarray
    n_evals: int

    def __post_init__(self):
        self._inverse = PchipInterpolator(self.phis, self.ts)

    @property
    def t_lo(self) -> float:
        return float(self.ts[0])

    @property
    def t_hi(self) -> float:
        return float(self.ts[-1])

    @property
    def err_total(self) -> float:
        return math.fsum(self.panel_err)

    def _locate(self, t):
        k = np.searchsorted(self.ts, t, side="right") - 1
        k = np.clip(k, 0, self.ts.size - 2)
        a, b = self.ts[k], self.ts[k + 1]
        u = np.clip((2.0 * t - a - b) / (b - a), -1.0, 1.0)
        return k, u

    def phi(self, t):
        """phi_1(t) for t in [ts[0], ts[-1]]."""
        arr = np.asarray(t, dtype=float)
        flat = arr.reshape(-1)
        if flat.size and (flat.min() < self.ts[0] or flat.max() > self.ts[-1]):
            raise CoverageError(f"t outside the ladder range [{self.ts[0]}, {self.ts[-1]}]")
        k, u = self._locate(flat)
        v = np.einsum("ij,ij->i", legendre.legvander(u, 15), self.anti[k])
        out = self.phis[k] + v
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def slope(self, t):
        """d phi_1 / dt from the panel interpolant."""
        arr = np.asarray(t, dtype=float).reshape(-1)
        k, u = self._locate(arr)
        return np.einsum("ij,ij->i", legendre.legvander(u, 14), self.deriv[k])


def _weighted_square(cfg: EvalConfig):
    def f(ts):
        z, e = rs_z_array(ts, cfg, with_bounds=True)
        w = 1.0 / np.log(ts)
        return w * z * z, w * e * (2.0 * np.abs(z) + e)

    return f


def build_ladder(
    t_lo: float, t_hi: float, step_control: float = DEFAULT_TOL, cfg: EvalConfig = DEFAULT_CONFIG
) -> LadderGrid:
    """Cumulative adaptive quadrature of omega Z^2 with phi_1(t_lo) = t_lo."""
    if not (ASYMPTOTIC_T_MIN <= t_lo < t_hi and math.isfinite(t_hi)):
        raise DomainError(f"ladder range must satisfy {ASYMPTOTIC_T_MIN} <= t_lo < t_hi, got [{t_lo}, {t_hi}]")
    if t_hi - t_lo > t_lo / math.log(t_lo):
        raise DomainError(f"ladder length {t_hi - t_lo:g} exceeds T / ln T = {t_lo / math.log(t_lo):g}")
    if not step_control > 0:
        raise DomainError("step_control must be positive")
    ps = integrate_panels([t_lo], [t_hi], _weighted_square(cfg), step_control, rs_breakpoints(t_lo, t_hi),
                          keep_samples=True)
    ts = np.concatenate([ps.a, ps.b[-1:]])
    phis = np.empty(ts.size)
    # Neumaier running sum keeps every prefix correctly rounded in practice
    acc, comp = float(t_lo), 0.0
    phis[0] = acc
    for i, v in enumerate(ps.value):
        tot = acc + v
        comp += (acc - tot) + v if abs(acc) >= abs(v) else (v - tot) + acc
        acc = tot
        phis[i + 1] = acc + comp
    h = 0.5 * (ps.b - ps.a)
    deriv = ps.samples @ _VINV.T
    anti = h[:, None] * (ps.samples @ _INTEG.T)
    if np.any(np.diff(phis) <= 0):
        raise NoConvergenceError("ladder is not strictly increasing; omega Z^2 vanished on a whole panel")
    return LadderGrid(ts, phis, OMEGA_MODE, anti, deriv, ps.err, ps.n_evals)


def reverse_points(ys, g: LadderGrid) -> np.ndarray:
    """Vectorised :func:`reverse_point`."""
    y = np.asarray(ys, dtype=float).reshape(-1)
    if y.size == 0:
        return y.copy()
    if y.min() < g.phis[0] or y.max() > g.phis[-1]:
        raise CoverageError(f"target outside the ladder image [{g.phis[0]}, {g.phis[-1]}]")
    k = np.clip(np.searchsorted(g.phis, y, side="right") - 1, 0, g.ts.size - 2)
    a, b = g.ts[k].copy(), g.ts[k + 1].copy()
    on_node = y == g.phis[k]
    t = np.clip(g._inverse(y), a, b)
    t[on_node] = a[on_node]
    active = ~on_node
    for _ in range(100):
        if not np.any(active):
            break
        idx = np.flatnonzero(active)
        r = g.phi(t[idx]) - y[idx]
        lo_side = r < 0
        a[idx[lo_side]] = t[idx[lo_side]]
        b[idx[~lo_side]] = t[idx[~lo_side]]
        d = g.slope(t[idx])
        with np.errstate(divide="ignore", invalid="ignore"):
            t_new = t[idx] - r / d
        bad = ~((t_new > a[idx]) & (t_new < b[idx]))
        t_new[bad] = 0.5 * (a[idx[bad]] + b[idx[bad]])
        stalled = np.abs(t_new - t[idx]) <= 2 * np.spacing(t[idx])
        done = (r == 0) | stalled | (b[idx] - a[idx] <= 2 * np.spacing(b[idx]))
        t[idx] = np.where(r == 0, t[idx], t_new)
        active[idx[done]] = False
    # walk to the neighbouring double with the smallest residual
    res = np.abs(g.phi(t) - y)
    for direction in (1.0, -1.0):
        for _ in range(4):
            cand = np.clip(t + direction * np.spacing(t), g.ts[0], g.ts[-1])
            r2 = np.abs(g.phi(cand) - y)
            better = r2 < res
            if not np.any(better):
                break
            t = np.where(better, cand, t)
            res = np.where(better, r2, res)
    # where phi_1 is steep one ulp of t already moves phi_1 by more than 1e-8
    limit = np.maximum(REVERSE_TOL, g.slope(t) * np.spacing(t))
    if np.any(res > limit):
        i = int(np.argmax(res))
        raise NoConvergenceError(f"reverse_point residual {res[i]:.2e} at y={y[i]!r}", bracket=(a[i], b[i]))
    return t


def reverse_point(y: float, g: LadderGrid) -> float:
    """The abscissa t with phi_1(t) = y (monotone-cubic start, safeguarded Newton)."""
    return float(reverse_points([y], g)[0])


def pullback(s: DisjointIntervalSet, g: LadderGrid) -> DisjointIntervalSet:
    """The preimage of ``s`` under phi_1."""
    if s.is_empty():
        return DisjointIntervalSet()
    return DisjointIntervalSet.from_arrays(reverse_points(s.lo, g), reverse_points(s.hi, g))


def third_order_integral(
    pulled: DisjointIntervalSet,
    g: LadderGrid,
    f=None,
    tol: float = DEFAULT_TOL,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> IntegralResult:
    """Integral of omega(t) f(phi_1(t)) Z(t)^2 over a set of abscissae.

    ``f`` maps an array of phi-values to an array; the default is Z itself.
    """
    if pulled.is_empty():
        return IntegralResult(0.0, 0.0, 0, 0.0)
    if pulled.lo[0] < g.ts[0] or pulled.hi[-1] > g.ts[-1]:
        raise CoverageError("pulled-back set leaves the ladder grid")
    sq = _weighted_square(cfg)
    use_z = f is None

    def integrand(ts):
        w2, e2 = sq(ts)
        ph = g.phi(ts)
        if use_z:
            zf, ef = rs_z_array(ph, cfg, with_bounds=True)
        else:
            zf, ef = np.asarray(f(ph), dtype=float), np.zeros(ts.shape)
        return zf * w2, np.abs(zf) * e2 + ef * w2

    a, b = float(pulled.lo[0]), float(pulled.hi[-1])
    pa, pb = float(g.phi(a)), float(g.phi(b))
    # where phi_1 is steep, f(phi_1) oscillates faster than Z^2: also cut the
    # t-axis at preimages of a phi-grid with the usual panel spacing
    step = mean_gap(pa) / PANELS_PER_GAP
    grid = pa + step * np.arange(1, int((pb - pa) / step) + 1)
    grid = grid[grid < pb]
    if use_z:
        grid = np.union1d(grid, rs_breakpoints(pa, pb))
    breaks = np.union1d(rs_breakpoints(a, b), reverse_points(grid, g))
    ps = integrate_panels(pulled.lo, pulled.hi, integrand, max(tol, THIRD_ORDER_TOL), breaks)
    r = ps.total()
    if not use_z:
        return r
    # phi_1(t) reaches Z rounded to a double, an argument error of up to one
    # ulp that Z' ~ theta' |Z| converts into an error of the integrand
    arg_noise = float(np.spacing(pb)) * 0.5 * math.log(pb / (2 * math.pi)) * math.fsum(ps.absval)
    return IntegralResult(r.value, r.err_est + arg_noise, r.n_evals, r.model_err)


def substitution_check(
    g: LadderGrid, s: DisjointIntervalSet, tol: float = DEFAULT_TOL, cfg: EvalConfig = DEFAULT_CONFIG
):
    """(A3) for the indicator of ``s``: integral of omega Z^2 over the preimage vs m(s).

    Returns (lhs, rhs, combined_error).
    """
    pulled = pullback(s, g)
    ps = integrate_panels(pulled.lo, pulled.hi, _weighted_square(cfg), tol, rs_breakpoints(g.t_lo, g.t_hi))
    r = ps.total()
    return r.value, s.measure(), r.err_est + g.err_total + 2 * len(s) * REVERSE_TOL


def endpoint_error(s: DisjointIntervalSet, g: LadderGrid, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Bound on how much the pullback residuals and the ladder's own error can
    move a third-order integral of Z: sum over endpoints of |Z| * |phi residual|
    plus max |Z| times the ladder's accumulated quadrature error."""
    if s.is_empty():
        return 0.0
    ends = np.concatenate([s.lo, s.hi])
    back = reverse_points(ends, g)
    res = np.abs(g.phi(back) - ends)
    z = np.abs(rs_z_array(ends, cfg))
    return math.fsum(z * (res + np.spacing(ends))) + float(z.max()) * g.err_total


def ladder_for_window(w: WindowSpec, step_control: float = DEFAULT_TOL, cfg: EvalConfig = DEFAULT_CONFIG) -> LadderGrid:
    """Ladder anchored at T whose image covers [T, T + H] (cached per window)."""
    return _cached_ladder(w.T, w.H, step_control, cfg)


@lru_cache(maxsize=8)
def _cached_ladder(T: float, H: float, step_control: float, cfg: EvalConfig) -> LadderGrid:
    span = 1.3 * H
    limit = T / math.log(T)
    while True:
        span = min(span, limit)
        g = build_ladder(T, T + span, step_control, cfg)
        if g.phis[-1] >= T + H:
            return g
        if span >= limit:
            raise CoverageError(f"ladder of maximal length {limit:g} does not reach T + H")
        span *= 1.5


def clear_caches() -> None:
    """Drop cached ladders along with the set and integral caches."""
    quad.clear_caches()
    _cached_ladder.cache_clear()


def verify_third_order(
    w: WindowSpec,
    xs,
    g: LadderGrid | None = None,
    cfg: EvalConfig = DEFAULT_CONFIG,
    tols: Tolerances = DEFAULT_TOLERANCES,
) -> list[VerificationReport]:
    """Third-order forms of the G1/G2 integrals and of the signum law.

    ``a3_*`` cells compare each third-order integral with the second-order
    integral it must equal by the substitution identity (budget = combined
    quadrature and ladder error, safety 1).  ``t3_g1_norm`` and ``t3_signum``
    are the asymptotic checks, with the same bands as their second-order
    counterparts.
    """
    g = ladder_for_window(w, tols.quad_tol, cfg) if g is None else g
    if g.phis[0] > w.T or g.phis[-1] < w.T + w.H:
        raise CoverageError("ladder image does not cover the window")
    tol = tols.quad_tol
    out: list[VerificationReport] = []
    for x in (float(v) for v in xs):
        third = {}
        for kind in ("g1", "g2", "g1+", "g1-", "g2+", "g2-"):
            scen = f"a3_{kind.replace('+', 'p').replace('-', 'm')}"
            with _Cell(out, scen, w, "x", x) as cell:
                if kind in ("g1", "g2"):
                    s = cached_sets(w, x, x)[0 if kind == "g1" else 1]
                else:
                    part = cached_partition(w, x, 0 if kind[:2] == "g1" else 1, cfg)
                    s = part.plus if kind[2] == "+" else part.minus
                r3 = third_order_integral(pullback(s, g), g, None, tol, cfg)
                r2 = cached_integral(w, x, kind, cfg, tol)
                third[kind] = r3
                budget = r3.err_est + r2.err_est + endpoint_error(s, g, cfg)
                out.append(make_report(scen, w, "x", x, r3.value, r2.value, budget, tols,
                                       r3.n_evals + g.n_evals, cell.elapsed(), safety=1.0))

        def need(*kinds, third=third):
            missing = [k for k in kinds if k not in third]
            if missing:
                raise HardyZError(f"third-order integral over {', '.join(missing)} failed")
            return [third[k] for k in kinds]

        with _Cell(out, "t3_g1_norm", w, "x", x) as cell:
            (g1,) = need("g1")
            m = cached_sets(w, x, x)[0].measure()
            out.append(make_report("t3_g1_norm", w, "x", x, g1.value / m, 2 * math.sin(x) / x,
                                   x * error_budget_scale(w.T) / m, tols, g1.n_evals, cell.elapsed()))
        with _Cell(out, "t3_signum", w, "x", x) as cell:
            p1, p2, m1, m2 = need("g1+", "g2+", "g1-", "g2-")
            plus, minus = p1 + p2, m1 + m2
            out.append(make_report("t3_signum", w, "x", x, plus.value, -minus.value, x * error_budget_scale(w.T),
                                   tols, plus.n_evals + minus.n_evals, cell.elapsed()))
    return out


def verify_ladder(
    w: WindowSpec, g: LadderGrid | None = None, cfg: EvalConfig = DEFAULT_CONFIG, tols: Tolerances = DEFAULT_TOLERANCES
) -> list[VerificationReport]:
    """Average slope of phi_1 and the f = 1 substitution identity on [T, T + H]."""
    out: list[VerificationReport] = []
    with _Cell(out, "ladder_slope", w, "H", w.H) as cell:
        g = ladder_for_window(w, tols.quad_tol, cfg) if g is None else g
        slope = (g.phis[-1] - g.phis[0]) / (g.ts[-1] - g.ts[0])
        out.append(make_report("ladder_slope", w, "H", w.H, slope, 1.0, 0.0, tols, g.n_evals, cell.elapsed()))
    if g is None:
        return out
    with _Cell(out, "ladder_identity", w, "H", w.H) as cell:
        lhs, rhs, err = substitution_check(g, DisjointIntervalSet([(w.T, w.T + w.H)]), tols.quad_tol, cfg)
        out.append(make_report("ladder_identity", w, "H", w.H, lhs, rhs, err, tols, 0, cell.elapsed(), safety=1.0))
    return out
