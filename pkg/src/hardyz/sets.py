"""Disconnected sets built from nu-points and their sign partitions under Z."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SuspiciousZeroError
from .nupoints import WindowSpec, index_range, mean_gap, solve_nu_array
from .special import DEFAULT_CONFIG, EvalConfig, rs_z_array

#: default resolution of located zeros, in t
ZERO_TOL = 1e-9
#: |Z| below this at an unresolved local extremum is reported as a near-tangency
TANGENCY_LEVEL = 1e-6
#: samples of Z per mean nu-point gap when looking for sign changes
SAMPLES_PER_GAP = 32


class DisjointIntervalSet:
    """Finite union of pairwise-disjoint intervals, sorted by left end.

    Adjacent intervals may touch (``hi[i] == lo[i + 1]``) but never overlap.
    Open/closed ends are not distinguished; every consumer is measure-based.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, intervals=()):
        arr = np.asarray(list(intervals) if not isinstance(intervals, np.ndarray) else intervals, dtype=float)
        if arr.size == 0:
            arr = np.empty((0, 2))
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("intervals must be a sequence of (lo, hi) pairs")
        lo = np.ascontiguousarray(arr[:, 0])
        hi = np.ascontiguousarray(arr[:, 1])
        if not np.all(lo < hi):
            raise ValueError("every interval needs lo < hi")
        if np.any(hi[:-1] > lo[1:]):
            raise ValueError("intervals must be sorted and pairwise disjoint")
        self.lo = lo
        self.hi = hi

    @classmethod
    def from_arrays(cls, lo, hi) -> "DisjointIntervalSet":
        return cls(np.column_stack([np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)]))

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self.lo, self.hi)]

    def __len__(self):
        return self.lo.size

    def __iter__(self):
        return iter(self.intervals)

    def __eq__(self, other):
        if not isinstance(other, DisjointIntervalSet):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __repr__(self):
        return f"DisjointIntervalSet(n={len(self)}, measure={self.measure():.6g})"

    def is_empty(self) -> bool:
        return self.lo.size == 0

    def measure(self) -> float:
        # hi - lo is exact for the short intervals used here; fsum makes the total
        # independent of summation order
        return math.fsum(self.hi - self.lo)

    def clip(self, a: float, b: float) -> "DisjointIntervalSet":
        lo = np.maximum(self.lo, a)
        hi = np.minimum(self.hi, b)
        keep = lo < hi
        return DisjointIntervalSet.from_arrays(lo[keep], hi[keep])

    def union(self, other: "DisjointIntervalSet") -> "DisjointIntervalSet":
        """Union; overlapping pieces are merged, touching ones kept apart."""
        lo = np.concatenate([self.lo, other.lo])
        hi = np.concatenate([self.hi, other.hi])
        order = np.lexsort((hi, lo))
        out: list[list[float]] = []
        for a, b in zip(lo[order], hi[order]):
            if out and a < out[-1][1]:
                out[-1][1] = max(out[-1][1], b)
            else:
                out.append([a, b])
        return DisjointIntervalSet(out)

    def intersection(self, other: "DisjointIntervalSet") -> "DisjointIntervalSet":
        out = []
        i = j = 0
        while i < len(self) and j < len(other):
            a = max(self.lo[i], other.lo[j])
            b = min(self.hi[i], other.hi[j])
            if a < b:
                out.append((a, b))
            if self.hi[i] < other.hi[j]:
                i += 1
            else:
                j += 1
        return DisjointIntervalSet(out)

    def is_disjoint(self, other: "DisjointIntervalSet") -> bool:
        return self.intersection(other).is_empty()

    def split_at(self, points) -> "DisjointIntervalSet":
        """Same set with extra breakpoints inserted at interior ``points``."""
        pts = np.unique(np.asarray(points, dtype=float))
        out = []
        for a, b in zip(self.lo, self.hi):
            inner = pts[(pts > a) & (pts < b)]
            edges = np.concatenate([[a], inner, [b]])
            out.extend(zip(edges[:-1], edges[1:]))
        return DisjointIntervalSet(out)

    def contains(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.lo, t, side="right") - 1
        ok = k >= 0
        kk = np.where(ok, k, 0)
        return ok & (t <= self.hi[kk]) if len(self) else np.zeros(t.shape, dtype=bool)


def measure(s: DisjointIntervalSet) -> float:
    """Total length of the set."""
    return s.measure()


@dataclass
class SignPartition:
    plus: DisjointIntervalSet
    minus: DisjointIntervalSet
    zeros: np.ndarray
    tangencies: list = field(default_factory=list)
    n_evals: int = 0


def nu_intervals(w: WindowSpec, x: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unclipped (nu, t_nu(-x), t_nu(x)) for every nu whose interval meets the window."""
    n0, n1 = index_range(w.T, w.H, 0.0)
    nus = np.arange(max(n0 - 1, 1), n1 + 2, dtype=np.int64)
    left = solve_nu_array(nus, -x)
    right = solve_nu_array(nus, x)
    keep = (right > w.T) & (left < w.T + w.H)
    return nus[keep], left[keep], right[keep]


def _check_halfwidth(x: float, name: str) -> None:
    if not (0.0 < x <= math.pi / 2):
        raise DomainError(f"{name} must lie in (0, pi/2], got {x}")


def build_sets(w: WindowSpec, x: float, y: float | None = None):
    """G1(x) from even-indexed and G2(y) from odd-indexed nu-points, clipped to the window.

    Every index whose interval (t_nu(-x), t_nu(x)) meets [T, T + H] is used
    before clipping, so at x = y = pi/2 the two sets tile the window exactly.
    """
    y = x if y is None else y
    _check_halfwidth(x, "x")
    _check_halfwidth(y, "y")
    a, b = w.T, w.T + w.H
    out = []
    for half, parity in ((x, 0), (y, 1)):
        nus, left, right = nu_intervals(w, half)
        sel = nus % 2 == parity
        out.append(DisjointIntervalSet.from_arrays(left[sel], right[sel]).clip(a, b))
    return out[0], out[1]


def sample_step(t: float, samples_per_gap: int = SAMPLES_PER_GAP) -> float:
    """Sampling step for sign detection, 1/32 of the local nu-point spacing by default."""
    return mean_gap(t) / samples_per_gap


def _ulp(x):
    return np.spacing(np.abs(x))


def _bisect(a, b, za, cfg, zero_tol):
    """Vectorised bisection of the brackets [a, b] where sign(Z(a)) = sign(za)."""
    a, b, za = a.copy(), b.copy(), za.copy()
    evals = 0
    for _ in range(200):
        width = b - a
        active = width > np.maximum(zero_tol, 2.0 * _ulp(b))
        if not np.any(active):
            return a, b, evals, True
        idx = np.flatnonzero(active)
        m = 0.5 * (a[idx] + b[idx])
        stuck = (m <= a[idx]) | (m >= b[idx])
        if np.any(stuck):
            return a, b, evals, False
        zm = rs_z_array(m, cfg)
        evals += m.size
        same = np.sign(zm) == np.sign(za[idx])
        a[idx[same]] = m[same]
        za[idx[same]] = zm[same]
        b[idx[~same]] = m[~same]
    return a, b, evals, False


def sign_partition(
    s: DisjointIntervalSet,
    zero_tol: float = ZERO_TOL,
    cfg: EvalConfig = DEFAULT_CONFIG,
    samples_per_gap: int = SAMPLES_PER_GAP,
) -> SignPartition:
    """Split ``s`` at the zeros of Z into positive and negative parts.

    Zeros are bracketed by sampling ``samples_per_gap`` times per nu-point
    spacing, refined by bisection to ``zero_tol``, and local minima of |Z|
    between samples are probed so close pairs of zeros are not stepped over.
    """
    if s.is_empty():
        empty = DisjointIntervalSet()
        return SignPartition(empty, empty, np.empty(0))
    if samples_per_gap < 1:
        raise ValueError("samples_per_gap must be positive")
    steps = np.array([sample_step(t, samples_per_gap) for t in s.lo])
    counts = np.maximum(np.ceil((s.hi - s.lo) / steps).astype(int), 2) + 1
    owner = np.repeat(np.arange(len(s)), counts)
    start = np.repeat(np.cumsum(counts) - counts, counts)
    frac = (np.arange(owner.size) - start) / (counts[owner] - 1)
    ts = s.lo[owner] + frac * (s.hi[owner] - s.lo[owner])
    last = np.cumsum(counts) - 1
    ts[last] = s.hi
    zs = rs_z_array(ts, cfg)
    evals = ts.size

    same_owner = owner[:-1] == owner[1:]
    k = np.flatnonzero(same_owner & (np.sign(zs[:-1]) * np.sign(zs[1:]) < 0))
    br_a, br_b, br_z = ts[k], ts[k + 1], zs[k]
    exact = ts[zs == 0.0]

    # probe sampled local minima of |Z| that do not change sign
    tangencies = []
    inner = np.flatnonzero(same_owner[:-1] & same_owner[1:]) + 1
    az = np.abs(zs)
    cand = inner[
        (az[inner] < az[inner - 1])
        & (az[inner] < az[inner + 1])
        & (np.sign(zs[inner - 1]) == np.sign(zs[inner]))
        & (np.sign(zs[inner + 1]) == np.sign(zs[inner]))
    ]
    if cand.size:
        h = ts[cand + 1] - ts[cand]
        z0, z1, z2 = zs[cand - 1], zs[cand], zs[cand + 1]
        curv = (z0 - 2 * z1 + z2) / h**2
        slope = (z2 - z0) / (2 * h)
        with np.errstate(divide="ignore", invalid="ignore"):
            shift = np.where(curv != 0, -slope / curv, 0.0)
        shift = np.clip(shift, -h, h)
        vertex_val = z1 + slope * shift + 0.5 * curv * shift**2
        risky = (np.sign(vertex_val) != np.sign(z1)) | (np.abs(vertex_val) < 1e-3)
        if np.any(risky):
            c = cand[risky]
            tv = ts[c] + shift[risky]
            zv = rs_z_array(tv, cfg)
            evals += tv.size
            flipped = np.sign(zv) != np.sign(zs[c])
            extra_a, extra_b, extra_z = [], [], []
            for ci, t_v, z_v, f in zip(c, tv, zv, flipped):
                if f:
                    # two zeros between the neighbouring samples, one on each side of t_v
                    below = ci if t_v > ts[ci] else ci - 1
                    extra_a += [ts[below], t_v]
                    extra_b += [t_v, ts[below + 1]]
                    extra_z += [zs[below], z_v]
                elif abs(z_v) < TANGENCY_LEVEL:
                    tangencies.append(float(t_v))
            br_a = np.concatenate([br_a, extra_a])
            br_b = np.concatenate([br_b, extra_b])
            br_z = np.concatenate([br_z, extra_z])

    zeros = exact
    if br_a.size:
        a, b, n_b, ok = _bisect(br_a, br_b, br_z, cfg, zero_tol)
        evals += n_b
        if not ok:
            bad = int(np.argmax(b - a))
            raise SuspiciousZeroError(
                f"sign change near t={a[bad]!r} did not refine below {zero_tol}",
                bracket=(float(a[bad]), float(b[bad])),
            )
        zeros = np.concatenate([zeros, 0.5 * (a + b)])
    zeros = np.unique(zeros)

    pieces = s.split_at(zeros)
    mids = 0.5 * (pieces.lo + pieces.hi)
    zm = rs_z_array(mids, cfg)
    evals += mids.size
    pos = zm > 0
    plus = DisjointIntervalSet.from_arrays(pieces.lo[pos], pieces.hi[pos])
    minus = DisjointIntervalSet.from_arrays(pieces.lo[~pos], pieces.hi[~pos])
    return SignPartition(plus, minus, zeros, tangencies, evals)
