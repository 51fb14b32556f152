"""Build phi_1 on a short range and check the substitution identity for a few sets."""

import numpy as np

from hardyz import DisjointIntervalSet, build_ladder, reverse_point
from hardyz.ladder import substitution_check

T = 1e5
g = build_ladder(T, T + 150.0)
print(f"{g.ts.size} nodes, phi_1 maps [{g.t_lo:.1f}, {g.t_hi:.1f}] onto [{g.phis[0]:.4f}, {g.phis[-1]:.4f}]")
for y in (T + 10.0, T + 60.0):
    t = reverse_point(y, g)
    print(f"phi_1^-1({y:.1f}) = {t:.10f}   phi_1(t) - y = {g.phi(t) - y:+.1e}")
rng = np.random.default_rng(1)
for _ in range(3):
    pts = np.sort(rng.uniform(g.phis[0], g.phis[-1], 6))
    s = DisjointIntervalSet(list(zip(pts[0::2], pts[1::2])))
    lhs, rhs, err = substitution_check(g, s)
    print(f"m(S) = {rhs:.10f}   integral over preimage = {lhs:.10f}   |diff| {abs(lhs - rhs):.1e} <= {err:.1e}")
