"""Integrals of Z over G1(x) and G2(x) and the signum areas on a short window.

H = 300 is short, so the ratios sit further from 1 than on the H = 1000 desk window.
"""

import math

from hardyz import WindowSpec, build_sets, integrate_set
from hardyz.quad import signum_areas

w = WindowSpec(1e5, 300.0)
for x in (math.pi / 8, math.pi / 4, math.pi / 2):
    g1, g2 = build_sets(w, x)
    main = 2 / math.pi * w.H * math.sin(x)
    i1, i2 = integrate_set(g1), integrate_set(g2)
    a_plus, a_minus, *_ = signum_areas(w, x)
    print(f"x = {x:.4f}  m(G1) = {g1.measure():8.3f} (xH/pi = {x * w.H / math.pi:8.3f})  "
          f"G1 ratio {i1.value / main:.4f}  G2 ratio {-i2.value / main:.4f}  A+/A- {a_plus / a_minus:.4f}")
