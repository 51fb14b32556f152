"""Locate the close pair of zeros of Z near t = 7005 and compare with the oracle."""

from hardyz import DisjointIntervalSet, rs_z, sign_partition, z_oracle

s = DisjointIntervalSet([(7004.5, 7005.6)])
p = sign_partition(s)
for t in p.zeros:
    z = rs_z(t)
    print(f"zero at t = {t:.9f}   Z = {z.value:+.2e}   bound {z.err_bound:.1e}")
print(f"separation {p.zeros[1] - p.zeros[0]:.6f}")
mid = 0.5 * (p.zeros[0] + p.zeros[1])
print(f"Z between them: RS {rs_z(mid).value:+.6e}, oracle {z_oracle(mid, 20).value:+.6e}")
