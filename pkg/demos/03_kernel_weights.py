"""
Dirichlet kernel weights on an equiprobable partition
=====================================================

kappa_{n,r}(x) = k_n int_{I_r} K(x, t) nu(dt) are computed from the exact
antiderivative of the kernel; they sum to k_n and can be negative.
"""

import numpy as np

from frontierest import KernelSpec, build_partition, weight_table
from frontierest.kernel import kernel_eval

spec = KernelSpec(order=7)        # 14 harmonics, K(x, x) = 15
partition = build_partition(20)

print("K(x, x) =", float(kernel_eval(spec, 0.3, 0.3)))

table = weight_table(spec, partition, np.array([0.0, np.pi]))
print("sum of kappa at x = 0:", float(table.kappa[0].sum()))
print("negative weights at x = 0:", int((table.kappa[0] < 0).sum()), "of", partition.k_n)

# kappa_n(x) against its large-k_n proxy sqrt(k_n) ||K||_2
print(f"kappa_n(0) = {table.kappa_n[0]:.4f}, proxy = {table.proxy:.4f}")

# refining the partition pushes k_n^-1 kappa_n^2 towards ||K||_2^2 = 15
for k in (20, 80, 320, 1280):
    t = weight_table(spec, build_partition(k), np.array([0.0]))
    print(f"k_n = {k:5d}: kappa_n^2 / k_n = {t.kappa_n[0] ** 2 / k:.5f}")
