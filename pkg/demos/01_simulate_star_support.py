"""
Sampling points below a star-shaped boundary
=============================================

A Poisson process of intensity n c is drawn inside the planar set whose
boundary, in polar coordinates, is r = f(x) = 1 + exp(-cos 3x).
"""

import numpy as np

from frontierest import ProcessModel, homogenize, lobed_frontier, sample_star_support, support_volume

f = lobed_frontier()
n, c = 100, 1.0

# expected number of points: n c |S|
area = support_volume(f)
print(f"area of S = {area:.6f}, expected count = {n * c * area:.1f}")

sample = sample_star_support(f, n, c, kind="P", seed=7)
print(f"drew {len(sample)} points")

# radii never exceed the boundary in their own direction
print("max y / f(x) =", float(np.max(sample.y / f(sample.x))))

# Cartesian coordinates, e.g. for a scatter plot
xy = sample.cartesian()
print("first three points (u, v):\n", np.round(xy[:3], 4))

# homogenizing maps (x, y) to (x, pi y^2): heights become uniform under g = pi f^2
h = homogenize(sample, ProcessModel.polar(2))
print("homogenized heights / g(x), mean (about 1/2):", float(np.mean(h.y / (np.pi * f(h.x) ** 2))))
