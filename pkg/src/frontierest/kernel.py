"""Equiprobable partitions of E, the Dirichlet kernel and kernel weights.

With nu(dt) = dt / (2 pi) on the circle the Dirichlet kernel of order m is

    K(x, t) = 1 + 2 sum_{j=1}^m cos(j (x - t))
            = sin((2m + 1)(x - t) / 2) / sin((x - t) / 2),

so K(x, x) = 2m + 1 and int K(x, t) nu(dt) = 1. In d = 3 the kernel acts on
the azimuth only and is flat in the polar angle.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeightsError, InvalidDimensionError, InvalidPartitionError, OutOfDomainError
from .polar import TWO_PI, as_directions, in_domain


@dataclass(frozen=True, eq=False)
class Partition:
    """Product grid of half-open angle boxes, cells numbered polar-major.

    ``polar_cuts`` is None for d == 2. ``measures`` holds nu(I_r).
    """

    d: int
    azimuth_cuts: np.ndarray
    polar_cuts: np.ndarray | None
    measures: np.ndarray

    @property
    def k_n(self):
        return len(self.measures)

    @property
    def n_azimuth(self):
        return len(self.azimuth_cuts) - 1

    @property
    def n_polar(self):
        return 1 if self.polar_cuts is None else len(self.polar_cuts) - 1

    @property
    def nu_min(self):
        return float(self.measures.min())

    def cells(self):
        """List of cells as tuples of (low, high) per angle coordinate."""
        az = list(zip(self.azimuth_cuts[:-1], self.azimuth_cuts[1:]))
        if self.polar_cuts is None:
            return [((a, b),) for a, b in az]
        pol = list(zip(self.polar_cuts[:-1], self.polar_cuts[1:]))
        return [(p, a) for p in pol for a in az]

    def locate(self, x):
        """Cell index of every direction; cells are closed on the left."""
        x = as_directions(x, self.d)
        if not np.all(in_domain(x, self.d)):
            raise OutOfDomainError("direction outside E")
        ia = np.searchsorted(self.azimuth_cuts, x[..., -1], side="right") - 1
        ia = np.clip(ia, 0, self.n_azimuth - 1)
        if self.polar_cuts is None:
            return ia
        ip = np.searchsorted(self.polar_cuts, x[..., 0], side="right") - 1
        ip = np.clip(ip, 0, self.n_polar - 1)
        return ip * self.n_azimuth + ia


def _default_polar_cells(k_n):
    best = 1
    for a in range(1, int(np.sqrt(k_n)) + 1):
        if k_n % a == 0:
            best = a
    return best


def build_partition(k_n, d=2, polar_cells=None):
    """Partition E into ``k_n`` cells of nu-measure 1/k_n.

    d = 2 uses equidistant arcs. d = 3 crosses ``polar_cells`` bands of equal
    sin-weighted mass (cuts at arccos(1 - 2i/k1)) with equidistant azimuth
    sectors; by default k1 is the largest divisor of k_n not above sqrt(k_n).
    """
    if int(k_n) != k_n or k_n < 1:
        raise InvalidPartitionError(f"k_n must be a positive integer, got {k_n!r}")
    k_n = int(k_n)
    if d == 2:
        cuts = TWO_PI * np.arange(k_n + 1) / k_n
        return Partition(2, cuts, None, np.full(k_n, 1.0 / k_n))
    if d != 3:
        raise InvalidDimensionError(f"partitions are implemented for d in {{2, 3}}, got {d}")
    k1 = _default_polar_cells(k_n) if polar_cells is None else int(polar_cells)
    if k1 < 1 or k_n % k1:
        raise InvalidPartitionError(f"polar_cells={k1} must divide k_n={k_n}")
    k2 = k_n // k1
    polar = np.arccos(1.0 - 2.0 * np.arange(k1 + 1) / k1)
    polar[-1] = np.pi
    az = TWO_PI * np.arange(k2 + 1) / k2
    band = 0.5 * (np.cos(polar[:-1]) - np.cos(polar[1:]))
    sector = np.diff(az) / TWO_PI
    return Partition(3, az, polar, np.outer(band, sector).ravel())


@dataclass(frozen=True)
class KernelSpec:
    """Dirichlet kernel of harmonic order ``order`` (``2 * order`` harmonics)."""

    order: int = 7
    kind: str = "dirichlet"

    def __post_init__(self):
        if self.kind != "dirichlet":
            raise ValueError(f"unsupported kernel kind {self.kind!r}")
        if int(self.order) != self.order or self.order < 0:
            raise ValueError("kernel order must be a non-negative integer")

    @property
    def harmonics(self):
        """Number of basis functions beyond the constant, 2m."""
        return 2 * self.order

    @property
    def diagonal(self):
        return 2 * self.order + 1

    @property
    def l2_norm(self):
        return np.sqrt(2 * self.order + 1)


def kernel_eval(spec, x, t):
    """K(x, t) = 1 + 2 sum_{j<=m} cos(j (x - t)), broadcasting over x and t."""
    diff = np.asarray(x, dtype=float) - np.asarray(t, dtype=float)
    j = np.arange(1, spec.order + 1)
    return 1.0 + 2.0 * np.cos(diff[..., None] * j).sum(axis=-1)


def kernel_sine_quotient(spec, x, t):
    """Closed form sin((2m+1) u / 2) / sin(u / 2), with the 2m+1 limit on the diagonal."""
    u = np.asarray(x, dtype=float) - np.asarray(t, dtype=float)
    s = np.sin(0.5 * u)
    safe = np.where(np.abs(s) < 1e-12, 1.0, s)
    return np.where(np.abs(s) < 1e-12, float(spec.diagonal), np.sin(0.5 * spec.diagonal * u) / safe)


def kernel_cell_integral(spec, x, a, b):
    """int_a^b K(x, t) dt / (2 pi) from the exact antiderivative.

    Equals (b - a)/(2 pi) + (1/pi) sum_j [sin(j(x - a)) - sin(j(x - b))] / j.
    Broadcasts over ``x``, ``a`` and ``b``.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    base = (b - a) / TWO_PI
    if spec.order == 0:
        return np.broadcast_to(base, np.broadcast_shapes(x.shape, a.shape, b.shape)).copy()
    j = np.arange(1, spec.order + 1)
    xa = (x - a)[..., None] * j
    xb = (x - b)[..., None] * j
    return base + ((np.sin(xa) - np.sin(xb)) / j).sum(axis=-1) / np.pi


def cell_masses(spec, partition, x):
    """Matrix of int_{I_r} K(x, t) nu(dt), shape (queries, k_n)."""
    x = as_directions(x, partition.d).reshape(-1, partition.d - 1)
    cuts = partition.azimuth_cuts
    az = kernel_cell_integral(spec, x[:, -1:], cuts[None, :-1], cuts[None, 1:])
    if partition.polar_cuts is None:
        return az
    pc = partition.polar_cuts
    band = 0.5 * (np.cos(pc[:-1]) - np.cos(pc[1:]))
    # flat in the polar angle: the polar factor is the band's nu-mass
    return (band[None, :, None] * az[:, None, :]).reshape(len(x), -1)


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Kernel weights at a batch of query directions.

    Attributes
    ----------
    x : (q, d-1) query directions
    mass : (q, k_n) int_{I_r} K(x, t) nu(dt)
    kappa : (q, k_n) kappa_{n,r}(x) = k_n * mass
    kappa_n : (q,) Euclidean norm of the kappa row
    proxy : k_n^(1/2) ||K(x, .)||_2, the large-k_n value of kappa_n
    """

    x: np.ndarray
    mass: np.ndarray
    kappa: np.ndarray
    kappa_n: np.ndarray
    proxy: float

    @property
    def weights(self):
        return self.kappa / self.kappa_n[:, None]

    @property
    def k_n(self):
        return self.kappa.shape[1]

    def __len__(self):
        return len(self.x)


def weight_table(spec, partition, x):
    """kappa_{n,r}(x) = k_n int_{I_r} K(x, t) nu(dt) and their norms."""
    xs = as_directions(x, partition.d).reshape(-1, partition.d - 1)
    mass = cell_masses(spec, partition, xs)
    kappa = partition.k_n * mass
    kappa_n = np.sqrt(np.sum(kappa**2, axis=1))
    if np.any(kappa_n == 0.0):
        raise DegenerateWeightsError("kappa_n(x) vanishes")
    proxy = float(np.sqrt(partition.k_n) * spec.l2_norm)
    return WeightTable(xs, mass, kappa, kappa_n, proxy)
