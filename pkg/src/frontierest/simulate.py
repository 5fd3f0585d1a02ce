"""Poisson (P) and empirical (E) point processes below a frontier.

Sampling is exact: directions come from the density proportional to
``h(x) g(x)`` (rejection against the flat envelope ``h(x) sup g``) and, given
the direction, the homogenized height is uniform on ``[0, g(x)]``. In the
polar model this is ``Y = f(X) U^(1/d)``.
"""

import functools
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import UnsupportedDimensionError
from .frontiers import FrontierFunction
from .model import ProcessModel, homogenized_frontier
from .polar import TWO_PI, as_directions, integrate_over_E, polar_to_cartesian

PROCESS_KINDS = ("P", "E")
_BATCH_MIN = 256


def make_rng(seed, *stream):
    """PCG64 generator keyed by ``seed`` and an optional stream path.

    Replication ``r`` (retry ``a``) of a run seeded with ``s`` draws from
    ``make_rng(s, r, a)``; streams never overlap and do not depend on the
    order in which replications execute.
    """
    entropy = [int(seed)] + [int(s) for s in stream]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


@dataclass(frozen=True, eq=False)
class PointSample:
    """A realization in (direction, radius) coordinates.

    ``x`` has shape (N, d-1) and ``y`` shape (N,).
    """

    x: np.ndarray
    y: np.ndarray
    n: int
    c: float
    kind: str
    d: int = 2
    seed: int | None = None
    model: str = "polar-d2"
    frontier: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x = as_directions(self.x, self.d).reshape(-1, self.d - 1)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if len(x) != len(y):
            raise ValueError("x and y must have the same number of points")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return len(self.y)

    @property
    def angles(self):
        """Azimuths (the only angle when d == 2)."""
        return self.x[:, -1]

    def cartesian(self):
        return polar_to_cartesian(self.x, self.y, self.d)

    def with_radii(self, y, model=None):
        return replace(self, y=np.asarray(y, dtype=float), model=model or self.model)

    def scaled(self, factor):
        return self.with_radii(self.y * factor)

    def rotated(self, shift):
        """Rotate every azimuth by ``shift`` (mod 2 pi)."""
        x = self.x.copy()
        az = np.mod(x[:, -1] + shift, TWO_PI)
        x[:, -1] = np.where(az >= TWO_PI, 0.0, az)
        return replace(self, x=x)

    def metadata(self):
        return {
            "n": int(self.n),
            "c": float(self.c),
            "kind": self.kind,
            "d": int(self.d),
            "seed": None if self.seed is None else int(self.seed),
            "model": self.model,
            "frontier": self.frontier,
            "count": len(self),
            **self.meta,
        }


@functools.lru_cache(maxsize=64)
def _mass(model_key, f, epsrel):
    model = model_key if isinstance(model_key, ProcessModel) else ProcessModel(*model_key)
    g = homogenized_frontier(model, f)
    return integrate_over_E(g, model.d, epsrel=epsrel, weight="nu")


def support_mass(model, f, epsrel=1e-8):
    """int_E g dnu; for the polar model this is the volume of S^pol."""
    key = model if model.kind == "custom" else (model.d, model.kind)
    return _mass(key, f, epsrel)


def support_volume(f, d=2):
    """Lebesgue volume of the star-shaped set below ``f``: (gamma_d / d) int f^d h_d."""
    return support_mass(ProcessModel.polar(d), f)


def _uniform_nu(d, size, rng):
    """Directions distributed as nu (the normalized sine weights)."""
    out = np.empty((size, d - 1))
    for j in range(d - 2):
        power = d - 1 - j - 1
        if power == 0:
            out[:, j] = rng.uniform(0.0, np.pi, size)
        elif power == 1:
            out[:, j] = np.arccos(1.0 - 2.0 * rng.uniform(size=size))
        else:
            # sin^p on [0, pi): rejection against the flat envelope
            vals = np.empty(0)
            while len(vals) < size:
                t = rng.uniform(0.0, np.pi, 2 * size)
                vals = np.concatenate([vals, t[rng.uniform(size=2 * size) < np.sin(t) ** power]])
            out[:, j] = vals[:size]
    out[:, -1] = rng.uniform(0.0, TWO_PI, size)
    return out


def _rejection_directions(model, g, size, rng):
    """Draw ``size`` directions with density proportional to h g; returns (x, attempts)."""
    d = model.d
    chunks, have, attempts = [], 0, 0
    while have < size:
        batch = max(_BATCH_MIN, 2 * (size - have))
        cand = _uniform_nu(d, batch, rng)
        accept = rng.uniform(size=batch) * g.upper < g(cand)
        hits = np.flatnonzero(accept)
        need = size - have
        # count proposals only up to the last one that is kept
        attempts += batch if len(hits) < need else int(hits[need - 1]) + 1
        chunks.append(cand[hits[:need]])
        have += min(len(hits), need)
    x = np.concatenate(chunks) if chunks else np.empty((0, d - 1))
    return x, attempts


def sample_angle(f, d, rng, size=None, return_attempts=False):
    """Directions with density h_d f^d / int h_d f^d (the polar-angle law).

    With ``return_attempts`` the number of envelope proposals is also
    returned; the acceptance rate is at least (m / M)^d.
    """
    _check_sim_dimension(d)
    model = ProcessModel.polar(d)
    g = homogenized_frontier(model, f)
    n = 1 if size is None else int(size)
    x, attempts = _rejection_directions(model, g, n, rng)
    if size is None:
        x = x[0]
    return (x, attempts) if return_attempts else x


def _check_sim_dimension(d):
    if d not in (2, 3):
        raise UnsupportedDimensionError(f"simulation supports d in {{2, 3}}, got {d}")


def sample_process(model, f, n, c, kind="P", seed=None, rng=None, mass=None):
    """Sample the process with mean measure ``n c phi 1_S nu(dx) dy``.

    kind ``P`` draws a Poisson number of points with mean ``n c int g dnu``;
    kind ``E`` draws exactly ``n`` i.i.d. points of the normalized law.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if c <= 0:
        raise ValueError("c must be positive")
    if kind not in PROCESS_KINDS:
        raise ValueError(f"kind must be one of {PROCESS_KINDS}")
    _check_sim_dimension(model.d)
    if rng is None:
        rng = make_rng(0 if seed is None else seed)
    if model.kind == "custom" and model.frontier is None:
        model = model.bind(f)
    if kind == "P":
        mu = n * c * (support_mass(model, f) if mass is None else mass)
        count = int(rng.poisson(mu))
    else:
        count = int(n)
    g = homogenized_frontier(model, f)
    x, _ = _rejection_directions(model, g, count, rng)
    u = rng.uniform(size=count)
    if model.kind == "polar":
        y = f(x) * u ** (1.0 / model.d)
    else:
        y = model.inverse(x, u * g(x)) if count else np.empty(0)
    return PointSample(
        x, y, n=n, c=float(c), kind=kind, d=model.d, seed=seed, model=model.tag, frontier=f.tag
    )


def sample_star_support(f, n, c, d=2, kind="P", seed=None, rng=None):
    """Sample the homogeneous process of intensity ``n c`` on the star-shaped set below f."""
    _check_sim_dimension(d)
    return sample_process(ProcessModel.polar(d), f, n, c, kind=kind, seed=seed, rng=rng)


def homogenize(sample, model):
    """Apply (x, y) -> (x, Phi_x(y)) to every point."""
    if model.kind == "uniform":
        return sample.with_radii(sample.y.copy(), model="homogenized")
    return sample.with_radii(model.forward(sample.x, sample.y), model="homogenized")
