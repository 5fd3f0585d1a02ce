"""Process models: intensity phi(x, y), base measure nu and the quantile transform.

The mean measure of the observed process is ``n c phi(x, y) 1_S(x, y) nu(dx) dy``.
``Phi_x(y) = int_0^y phi(x, t) dt`` maps it onto a homogeneous process below
``g(x) = Phi_x(f(x))``.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .errors import IntegrationError, InvalidIntensityError, OutOfRangeError
from .frontiers import FrontierFunction
from .polar import as_directions, base_density, check_dimension, gamma_d

KINDS = ("uniform", "polar", "custom")
_PROBE = 257


@dataclass(frozen=True, eq=False)
class ProcessModel:
    """Intensity model on E x [0, inf).

    Use the :meth:`polar`, :meth:`uniform` and :meth:`custom` constructors.
    For custom models ``intensity(x, y)`` takes one direction (shape (d-1,))
    and a scalar radius. Binding a ``frontier`` extends a custom intensity
    past the frontier by freezing it at ``phi(x, f(x))``.
    """

    d: int = 2
    kind: str = "polar"
    intensity: Optional[Callable] = None
    frontier: Optional[FrontierFunction] = None
    max_evals: int = 4096

    def __post_init__(self):
        check_dimension(self.d)
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "custom" and self.intensity is None:
            raise ValueError("custom models need an intensity")

    @classmethod
    def polar(cls, d=2):
        return cls(d=d, kind="polar")

    @classmethod
    def uniform(cls, d=2):
        return cls(d=d, kind="uniform")

    @classmethod
    def custom(cls, intensity, d=2, frontier=None, max_evals=4096):
        return cls(d=d, kind="custom", intensity=intensity, frontier=frontier, max_evals=max_evals)

    def bind(self, frontier):
        return replace(self, frontier=frontier)

    @property
    def tag(self):
        return f"{self.kind}-d{self.d}"

    def base_density(self, x):
        return base_density(x, self.d)

    # intensity ---------------------------------------------------------

    def _custom_phi(self, xi, t):
        if self.frontier is not None:
            t = min(t, float(self.frontier(xi[None, :])[0]))
        v = float(self.intensity(xi, t))
        if not v >= 0.0:
            raise InvalidIntensityError(f"intensity is {v} at x={xi}, y={t}")
        return v

    def phi(self, x, y):
        x = as_directions(x, self.d)
        y = np.asarray(y, dtype=float)
        if self.kind == "polar":
            return np.broadcast_to(gamma_d(self.d) * y ** (self.d - 1), np.broadcast_shapes(x.shape[:-1], y.shape)).copy()
        if self.kind == "uniform":
            return np.ones(np.broadcast_shapes(x.shape[:-1], y.shape))
        xb, yb = _broadcast(x, y)
        out = np.array([self._custom_phi(xi, yi) for xi, yi in zip(xb, yb)])
        return out.reshape(np.broadcast_shapes(x.shape[:-1], y.shape))

    # quantile transform --------------------------------------------------

    def _segment(self, xi, a, b, scale=0.0):
        val, err, info = integrate.quad(
            lambda t: self._custom_phi(xi, t),
            a,
            b,
            epsabs=0.0,
            epsrel=1e-10,
            limit=max(1, self.max_evals // 21),
            full_output=1,
        )[:3]
        if info["neval"] > self.max_evals or not np.isfinite(val) or err > 1e-9 * max(abs(val), scale, 1e-300):
            raise IntegrationError(
                f"intensity quadrature did not converge within {self.max_evals} evaluations"
            )
        return val

    def _custom_forward(self, xi, y):
        if y == 0.0:
            return 0.0
        extra = 0.0
        if self.frontier is not None:
            fx = float(self.frontier(xi[None, :])[0])
            if y > fx:
                extra = self._custom_phi(xi, fx) * (y - fx)
                y = fx
        return self._segment(xi, 0.0, y) + extra

    def forward(self, x, y):
        """Phi_x(y), the cumulative intensity along the ray in direction x."""
        x = as_directions(x, self.d)
        y = np.asarray(y, dtype=float)
        if np.any(y < 0):
            raise ValueError("radius must be non-negative")
        if self.kind == "polar":
            out = gamma_d(self.d) * y ** self.d / self.d
            return np.broadcast_to(out, np.broadcast_shapes(x.shape[:-1], y.shape)).copy()
        if self.kind == "uniform":
            return np.broadcast_to(y, np.broadcast_shapes(x.shape[:-1], y.shape)).copy()
        xb, yb = _broadcast(x, y)
        out = np.array([self._custom_forward(xi, yi) for xi, yi in zip(xb, yb)])
        return out.reshape(np.broadcast_shapes(x.shape[:-1], y.shape))

    def _custom_inverse(self, xi, u):
        if u == 0.0:
            return 0.0
        # grow the bracket one segment at a time so a saturating Phi_x is
        # detected instead of integrating ever longer flat tails
        lo, hi = 0.0, 1.0
        total = self._custom_forward(xi, hi)
        for _ in range(64):
            if total >= u:
                break
            step = self._segment(xi, hi, 2.0 * hi, scale=total) if self.frontier is None else (
                self._custom_forward(xi, 2.0 * hi) - total
            )
            if step <= 1e-15 * total:
                raise OutOfRangeError(f"{u} is outside the range of Phi_x at x={xi}")
            lo, hi, total = hi, 2.0 * hi, total + step
        else:
            raise OutOfRangeError(f"{u} is outside the range of Phi_x at x={xi}")
        return optimize.brentq(
            lambda t: self._custom_forward(xi, t) - u, lo, hi, xtol=1e-14, rtol=1e-12
        )

    def inverse(self, x, u):
        """Phi_x^{-1}(u)."""
        x = as_directions(x, self.d)
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise ValueError("argument of the inverse transform must be non-negative")
        if self.kind == "polar":
            out = (self.d * u / gamma_d(self.d)) ** (1.0 / self.d)
            return np.broadcast_to(out, np.broadcast_shapes(x.shape[:-1], u.shape)).copy()
        if self.kind == "uniform":
            return np.broadcast_to(u, np.broadcast_shapes(x.shape[:-1], u.shape)).copy()
        xb, ub = _broadcast(x, u)
        out = np.array([self._custom_inverse(xi, ui) for xi, ui in zip(xb, ub)])
        return out.reshape(np.broadcast_shapes(x.shape[:-1], u.shape))


def _broadcast(x, y):
    shape = np.broadcast_shapes(x.shape[:-1], y.shape)
    xb = np.broadcast_to(x, shape + x.shape[-1:]).reshape(-1, x.shape[-1])
    yb = np.broadcast_to(y, shape).reshape(-1)
    return xb, yb


def homogenized_frontier(model, f):
    """Frontier g(x) = Phi_x(f(x)) of the homogenized process.

    Bounds are exact for the built-in kinds. For custom intensities they come
    from probing a direction grid and are padded by 1%.
    """
    d = model.d
    model = model if model.kind != "custom" or model.frontier is not None else model.bind(f)

    def g(x):
        return model.forward(x, f(x))

    if model.kind == "polar":
        lo = gamma_d(d) * f.lower ** d / d
        hi = gamma_d(d) * f.upper ** d / d
    elif model.kind == "uniform":
        lo, hi = f.lower, f.upper
    else:
        probe = _probe_directions(d)
        lo = 0.99 * float(np.min(model.forward(probe, np.full(len(probe), f.lower))))
        hi = 1.01 * float(np.max(model.forward(probe, np.full(len(probe), f.upper))))
    return FrontierFunction(g, lo, hi, f.smoothness, f"homogenized({f.tag})")


def _probe_directions(d):
    az = np.linspace(0.0, 2 * np.pi, _PROBE, endpoint=False)
    if d == 2:
        return az[:, None]
    grids = [np.linspace(0.0, np.pi, 17, endpoint=False) + np.pi / 34] * (d - 2) + [az[::8]]
    mesh = np.meshgrid(*grids, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)
