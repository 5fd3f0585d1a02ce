"""Polar coordinates on E = [0, pi)^(d-2) x [0, 2 pi) and the base measure nu."""

import functools
import math

import numpy as np
from scipy import integrate

from .errors import IntegrationError, InvalidDimensionError, UndefinedDirectionError

TWO_PI = 2.0 * np.pi
_PI_BELOW = np.nextafter(np.pi, 0.0)


def check_dimension(d):
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def as_directions(x, d):
    """Return ``x`` as an array of directions with trailing axis of length d-1.

    For ``d == 2`` bare angles (scalars or 1-D arrays) are accepted and get a
    trailing axis appended.
    """
    d = check_dimension(d)
    x = np.asarray(x, dtype=float)
    if d == 2 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.ndim == 0 or x.shape[-1] != d - 1:
        raise InvalidDimensionError(
            f"directions in dimension {d} need {d - 1} angle(s), got shape {x.shape}"
        )
    return x


@functools.lru_cache(maxsize=None)
def gamma_d(d):
    """Total mass of the polar-angle weight prod_j sin(x_j)^(d-1-j) over E.

    This is the surface area of the unit sphere in R^d, 2 pi^(d/2) / Gamma(d/2).
    """
    d = check_dimension(d)
    if d == 2:
        return TWO_PI
    if d == 3:
        return 4.0 * np.pi
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def gamma_d_quadrature(d, epsrel=1e-12):
    """gamma_d by one-dimensional quadrature of each sine power (independent route)."""
    d = check_dimension(d)
    total = TWO_PI
    for j in range(1, d - 1):
        power = d - 1 - j
        val, err = integrate.quad(
            lambda t, p=power: np.sin(t) ** p, 0.0, np.pi, epsabs=0.0, epsrel=epsrel
        )
        total *= val
    return total


def _sine_weight(x, d):
    # prod_{j=1}^{d-1} sin(x_j)^(d-1-j); the last angle always has power 0
    w = np.ones(x.shape[:-1])
    for j in range(1, d - 1):
        w = w * np.sin(x[..., j - 1]) ** (d - 1 - j)
    return w


def base_density(x, d):
    """Density h_d of the probability measure nu on E w.r.t. Lebesgue measure."""
    x = as_directions(x, d)
    return _sine_weight(x, d) / gamma_d(d)


def polar_jacobian(x, y, d):
    """|det| of the derivative of the polar map at (x, y): y^(d-1) prod sin^(d-1-j)."""
    x = as_directions(x, d)
    return np.asarray(y, dtype=float) ** (d - 1) * _sine_weight(x, d)


def polar_to_cartesian(x, y, d=2):
    """Map (direction, radius) to a point of R^d.

    Returns ``y * (cos x1, cos x2 sin x1, ..., prod_j sin x_j)`` with shape
    ``x.shape[:-1] + (d,)``.
    """
    x = as_directions(x, d)
    y = np.asarray(y, dtype=float)
    out = np.empty(np.broadcast_shapes(x.shape[:-1], y.shape) + (d,))
    running = np.ones(x.shape[:-1])
    for j in range(d - 1):
        out[..., j] = np.cos(x[..., j]) * running
        running = running * np.sin(x[..., j])
    out[..., d - 1] = running
    return out * y[..., None]


def cartesian_to_polar(p):
    """Inverse of :func:`polar_to_cartesian`.

    Parameters
    ----------
    p : array_like, shape (..., d)

    Returns
    -------
    x : ndarray, shape (..., d-1)
        Angles in the half-open boxes of E. An azimuth of exactly 2 pi wraps to
        0 and a leading angle of exactly pi is nudged to the float just below.
    y : ndarray, shape (...)
        Euclidean norms.
    """
    p = np.asarray(p, dtype=float)
    d = check_dimension(p.shape[-1])
    y = np.linalg.norm(p, axis=-1)
    if np.any(y == 0.0):
        raise UndefinedDirectionError("the origin has no polar direction")
    x = np.empty(p.shape[:-1] + (d - 1,))
    for j in range(d - 2):
        tail = np.linalg.norm(p[..., j + 1:], axis=-1)
        x[..., j] = np.minimum(np.arctan2(tail, p[..., j]), _PI_BELOW)
    az = np.mod(np.arctan2(p[..., d - 1], p[..., d - 2]), TWO_PI)
    x[..., d - 2] = np.where(az >= TWO_PI, 0.0, az)
    return x, y


def in_domain(x, d):
    """Boolean mask of directions lying in E."""
    x = as_directions(x, d)
    ok = (x[..., -1] >= 0.0) & (x[..., -1] < TWO_PI)
    for j in range(d - 2):
        ok &= (x[..., j] >= 0.0) & (x[..., j] < np.pi)
    return ok


def integrate_over_E(func, d, epsrel=1e-10, weight="lebesgue"):
    """Integrate ``func`` (vectorized over directions) over E.

    ``weight="nu"`` integrates against nu(dx) = h_d(x) dx instead of dx.
    Only d in {2, 3} are supported (nested adaptive quadrature).
    """
    d = check_dimension(d)
    if weight not in ("lebesgue", "nu"):
        raise ValueError(f"unknown weight {weight!r}")
    scale = 1.0 / gamma_d(d) if weight == "nu" else 1.0
    kw = dict(epsabs=0.0, epsrel=epsrel, limit=400)
    if d == 2:
        val, err = integrate.quad(lambda t: float(func(np.array([[t]]))[0]), 0.0, TWO_PI, **kw)
    elif d == 3:

        def inner(x1):
            sw = np.sin(x1) if weight == "nu" else 1.0
            v, _ = integrate.quad(
                lambda t: float(func(np.array([[x1, t]]))[0]), 0.0, TWO_PI, **kw
            )
            return sw * v

        val, err = integrate.quad(inner, 0.0, np.pi, **kw)
    else:
        raise InvalidDimensionError("integration over E is implemented for d in {2, 3}")
    if not np.isfinite(val):
        raise IntegrationError("non-finite integral over E")
    return val * scale
