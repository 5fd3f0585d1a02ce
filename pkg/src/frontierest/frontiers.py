"""Frontier functions f : E -> (0, inf) with declared bounds."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FrontierEvaluationError

_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class FrontierFunction:
    """A positive frontier with known bounds ``lower <= f <= upper``.

    ``func`` receives directions of shape (n, d-1) and returns n radii.
    Calling the object accepts bare angles (scalar or 1-D, the planar case)
    or a 2-D array of directions.
    """

    func: Callable[[np.ndarray], np.ndarray]
    lower: float
    upper: float
    smoothness: str = ""
    tag: str = "custom"

    def __post_init__(self):
        if not (0.0 < self.lower <= self.upper < np.inf):
            raise ValueError(
                f"frontier bounds must satisfy 0 < m <= M < inf, got [{self.lower}, {self.upper}]"
            )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        if x.ndim <= 1:
            dirs = x.reshape(-1, 1)
        else:
            dirs = x.reshape(-1, x.shape[-1])
        vals = np.asarray(self.func(dirs), dtype=float).reshape(-1)
        if not np.all(np.isfinite(vals)):
            raise FrontierEvaluationError(f"frontier {self.tag!r} returned non-finite values")
        lo, hi = self.lower * (1 - _SLACK), self.upper * (1 + _SLACK)
        if np.any(vals < lo) or np.any(vals > hi):
            raise FrontierEvaluationError(
                f"frontier {self.tag!r} left its declared bounds [{self.lower}, {self.upper}]"
            )
        if scalar:
            return float(vals[0])
        return vals.reshape(x.shape if x.ndim <= 1 else x.shape[:-1])

    def scaled(self, factor):
        """Frontier ``factor * f``."""
        factor = float(factor)
        return FrontierFunction(
            lambda x: factor * np.asarray(self.func(x)),
            self.lower * factor,
            self.upper * factor,
            self.smoothness,
            f"{factor}*{self.tag}",
        )


def lobed_frontier():
    """f(x) = 1 + exp(-cos 3x) on the azimuth, a pi/3-periodic C-infinity curve."""
    return FrontierFunction(
        lambda x: 1.0 + np.exp(-np.cos(3.0 * x[:, -1])),
        1.0 + np.exp(-1.0),
        1.0 + np.e,
        "C-infinity",
        "lobed",
    )


def constant_frontier(value):
    value = float(value)
    return FrontierFunction(
        lambda x: np.full(x.shape[0], value), value, value, "constant", f"constant:{value:g}"
    )


def fourier_frontier(coeffs):
    """a0 + sum_j (a_j cos(j x) + b_j sin(j x)) in the azimuth.

    ``coeffs`` is ``[a0, a1, b1, a2, b2, ...]``; a missing trailing ``b`` is 0.
    """
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise ValueError("fourier frontier needs at least a0")
    a0 = coeffs[0]
    rest = coeffs[1:] + [0.0] * (len(coeffs[1:]) % 2)
    a = np.array(rest[0::2])
    b = np.array(rest[1::2])
    j = np.arange(1, len(a) + 1)
    spread = float(np.sum(np.abs(a)) + np.sum(np.abs(b)))

    def func(x):
        t = x[:, -1:] * j
        return a0 + np.cos(t) @ a + np.sin(t) @ b

    tag = "fourier:" + ",".join(f"{c:g}" for c in coeffs)
    return FrontierFunction(func, a0 - spread, a0 + spread, "C-infinity", tag)


def parse_frontier(tag):
    """Build a frontier from a config tag.

    Accepted forms are ``lobed`` (alias ``paper``), ``constant:<v>`` and
    ``fourier:<a0,a1,b1,...>``.
    """
    tag = tag.strip()
    if tag in ("lobed", "paper"):
        return lobed_frontier()
    name, _, arg = tag.partition(":")
    try:
        if name == "constant":
            return constant_frontier(float(arg))
        if name == "fourier":
            return fourier_frontier([c for c in arg.split(",") if c.strip()])
    except ValueError as exc:
        raise ValueError(f"bad frontier tag {tag!r}: {exc}") from None
    raise ValueError(f"unknown frontier tag {tag!r}")
