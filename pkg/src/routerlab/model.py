"""Closed-form quantities of the two-expert adaptive softmax router.

The reduced state is the score difference ``y = r1 - r2``; its mean-field
dynamics are ``dy/dt = a*tanh(y/2T) - gamma*y + h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG2 = math.log(2.0)


class ParameterError(ValueError):
    """Raised when a parameter violates its domain invariant."""


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParameterError(message)


@dataclass(frozen=True)
class RouterParams:
    """Parameters (a, gamma, T, h, b1, b2) of the two-expert router.

    Either ``h`` or the pair ``(b1, b2)`` may be given. A bare ``h`` is split
    symmetrically as ``b1 = h/2, b2 = -h/2``; a bare pair sets ``h = b1 - b2``.
    """

    a: float
    gamma: float
    temp: float
    h: float | None = None
    b1: float | None = None
    b2: float | None = None

    def __post_init__(self):
        for name in ("a", "gamma", "temp"):
            value = getattr(self, name)
            _require(math.isfinite(value) and value > 0, f"{name} > 0 violated ({name}={value!r})")
        if (self.b1 is None) != (self.b2 is None):
            raise ParameterError("b1 and b2 must be given together")
        if self.b1 is None:
            h = 0.0 if self.h is None else float(self.h)
            _require(math.isfinite(h), f"h must be finite (h={h!r})")
            object.__setattr__(self, "h", h)
            object.__setattr__(self, "b1", 0.5 * h)
            object.__setattr__(self, "b2", -0.5 * h)
        else:
            diff = float(self.b1) - float(self.b2)
            _require(math.isfinite(diff), "b1, b2 must be finite")
            if self.h is None:
                object.__setattr__(self, "h", diff)
            else:
                _require(
                    abs(self.h - diff) <= 1e-12 * (1.0 + abs(diff)),
                    f"h == b1 - b2 violated (h={self.h!r}, b1-b2={diff!r})",
                )

    def with_h(self, h: float) -> RouterParams:
        return RouterParams(self.a, self.gamma, self.temp, h=h)


@dataclass(frozen=True)
class RouterState:
    r1: float = 0.0
    r2: float = 0.0

    @property
    def y(self) -> float:
        return self.r1 - self.r2

    @classmethod
    def from_difference(cls, y: float) -> RouterState:
        return cls(0.5 * y, -0.5 * y)


def _p1_scalar(r1: float, r2: float, temp: float) -> float:
    # two-exponential softmax with the max subtracted
    m = r1 if r1 >= r2 else r2
    e1 = math.exp((r1 - m) / temp)
    e2 = math.exp((r2 - m) / temp)
    return e1 / (e1 + e2)


def softmax_probs(state: RouterState, temp: float) -> tuple[float, float]:
    """Selection probabilities ``(p1, p2)`` of the two experts at temperature ``temp``."""
    _require(temp > 0, f"temp > 0 violated (temp={temp!r})")
    r1 = np.asarray(state.r1, dtype=float)
    r2 = np.asarray(state.r2, dtype=float)
    m = np.maximum(r1, r2)
    e1 = np.exp((r1 - m) / temp)
    e2 = np.exp((r2 - m) / temp)
    s = e1 + e2
    p1, p2 = e1 / s, e2 / s
    if p1.ndim == 0:
        return float(p1), float(p2)
    return p1, p2


def load_difference(y, temp: float):
    """Expected load difference ``p1 - p2 = tanh(y / 2T)``."""
    _require(temp > 0, f"temp > 0 violated (temp={temp!r})")
    return np.tanh(np.asarray(y, dtype=float) / (2.0 * temp))


def vector_field(y, params: RouterParams):
    """Reduced mean-field drift ``F(y) = a tanh(y/2T) - gamma y + h``."""
    y = np.asarray(y, dtype=float)
    return params.a * np.tanh(y / (2.0 * params.temp)) - params.gamma * y + params.h


def log_cosh(x):
    """Overflow-free ``log(cosh(x))``."""
    ax = np.abs(np.asarray(x, dtype=float))
    return ax + np.log1p(np.exp(-2.0 * ax)) - LOG2


def sech2(x):
    """Overflow-free ``sech(x)**2``."""
    ax = np.abs(np.asarray(x, dtype=float))
    e = np.exp(-ax)
    return (2.0 * e / (1.0 + e * e)) ** 2


def potential(y, params: RouterParams):
    """Potential ``V`` with ``dy/dt = -dV/dy``; stable equilibria are its local minima."""
    y = np.asarray(y, dtype=float)
    T = params.temp
    return 0.5 * params.gamma * y * y - 2.0 * params.a * T * log_cosh(y / (2.0 * T)) - params.h * y


def vector_field_derivatives(y, params: RouterParams):
    """Return ``(F_y, F_yy, F_yyy)`` at ``y``.

    With ``s = y/2T``, ``t = tanh s`` and ``S = sech^2 s``::

        F_y   = a S / 2T - gamma
        F_yy  = -a S t / 2T^2
        F_yyy = -a S (S - 2 t^2) / 4T^3
    """
    y = np.asarray(y, dtype=float)
    a, T = params.a, params.temp
    s = y / (2.0 * T)
    t = np.tanh(s)
    S = sech2(s)
    f_y = a * S / (2.0 * T) - params.gamma
    f_yy = -a * S * t / (2.0 * T * T)
    f_yyy = -a * S * (S - 2.0 * t * t) / (4.0 * T**3)
    return f_y, f_yy, f_yyy
