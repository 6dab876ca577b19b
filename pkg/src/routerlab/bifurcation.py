"""Equilibria, fold set, cusp coefficients and the N-expert linearization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ParameterError, RouterParams, vector_field, vector_field_derivatives

SCAN_INTERVALS = 4096
ROOT_TOL = 1e-12
HYPERBOLIC_TOL = 1e-9
_ARCOSH_CLAMP = 1e-15


@dataclass(frozen=True)
class Equilibrium:
    y: float
    stability: str  # "stable" | "unstable" | "nonhyperbolic"
    f_y: float


@dataclass(frozen=True)
class EquilibriumSet:
    equilibria: tuple[Equilibrium, ...]
    regime: str  # "monostable" | "bistable"

    def __len__(self):
        return len(self.equilibria)

    def __iter__(self):
        return iter(self.equilibria)

    @property
    def roots(self) -> list[float]:
        return [e.y for e in self.equilibria]


@dataclass(frozen=True)
class FoldCurvePoint:
    q: float
    a: float
    h: float


@dataclass(frozen=True)
class CuspNormalForm:
    mu: float
    eps: float
    cubic_coeff: float


def _check_positive(**kw):
    for name, value in kw.items():
        if not (math.isfinite(value) and value > 0):
            raise ParameterError(f"{name} > 0 violated ({name}={value!r})")


def critical_feedback(gamma: float, temp: float) -> float:
    """Feedback strength ``a = 2 gamma T`` at which the balanced state loses stability."""
    _check_positive(gamma=gamma, temp=temp)
    return 2.0 * gamma * temp


def critical_temperature(a: float, gamma: float) -> float:
    """Temperature ``T_c = a / (2 gamma)`` of the pitchfork at fixed ``a``."""
    _check_positive(a=a, gamma=gamma)
    return a / (2.0 * gamma)


def classify(f_y: float, tol: float = HYPERBOLIC_TOL) -> str:
    if f_y < -tol:
        return "stable"
    if f_y > tol:
        return "unstable"
    return "nonhyperbolic"


def _fold_parameter(a: float, gamma: float, temp: float) -> float:
    # q_a = arcosh(sqrt(a / 2 gamma T)), with x^2 - 1 formed without cancellation
    x2m1 = (a - 2.0 * gamma * temp) / (2.0 * gamma * temp)
    x2m1 = max(x2m1, _ARCOSH_CLAMP)
    x = math.sqrt(1.0 + x2m1)
    return math.log(x + math.sqrt(x2m1))


def _bisect(f, lo: float, hi: float, flo: float) -> float:
    best, fbest = lo, abs(flo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = float(f(mid))
        if abs(fm) < fbest:
            best, fbest = mid, abs(fm)
        if fm == 0.0 or abs(fm) < ROOT_TOL * 1e-3:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return best


def equilibrium_bracket(params: RouterParams) -> float:
    """Half-width ``R`` such that every root of ``F`` lies in ``[-R, R]``."""
    return (params.a + abs(params.h)) / params.gamma + 1.0


def find_equilibria(params: RouterParams, intervals: int = SCAN_INTERVALS) -> EquilibriumSet:
    """All real roots of ``F(y) = 0`` with their stability.

    Roots are located by a sign-change scan over ``intervals`` uniform
    sub-intervals of the analytic bracket and refined by bisection. When
    ``a > 2 gamma T`` the two critical points ``+-2T q_a`` of ``F`` are added
    as scan nodes, so each sub-interval is monotone and a transversal root
    cannot be missed however close it sits to a fold.
    """
    R = equilibrium_bracket(params)
    nodes = np.linspace(-R, R, intervals + 1)
    if params.a > critical_feedback(params.gamma, params.temp):
        yc = 2.0 * params.temp * _fold_parameter(params.a, params.gamma, params.temp)
        if yc < R:
            nodes = np.union1d(nodes, [-yc, yc])
    fvals = vector_field(nodes, params)

    def f(y):
        return vector_field(y, params)

    roots = [float(y) for y, fv in zip(nodes, fvals) if fv == 0.0]
    crossing = np.nonzero(fvals[:-1] * fvals[1:] < 0)[0]
    for i in crossing:
        roots.append(_bisect(f, float(nodes[i]), float(nodes[i + 1]), float(fvals[i])))
    roots.sort()

    eqs = []
    for y in roots:
        f_y = float(vector_field_derivatives(y, params)[0])
        eqs.append(Equilibrium(y=y, stability=classify(f_y), f_y=f_y))
    n_stable = sum(e.stability == "stable" for e in eqs)
    return EquilibriumSet(tuple(eqs), "bistable" if n_stable >= 2 else "monostable")


def fold_curve(q_grid, gamma: float, temp: float) -> list[FoldCurvePoint]:
    """Points ``(a(q), h(q))`` of the fold set for each ``q`` in ``q_grid``."""
    _check_positive(gamma=gamma, temp=temp)
    scale = 2.0 * gamma * temp
    out = []
    for q in q_grid:
        q = float(q)
        ch, sh = math.cosh(q), math.sinh(q)
        out.append(FoldCurvePoint(q=q, a=scale * ch * ch, h=scale * (q - sh * ch)))
    return out


def hysteresis_boundary(a: float, gamma: float, temp: float) -> float:
    """Skew ``H(a)`` bounding the bistable band ``|h| < H(a)``.

    Returns 0 for ``a <= 2 gamma T``, where the band is empty.
    """
    _check_positive(gamma=gamma, temp=temp)
    if not (math.isfinite(a) and a >= 0):
        raise ParameterError(f"a >= 0 violated (a={a!r})")
    if a <= critical_feedback(gamma, temp):
        return 0.0
    q = _fold_parameter(a, gamma, temp)
    # sinh q cosh q - q == (sinh 2q - 2q) / 2
    return gamma * temp * (math.sinh(2.0 * q) - 2.0 * q)


def hysteresis_width(a: float, gamma: float, temp: float) -> float:
    """Mean-field loop width ``2 H(a)``; zero for any ``a`` at or below threshold, negative included."""
    return 2.0 * hysteresis_boundary(max(a, 0.0), gamma, temp)


def cusp_normal_form(params: RouterParams) -> CuspNormalForm:
    T = params.temp
    return CuspNormalForm(
        mu=params.a / (2.0 * T) - params.gamma,
        eps=params.h,
        cubic_coeff=-params.a / (24.0 * T**3),
    )


def cusp_asymptote(mu: float, gamma: float, temp: float) -> float:
    """Leading-order ``H ~ (4T / 3 sqrt(gamma)) mu^(3/2)`` near the cusp."""
    _check_positive(gamma=gamma, temp=temp)
    return 4.0 * temp / (3.0 * math.sqrt(gamma)) * max(mu, 0.0) ** 1.5


def n_expert_contrast_eigenvalue(n: int, a: float, gamma: float, temp: float) -> float:
    """Growth rate ``a/(nT) - gamma`` of contrast modes at the uniform N-expert state."""
    if int(n) != n or n < 2:
        raise ParameterError(f"n >= 2 violated (n={n!r})")
    _check_positive(a=a, gamma=gamma, temp=temp)
    return a / (n * temp) - gamma


def n_expert_threshold(n: int, gamma: float, temp: float) -> float:
    """Feedback ``a = n gamma T`` at which the uniform N-expert state loses stability."""
    if int(n) != n or n < 2:
        raise ParameterError(f"n >= 2 violated (n={n!r})")
    _check_positive(gamma=gamma, temp=temp)
    return n * gamma * temp


def n_expert_field(r, a: float, gamma: float, temp: float, b=None) -> np.ndarray:
    """Mean-field drift ``a p_i(r) - gamma r_i + b_i`` of the N-expert router."""
    r = np.asarray(r, dtype=float)
    z = (r - r.max()) / temp
    p = np.exp(z)
    p /= p.sum()
    out = a * p - gamma * r
    if b is not None:
        out = out + np.asarray(b, dtype=float)
    return out


def n_expert_uniform_state(n: int, a: float, gamma: float) -> np.ndarray:
    return np.full(n, a / (n * gamma))
