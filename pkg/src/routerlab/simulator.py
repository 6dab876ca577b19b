"""Stochastic batch routing and its deterministic mean-field limit.

Each step routes ``B`` tokens at frozen scores, so the count sent to expert 1
is ``N1 ~ Binomial(B, p1)``, then applies the summed reinforcement

    r_i <- r_i + eta * (a l_i - rho (l_i - 1/2) - gamma r_i + b_i),   l_i = N_i / B.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import ParameterError, RouterParams, RouterState, _p1_scalar


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the stream ``(seed, *key)``.

    Streams are derived with ``SeedSequence(seed, spawn_key=key)`` so run ``k``
    of an ensemble sees the same numbers regardless of execution order.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class SimConfig:
    params: RouterParams
    eta: float = 0.002
    batch_size: int = 512
    rho: float = 0.0
    steps: int = 0
    seed: int = 0
    init: tuple[float, float] = (0.0, 0.0)
    # half-width of the uniform jitter added to y0 = r1 - r2, drawn from the run's stream
    init_jitter: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ParameterError(f"eta > 0 violated (eta={self.eta!r})")
        if int(self.batch_size) != self.batch_size or self.batch_size < 1:
            raise ParameterError(f"batch_size >= 1 violated (batch_size={self.batch_size!r})")
        if not (math.isfinite(self.rho) and self.rho >= 0):
            raise ParameterError(f"rho >= 0 violated (rho={self.rho!r})")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ParameterError(f"steps >= 0 violated (steps={self.steps!r})")
        if self.init_jitter < 0:
            raise ParameterError(f"init_jitter >= 0 violated (init_jitter={self.init_jitter!r})")


@dataclass
class Trajectory:
    """Per-step record; entry ``n`` describes the state before update ``n``."""

    times: np.ndarray
    y_path: np.ndarray
    u_hat_path: np.ndarray
    l1_path: np.ndarray
    init: RouterState = field(default_factory=RouterState)
    final: RouterState = field(default_factory=RouterState)

    def __len__(self):
        return len(self.times)


def drift(r1, r2, l1, params: RouterParams, rho: float = 0.0):
    """Per-expert increment ``(r_i^{n+1} - r_i^n) / eta`` given batch fraction ``l1``."""
    l2 = 1.0 - l1
    d1 = params.a * l1 - rho * (l1 - 0.5) - params.gamma * r1 + params.b1
    d2 = params.a * l2 - rho * (l2 - 0.5) - params.gamma * r2 + params.b2
    return d1, d2


def step_batch(state: RouterState, cfg: SimConfig, rng: np.random.Generator):
    """Route one batch and update the scores; returns ``(new_state, u_hat, l1)``."""
    p = cfg.params
    p1 = _p1_scalar(state.r1, state.r2, p.temp)
    n1 = int(rng.binomial(cfg.batch_size, p1))
    l1 = n1 / cfg.batch_size
    d1, d2 = drift(state.r1, state.r2, l1, p, cfg.rho)
    new = RouterState(state.r1 + cfg.eta * d1, state.r2 + cfg.eta * d2)
    return new, 2.0 * l1 - 1.0, l1


def simulate_steps(r1, r2, params: RouterParams, eta, batch_size, rho, steps, rng):
    """Advance ``steps`` batches from ``(r1, r2)``.

    Returns the final scores plus ``y`` and ``u_hat`` arrays recorded before
    each update. This is the hot loop shared by every experiment.
    """
    a, gamma, T = params.a, params.gamma, params.temp
    b1, b2 = params.b1, params.b2
    B = int(batch_size)
    binom = rng.binomial
    exp = math.exp
    ys = np.empty(steps)
    us = np.empty(steps)
    for n in range(steps):
        y = r1 - r2
        # p1 as in the two-exponential softmax with the max subtracted
        if y >= 0:
            e = exp(-y / T)
            p1 = 1.0 / (1.0 + e)
        else:
            e = exp(y / T)
            p1 = e / (1.0 + e)
        l1 = binom(B, p1) / B
        l2 = 1.0 - l1
        ys[n] = y
        us[n] = 2.0 * l1 - 1.0
        r1 = r1 + eta * (a * l1 - rho * (l1 - 0.5) - gamma * r1 + b1)
        r2 = r2 + eta * (a * l2 - rho * (l2 - 0.5) - gamma * r2 + b2)
    return r1, r2, ys, us


def _initial_state(cfg: SimConfig, rng: np.random.Generator) -> RouterState:
    r1, r2 = (float(v) for v in cfg.init)
    if cfg.init_jitter > 0:
        dy = rng.uniform(-cfg.init_jitter, cfg.init_jitter)
        r1, r2 = r1 + 0.5 * dy, r2 - 0.5 * dy
    return RouterState(r1, r2)


def _run(cfg: SimConfig, rng: np.random.Generator) -> Trajectory:
    init = _initial_state(cfg, rng)
    r1, r2, ys, us = simulate_steps(
        init.r1, init.r2, cfg.params, cfg.eta, cfg.batch_size, cfg.rho, cfg.steps, rng
    )
    return Trajectory(
        times=np.arange(cfg.steps) * cfg.eta,
        y_path=ys,
        u_hat_path=us,
        l1_path=0.5 * (us + 1.0),
        init=init,
        final=RouterState(r1, r2),
    )


def run_trajectory(cfg: SimConfig, run_index: int | None = None) -> Trajectory:
    """One stochastic run; deterministic in ``(cfg.seed, run_index)``."""
    rng = make_rng(cfg.seed) if run_index is None else make_rng(cfg.seed, run_index)
    return _run(cfg, rng)


def _ensemble_member(args):
    cfg, k = args
    return run_trajectory(cfg, k).u_hat_path


def map_ordered(fn, items, workers: int = 1):
    """``list(map(fn, items))``, optionally across processes; order is preserved."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def ensemble_paths(cfg: SimConfig, n_runs: int, workers: int = 1) -> np.ndarray:
    """``(n_runs, steps)`` array of u_hat paths, run ``k`` on stream ``(seed, k)``."""
    if n_runs < 1:
        raise ParameterError(f"n_runs >= 1 violated (n_runs={n_runs!r})")
    paths = map_ordered(_ensemble_member, [(cfg, k) for k in range(n_runs)], workers)
    return np.vstack(paths) if cfg.steps else np.empty((n_runs, 0))


def run_ensemble(cfg: SimConfig, n_runs: int, workers: int = 1):
    """Pointwise mean and sample standard deviation of u_hat over ``n_runs`` runs."""
    paths = ensemble_paths(cfg, n_runs, workers)
    mean = paths.mean(axis=0)
    if n_runs == 1:
        return mean, np.zeros_like(mean)
    return mean, paths.std(axis=0, ddof=1)


def _rk4_rhs(r, params: RouterParams, rho: float):
    a_eff = params.a - rho
    y = r[0] - r[1]
    T = params.temp
    if y >= 0:
        e = math.exp(-y / T)
        p1 = 1.0 / (1.0 + e)
    else:
        e = math.exp(y / T)
        p1 = e / (1.0 + e)
    p2 = 1.0 - p1
    return (
        a_eff * p1 + 0.5 * rho - params.gamma * r[0] + params.b1,
        a_eff * p2 + 0.5 * rho - params.gamma * r[1] + params.b2,
    )


def integrate_mean_field(
    params: RouterParams,
    rho: float = 0.0,
    init: RouterState = RouterState(),
    t_end: float = 10.0,
    dt: float = 1e-3,
) -> Trajectory:
    """Classical RK4 on ``dr_i/dt = (a - rho) p_i + rho/2 - gamma r_i + b_i``.

    The step is shrunk to ``t_end / ceil(t_end / dt)`` so the grid lands on
    ``t_end``; the returned paths include both endpoints.
    """
    if not (dt > 0):
        raise ParameterError(f"dt > 0 violated (dt={dt!r})")
    if not (t_end >= 0):
        raise ParameterError(f"t_end >= 0 violated (t_end={t_end!r})")
    n = int(math.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    h = t_end / n if n else 0.0
    r = (float(init.r1), float(init.r2))
    rs = np.empty((n + 1, 2))
    rs[0] = r
    for k in range(n):
        k1 = _rk4_rhs(r, params, rho)
        k2 = _rk4_rhs((r[0] + 0.5 * h * k1[0], r[1] + 0.5 * h * k1[1]), params, rho)
        k3 = _rk4_rhs((r[0] + 0.5 * h * k2[0], r[1] + 0.5 * h * k2[1]), params, rho)
        k4 = _rk4_rhs((r[0] + h * k3[0], r[1] + h * k3[1]), params, rho)
        r = (
            r[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            r[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        )
        rs[k + 1] = r
    y = rs[:, 0] - rs[:, 1]
    u = np.tanh(y / (2.0 * params.temp))
    return Trajectory(
        times=np.arange(n + 1) * h,
        y_path=y,
        u_hat_path=u,
        l1_path=0.5 * (1.0 + u),
        init=RouterState(*rs[0]),
        final=RouterState(*rs[-1]),
    )


def mean_field_on_grid(params: RouterParams, rho: float, init: RouterState, eta: float, steps: int,
                       max_dt: float = 1e-3) -> Trajectory:
    """Mean-field solution sampled at ``t = n * eta`` for ``n = 0 .. steps - 1``."""
    k = max(1, int(math.ceil(eta / max_dt - 1e-9)))
    t_end = max(steps - 1, 0) * eta
    traj = integrate_mean_field(params, rho, init, t_end, eta / k)
    sl = slice(0, None, k)
    return Trajectory(
        times=np.arange(steps) * eta,
        y_path=traj.y_path[sl][:steps],
        u_hat_path=traj.u_hat_path[sl][:steps],
        l1_path=traj.l1_path[sl][:steps],
        init=traj.init,
        final=traj.final,
    )
