"""Batch-routing and trainable-MoE experiment protocols.

Every protocol is a pure function of its config and master seed. Random
streams are keyed by grid coordinates (see :func:`routerlab.simulator.make_rng`),
so results do not depend on the order or process in which cells run.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .bifurcation import (
    critical_temperature,
    hysteresis_boundary,
    hysteresis_width,
)
from .model import ParameterError, RouterParams, RouterState
from .moe import (
    HardMoEModel,
    SoftMoEModel,
    hard_forward,
    soft_forward,
    target,
    train_hard,
    train_soft,
)
from .simulator import (
    SimConfig,
    ensemble_paths,
    make_rng,
    map_ordered,
    mean_field_on_grid,
    simulate_steps,
)

NO_SWITCH = "no_switch"
UNDEFINED = "undefined"
NO_ONSET = "no_onset"


@dataclass
class Table:
    """Rows destined for one CSV file plus a scalar summary for the sidecar."""

    name: str
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict = field(default_factory=dict)
    # column -> tag written in place of NaN
    sentinels: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


# ---------------------------------------------------------------------------
# quasi-static sweeps of the batch router


@dataclass(frozen=True)
class SweepSchedule:
    h_values: tuple[float, ...]
    steps_per_value: int = 16000
    direction: str = "up"
    warm_start: bool = True

    def __post_init__(self):
        h = np.asarray(self.h_values, dtype=float)
        if self.direction not in ("up", "down"):
            raise ParameterError(f"direction in {{up, down}} violated ({self.direction!r})")
        if h.size < 1:
            raise ParameterError("h_values must be nonempty")
        steps = np.diff(h)
        if self.direction == "up" and np.any(steps <= 0):
            raise ParameterError("h_values strictly increasing violated for an up sweep")
        if self.direction == "down" and np.any(steps >= 0):
            raise ParameterError("h_values strictly decreasing violated for a down sweep")
        if int(self.steps_per_value) != self.steps_per_value or self.steps_per_value < 1:
            raise ParameterError(f"steps_per_value >= 1 violated ({self.steps_per_value!r})")
        object.__setattr__(self, "h_values", tuple(float(v) for v in h))

    @classmethod
    def symmetric(cls, h_max: float, n_values: int = 81, steps_per_value: int = 16000,
                  direction: str = "up", warm_start: bool = True) -> SweepSchedule:
        if not h_max > 0:
            raise ParameterError(f"h_max > 0 violated (h_max={h_max!r})")
        h = np.linspace(-h_max, h_max, n_values)
        if direction == "down":
            h = h[::-1]
        return cls(tuple(h), steps_per_value, direction, warm_start)

    def reversed(self) -> SweepSchedule:
        flip = "down" if self.direction == "up" else "up"
        return SweepSchedule(self.h_values[::-1], self.steps_per_value, flip, self.warm_start)

    @property
    def spacing(self) -> float:
        if len(self.h_values) < 2:
            return 0.0
        return abs(self.h_values[1] - self.h_values[0])


def default_schedule(a: float, gamma: float = 1.0, temp: float = 1.0, n_values: int = 81,
                     steps_per_value: int = 16000, span: float = 1.5, h_floor: float = 0.1) -> SweepSchedule:
    """Up sweep over ``[-span*H(a), span*H(a)]``; ``h_floor`` bounds the range below when ``H`` is tiny or zero."""
    H = hysteresis_boundary(a, gamma, temp)
    return SweepSchedule.symmetric(max(span * H, h_floor), n_values, steps_per_value, "up")


@dataclass(frozen=True)
class SweepRecord:
    h: float
    mean_u_hat: float
    direction: str


def sweep_router(a: float, gamma: float, temp: float, schedule: SweepSchedule, rng: np.random.Generator,
                 eta: float = 0.002, batch_size: int = 512, rho: float = 0.0,
                 init: tuple[float, float] = (0.0, 0.0), average_fraction: float = 0.5) -> list[SweepRecord]:
    """Step ``h`` through ``schedule``, settling the router at each value.

    Each record holds the mean u_hat over the trailing ``average_fraction`` of
    the settle steps. With ``warm_start`` the scores carry over between values.
    """
    n = schedule.steps_per_value
    tail = max(1, int(round(n * average_fraction)))
    r1, r2 = init
    out = []
    for h in schedule.h_values:
        if not schedule.warm_start:
            r1, r2 = init
        params = RouterParams(a, gamma, temp, h=h)
        r1, r2, _, us = simulate_steps(r1, r2, params, eta, batch_size, rho, n, rng)
        out.append(SweepRecord(h, float(np.mean(us[-tail:])), schedule.direction))
    return out


def switch_point(records: list[SweepRecord]) -> float:
    """First ``h`` at which the record's u_hat has the opposite sign to its predecessor; NaN if none."""
    prev = 0.0
    for rec in records:
        s = math.copysign(1.0, rec.mean_u_hat) if rec.mean_u_hat != 0 else 0.0
        if s != 0 and prev != 0 and s != prev:
            return rec.h
        if s != 0:
            prev = s
    return float("nan")


@dataclass
class HysteresisResult:
    up: list[SweepRecord]
    down: list[SweepRecord]
    switch_up: float
    switch_down: float
    predicted_H: float
    spacing: float

    @property
    def width(self) -> float:
        return self.switch_up - self.switch_down

    @property
    def predicted_width(self) -> float:
        return 2.0 * self.predicted_H

    def table(self) -> Table:
        rows = [(r.h, r.mean_u_hat, r.direction) for r in self.up + self.down]
        return Table(
            "hysteresis",
            ("h", "mean_u_hat", "direction"),
            rows,
            {
                "switch_up": _sentinel(self.switch_up, NO_SWITCH),
                "switch_down": _sentinel(self.switch_down, NO_SWITCH),
                "measured_width": _sentinel(self.width, NO_SWITCH),
                "predicted_fold_lower": -self.predicted_H,
                "predicted_fold_upper": self.predicted_H,
                "predicted_width": self.predicted_width,
            },
        )


def _sweep_job(args):
    a, gamma, temp, schedule, eta, batch_size, rho, seed, key = args
    return sweep_router(a, gamma, temp, schedule, make_rng(seed, *key), eta, batch_size, rho)


def _hysteresis_jobs(a, gamma, temp, schedule, eta, batch_size, rho, seed, key):
    if schedule.direction != "up":
        schedule = schedule.reversed()
    down = schedule.reversed()
    return [
        (a, gamma, temp, schedule, eta, batch_size, rho, seed, (*key, 0)),
        (a, gamma, temp, down, eta, batch_size, rho, seed, (*key, 1)),
    ]


def _assemble(a, gamma, temp, schedule, rho, up, down) -> HysteresisResult:
    return HysteresisResult(
        up=up,
        down=down,
        switch_up=switch_point(up),
        switch_down=switch_point(down),
        predicted_H=hysteresis_boundary(max(a - rho, 0.0), gamma, temp),
        spacing=schedule.spacing,
    )


def exp_hysteresis(a: float = 4.0, gamma: float = 1.0, temp: float = 1.0, schedule: SweepSchedule | None = None,
                   eta: float = 0.002, batch_size: int = 512, rho: float = 0.0, seed: int = 0,
                   workers: int = 1) -> HysteresisResult:
    """Up and down quasi-static sweeps in ``h`` with measured switch points and predicted folds."""
    if schedule is None:
        schedule = default_schedule(a, gamma, temp)
    jobs = _hysteresis_jobs(a, gamma, temp, schedule, eta, batch_size, rho, seed, (0,))
    up, down = map_ordered(_sweep_job, jobs, workers)
    return _assemble(a, gamma, temp, schedule, rho, up, down)


def exp_hysteresis_width_vs_a(a_grid=(2.5, 3.0, 4.0, 5.0), gamma: float = 1.0, temp: float = 1.0,
                              n_values: int = 81, steps_per_value: int = 16000, eta: float = 0.002,
                              batch_size: int = 512, seed: int = 0, workers: int = 1) -> Table:
    """Measured loop width against ``2 H(a)`` for each ``a``, each on its own default schedule."""
    scheds = [default_schedule(a, gamma, temp, n_values, steps_per_value) for a in a_grid]
    jobs = []
    for i, (a, s) in enumerate(zip(a_grid, scheds)):
        jobs += _hysteresis_jobs(a, gamma, temp, s, eta, batch_size, 0.0, seed, (i,))
    sweeps = map_ordered(_sweep_job, jobs, workers)
    rows = []
    for i, (a, s) in enumerate(zip(a_grid, scheds)):
        res = _assemble(a, gamma, temp, s, 0.0, sweeps[2 * i], sweeps[2 * i + 1])
        rows.append((float(a), res.width, res.predicted_width, res.switch_up, res.switch_down, s.spacing))
    return Table(
        "width_vs_a",
        ("a", "measured_width", "predicted_width", "switch_up", "switch_down", "grid_spacing"),
        rows,
        {"gamma": gamma, "temp": temp},
        {"measured_width": NO_SWITCH, "switch_up": NO_SWITCH, "switch_down": NO_SWITCH},
    )


def exp_balancing_feedback(a: float = 4.0, rho_grid=(0.0, 0.4, 0.8, 1.2, 1.6, 2.0, 2.2), gamma: float = 1.0,
                           temp: float = 1.0, n_values: int = 81, steps_per_value: int = 16000, eta: float = 0.002,
                           batch_size: int = 512, seed: int = 0, workers: int = 1) -> Table:
    """Loop width with load-feedback ``rho`` against ``2 H(a - rho)``.

    All ``rho`` share the schedule built from the bare ``a``.
    """
    sched = default_schedule(a, gamma, temp, n_values, steps_per_value)
    jobs = []
    for i, rho in enumerate(rho_grid):
        jobs += _hysteresis_jobs(a, gamma, temp, sched, eta, batch_size, float(rho), seed, (i,))
    sweeps = map_ordered(_sweep_job, jobs, workers)
    rows = []
    for i, rho in enumerate(rho_grid):
        res = _assemble(a, gamma, temp, sched, float(rho), sweeps[2 * i], sweeps[2 * i + 1])
        rows.append((float(rho), res.width, hysteresis_width(a - rho, gamma, temp), a - rho))
    return Table(
        "balancing",
        ("rho", "measured_width", "predicted_width", "a_eff"),
        rows,
        {"a": a, "gamma": gamma, "temp": temp, "grid_spacing": sched.spacing,
         "rho_threshold": a - 2.0 * gamma * temp},
        {"measured_width": NO_SWITCH},
    )


# ---------------------------------------------------------------------------
# mean-field comparison


def exp_mean_field_comparison(a: float = 3.0, h: float = 0.08, gamma: float = 1.0, temp: float = 1.0,
                              batch_size: int = 512, eta: float = 0.002, n_runs: int = 40, t_end: float = 10.0,
                              seed: int = 0, workers: int = 1) -> Table:
    """Ensemble mean of u_hat against ``tanh(y_mf / 2T)`` on the ``t = n eta`` grid."""
    params = RouterParams(a, gamma, temp, h=h)
    steps = int(round(t_end / eta))
    cfg = SimConfig(params, eta=eta, batch_size=batch_size, steps=steps, seed=seed)
    paths = ensemble_paths(cfg, n_runs, workers)
    mean = paths.mean(axis=0)
    std = paths.std(axis=0, ddof=1) if n_runs > 1 else np.zeros_like(mean)
    mf = mean_field_on_grid(params, 0.0, RouterState(*cfg.init), eta, steps)
    times = np.arange(steps) * eta
    dev = np.abs(mean - mf.u_hat_path)
    rows = list(zip(times.tolist(), mean.tolist(), std.tolist(), mf.u_hat_path.tolist()))
    return Table(
        "mean_field_compare",
        ("time", "mean_u_hat", "std_u_hat", "u_mf"),
        rows,
        {"max_abs_deviation": float(dev.max()) if steps else 0.0,
         "max_std": float(std.max()) if steps else 0.0, "n_runs": n_runs, "steps": steps},
    )


# ---------------------------------------------------------------------------
# collapse map and critical temperature


def final_imbalance(a, gamma, temp, steps, eta, batch_size, init_jitter, tail_fraction, rng) -> float:
    """``|mean u_hat|`` over the trailing ``tail_fraction`` of a symmetric run from a jittered start."""
    dy = rng.uniform(-init_jitter, init_jitter) if init_jitter > 0 else 0.0
    params = RouterParams(a, gamma, temp, h=0.0)
    _, _, _, us = simulate_steps(0.5 * dy, -0.5 * dy, params, eta, batch_size, 0.0, steps, rng)
    tail = max(1, int(round(steps * tail_fraction)))
    return abs(float(np.mean(us[-tail:])))


def _cell_job(args):
    a, gamma, temp, replicates, steps, eta, batch_size, jitter, tail, seed, key = args
    vals = [
        final_imbalance(a, gamma, temp, steps, eta, batch_size, jitter, tail, make_rng(seed, *key, k))
        for k in range(replicates)
    ]
    return float(np.mean(vals))


@dataclass(frozen=True)
class CollapseMapCell:
    temp: float
    gamma: float
    final_abs_u_hat: float


def exp_collapse_map(a: float = 3.0, temp_grid=None, gamma_grid=None, replicates: int = 8, t_end: float = 20.0,
                     eta: float = 0.002, batch_size: int = 512, init_jitter: float = 0.01,
                     tail_fraction: float = 0.1, seed: int = 0, workers: int = 1) -> Table:
    """Final ``|u_hat|`` at ``h = 0`` on a ``(T, gamma)`` grid, with the threshold ``T = a / 2 gamma``."""
    if temp_grid is None:
        temp_grid = np.geomspace(0.1, 3.0, 41)
    if gamma_grid is None:
        gamma_grid = np.geomspace(0.1, 3.0, 41)
    steps = int(round(t_end / eta))
    jobs = [
        (a, float(g), float(T), replicates, steps, eta, batch_size, init_jitter, tail_fraction, seed, (i, j))
        for i, T in enumerate(temp_grid)
        for j, g in enumerate(gamma_grid)
    ]
    values = map_ordered(_cell_job, jobs, workers)
    rows = []
    for job, v in zip(jobs, values):
        g, T = job[1], job[2]
        rows.append((T, g, v, critical_temperature(a, g)))
    return Table(
        "collapse_map",
        ("temp", "gamma", "final_abs_u_hat", "threshold_temp"),
        rows,
        {"a": a, "replicates": replicates, "steps": steps},
    )


def onset_from_curve(temps, values, level: float) -> float:
    """First ``T`` (ascending) where ``values`` falls below ``level``, linearly interpolated; NaN if never."""
    temps = np.asarray(temps, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.size == 0 or values[0] < level:
        return float("nan")
    for k in range(1, len(temps)):
        if values[k] < level:
            v0, v1 = values[k - 1], values[k]
            frac = (v0 - level) / (v0 - v1)
            return float(temps[k - 1] + frac * (temps[k] - temps[k - 1]))
    return float("nan")


def critical_temperature_curves(a: float = 3.0, gamma_list=(0.5, 1.0, 2.0), temp_factors=None,
                                replicates: int = 8, t_end: float = 20.0, eta: float = 0.002,
                                batch_size: int = 512, init_jitter: float = 0.01, tail_fraction: float = 0.1,
                                seed: int = 0, workers: int = 1):
    """Final ``|u_hat|`` against ``T`` for each ``gamma``; ``T`` spans ``temp_factors * T_c``.

    Replicate ``k`` uses the same stream at every ``T`` so the curves are
    smooth in ``T``.
    """
    if temp_factors is None:
        temp_factors = np.linspace(0.4, 1.2, 33)
    steps = int(round(t_end / eta))
    curves = {}
    jobs = []
    for i, g in enumerate(gamma_list):
        Tc = critical_temperature(a, g)
        temps = [float(f * Tc) for f in temp_factors]
        curves[float(g)] = temps
        jobs += [(a, float(g), T, replicates, steps, eta, batch_size, init_jitter, tail_fraction, seed, (i,))
                 for T in temps]
    values = iter(map_ordered(_cell_job, jobs, workers))
    return {g: (np.asarray(temps), np.array([next(values) for _ in temps])) for g, temps in curves.items()}


def exp_critical_temperature(a: float = 3.0, gamma_list=(0.5, 1.0, 2.0), onset_level: float = 0.1,
                             temp_factors=None, replicates: int = 8, t_end: float = 20.0, eta: float = 0.002,
                             batch_size: int = 512, init_jitter: float = 0.01, tail_fraction: float = 0.1,
                             seed: int = 0, workers: int = 1) -> Table:
    """Finite-time collapse onset ``T`` per ``gamma`` against ``T_c = a / 2 gamma``."""
    if not 0 < onset_level < 1:
        raise ParameterError(f"onset_level in (0, 1) violated ({onset_level!r})")
    curves = critical_temperature_curves(a, gamma_list, temp_factors, replicates, t_end, eta, batch_size,
                                         init_jitter, tail_fraction, seed, workers)
    rows = []
    for g, (temps, vals) in curves.items():
        rows.append((g, onset_from_curve(temps, vals, onset_level), critical_temperature(a, g)))
    return Table(
        "critical_temp",
        ("gamma", "T_onset_measured", "T_c"),
        rows,
        {"a": a, "onset_level": onset_level,
         "curves": {str(g): {"temp": t.tolist(), "final_abs_u_hat": v.tolist()} for g, (t, v) in curves.items()}},
        {"T_onset_measured": NO_ONSET},
    )


# ---------------------------------------------------------------------------
# trainable MoE sweeps


@dataclass(frozen=True)
class SoftMoEConfig:
    temp: float = 0.2
    lr: float = 0.05
    reg: float = 0.04
    batch_size: int = 64
    steps_per_value: int = 8000
    h_max: float = 5.0
    n_values: int = 21
    eval_points: int = 401


def _eval_grid(n: int):
    x = np.linspace(-1.0, 1.0, n)
    return x, target(x)


def exp_soft_moe_bias_sweep(cfg: SoftMoEConfig = SoftMoEConfig(), seed: int = 0) -> Table:
    """Warm-started up-then-down sweep of the external bias for the soft-mixing model.

    After training at each ``h`` the model is evaluated on a fixed grid:
    ``E[u_hat] = 2 E_x p1(x) - 1``, the boundary ``x*`` and the MSE. ``x*``
    is reported as undefined when ``alpha`` is zero or changed sign while
    training at that ``h``; the boundary passed through infinity there.
    """
    rng = make_rng(seed, 0)
    model = SoftMoEModel.init_random(rng, temp=cfg.temp, reg=cfg.reg, lr=cfg.lr)
    xe, ye = _eval_grid(cfg.eval_points)
    up = np.linspace(-cfg.h_max, cfg.h_max, cfg.n_values)
    rows = []
    for direction, grid in (("up", up), ("down", up[::-1])):
        for h in grid:
            model.h = float(h)
            alpha0 = model.alpha
            train_soft(model, rng, cfg.steps_per_value, cfg.batch_size)
            pred, p1 = soft_forward(model, xe)
            crossed = model.alpha == 0 or math.copysign(1.0, model.alpha) != math.copysign(1.0, alpha0)
            x_star = float("nan") if crossed else model.boundary
            rows.append((direction, float(h), float(2.0 * p1.mean() - 1.0), x_star, float(np.mean((pred - ye) ** 2))))
    return Table("soft_moe", ("direction", "h", "expected_u_hat", "x_star", "mse"), rows,
                 {"config": asdict(cfg)}, {"x_star": UNDEFINED})


@dataclass(frozen=True)
class HardMoEConfig:
    temp: float = 0.2
    lr: float = 0.05
    batch_size: int = 64
    steps_per_value: int = 100
    h_max: float = 4.0
    n_values: int = 33
    lambdas: tuple[float, ...] = (0.0, 1.0)
    scan_h: float = 2.0
    scan_lambdas: tuple[float, ...] = (0.0, 0.1, 0.3, 1.0, 3.0, 10.0)
    scan_steps: int = 4000
    replicates: int = 5
    eval_points: int = 401


def _hard_eval(model: HardMoEModel, xe, ye):
    pred, sel, p1 = hard_forward(model, xe)
    return float(2.0 * np.mean(sel == 0) - 1.0), float(np.mean(p1)), float(np.mean((pred - ye) ** 2))


def exp_hard_moe_bias_sweep(cfg: HardMoEConfig = HardMoEConfig(), seed: int = 0) -> Table:
    """Warm-started up-then-down bias sweep of the hard top-1 model for each ``lambda_lb``.

    Every ``lambda_lb`` starts from the same initialization.
    """
    xe, ye = _eval_grid(cfg.eval_points)
    up = np.linspace(-cfg.h_max, cfg.h_max, cfg.n_values)
    rows = []
    for i, lam in enumerate(cfg.lambdas):
        rng = make_rng(seed, 0)
        model = HardMoEModel.init_random(rng, temp=cfg.temp, lambda_lb=float(lam), lr=cfg.lr)
        rng = make_rng(seed, 1, i)
        for direction, grid in (("up", up), ("down", up[::-1])):
            for h in grid:
                model.h = float(h)
                train_hard(model, rng, cfg.steps_per_value, cfg.batch_size)
                u, imp, mse = _hard_eval(model, xe, ye)
                rows.append((float(lam), direction, float(h), u, imp, mse))
    return Table(
        "hard_moe_bias",
        ("lambda_lb", "direction", "h", "hard_u_hat", "soft_importance", "mse"),
        rows,
        {"config": asdict(cfg),
         "saturation_h": {str(float(l)): _sentinel(saturation_h(rows, l), "never") for l in cfg.lambdas}},
    )


def saturation_h(rows, lam: float, level: float = 0.95) -> float:
    """Smallest ``|h|`` in a bias sweep at which ``|u_hat| >= level``; NaN if never."""
    hs = [abs(r[2]) for r in rows if r[0] == lam and abs(r[3]) >= level]
    return min(hs) if hs else float("nan")


def _lambda_job(args):
    cfg, lam, seed, k = args
    rng = make_rng(seed, 2, k)
    model = HardMoEModel.init_random(rng, h=cfg.scan_h, temp=cfg.temp, lambda_lb=lam, lr=cfg.lr)
    train_hard(model, rng, cfg.scan_steps, cfg.batch_size)
    xe, ye = _eval_grid(cfg.eval_points)
    u, _, mse = _hard_eval(model, xe, ye)
    return abs(u), mse


def exp_hard_moe_lambda_scan(cfg: HardMoEConfig = HardMoEConfig(), seed: int = 0, workers: int = 1) -> Table:
    """Fresh-init training at fixed ``h`` for each ``lambda_lb``; mean and std over replicates.

    Replicate ``k`` shares its initialization across all ``lambda_lb``.
    """
    jobs = [(cfg, float(lam), seed, k) for lam in cfg.scan_lambdas for k in range(cfg.replicates)]
    res = map_ordered(_lambda_job, jobs, workers)
    rows = []
    for i, lam in enumerate(cfg.scan_lambdas):
        block = np.array(res[i * cfg.replicates:(i + 1) * cfg.replicates])
        ddof = 1 if cfg.replicates > 1 else 0
        rows.append((float(lam), float(block[:, 0].mean()), float(block[:, 0].std(ddof=ddof)),
                     float(block[:, 1].mean()), float(block[:, 1].std(ddof=ddof))))
    return Table(
        "hard_moe_lambda",
        ("lambda_lb", "mean_abs_u_hat", "std_abs_u_hat", "mean_mse", "std_mse"),
        rows,
        {"config": asdict(cfg)},
    )


def _sentinel(value: float, tag: str):
    return tag if (value is None or (isinstance(value, float) and math.isnan(value))) else value


# ---------------------------------------------------------------------------
# serialization


def format_cell(value, sentinel: str | None = None) -> str:
    """Shortest round-trip text for numbers; NaN becomes ``sentinel`` when one is declared."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v) and sentinel is not None:
            return sentinel
        return repr(v)
    return str(value)


def table_text(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([format_cell(v, table.sentinels.get(c)) for c, v in zip(table.columns, row)])
    return buf.getvalue()


def write_csv(table: Table, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(table_text(table))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_sidecar(path, manifest: dict) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
