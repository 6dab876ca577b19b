"""Command-line front end: ``routerlab <command> [flags]``.

Every command writes one CSV per table and a JSON manifest into ``--out-dir``.
Passing that manifest back through ``--config`` replays the run.

Exit codes: 0 success, 2 usage, 3 parameter domain, 4 I/O.
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as ex
from .bifurcation import find_equilibria, fold_curve, hysteresis_boundary
from .model import RouterParams, RouterState
from .simulator import SimConfig, integrate_mean_field, run_ensemble, run_trajectory

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Opt:
    name: str
    kind: str  # "float" | "int" | "floats"
    default: object
    help: str = ""


def _coerce(opt: Opt, value):
    try:
        if opt.kind == "float":
            return float(value)
        if opt.kind == "int":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if opt.kind == "floats":
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            return [float(v) for v in value]
    except (TypeError, ValueError):
        raise UsageError(f"--{_flag(opt.name)}: cannot read {value!r} as {opt.kind}") from None
    raise AssertionError(opt.kind)


def _flag(name: str) -> str:
    return name.replace("_", "-")


# ---------------------------------------------------------------------------
# command runners: (cfg, seed, threads) -> (tables, summary lines)


def _params(c, h_key="h"):
    return RouterParams(c["a"], c["gamma"], c["temp"], h=c.get(h_key, 0.0))


def _run_equilibria(c, seed, threads):
    eqs = find_equilibria(_params(c), c["intervals"])
    t = ex.Table("equilibria", ("y", "stability", "f_y"), [(e.y, e.stability, e.f_y) for e in eqs],
                 {"regime": eqs.regime})
    lines = [f"{eqs.regime}: {len(eqs)} equilibria"] + [f"  y = {e.y:+.6f}  {e.stability}" for e in eqs]
    return [t], lines


def _run_fold_curve(c, seed, threads):
    q = np.linspace(-c["q_max"], c["q_max"], c["n_points"])
    pts = fold_curve(q, c["gamma"], c["temp"])
    t = ex.Table("fold_curve", ("q", "a", "h"), [(p.q, p.a, p.h) for p in pts])
    return [t], [f"{len(pts)} fold-curve points"]


def _run_boundary(c, seed, threads):
    H = hysteresis_boundary(c["a"], c["gamma"], c["temp"])
    t = ex.Table("hysteresis_boundary", ("a", "H", "width"), [(c["a"], H, 2.0 * H)])
    return [t], [f"H = {H!r}"]


def _run_simulate(c, seed, threads):
    y0 = c["init_y"]
    cfg = SimConfig(_params(c), eta=c["eta"], batch_size=c["batch_size"], rho=c["rho"], steps=c["steps"],
                    seed=seed, init=(0.5 * y0, -0.5 * y0), init_jitter=c["init_jitter"])
    times = np.arange(cfg.steps) * cfg.eta
    if c["n_runs"] == 1:
        tr = run_trajectory(cfg)
        t = ex.Table("simulate", ("time", "y", "u_hat"), list(zip(times.tolist(), tr.y_path.tolist(),
                                                                   tr.u_hat_path.tolist())))
        return [t], [f"final y = {tr.final.y!r}"]
    mean, std = run_ensemble(cfg, c["n_runs"], threads)
    t = ex.Table("simulate", ("time", "mean_u_hat", "std_u_hat"), list(zip(times.tolist(), mean.tolist(),
                                                                           std.tolist())))
    return [t], [f"{c['n_runs']} runs, final mean u_hat = {mean[-1]!r}" if len(mean) else "0 steps"]


def _run_mean_field(c, seed, threads):
    tr = integrate_mean_field(_params(c), c["rho"], RouterState.from_difference(c["init_y"]), c["t_end"], c["dt"])
    t = ex.Table("mean_field", ("time", "y", "u"), list(zip(tr.times.tolist(), tr.y_path.tolist(),
                                                            tr.u_hat_path.tolist())))
    return [t], [f"final y = {tr.final.y!r}"]


def _run_mf_compare(c, seed, threads):
    t = ex.exp_mean_field_comparison(c["a"], c["h"], c["gamma"], c["temp"], c["batch_size"], c["eta"],
                                     c["n_runs"], c["t_end"], seed, threads)
    return [t], [f"max |mean u_hat - u_mf| = {t.summary['max_abs_deviation']:.5f}"]


def _run_hysteresis(c, seed, threads):
    sched = ex.default_schedule(c["a"], c["gamma"], c["temp"], c["n_values"], c["steps_per_value"], c["span"])
    res = ex.exp_hysteresis(c["a"], c["gamma"], c["temp"], sched, c["eta"], c["batch_size"], c["rho"], seed, threads)
    t = res.table()
    s = t.summary
    return [t], [f"switch up {s['switch_up']}, down {s['switch_down']}",
                 f"width {s['measured_width']} (predicted {s['predicted_width']:.5f})"]


def _run_collapse_map(c, seed, threads):
    temps = np.geomspace(c["temp_min"], c["temp_max"], c["n_temp"])
    gammas = np.geomspace(c["gamma_min"], c["gamma_max"], c["n_gamma"])
    t = ex.exp_collapse_map(c["a"], temps, gammas, c["replicates"], c["t_end"], c["eta"], c["batch_size"],
                            c["init_jitter"], c["tail_fraction"], seed, threads)
    return [t], [f"{len(t.rows)} cells"]


def _run_critical_temp(c, seed, threads):
    factors = np.linspace(c["factor_min"], c["factor_max"], c["n_temp"])
    t = ex.exp_critical_temperature(c["a"], c["gammas"], c["onset_level"], factors, c["replicates"], c["t_end"],
                                    c["eta"], c["batch_size"], c["init_jitter"], c["tail_fraction"], seed, threads)
    return [t], [f"gamma {g}: onset {ex.format_cell(o, ex.NO_ONSET)}, T_c {tc!r}" for g, o, tc in t.rows]


def _run_width_vs_a(c, seed, threads):
    t = ex.exp_hysteresis_width_vs_a(c["a_grid"], c["gamma"], c["temp"], c["n_values"], c["steps_per_value"],
                                     c["eta"], c["batch_size"], seed, threads)
    return [t], [f"a {r[0]}: width {ex.format_cell(r[1], ex.NO_SWITCH)} vs {r[2]:.5f}" for r in t.rows]


def _run_balancing(c, seed, threads):
    t = ex.exp_balancing_feedback(c["a"], c["rho_grid"], c["gamma"], c["temp"], c["n_values"],
                                  c["steps_per_value"], c["eta"], c["batch_size"], seed, threads)
    return [t], [f"rho {r[0]}: width {ex.format_cell(r[1], ex.NO_SWITCH)} vs {r[2]:.5f}" for r in t.rows]


def _run_soft_moe(c, seed, threads):
    cfg = ex.SoftMoEConfig(**c)
    t = ex.exp_soft_moe_bias_sweep(cfg, seed)
    return [t], [f"{len(t.rows)} sweep records"]


def _run_hard_moe(c, seed, threads):
    c = dict(c)
    for k in ("lambdas", "scan_lambdas"):
        c[k] = tuple(c[k])
    cfg = ex.HardMoEConfig(**c)
    bias = ex.exp_hard_moe_bias_sweep(cfg, seed)
    scan = ex.exp_hard_moe_lambda_scan(cfg, seed, threads)
    lines = [f"lambda {k}: saturation at |h| = {v}" for k, v in bias.summary["saturation_h"].items()]
    lines += [f"lambda {r[0]}: |u_hat| {r[1]:.3f}, mse {r[3]:.4f}" for r in scan.rows]
    return [bias, scan], lines


# ---------------------------------------------------------------------------
# option tables

_ROUTER = [Opt("a", "float", 4.0), Opt("gamma", "float", 1.0), Opt("temp", "float", 1.0)]
_BATCH = [Opt("eta", "float", 0.002, "adaptation step"), Opt("batch_size", "int", 512)]
_SWEEP = [Opt("n_values", "int", 81, "h grid size"), Opt("steps_per_value", "int", 16000, "settle steps per h")]
_ENSEMBLE = [Opt("replicates", "int", 8), Opt("t_end", "float", 20.0, "run length in units of eta*steps"),
             *_BATCH, Opt("init_jitter", "float", 0.01, "half-width of uniform y0 jitter"),
             Opt("tail_fraction", "float", 0.1, "trailing fraction averaged for the final |u_hat|")]


def _with(opts, **defaults):
    return [Opt(o.name, o.kind, defaults.get(o.name, o.default), o.help) for o in opts]


_soft = ex.SoftMoEConfig()
_hard = ex.HardMoEConfig()

COMMANDS = {
    "equilibria": ([*_ROUTER, Opt("h", "float", 0.0), Opt("intervals", "int", 4096, "root-scan sub-intervals")],
                   _run_equilibria, "roots of the reduced field and their stability"),
    "fold-curve": ([Opt("gamma", "float", 1.0), Opt("temp", "float", 1.0), Opt("q_max", "float", 2.0),
                    Opt("n_points", "int", 81)], _run_fold_curve, "parametric fold set (a(q), h(q))"),
    "hysteresis-boundary": (_ROUTER, _run_boundary, "edge H(a) of the bistable band"),
    "simulate": ([*_ROUTER, Opt("h", "float", 0.0), *_BATCH, Opt("rho", "float", 0.0, "balancing feedback"),
                  Opt("steps", "int", 5000), Opt("init_y", "float", 0.0), Opt("init_jitter", "float", 0.0),
                  Opt("n_runs", "int", 1, "ensemble size; >1 writes mean and std")],
                 _run_simulate, "stochastic batch-routing run"),
    "mean-field": ([*_ROUTER, Opt("h", "float", 0.0), Opt("rho", "float", 0.0), Opt("init_y", "float", 0.0),
                    Opt("t_end", "float", 10.0), Opt("dt", "float", 1e-3)],
                   _run_mean_field, "RK4 solution of the mean-field ODE"),
    "exp mean-field-compare": ([*_with(_ROUTER, a=3.0), Opt("h", "float", 0.08), *_BATCH, Opt("n_runs", "int", 40),
                                Opt("t_end", "float", 10.0)], _run_mf_compare, "ensemble mean vs mean-field"),
    "exp hysteresis": ([*_ROUTER, *_SWEEP, Opt("span", "float", 1.5, "h range as a multiple of H(a)"), *_BATCH,
                        Opt("rho", "float", 0.0)], _run_hysteresis, "up/down quasi-static sweep in h"),
    "exp collapse-map": ([Opt("a", "float", 3.0), Opt("temp_min", "float", 0.1), Opt("temp_max", "float", 3.0),
                          Opt("n_temp", "int", 41), Opt("gamma_min", "float", 0.1), Opt("gamma_max", "float", 3.0),
                          Opt("n_gamma", "int", 41), *_ENSEMBLE], _run_collapse_map, "final |u_hat| over (T, gamma)"),
    "exp critical-temp": ([Opt("a", "float", 3.0), Opt("gammas", "floats", [0.5, 1.0, 2.0]),
                           Opt("onset_level", "float", 0.1), Opt("factor_min", "float", 0.4, "T grid start / T_c"),
                           Opt("factor_max", "float", 1.2, "T grid end / T_c"), Opt("n_temp", "int", 33),
                           *_ENSEMBLE], _run_critical_temp, "measured collapse onset vs T_c"),
    "exp width-vs-a": ([Opt("a_grid", "floats", [2.5, 3.0, 4.0, 5.0]), Opt("gamma", "float", 1.0),
                        Opt("temp", "float", 1.0), *_SWEEP, *_BATCH], _run_width_vs_a, "loop width vs 2H(a)"),
    "exp balancing": ([Opt("a", "float", 4.0), Opt("rho_grid", "floats", [0.0, 0.4, 0.8, 1.2, 1.6, 2.0, 2.2]),
                       Opt("gamma", "float", 1.0), Opt("temp", "float", 1.0), *_SWEEP, *_BATCH],
                      _run_balancing, "loop width under balancing feedback"),
    "exp soft-moe": ([Opt(k, "int" if isinstance(v, int) else "float", v) for k, v in vars(_soft).items()],
                     _run_soft_moe, "bias sweep of the soft-mixing model"),
    "exp hard-moe": ([Opt(k, "floats" if isinstance(v, tuple) else "int" if isinstance(v, int) else "float",
                          list(v) if isinstance(v, tuple) else v) for k, v in vars(_hard).items()],
                     _run_hard_moe, "bias sweep and lambda scan of the hard top-1 model"),
}


def _slug(command: str) -> str:
    return command.split()[-1].replace("-", "_")


def _show(v):
    return ",".join(repr(x) for x in v) if isinstance(v, list) else repr(v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="routerlab", description="Adaptive softmax routing toolkit.")
    parser.add_argument("--version", action="version", version=f"routerlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    exp_parser = sub.add_parser("exp", help="experiment protocols")
    exp_sub = exp_parser.add_subparsers(dest="experiment", metavar="experiment", required=True)
    for name, (opts, _, desc) in COMMANDS.items():
        where, leaf = (exp_sub, name.split()[1]) if name.startswith("exp ") else (sub, name)
        p = where.add_parser(leaf, help=desc, description=desc)
        for o in opts:
            p.add_argument(f"--{_flag(o.name)}", dest=o.name, default=None,
                           help=f"{o.help + ' ' if o.help else ''}(default: {_show(o.default)})")
        p.add_argument("--seed", type=int, default=None, help="master seed (default: 0)")
        p.add_argument("--out-dir", default=None, help="output directory (default: out)")
        p.add_argument("--config", default=None, help="JSON config or run manifest; flags override it")
        p.add_argument("--threads", type=int, default=1, help="worker processes (default: 1)")
        p.add_argument("--stdout", action="store_true", help="also print CSV data to stdout (default: off)")
    return parser


def resolve(command: str, args: argparse.Namespace) -> tuple[dict, int, str]:
    """Defaults, then the ``--config`` file, then explicit flags."""
    opts = {o.name: o for o in COMMANDS[command][0]}
    cfg = {k: o.default for k, o in opts.items()}
    seed, out_dir = 0, "out"
    if args.config is not None:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as e:
            raise UsageError(f"--config: not valid JSON ({e})") from None
        if not isinstance(data, dict):
            raise UsageError("--config: expected a JSON object")
        if "subcommand" in data:
            if data["subcommand"] != command:
                raise UsageError(f"--config: manifest is for {data['subcommand']!r}, not {command!r}")
            seed = data.get("seed", seed)
            data = data.get("config", {})
        else:
            data = dict(data)
            seed = data.pop("seed", seed)
        unknown = set(data) - set(opts)
        if unknown:
            raise UsageError(f"--config: unknown keys {sorted(unknown)}")
        for k, v in data.items():
            cfg[k] = _coerce(opts[k], v)
    for k, o in opts.items():
        v = getattr(args, k)
        if v is not None:
            cfg[k] = _coerce(o, v)
    if args.seed is not None:
        seed = args.seed
    if args.out_dir is not None:
        out_dir = args.out_dir
    if not isinstance(seed, int) or seed < 0:
        raise UsageError(f"seed must be a nonnegative integer (got {seed!r})")
    return cfg, seed, out_dir


def version_string() -> str:
    try:
        rev = subprocess.run(["git", "describe", "--always", "--dirty"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5)
        if rev.returncode == 0 and rev.stdout.strip():
            return f"{__version__}+g{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def run(command: str, cfg: dict, seed: int, out_dir: str, threads: int = 1, to_stdout: bool = False) -> dict:
    """Execute ``command`` and write its CSVs and manifest; returns the manifest."""
    if threads < 1:
        raise UsageError(f"--threads must be >= 1 (got {threads})")
    t0 = time.perf_counter()
    tables, lines = COMMANDS[command][1](cfg, seed, threads)
    wall = time.perf_counter() - t0
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for t in tables:
        p = out / f"{t.name}.csv"
        ex.write_csv(t, p)
        paths.append(str(p))
    manifest = {
        "subcommand": command,
        "config": cfg,
        "seed": seed,
        "threads": threads,
        "version": version_string(),
        "wall_time": wall,
        "outputs": paths,
        "summary": {t.name: {k: v for k, v in t.summary.items() if k != "config"} for t in tables},
    }
    ex.write_sidecar(out / f"{_slug(command)}.json", manifest)
    for line in lines:
        print(line)
    if to_stdout:
        for t in tables:
            sys.stdout.write(ex.table_text(t))
    return manifest


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    command = args.command if args.command != "exp" else f"exp {args.experiment}"
    try:
        cfg, seed, out_dir = resolve(command, args)
        run(command, cfg, seed, out_dir, args.threads, args.stdout)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"routerlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        # ParameterError and numpy domain errors alike
        print(f"routerlab: invalid parameter: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as e:
        print(f"routerlab: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
