#!/usr/bin/env python3
"""Central and saturated records of the soft-MoE bias sweep across seeds."""
from __future__ import annotations

import argparse
from dataclasses import replace

from routerlab.experiments import UNDEFINED, SoftMoEConfig, exp_soft_moe_bias_sweep, format_cell


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3])
    p.add_argument("--reg", type=float, default=SoftMoEConfig.reg)
    p.add_argument("--steps-per-value", type=int, default=SoftMoEConfig.steps_per_value)
    args = p.parse_args()

    cfg = replace(SoftMoEConfig(), reg=args.reg, steps_per_value=args.steps_per_value)
    for seed in args.seeds:
        rows = exp_soft_moe_bias_sweep(cfg, seed).rows
        for direction, h, u, x_star, mse in rows:
            if h == 0.0 or abs(h) == cfg.h_max:
                print(f"seed {seed} {direction:>4} h={h:+.1f}  E[u]={u:+.3f}  "
                      f"x*={format_cell(x_star, UNDEFINED)}  mse={mse:.4f}")


if __name__ == "__main__":
    main()
