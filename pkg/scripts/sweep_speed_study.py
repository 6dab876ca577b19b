#!/usr/bin/env python3
"""Measured loop width against 2H(a) as the settle time per h value grows.

Near a fold the escape is delayed by an amount that shrinks like
(sweep rate)^(2/3), so the loop closes in on the mean-field width as the
sweep slows. Prints one line per (a, steps_per_value).
"""
from __future__ import annotations

import argparse

from routerlab.experiments import exp_hysteresis_width_vs_a


def main() -> None:
    p = argparse.ArgumentParser(description="Loop width vs settle steps")
    p.add_argument("--a", type=float, nargs="+", default=[2.5, 3.0, 4.0])
    p.add_argument("--steps", type=int, nargs="+", default=[2000, 4000, 8000, 16000])
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    print(f"{'a':>5} {'steps':>6} {'measured':>9} {'2H(a)':>8} {'rel.err':>8}")
    for steps in args.steps:
        table = exp_hysteresis_width_vs_a(args.a, steps_per_value=steps, seed=args.seed)
        for a, width, pred, *_ in table.rows:
            print(f"{a:5.2f} {steps:6d} {width:9.4f} {pred:8.4f} {(width - pred) / pred:8.1%}")


if __name__ == "__main__":
    main()
