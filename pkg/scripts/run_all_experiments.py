#!/usr/bin/env python3
"""Run every experiment protocol at its defaults, one output directory each."""
from __future__ import annotations

import argparse
import time
from pathlib import Path

from routerlab.cli import COMMANDS, run


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-root", default="runs", help="parent directory for per-experiment outputs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--only", nargs="*", default=None, help="subset of experiment names, e.g. hysteresis soft-moe")
    args = p.parse_args()

    names = [n for n in COMMANDS if n.startswith("exp ")]
    if args.only:
        names = [n for n in names if n.split()[1] in args.only]
    for name in names:
        opts = COMMANDS[name][0]
        cfg = {o.name: o.default for o in opts}
        out = Path(args.out_root) / name.split()[1]
        print(f"== {name} -> {out}")
        t0 = time.perf_counter()
        run(name, cfg, args.seed, str(out), args.threads)
        print(f"   {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
