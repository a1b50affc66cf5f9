#!/usr/bin/env python3
"""Run the full figure suite with publication-scale trial counts.

Equivalent to `forkaudit figures` with explicit defaults spelled out;
expect a few minutes of runtime on a laptop.
"""

import argparse
import os

from forkaudit.experiments import run_figure_suite
from forkaudit.game import GameConfig


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--seed", type=int, default=20260810)
    parser.add_argument("--trials", type=int, default=5000)
    parser.add_argument("--apr-trials", type=int, default=1000)
    parser.add_argument("--jobs", type=int, default=os.cpu_count())
    args = parser.parse_args()

    base = GameConfig(
        trials=args.trials, apr_trials=args.apr_trials, master_seed=args.seed
    )
    print(f"master_seed = {args.seed}")
    summary = run_figure_suite(args.out, base=base, jobs=args.jobs)
    print(f"wrote CSVs and summary.json to {args.out}/")
    for name, entry in sorted(summary.items()):
        if entry.get("slope") is not None:
            print(f"{name}: slope={entry['slope']:.4f} r2={entry['r_squared']:.4f}")


if __name__ == "__main__":
    main()
