#!/usr/bin/env python3
"""Quick demo: measure fork suppression vs audit window and fit the decay.

Runs the memoryless attacker under a fixed-X audit policy, where the
analytic reference is 2^-W, and prints the fitted log2 slope.
"""

import argparse
import os

from forkaudit.adversary import AttackerModel
from forkaudit.experiments import SweepSpec, fit_decay, sweep
from forkaudit.game import GameConfig
from forkaudit.protocol import BasisPolicy


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-window", type=int, default=10)
    parser.add_argument("--trials", type=int, default=8000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--jobs", type=int, default=os.cpu_count())
    args = parser.parse_args()

    base = GameConfig(
        basis_policy=BasisPolicy.fixed_x(),
        trials=args.trials,
        apr_trials=200,
        master_seed=args.seed,
    )
    spec = SweepSpec(
        base=base,
        axis="W",
        values=tuple(range(1, args.max_window + 1)),
        attackers=(AttackerModel.parse("memoryless"),),
    )
    rows = sweep(spec, jobs=args.jobs)
    print(f"{'W':>3} {'fsr':>10} {'2^-W':>10}")
    for row in rows:
        print(f"{int(row.axis_value):>3} {row.fsr:>10.5f} {2.0**-row.axis_value:>10.5f}")
    fit = fit_decay(rows)
    print(f"\nlog2 fit: slope={fit.slope:.4f} (reference -1), r2={fit.r_squared:.4f}")


if __name__ == "__main__":
    main()
