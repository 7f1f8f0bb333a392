"""Sweep the dephasing strength and compare three routes to the maximum
Fisher information: the alternating optimizer, the brute-force state search,
and the closed form eta^2 for the qubit phase generator.

Usage: python scripts/dephasing_sweep.py [--points 11] [--csv out.csv]
"""

import argparse
import csv
import sys

import numpy as np

from qfimax import HermitianOperator, OptimizerConfig, dephasing_channel, optimize
from qfimax.operators import SIGMA_Z
from qfimax.oracles import brute_force_max_qfi


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=11)
    parser.add_argument("--samples", type=int, default=500,
                        help="Haar samples for the brute-force check")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--csv", default=None, help="also write the table as CSV")
    args = parser.parse_args(argv)

    h = HermitianOperator(SIGMA_Z / 2.0)
    cfg = OptimizerConfig(restarts=4, seed=args.seed)
    rows = []
    print(f"{'eta':>6} {'optimizer':>12} {'brute force':>12} {'eta^2':>12} {'iters':>6}")
    for eta in np.linspace(0.0, 1.0, args.points):
        ch = dephasing_channel(float(eta))
        result = optimize(ch, h, cfg)
        oracle, _ = brute_force_max_qfi(ch, h, n_samples=args.samples, seed=args.seed)
        rows.append((float(eta), result.f_star, oracle, float(eta) ** 2, len(result.trace)))
        print(f"{eta:6.2f} {result.f_star:12.8f} {oracle:12.8f} {eta ** 2:12.8f} "
              f"{len(result.trace):6d}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["eta", "optimizer", "brute_force", "eta_squared", "iterations"])
            writer.writerows(rows)
        print(f"wrote {args.csv}", file=sys.stderr)


if __name__ == "__main__":
    main()
