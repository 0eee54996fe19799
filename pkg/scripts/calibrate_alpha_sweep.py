#!/usr/bin/env python3
"""Calibration run behind the frozen sweep threshold in the acceptance suite.

Runs the binary-value landscape at n=8 over a ladder of learning steps,
including an extra-fine N=2048 rung, and prints the sup-distance
quantiles between seeded runs and the deterministic flow. The
acceptance threshold (median at N=512 below 0.15) was frozen against
this output.

Usage: python scripts/calibrate_alpha_sweep.py [--runs 100] [--seed 0]
"""

import argparse
import time

from cgadyn import ExperimentConfig, alpha_sweep, binval


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--horizon", type=float, default=5.0)
    args = parser.parse_args()

    cfg = ExperimentConfig(
        spec=binval(8),
        N_values=(32, 128, 512, 2048),
        runs_per_setting=args.runs,
        T_horizon=args.horizon,
        master_seed=args.seed,
    )
    t0 = time.perf_counter()
    rows = alpha_sweep(cfg)
    elapsed = time.perf_counter() - t0

    print(f"binval n=8, T={args.horizon}, {args.runs} runs per N, master seed {args.seed}")
    print(f"{'N':>6} {'alpha':>12} {'median h_T':>12} {'q90 h_T':>12}")
    for row in rows:
        print(f"{row.N:>6} {row.alpha:>12.6f} {row.median_sup_distance:>12.6f} "
              f"{row.q90_sup_distance:>12.6f}")
    print(f"({elapsed:.1f}s)")


if __name__ == "__main__":
    main()
