#!/usr/bin/env python3
"""Sweep the Hardy success probability over the state angle.

For each theta in the sweep, prints the value found by the measurement
optimizer next to the exact-constraint grid oracle, and reports the maxima.
"""

from __future__ import annotations

import argparse

import numpy as np

from losrkit import HardyScore, catalog, hardy_grid_maximum, optimize_yield


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=25, help="theta grid size")
    parser.add_argument("--restarts", type=int, default=6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--oracle-a0", type=int, default=80, help="oracle grid density")
    args = parser.parse_args()

    thetas = np.linspace(0.05, np.pi / 4 - 0.02, args.points)
    print("theta optimizer oracle")
    best_opt, best_oracle = 0.0, 0.0
    for theta in thetas:
        opt = optimize_yield(
            catalog.partial(float(theta)), HardyScore(), restarts=args.restarts, seed=args.seed
        ).value
        oracle, _ = hardy_grid_maximum([float(theta)], a0_points=args.oracle_a0)
        best_opt = max(best_opt, opt)
        best_oracle = max(best_oracle, oracle)
        print(f"{theta:.6f} {opt:.8f} {oracle:.8f}")
    print(f"max over sweep: optimizer {best_opt:.8f}, oracle {best_oracle:.8f}")
    print(f"disagreement {abs(best_opt - best_oracle):.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
