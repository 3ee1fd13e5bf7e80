#!/usr/bin/env python3
"""Stress the yield monotones against sampled free channels.

Applies seeded random mixtures of local channels to a few reference states
and checks that no optimized yield ever rises above its source value beyond
the optimizer-noise slack.
"""

from __future__ import annotations

import argparse

import numpy as np

from losrkit import (
    CHSH,
    HardyScore,
    TiltedCHSH,
    apply_channel,
    catalog,
    optimize_yield,
    sample_losr_channel,
)
from losrkit.states import DensityMatrix


def random_mixed(seed: int) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    return DensityMatrix((2, 2), rho / np.trace(rho).real)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--channels", type=int, default=20)
    parser.add_argument("--restarts", type=int, default=6)
    parser.add_argument("--baseline-restarts", type=int, default=24)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--slack", type=float, default=5e-4)
    args = parser.parse_args()

    states = {
        "phi_plus": catalog.phi_plus().density(),
        "partial_pi8": catalog.partial(np.pi / 8).density(),
        "random_mixed": random_mixed(args.seed + 1),
    }
    functionals = {"chsh": CHSH(), "tilted_0.5": TiltedCHSH(0.5), "hardy": HardyScore()}

    baselines = {
        (s, f): optimize_yield(rho, func, restarts=args.baseline_restarts, seed=args.seed).value
        for s, rho in states.items()
        for f, func in functionals.items()
    }
    for (s, f), v in sorted(baselines.items()):
        print(f"baseline {s} {f}: {v:.8f}")

    worst = -np.inf
    violations = 0
    for i in range(args.channels):
        channel = sample_losr_channel((2, 2), seed=args.seed + 1000 + i)
        for s, rho in states.items():
            out = apply_channel(rho, channel)
            for f, func in functionals.items():
                val = optimize_yield(out, func, restarts=args.restarts, seed=args.seed).value
                excess = val - baselines[(s, f)]
                worst = max(worst, excess)
                if excess > args.slack:
                    violations += 1
                    print(f"VIOLATION channel {i} {s} {f}: excess {excess:.2e}")
    print(f"channels {args.channels}, worst excess {worst:.2e}, violations {violations}")
    return 1 if violations else 0


if __name__ == "__main__":
    raise SystemExit(main())
