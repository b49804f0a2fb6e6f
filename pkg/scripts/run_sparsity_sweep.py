#!/usr/bin/env python3
"""Full sparsity-distortion study: all four signal classes at the default scale.

Writes one run directory per class under the output root; each contains
run.json plus results.csv with columns (method, sparsity, realization, nmse).
Plotting NMSE against sparsity per method reproduces the trade-off figures.
"""

import argparse
from pathlib import Path

from topospinor.experiments import SweepConfig, run_sparsity_sweep
from topospinor.synth import SIGNAL_CLASSES


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/sparsity_sweep", help="output root directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--realizations", type=int, default=10)
    args = parser.parse_args()

    root = Path(args.out)
    for signal_class in SIGNAL_CLASSES:
        cfg = SweepConfig(
            out=str(root / signal_class),
            signal_class=signal_class,
            realizations=args.realizations,
            seed=args.seed,
        )
        out = run_sparsity_sweep(cfg)
        print(f"{signal_class}: {out}")


if __name__ == "__main__":
    main()
