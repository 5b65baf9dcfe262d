"""Fit the two Weyl coefficients on (0, 1) for several constant b.

Runs the interval configs in ``configs/`` through the full pipeline and
prints fitted c1 against the prediction -b.
"""

import argparse
import time
from pathlib import Path

from weyllab.pipeline import load_config, run_experiment

HERE = Path(__file__).resolve().parent


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--b", nargs="*", default=["050", "075", "100", "150"], help="config suffixes")
    args = p.parse_args()
    print(f"{'b':>6} {'c0':>12} {'c1':>12} {'c1 pred':>8} {'gap':>8} {'sec':>6}")
    for tag in args.b:
        cfg = load_config(HERE / "configs" / f"interval_b{tag}.cfg")
        t0 = time.perf_counter()
        rep = run_experiment(cfg)
        dt = time.perf_counter() - t0
        print(f"{float(cfg.b):6.3f} {rep['c0']:12.6f} {rep['c1']:12.6f} {rep['predicted']['c1']:8.3f} "
              f"{rep['gaps']['c1']:8.4f} {dt:6.1f}")


if __name__ == "__main__":
    main()
