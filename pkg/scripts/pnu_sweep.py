"""Tabulate int_0^inf P_nu - nu/2 and write P_nu(t) plot data.

Plot files are two-column text with comment headers, one per (nu, d).
"""

import argparse
from pathlib import Path

import numpy as np

from weyllab.pnu import PnuContext, pnu_eval, pnu_integral_details


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--nu", type=float, nargs="*", default=[0.0, 0.25, 0.5, 1.0, 2.0])
    p.add_argument("--dim", type=int, nargs="*", default=[1, 2, 3])
    p.add_argument("--plot-dir", type=Path)
    args = p.parse_args()
    print(f"{'nu':>5} {'d':>2} {'integral':>14} {'error':>10} {'tail bound':>10}")
    for nu in args.nu:
        for d in args.dim:
            ctx = PnuContext(nu, d)
            res = pnu_integral_details(ctx)
            print(f"{nu:5.2f} {d:2d} {res.value:14.8f} {res.value - nu / 2:10.2e} {res.tail_bound:10.2e}")
            if args.plot_dir:
                args.plot_dir.mkdir(parents=True, exist_ok=True)
                t = np.linspace(0.0, 30.0, 601)
                np.savetxt(args.plot_dir / f"pnu_nu{nu:g}_d{d}.dat", np.column_stack([t, pnu_eval(ctx, t)]),
                           header=f"P_nu(t), nu={nu:g}, d={d}\nt P", fmt="%.17g")


if __name__ == "__main__":
    main()
