"""Boundary density functional on (0, 1) as h decreases."""

import numpy as np

from weyllab.geometry import Interval
from weyllab.riesz import density_functional

TESTS = {
    "f = 1 (limit 1)": np.ones_like,
    "f = x (limit 1/2)": lambda x: np.asarray(x, dtype=float),
    "f = cos^2(pi x) (limit 1)": lambda x: np.cos(np.pi * np.asarray(x)) ** 2,
}


def main():
    hs = [1e-2, 3e-3, 1e-3, 5e-4, 2e-4]
    print(f"{'f':28}" + "".join(f"{h:>12.0e}" for h in hs))
    for name, f in TESTS.items():
        print(f"{name:28}" + "".join(f"{density_functional(Interval(), h, f):12.6f}" for h in hs))


if __name__ == "__main__":
    main()
