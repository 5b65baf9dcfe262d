"""Two-term fit on the unit disk with b = 1/2 over h in [0.02, 0.1]."""

import json
from pathlib import Path

from weyllab.pipeline import load_config, run_experiment

HERE = Path(__file__).resolve().parent


def main():
    rep = run_experiment(load_config(HERE / "configs" / "disk_b050.cfg"))
    print(json.dumps({k: rep[k] for k in ("c0", "c1", "predicted", "gaps", "passed")}, indent=2))


if __name__ == "__main__":
    main()
