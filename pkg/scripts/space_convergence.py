"""Space-convergence tables for p=2 C0, p=2 C1 and p=3 C2 (both variants).

Usage: python3 scripts/space_convergence.py [--out results] [--ritz]
"""

import argparse
import pathlib
import sys

from galpha.cli import main

ROOT = pathlib.Path(__file__).resolve().parent.parent
CONFIGS = ["space_p2_c0", "space_p2_c1", "space_p3_c2"]


def run(out: pathlib.Path, extra: list[str]) -> int:
    out.mkdir(parents=True, exist_ok=True)
    for name in CONFIGS:
        target = out / f"{name}.csv"
        code = main(["convergence-space", "--config", str(ROOT / "configs" / f"{name}.json"),
                     "--set", f"output_path={target}", *extra])
        if code:
            return code
        print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=pathlib.Path, default=ROOT / "results")
    parser.add_argument("--ritz", action="store_true", help="elliptic projection of the initial data")
    args = parser.parse_args()
    sys.exit(run(args.out, ["--set", "initial_projection=ritz"] if args.ritz else []))
