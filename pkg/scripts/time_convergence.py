"""Time-convergence tables on a 32x32 mesh for the three discretisations.

The ``*_time`` columns measure the error against the exact-in-time
semi-discrete solution, which removes the spatial error floor.

Usage: python3 scripts/time_convergence.py [--out results]
"""

import argparse
import pathlib
import sys

from galpha.cli import main

ROOT = pathlib.Path(__file__).resolve().parent.parent
CASES = {"time_p2_c0": (2, "C0"), "time_p2_c1": (2, "C1"), "time_p3_c2": (3, "C2")}


def run(out: pathlib.Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    base = ROOT / "configs" / "time_p2_c1.json"
    for name, (p, cont) in CASES.items():
        target = out / f"{name}.csv"
        code = main(["convergence-time", "--config", str(base), "--set", f"p={p}",
                     "--set", f"continuity={cont}", "--set", f"output_path={target}"])
        if code:
            return code
        print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=pathlib.Path, default=ROOT / "results")
    sys.exit(run(parser.parse_args().out))
