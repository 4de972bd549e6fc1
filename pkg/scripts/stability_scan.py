"""Per-mode stability scans of the split, naive and standard schemes.

Writes the summary (limits and maxima) and, with --grid, the full
(sigma_x, sigma_y) radius grid for plotting stability maps.

Usage: python3 scripts/stability_scan.py [--out results] [--grid]
"""

import argparse
import pathlib
import sys

from galpha.cli import main

ROOT = pathlib.Path(__file__).resolve().parent.parent


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=pathlib.Path, default=ROOT / "results")
    parser.add_argument("--grid", action="store_true", help="emit every grid point (large file)")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    target = args.out / ("stability_grid.csv" if args.grid else "stability.csv")
    argv = ["stability-scan", "--config", str(ROOT / "configs" / "stability.json"),
            "--set", f"output_path={target}"]
    if args.grid:
        argv += ["--set", "emit_grid=true", "--set", "rho_inf=[0,0.5,1]"]
    code = main(argv)
    if not code:
        print(f"wrote {target}")
    sys.exit(code)
