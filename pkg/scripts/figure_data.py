"""Write the data behind the two solution plots and the staircases they sit on.

    python3 scripts/figure_data.py --out figures
"""

import argparse
from pathlib import Path

from fractalcalc.figures import ExampleConfig, example_checks, solve_example, write_example_csv
from fractalcalc.fractal_support import write_staircase_csv
from fractalcalc.verification import default_columns


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="figures", help="output directory")
    p.add_argument("--grid", type=int, default=4096, help="u-grid size")
    p.add_argument("--samples", type=int, default=4097, help="points along z or t")
    args = p.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = ExampleConfig(grid_n=args.grid, samples=args.samples)
    for col, var in zip(default_columns(), ("z", "t")):
        sol = solve_example(col.staircase, cfg)
        write_example_csv(sol, out / f"example_{col.name}.csv", var)
        write_staircase_csv(col.staircase, out / f"staircase_{col.name}.csv")
        failed = [c.name for c in example_checks(sol, col.name, cfg) if not c.passed]
        status = "ok" if not failed else "failed: " + ", ".join(failed)
        print(f"{col.name}: y(end)={sol.y[-1]:.6f} residual={sol.residual:.2e} ({status})")
    print(f"wrote {out}/example_*.csv and {out}/staircase_*.csv")


if __name__ == "__main__":
    main()
