"""Worst error of every identity as the grid doubles.

    python3 scripts/convergence_study.py --out convergence.csv
"""

import argparse

from fractalcalc.reporting import write_rows
from fractalcalc.verification import convergence_study


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grids", default="4096,8192,16384,32768", help="comma-separated grid sizes")
    p.add_argument("--out", default="convergence.csv")
    args = p.parse_args()

    grids = tuple(int(g) for g in args.grids.split(","))
    table = convergence_study(grids)
    width = max(len(k) for k in table)
    print(f"{'identity':<{width}}  " + "  ".join(f"{g:>9d}" for g in grids) + "  monotone")
    rows = []
    for name, errs in sorted(table.items()):
        mono = all(b <= a or b < 1e-12 for a, b in zip(errs, errs[1:]))
        print(f"{name:<{width}}  " + "  ".join(f"{e:9.2e}" for e in errs) + f"  {'yes' if mono else 'NO'}")
        rows.append((name, *errs, mono))
    write_rows(args.out, ("identity", *(f"n{g}" for g in grids), "monotone"), rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
