"""Print the phase-transition regime table (BEC, superconducting, magnetic).

    python3 scripts/regime_table.py --n 1000 --p 4
"""

import argparse
import sys

from eprod.io import REGIME_COLUMNS, write_csv
from eprod.transitions import regime_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--p", type=int, default=4)
    ap.add_argument("--spin", type=float, default=0.5)
    ap.add_argument("--magnetization", type=float, default=0.5)
    args = ap.parse_args(argv)
    rows = regime_table(args.n, range(1, args.p + 1), args.spin, args.magnetization)
    write_csv(rows, REGIME_COLUMNS, sys.stdout)


if __name__ == "__main__":
    main()
