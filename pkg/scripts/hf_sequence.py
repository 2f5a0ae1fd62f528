"""Hartree-Fock measure versus particle number for both statistics.

Prints N, the computed value, log(N^N/N!) and epsilon/N, which tends to 1 (= log e)
for fermions.

    python3 scripts/hf_sequence.py --max-n 6
"""

import argparse
import math

from eprod.dnorm import SolverConfig
from eprod.measure import epsilon_sequence
from eprod.states import FamilySpec, make_density


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--restarts", type=int, default=4)
    args = ap.parse_args(argv)
    cfg = SolverConfig(restarts=args.restarts)

    print(f"{'stat':6} {'N':>3} {'epsilon':>12} {'log(N^N/N!)':>12} {'eps/N':>8}")
    for stat in ("fermi", "bose"):
        gen = lambda n, stat=stat: make_density(FamilySpec("hartree_fock", n, {"statistics": stat}))  # noqa: E731
        for pt in epsilon_sequence(gen, range(2, args.max_n + 1), cfg):
            ref = pt.size * math.log(pt.size) - math.lgamma(pt.size + 1)
            print(f"{stat:6} {pt.size:>3} {pt.epsilon:12.8f} {ref:12.8f} {pt.per_size:8.4f}")


if __name__ == "__main__":
    main()
