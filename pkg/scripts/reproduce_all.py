"""Run every reference check and print a pass/fail table grouped by criterion.

    python3 scripts/reproduce_all.py
"""

import sys
import time

from eprod.checks import CRITERIA, run_group


def main():
    bad = 0
    for number, group in sorted(CRITERIA.items()) + [("-", "transitions")]:
        t0 = time.perf_counter()
        checks = run_group(group)
        failed = sum(not c.passed for c in checks)
        bad += failed
        for c in checks:
            print(c.line())
        status = "PASS" if not failed else "FAIL"
        print(f"== {status} criterion {number} ({group}): {len(checks) - failed}/{len(checks)} "
              f"in {time.perf_counter() - t0:.1f}s\n")
    print(f"{bad} failing checks", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
