"""Time the operator-identity suite against case count and worker count."""

from __future__ import annotations

import argparse
import sys
import time

from varcomplex.props import property_suite


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--cases", type=int, nargs="+", default=[100, 500])
    ap.add_argument("--workers", type=int, nargs="+", default=[1, 4])
    a = ap.parse_args(argv)
    print("cases workers seconds all_passed")
    status = 0
    for n in a.cases:
        for w in a.workers:
            t0 = time.perf_counter()
            rep = property_suite(a.seed, n, workers=w)
            print(f"{n:5d} {w:7d} {time.perf_counter() - t0:7.2f} {rep.all_passed}")
            status |= not rep.all_passed
    return status


if __name__ == "__main__":
    sys.exit(main())
