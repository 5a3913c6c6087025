"""Time class group computations for a few fields (seeded, default caps)."""

import argparse
import time

from kloc.classgrp import ClassGroupConfig, class_group
from kloc.numfield import new_field

FIELDS = ["x^2+5", "x^2+23", "x^2-991", "x^3-11", "x^4+x^3+x^2+x+1", "x^6-793*x^3+226981"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("fields", nargs="*", default=FIELDS)
    args = ap.parse_args()
    for poly in args.fields:
        K = new_field(poly)
        t0 = time.perf_counter()
        C = class_group(K, ClassGroupConfig(seed=args.seed))
        dt = time.perf_counter() - t0
        print(f"{poly:24s} disc={K.discriminant:<14d} Cl={C.structure.invariants!s:10s} "
              f"gens={len(C.generators):3d} elim={len(C.eliminations):3d} {dt:6.2f}s")


if __name__ == "__main__":
    main()
