"""Print the non-split classes of i mod p-1 for the base field Q, p below a bound."""

import argparse

from sympy import primerange

from kloc.rationals import irregular_indices, splits_q_detail


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--below", type=int, default=200)
    args = ap.parse_args()
    for p in primerange(3, args.below):
        ks = sorted(irregular_indices(p))
        if not ks:
            continue
        bad = [(i, splits_q_detail(p, i).bernoulli_index) for i in range(1, p)
               if not splits_q_detail(p, i).splits]
        print(f"p = {p:4d}  irregular k = {ks}  non-split (i mod {p - 1}, k) = {bad}")


if __name__ == "__main__":
    main()
