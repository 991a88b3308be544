"""Time and peak traced memory of the three period modes for the quintic.

Writes results/bench_quintic.csv and prints the log-log slope of the
truncated-recurrence peak memory against p.
"""

import argparse

import numpy as np
from sympy import prime

from cyzeta import get_operator
from cyzeta.runner import run_bench


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--indices", default="11:200:10", help="start:stop:step prime indices")
    ap.add_argument("--csv", default="results/bench_quintic.csv")
    args = ap.parse_args()

    a, b, c = (int(v) for v in args.indices.split(":"))
    primes = [int(prime(i)) for i in range(a, b + 1, c)]
    rep = run_bench(get_operator("quintic"), primes)
    rep.write_csv(args.csv)
    for mode in ("truncated_recurrence", "exact_rational"):
        peak = rep.peak(mode)
        ps = sorted(peak)
        slope = np.polyfit(np.log(ps), np.log([peak[p] for p in ps]), 1)[0]
        print(f"{mode}: log-log memory slope {slope:.2f}, p={ps[-1]} peak {peak[ps[-1]] / 2**20:.2f} MiB")
    if rep.mismatches:
        print(f"modes disagree at {rep.mismatches}")
    print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
