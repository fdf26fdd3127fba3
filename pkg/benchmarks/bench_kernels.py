"""Compare the compiled and pure-Python enumeration kernels.

Usage: python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each case counts lattice vectors up to a norm bound with both backends.
The histograms must agree; the table shows wall time and nodes per second.
"""
import argparse
import json
import sys
import time

import numpy as np

from hyperroots import enumerate as en
from hyperroots import ribbon

# (system, bound, split) ; split None lets the driver choose, 0 forces the plain walk
CASES = [
    ("L1", 12, 0),
    ("L1", 16, None),
    ("D3", 14, 0),
    ("L2", 10, 0),
    ("E5", 10, None),
]


def time_case(name, bound, split, backend, repeat):
    A = ribbon.system_gram(name).rows()
    en.reduced_gram(A)  # reduction is shared, keep it out of the timing
    best, hist, nodes = float("inf"), None, 0
    for _ in range(repeat):
        t = time.perf_counter()
        hist, _, nodes = en._run(A, bound, 1, en.DEFAULT_BUDGET, 1, False, backend, split=split)
        best = min(best, time.perf_counter() - t)
    return best, hist, nodes


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write results to this file")
    args = ap.parse_args(argv)
    if en._kernel is None:
        print("compiled kernel not built; only the Python kernel is available", file=sys.stderr)
        return 1
    rows = []
    print(f"{'case':<12} {'nodes':>12} {'cython s':>10} {'python s':>10} {'speedup':>8} {'Mnodes/s':>9}")
    for name, bound, split in CASES:
        tc, hc, nodes = time_case(name, bound, split, "cython", args.repeat)
        tp, hp, _ = time_case(name, bound, split, "python", 1)
        if not np.array_equal(hc, hp):
            print(f"{name} q^{bound}: backends disagree", file=sys.stderr)
            return 2
        label = f"{name} q^{bound}" + ("" if split == 0 else "*")
        rows.append({"system": name, "bound": bound, "split": split, "nodes": int(nodes),
                     "cython_s": tc, "python_s": tp})
        print(f"{label:<12} {nodes:>12d} {tc:>10.3f} {tp:>10.2f} {tp / tc:>8.0f} {nodes / tc / 1e6:>9.1f}")
    print("* coset-table split chosen by the driver")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
