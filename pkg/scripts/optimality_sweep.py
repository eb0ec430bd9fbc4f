"""Second eigenvalue of M+_k on complete complexes against the one-sided bound.

Writes CSV rows (m, n, k, achieved, bound, gap) to stdout. With lambda = 0
on complete complexes the bound is (k+1)/(k+2); the achieved value should
climb toward it as m grows.
"""

import argparse
import csv
import sys

from hdxwalk.generators import complete_complex
from hdxwalk.mixing import second_eigenvalue_on_C0
from hdxwalk.operators import assemble_upper_walk
from hdxwalk.spectra import profile


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--m-min", type=int, default=5)
    ap.add_argument("--m-max", type=int, default=12)
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["m", "n", "k", "achieved", "bound", "gap"])
    for m in range(max(args.m_min, args.n + 1), args.m_max + 1):
        weights = complete_complex(m, args.n)[1]
        lam = profile(weights).lambda_one_sided
        for k in range(args.n):
            top = second_eigenvalue_on_C0(assemble_upper_walk(weights, k)).top
            bound = (k + 1) / (k + 2) + (k + 1) * lam
            w.writerow([m, args.n, k, f"{top:.12f}", f"{bound:.12f}", f"{bound - top:.12f}"])


if __name__ == "__main__":
    main()
