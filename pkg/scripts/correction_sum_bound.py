"""Compare the Garland correction sum with (k+1) mu_k ||phi||^2 and its clamped form.

On complexes where mu_k < 0 (complete complexes, for instance) the
unclamped upper estimate fails for generic cochains: the part of phi_tau
that is constant on the link is killed by I - M-, so it contributes 0
where the estimate charges mu_k ||.||^2 < 0. Replacing mu_k by
max(mu_k, 0) restores the inequality.
"""

import argparse

import numpy as np

from hdxwalk.cochains import Cochain, project_C0
from hdxwalk.generators import complete_complex, random_pure_complex
from hdxwalk.spectra import garland_terms, profile


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cases = {
        "complete(4,2)": complete_complex(4, 2)[1],
        "complete(6,2)": complete_complex(6, 2)[1],
        "complete(7,3)": complete_complex(7, 3)[1],
        "random-pure(12,2,0.6,s7)": random_pure_complex(12, 2, 0.6, 7)[1],
    }
    rng = np.random.default_rng(args.seed)
    print(f"{'complex':26} {'k':>2} {'mu_k':>8} {'c0':>3} {'stated fails':>12} {'clamped fails':>13}")
    for name, m in cases.items():
        prof = profile(m)
        for k in range(m.n):
            for c0 in (False, True):
                bad = bad_c = 0
                for _ in range(args.trials):
                    phi = Cochain.random(m, k, rng)
                    if c0:
                        phi = project_C0(phi)
                    g = garland_terms(phi, prof)
                    bad += not g.bounds_hold
                    bad_c += not g.clamped_bounds_hold
                print(f"{name:26} {k:>2} {prof.mu[k]:8.4f} {'y' if c0 else 'n':>3} {bad:>12} {bad_c:>13}")


if __name__ == "__main__":
    main()
