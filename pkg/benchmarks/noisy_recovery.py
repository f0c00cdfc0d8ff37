"""Monte-Carlo recovery of t_c from noisy synthetic series.

Generates the reference parameter set on the monthly Jan 1913 - Mar 2012
grid, adds Gaussian noise (sigma = 2 index points) for seeds 0..N-1, fits
each with the default config and prints the t_c error distribution. The
acceptance thresholds for noisy recovery were frozen from this run (see
README).

    python benchmarks/noisy_recovery.py [n_seeds]
"""
import sys
import time

import numpy as np

from lpplfit import BACKEND, REFERENCE_PPI_PARAMS, FitConfig, SyntheticSpec, fit, generate, monthly_timestamps


def main(n_seeds=20, sigma=2.0):
    t = monthly_timestamps((1913, 1), (2012, 3))
    truth = REFERENCE_PPI_PARAMS
    errors = []
    t0 = time.perf_counter()
    for seed in range(n_seeds):
        s = generate(SyntheticSpec(truth, t, noise_sigma=sigma, seed=seed))
        r = fit(s, FitConfig())
        err = r.params.t_c - truth.t_c
        errors.append(err)
        p = r.params
        print(f"seed {seed:3d}  t_c {p.t_c:.4f}  err {err:+.4f}  alpha {p.alpha:.4f}  omega {p.omega:.4f}  mse {r.objective:.4f}")
    errors = np.array(errors)
    print(f"backend {BACKEND}, {n_seeds} seeds, {time.perf_counter() - t0:.1f} s")
    print(f"median t_c error {np.median(errors):+.4f}, max |error| {np.abs(errors).max():.4f}")
    print(f"within 0.2 yr: {(np.abs(errors) <= 0.2).sum()}/{n_seeds}, within 0.5 yr: {(np.abs(errors) <= 0.5).sum()}/{n_seeds}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20)
