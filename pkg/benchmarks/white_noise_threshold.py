"""Monte-Carlo calibration of the white-noise periodogram peak threshold.

Draws seeded standard-normal series on the monthly 1913-2012 grid, computes
the log-periodogram (t_c = 2012.965, grid 2..25 step 0.05) and reports the
distribution of max/median power. The test threshold was frozen from this
run; see README.

Usage: python3 benchmarks/white_noise_threshold.py [n_seeds]
"""
import sys

import numpy as np

from lpplfit import TimeSeries, log_periodogram, monthly_timestamps
from lpplfit.diagnostics import frequency_grid


def main(n):
    t = monthly_timestamps((1913, 1), (2012, 3))
    g = frequency_grid(2.0, 25.0, 0.05)
    ratios = []
    for seed in range(n):
        v = np.random.Generator(np.random.PCG64(seed)).standard_normal(t.size)
        sp = log_periodogram(TimeSeries(t, v - v.mean()), 2012.965, g)
        ratios.append(sp.power.max() / np.median(sp.power))
    r = np.array(ratios)
    for q in (0.5, 0.9, 0.95, 0.975, 0.99):
        print(f"quantile {q:5.3f}: {np.quantile(r, q):6.2f}")
    for thr in (5, 8, 10, 12, 15):
        print(f"P(ratio > {thr:2d}) = {(r > thr).mean():.4f}")
    print(f"seeds 0-19 above 12x: {int((r[:20] > 12).sum())}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 2000)
