"""Time the numba and numpy backends on the same workloads.

Each backend runs in its own interpreter because the choice is fixed at
import time by LPPLFIT_DISABLE_NUMBA. Numba timings exclude compilation
(one warm-up call first; the on-disk cache is also used).

    python3 benchmarks/bench_backends.py
"""
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
import numpy as np
from lpplfit import BACKEND, REFERENCE_PPI_PARAMS, FitConfig, SyntheticSpec, fit, generate, log_periodogram, monthly_timestamps, scan_tc
from lpplfit import _kernels
from lpplfit.diagnostics import detrend_power_law, frequency_grid

p = REFERENCE_PPI_PARAMS
s = generate(SyntheticSpec(p, monthly_timestamps((1913, 1), (2012, 3)), 2.0, 1))
t, y = np.ascontiguousarray(s.t), np.ascontiguousarray(s.values)
starts = np.array(np.meshgrid(np.linspace(2012.3, 2022, 16), np.linspace(0.1, 0.9, 8), np.linspace(3, 24, 12), indexing="ij")).reshape(3, -1).T.copy()
freqs = frequency_grid()
det = detrend_power_law(s, p)

def timed(fn, reps):
    fn()
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps

out = {
    "backend": BACKEND,
    "grid_objective_1536": timed(lambda: _kernels.evaluate_starts(t, y, starts), 5),
    "periodogram_461": timed(lambda: log_periodogram(det, p.t_c, freqs), 5),
    "fit_default": timed(lambda: fit(s), 1),
    "scan_30": timed(lambda: scan_tc(s, 2012.9 + np.arange(30) / 365.0), 1),
}
print(json.dumps(out))
"""


def run(disable):
    env = dict(os.environ)
    env.pop("LPPLFIT_DISABLE_NUMBA", None)
    if disable:
        env["LPPLFIT_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    a, b = run(False), run(True)
    print(f"{'workload':24s} {a['backend']:>10s} {b['backend']:>10s} {'speed-up':>9s}")
    for k in a:
        if k == "backend":
            continue
        print(f"{k:24s} {a[k]:9.4f}s {b[k]:9.4f}s {b[k] / a[k]:8.1f}x")


if __name__ == "__main__":
    main()
