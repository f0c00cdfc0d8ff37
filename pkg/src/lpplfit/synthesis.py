"""Seeded synthetic LPPL series for recovery experiments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidArgumentError
from .model import LpplParams, TimeSeries, _check_domain, evaluate_series


@dataclass(frozen=True)
class SyntheticSpec:
    """Model parameters, sampling grid and additive Gaussian noise level.

    Noise comes from ``numpy.random.Generator(PCG64(seed))``.
    """

    params: LpplParams
    timestamps: np.ndarray
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        ts = np.array(self.timestamps, dtype=np.float64).reshape(-1)
        if ts.size > 1 and np.any(np.diff(ts) <= 0.0):
            raise InvalidArgumentError("timestamps must be strictly increasing")
        if not self.noise_sigma >= 0.0:
            raise InvalidArgumentError(f"noise_sigma must be >= 0, got {self.noise_sigma!r}")
        _check_domain(self.params.t_c, ts)
        ts.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)


def generate(spec: SyntheticSpec) -> TimeSeries:
    values = evaluate_series(spec.params, spec.timestamps)
    if spec.noise_sigma > 0.0:
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        values = values + spec.noise_sigma * rng.standard_normal(values.size)
    return TimeSeries(spec.timestamps, values)


def truncate(series: TimeSeries, end_t: float) -> TimeSeries:
    """Prefix of ``series`` with timestamps ``<= end_t``."""
    n = int(np.searchsorted(series.t, end_t, side="right"))
    return TimeSeries(series.t[:n], series.values[:n])
