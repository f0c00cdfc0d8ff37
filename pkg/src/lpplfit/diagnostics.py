"""Post-fit diagnostics: residuals, log-periodogram, sanity checks, dates."""
from __future__ import annotations

import calendar
import datetime as dt
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .calibration import FitConfig
from .exceptions import InsufficientDataError, InvalidArgumentError, LpplError
from .model import LpplParams, TimeSeries, _check_domain, evaluate_series

MIN_PERIODOGRAM_POINTS = 8

# Residual standard deviation allowed as a fraction of the series range.
RESIDUAL_SPREAD_LIMIT = 0.1


class Check(NamedTuple):
    name: str
    passed: bool
    message: str


@dataclass(frozen=True)
class SanityReport:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_list(self) -> list[dict]:
        return [c._asdict() for c in self.checks]


@dataclass(frozen=True)
class LogSpectrum:
    frequencies: np.ndarray
    power: np.ndarray

    @property
    def peak_frequency(self) -> float:
        return float(self.frequencies[int(np.argmax(self.power))])


def residuals(series: TimeSeries, params: LpplParams) -> TimeSeries:
    """Observed minus modelled values on the series' own timestamps."""
    return TimeSeries(series.t, series.values - evaluate_series(params, series.t))


def detrend_power_law(series: TimeSeries, params: LpplParams) -> TimeSeries:
    """Isolate the log-periodic factor of ``series``.

    Subtracts the non-oscillating part ``A - m (t_c - t)^alpha`` and divides
    by the power-law amplitude ``-m (t_c - t)^alpha``, leaving
    ``C cos(omega ln(t_c - t) + phi)`` plus rescaled noise. The mean is
    removed last. With ``m == 0`` only the subtraction is applied.
    """
    amp = evaluate_series(params.replace(A=0.0, C=0.0), series.t)
    v = series.values - params.A - amp
    if params.m != 0.0:
        v = v / amp
    return TimeSeries(series.t, v - v.mean())


def frequency_grid(lo: float = 2.0, hi: float = 25.0, step: float = 0.05) -> np.ndarray:
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def log_periodogram(detrended: TimeSeries, t_c: float, frequencies) -> LogSpectrum:
    """Least-squares periodogram in the coordinate ``u = ln(t_c - t)``.

    For each angular frequency ``w`` the values are regressed on a constant,
    ``cos(w u)`` and ``sin(w u)``; the power is the sum of squares explained
    by the cos/sin pair, divided by the number of points. Samples are unevenly spaced in ``u``,
    so every frequency gets its own small least-squares solve.

    Args:
        detrended: zero-mean series, e.g. from :func:`detrend_power_law`.
        t_c: critical time defining the log coordinate.
        frequencies: strictly increasing positive angular frequencies.
    """
    if len(detrended) < MIN_PERIODOGRAM_POINTS:
        raise InsufficientDataError(
            f"periodogram needs at least {MIN_PERIODOGRAM_POINTS} points, got {len(detrended)}"
        )
    _check_domain(t_c, detrended.t)
    freqs = np.array(frequencies, dtype=np.float64).reshape(-1)
    if freqs.size == 0 or np.any(np.diff(freqs) <= 0.0) or not freqs[0] > 0.0:
        raise InvalidArgumentError("frequency grid must be non-empty, positive and strictly increasing")
    u = np.log(t_c - detrended.t)
    power = np.asarray(_kernels.periodogram(u, np.ascontiguousarray(detrended.values), freqs), dtype=np.float64)
    return LogSpectrum(frequencies=freqs, power=power)


def sanity_check(params: LpplParams, series: TimeSeries, config: FitConfig = FitConfig()) -> SanityReport:
    """Evaluate the regime checks for a parameter set. Never raises on a failed check."""
    checks = [
        Check("alpha_in_unit_interval", 0.0 < params.alpha < 1.0, f"alpha = {params.alpha!r}, required 0 < alpha < 1"),
    ]
    w_lo, w_hi = config.omega_bounds
    checks.append(
        Check("omega_within_bounds", w_lo <= params.omega <= w_hi, f"omega = {params.omega!r}, bounds [{w_lo!r}, {w_hi!r}]")
    )
    checks.append(Check("oscillation_amplitude_below_one", abs(params.C) < 1.0, f"|C| = {abs(params.C)!r}, required < 1"))

    if len(series) == 0:
        checks.append(Check("tc_after_last_observation", False, "series is empty"))
        checks.append(Check("residual_spread", False, "series is empty"))
        return SanityReport(tuple(checks))

    last = series.last_t
    checks.append(
        Check("tc_after_last_observation", params.t_c > last, f"t_c = {params.t_c!r}, last observation {last!r}")
    )
    try:
        r = residuals(series, params).values
    except LpplError as exc:
        checks.append(Check("residual_spread", False, f"residuals not evaluable: {exc}"))
    else:
        span = float(series.values.max() - series.values.min())
        frac = float(np.std(r)) / span if span > 0.0 else (0.0 if np.all(r == 0.0) else math.inf)
        checks.append(
            Check(
                "residual_spread",
                frac <= RESIDUAL_SPREAD_LIMIT,
                f"residual std / series range = {frac!r}, limit {RESIDUAL_SPREAD_LIMIT!r}",
            )
        )
    return SanityReport(tuple(checks))


def _days_in_year(year: int) -> int:
    return 366 if calendar.isleap(year) else 365


def decimal_year(date: dt.date) -> float:
    """Mid-day decimal year: ``year + (day_of_year - 0.5) / days_in_year``."""
    doy = date.timetuple().tm_yday
    return date.year + (doy - 0.5) / _days_in_year(date.year)


def forecast_date(t_c: float) -> dt.date:
    """Calendar day whose mid-day decimal year is nearest to ``t_c``.

    Inverts :func:`decimal_year`: the day containing ``t_c`` is the one
    whose midpoint is closest. ``2012.965`` maps to 2012-12-19; counting
    with a 365-day year or from day starts moves this by one or two days.
    """
    if not math.isfinite(t_c):
        raise InvalidArgumentError(f"t_c must be finite, got {t_c!r}")
    year = math.floor(t_c)
    n = _days_in_year(year)
    doy = min(max(math.floor((t_c - year) * n) + 1, 1), n)
    return dt.date(year, 1, 1) + dt.timedelta(days=doy - 1)
