"""Calibration toolkit for the log-periodic power-law (LPPL) model."""

__version__ = "0.1.0"

from ._accel import BACKEND
from .calibration import FitConfig, FitResult, TcScanProfile, fit, objective, refine, scan_tc, slave_linear
from .diagnostics import (
    LogSpectrum,
    SanityReport,
    decimal_year,
    detrend_power_law,
    forecast_date,
    log_periodogram,
    residuals,
    sanity_check,
)
from .model import (
    REFERENCE_PPI_PARAMS,
    LinearizedParams,
    LpplParams,
    TimeSeries,
    compose,
    evaluate,
    evaluate_linearized,
    evaluate_series,
    monthly_timestamps,
    oscillation_extrema,
    split,
    to_decimal_year,
)
from .synthesis import SyntheticSpec, generate, truncate

__all__ = [
    "BACKEND",
    "FitConfig",
    "FitResult",
    "LinearizedParams",
    "LogSpectrum",
    "LpplParams",
    "REFERENCE_PPI_PARAMS",
    "SanityReport",
    "SyntheticSpec",
    "TcScanProfile",
    "TimeSeries",
    "compose",
    "decimal_year",
    "detrend_power_law",
    "evaluate",
    "evaluate_linearized",
    "evaluate_series",
    "fit",
    "forecast_date",
    "generate",
    "log_periodogram",
    "monthly_timestamps",
    "objective",
    "oscillation_extrema",
    "refine",
    "residuals",
    "sanity_check",
    "scan_tc",
    "slave_linear",
    "split",
    "to_decimal_year",
    "truncate",
]
