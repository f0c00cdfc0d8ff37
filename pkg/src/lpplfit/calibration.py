"""Least-squares calibration of the LPPL model.

The four coefficients that enter the model linearly (A, B, C1, C2) are
eliminated in closed form for every trial ``(t_c, alpha, omega)``, so the
search only ever moves in three dimensions. :func:`fit` runs a bounded
Nelder-Mead descent from every point of a regular start grid, then polishes
the best few to full tolerance. :func:`scan_tc` holds ``t_c`` fixed on a
grid and profiles the objective over the remaining parameters.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .exceptions import (
    DegenerateDataError,
    DegenerateRegressorsError,
    InsufficientDataError,
    InvalidArgumentError,
    InvalidConfigError,
)
from .model import LinearizedParams, LpplParams, TimeSeries, _check_domain, compose, evaluate_series, split

MIN_FIT_POINTS = 20
MIN_SLAVE_POINTS = 5

# Short descents used to screen every start before the full-tolerance polish.
SCREEN_FTOL = 1e-6
SCREEN_XTOL = 1e-7
POLISH_XTOL = 1e-11


@dataclass(frozen=True)
class FitConfig:
    """Search box and optimiser settings.

    ``tc_bounds=None`` resolves per series to
    ``[last observation + 1/12, last observation + 10]``.
    """

    alpha_bounds: tuple[float, float] = (0.05, 0.95)
    omega_bounds: tuple[float, float] = (2.0, 25.0)
    tc_bounds: Optional[tuple[float, float]] = None
    multistart_grid: tuple[int, int, int] = (16, 8, 12)
    local_max_iterations: int = 2000
    local_tolerance: float = 1e-10
    seed: int = 0
    random_starts: int = 0
    screen_iterations: int = 30
    polish_starts: int = 6
    scan_screen_starts: int = 8
    scan_polish_starts: int = 2
    workers: int = 1

    def resolve_tc_bounds(self, series: TimeSeries) -> tuple[float, float]:
        if self.tc_bounds is not None:
            return (float(self.tc_bounds[0]), float(self.tc_bounds[1]))
        last = series.last_t
        return (last + 1.0 / 12.0, last + 10.0)

    def validate(self, series: Optional[TimeSeries] = None) -> None:
        for name in ("alpha_bounds", "omega_bounds"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InvalidConfigError(f"{name} must be a finite interval with lower < upper, got {(lo, hi)}")
        if self.alpha_bounds[0] <= 0.0 or self.omega_bounds[0] <= 0.0:
            raise InvalidConfigError("alpha and omega bounds must be positive")
        if len(self.multistart_grid) != 3 or min(self.multistart_grid) < 1:
            raise InvalidConfigError(f"multistart_grid needs three positive counts, got {self.multistart_grid}")
        if self.local_max_iterations < 1 or self.screen_iterations < 1:
            raise InvalidConfigError("iteration limits must be positive")
        if not self.local_tolerance > 0.0:
            raise InvalidConfigError("local_tolerance must be positive")
        if min(self.polish_starts, self.scan_screen_starts, self.scan_polish_starts, self.workers) < 1:
            raise InvalidConfigError("polish/screen start counts and workers must be >= 1")
        if self.random_starts < 0:
            raise InvalidConfigError("random_starts must be >= 0")
        if series is not None and len(series):
            lo, hi = self.resolve_tc_bounds(series)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InvalidConfigError(f"tc_bounds must be a finite interval with lower < upper, got {(lo, hi)}")
            if not lo > series.last_t:
                raise InvalidConfigError(
                    f"tc_bounds lower edge {lo!r} must lie after the last observation {series.last_t!r}"
                )

    def to_dict(self, series: Optional[TimeSeries] = None) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        if series is not None and len(series):
            d["tc_bounds"] = list(self.resolve_tc_bounds(series))
        return d


@dataclass(frozen=True)
class FitResult:
    params: LpplParams
    objective: float
    residuals: np.ndarray = field(repr=False)
    n_points: int
    converged: bool
    starts_evaluated: int


@dataclass(frozen=True)
class TcScanProfile:
    """Profile of the best objective over a fixed grid of ``t_c`` values.

    ``alpha`` and ``omega`` hold the optimising exponent and log-frequency at
    each candidate. Infeasible candidates carry an ``inf`` objective.
    """

    grid: np.ndarray
    profile_objective: np.ndarray
    best_index: int
    alpha: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)

    @property
    def best_tc(self) -> float:
        return float(self.grid[self.best_index])


class SlavedLinear(NamedTuple):
    A: float
    B: float
    C1: float
    C2: float
    objective: float


def objective(params: LpplParams, series: TimeSeries) -> float:
    """Mean squared residual of the model against ``series``."""
    if len(series) == 0:
        raise InsufficientDataError("objective of an empty series is undefined")
    r = series.values - evaluate_series(params, series.t)
    return float(np.mean(r * r))


def _arrays(series: TimeSeries) -> tuple[np.ndarray, np.ndarray]:
    return np.ascontiguousarray(series.t), np.ascontiguousarray(series.values)


def slave_linear(nonlinear, series: TimeSeries) -> SlavedLinear:
    """Closed-form least-squares (A, B, C1, C2) for a fixed (t_c, alpha, omega).

    Raises:
        InsufficientDataError: fewer than five observations.
        DomainError: an observation is not before ``t_c``.
        DegenerateRegressorsError: the equilibrated normal matrix has a
            condition estimate above 1e12.
    """
    tc, alpha, omega = (float(v) for v in nonlinear)
    if len(series) < MIN_SLAVE_POINTS:
        raise InsufficientDataError(f"linear slaving needs at least {MIN_SLAVE_POINTS} points, got {len(series)}")
    _check_domain(tc, series.t)
    t, y = _arrays(series)
    feat = np.empty((3, t.size))
    G, r, ok = _kernels.normal_equations(t, y, tc, alpha, omega, feat)
    coef = np.zeros(4)
    cond = _kernels.solve_normal(G, r, coef)
    if not cond <= _kernels.COND_LIMIT:
        raise DegenerateRegressorsError(
            f"normal equations are degenerate at t_c={tc!r}, alpha={alpha!r}, omega={omega!r} (condition ~ {cond:.3g})"
        )
    mse = float(_kernels.residual_mse(y, coef, feat))
    return SlavedLinear(float(coef[0]), float(coef[1]), float(coef[2]), float(coef[3]), mse)


def _params_from_triple(triple, series: TimeSeries) -> LpplParams:
    s = slave_linear(triple, series)
    return compose(LinearizedParams(float(triple[0]), float(triple[1]), float(triple[2]), s.A, s.B, s.C1, s.C2))


def _result(params: LpplParams, series: TimeSeries, converged: bool, starts: int) -> FitResult:
    residuals = series.values - evaluate_series(params, series.t)
    residuals.flags.writeable = False
    return FitResult(
        params=params,
        objective=float(np.mean(residuals * residuals)),
        residuals=residuals,
        n_points=len(series),
        converged=bool(converged),
        starts_evaluated=int(starts),
    )


def _grid_axis(lo: float, hi: float, n: int) -> np.ndarray:
    # cell centres, so no start sits on the box boundary
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


def _run_descents(mode, starts, step, lo, hi, t, y, maxiter, ftol, xtol, workers):
    """Independent Nelder-Mead runs, one per row of ``starts``.

    Results are stored by start index, so they do not depend on how the
    rows are distributed over worker threads.
    """
    k = starts.shape[0]
    xs = np.empty_like(starts)
    fs = np.empty(k)
    conv = np.zeros(k, dtype=bool)
    nevs = np.zeros(k, dtype=np.int64)

    def run(rows):
        for i in rows:
            x, f, _, nev, c = _kernels.nelder_mead(mode, starts[i], step, lo, hi, t, y, maxiter, ftol, xtol)
            xs[i] = x
            fs[i] = f
            conv[i] = c
            nevs[i] = nev

    if workers <= 1 or k <= 1:
        run(range(k))
    else:
        chunks = [range(i, k, workers) for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, chunks))
    return xs, fs, conv, nevs


def _stable_order(values: np.ndarray) -> np.ndarray:
    return np.argsort(values, kind="stable")


def _check_fit_input(series: TimeSeries, config: FitConfig) -> None:
    if len(series) < MIN_FIT_POINTS:
        raise InsufficientDataError(f"fitting needs at least {MIN_FIT_POINTS} points, got {len(series)}")
    config.validate(series)


def fit(series: TimeSeries, config: FitConfig = FitConfig()) -> FitResult:
    """Multistart least-squares fit of all seven parameters.

    Every start of the ``t_c x alpha x omega`` grid (plus ``random_starts``
    seeded uniform draws) gets a short bounded descent; the
    ``polish_starts`` best outcomes are then descended to
    ``local_tolerance``. The result is a deterministic function of the
    series and the config.
    """
    _check_fit_input(series, config)
    t, y = _arrays(series)
    tc_lo, tc_hi = config.resolve_tc_bounds(series)
    lo = np.array([tc_lo, config.alpha_bounds[0], config.omega_bounds[0]])
    hi = np.array([tc_hi, config.alpha_bounds[1], config.omega_bounds[1]])
    counts = np.array(config.multistart_grid, dtype=np.float64)
    cell = (hi - lo) / counts

    axes = [_grid_axis(lo[j], hi[j], int(counts[j])) for j in range(3)]
    starts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(3, -1).T.copy()
    if config.random_starts:
        rng = np.random.Generator(np.random.PCG64(config.seed))
        extra = lo + rng.random((config.random_starts, 3)) * (hi - lo)
        starts = np.vstack([starts, extra])

    xs, fs, _, _ = _run_descents(
        _kernels.MODE_PROFILE, starts, cell, lo, hi, t, y,
        config.screen_iterations, SCREEN_FTOL, SCREEN_XTOL, config.workers,
    )
    finite = np.flatnonzero(np.isfinite(fs))
    if finite.size == 0:
        raise DegenerateDataError("no start produced a finite objective; data or search box is degenerate")
    order = finite[_stable_order(fs[finite])][: config.polish_starts]

    pxs, pfs, pconv, _ = _run_descents(
        _kernels.MODE_PROFILE, xs[order], cell / 10.0, lo, hi, t, y,
        config.local_max_iterations, config.local_tolerance, POLISH_XTOL, config.workers,
    )
    best = int(_stable_order(pfs)[0])
    if not np.isfinite(pfs[best]):
        raise DegenerateDataError("polishing failed to keep a finite objective")
    params = _params_from_triple(pxs[best], series)
    return _result(params, series, pconv[best], starts.shape[0])


def _profile_one(tc, t, y, config: FitConfig):
    na, nw = config.multistart_grid[1], config.multistart_grid[2]
    lo = np.array([tc, config.alpha_bounds[0], config.omega_bounds[0]])
    hi = np.array([tc, config.alpha_bounds[1], config.omega_bounds[1]])
    cell = np.array([0.0, (hi[1] - lo[1]) / na, (hi[2] - lo[2]) / nw])
    a_axis = _grid_axis(lo[1], hi[1], na)
    w_axis = _grid_axis(lo[2], hi[2], nw)
    starts = np.empty((na * nw, 3))
    starts[:, 0] = tc
    starts[:, 1] = np.repeat(a_axis, nw)
    starts[:, 2] = np.tile(w_axis, na)

    raw = _kernels.evaluate_starts(t, y, starts)
    finite = np.flatnonzero(np.isfinite(raw))
    if finite.size == 0:
        return math.inf, math.nan, math.nan
    chosen = finite[_stable_order(raw[finite])][: config.scan_screen_starts]
    xs, fs, _, _ = _run_descents(
        _kernels.MODE_PROFILE, starts[chosen], cell, lo, hi, t, y,
        config.screen_iterations, SCREEN_FTOL, SCREEN_XTOL, 1,
    )
    fin = np.flatnonzero(np.isfinite(fs))
    if fin.size == 0:
        return math.inf, math.nan, math.nan
    top = fin[_stable_order(fs[fin])][: config.scan_polish_starts]
    pxs, pfs, _, _ = _run_descents(
        _kernels.MODE_PROFILE, xs[top], cell / 10.0, lo, hi, t, y,
        config.local_max_iterations, config.local_tolerance, POLISH_XTOL, 1,
    )
    b = int(_stable_order(pfs)[0])
    return float(pfs[b]), float(pxs[b, 1]), float(pxs[b, 2])


def scan_tc(series: TimeSeries, grid, config: FitConfig = FitConfig()) -> TcScanProfile:
    """Profile the objective over fixed ``t_c`` candidates.

    At each candidate ``alpha`` and ``omega`` are optimised (linear
    coefficients slaved): candidates not after the last observation are
    infeasible and profile to ``inf``. Otherwise the ``alpha x omega`` part of the start grid is
    evaluated, the ``scan_screen_starts`` best starts get a short descent and
    the ``scan_polish_starts`` best of those a full one. Candidates are
    independent; ties in the profile resolve to the smallest ``t_c``.
    """
    g = np.array(grid, dtype=np.float64).reshape(-1)
    if g.size == 0:
        raise InvalidArgumentError("t_c grid is empty")
    if not np.all(np.isfinite(g)):
        raise InvalidArgumentError("t_c grid must be finite")
    if g.size > 1 and np.any(np.diff(g) <= 0.0):
        raise InvalidArgumentError("t_c grid must be strictly increasing")
    if len(series) < MIN_FIT_POINTS:
        raise InsufficientDataError(f"scanning needs at least {MIN_FIT_POINTS} points, got {len(series)}")
    config.validate()
    if not g[-1] > series.last_t:
        raise InvalidArgumentError(f"no t_c candidate lies after the last observation {series.last_t!r}")
    t, y = _arrays(series)

    prof = np.empty(g.size)
    alphas = np.empty(g.size)
    omegas = np.empty(g.size)

    def run(rows):
        for i in rows:
            if g[i] > series.last_t:
                prof[i], alphas[i], omegas[i] = _profile_one(g[i], t, y, config)
            else:
                prof[i], alphas[i], omegas[i] = math.inf, math.nan, math.nan

    workers = min(config.workers, g.size)
    if workers <= 1:
        run(range(g.size))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, [range(i, g.size, workers) for i in range(workers)]))

    if not np.any(np.isfinite(prof)):
        raise DegenerateDataError("no t_c candidate produced a finite objective")
    best = int(np.argmin(prof))  # first minimum -> smallest t_c on ties
    for a in (g, prof, alphas, omegas):
        a.flags.writeable = False
    return TcScanProfile(grid=g, profile_objective=prof, best_index=best, alpha=alphas, omega=omegas)


def refine(series: TimeSeries, start: LpplParams, config: FitConfig = FitConfig()) -> FitResult:
    """Local polish of all seven parameters from ``start``.

    A slaved three-parameter descent is followed by a descent over the full
    linearised parameter vector. Never returns a worse objective than
    ``start``; a start with zero objective is returned unchanged.
    """
    if len(series) < MIN_SLAVE_POINTS:
        raise InsufficientDataError(f"refine needs at least {MIN_SLAVE_POINTS} points, got {len(series)}")
    config.validate()
    a_lo, a_hi = config.alpha_bounds
    w_lo, w_hi = config.omega_bounds
    if not start.t_c > series.last_t:
        raise InvalidArgumentError(f"start t_c {start.t_c!r} is not after the last observation {series.last_t!r}")
    if not (a_lo <= start.alpha <= a_hi and w_lo <= start.omega <= w_hi):
        raise InvalidArgumentError(f"start alpha={start.alpha!r}, omega={start.omega!r} outside the configured bounds")
    tc_hi = max(config.resolve_tc_bounds(series)[1], start.t_c)
    # the lower t_c edge stays strictly after the data to keep the domain valid
    tc_lo = series.last_t + 1e-9 * max(1.0, abs(series.last_t))

    f0 = objective(start, series)
    if f0 == 0.0:
        return _result(start, series, True, 1)
    t, y = _arrays(series)
    candidates = [(f0, start, True)]

    lo3 = np.array([tc_lo, a_lo, w_lo])
    hi3 = np.array([tc_hi, a_hi, w_hi])
    step3 = np.array([0.01, 0.01 * (a_hi - a_lo), 0.01 * (w_hi - w_lo)])
    x3, f3, _, _, c3 = _kernels.nelder_mead(
        _kernels.MODE_PROFILE, np.array(start.nonlinear), step3, lo3, hi3, t, y,
        config.local_max_iterations, config.local_tolerance, POLISH_XTOL,
    )
    if np.isfinite(f3):
        p3 = _params_from_triple(x3, series)
        candidates.append((objective(p3, series), p3, c3))

    seed_params = min(candidates, key=lambda c: c[0])[1]
    lin = split(seed_params)
    x7 = np.array([lin.t_c, lin.alpha, lin.omega, lin.A, lin.B, lin.C1, lin.C2])
    step7 = np.concatenate([step3 * 0.1, 1e-3 * (np.abs(x7[3:]) + 1e-3)])
    lo7 = np.concatenate([lo3, np.full(4, -np.inf)])
    hi7 = np.concatenate([hi3, np.full(4, np.inf)])
    x, f7, _, _, c7 = _kernels.nelder_mead(
        _kernels.MODE_FULL, x7, step7, lo7, hi7, t, y,
        config.local_max_iterations, config.local_tolerance, POLISH_XTOL,
    )
    if np.isfinite(f7):
        p7 = compose(LinearizedParams(*(float(v) for v in x)))
        candidates.append((objective(p7, series), p7, c7))

    f_best, p_best, c_best = min(candidates, key=lambda c: c[0])
    return _result(p_best, series, c_best, 1)
