"""Log-periodic power-law model, its linearised form, and decimal-year time.

The model is::

    x(t) = A - m (t_c - t)^alpha * (1 + C cos(omega ln(t_c - t) + phi))

and, with ``f = (t_c - t)^alpha`` and ``theta = omega ln(t_c - t)``, the
equivalent linear-in-coefficients form::

    x(t) = A + B f + C1 f cos(theta) + C2 f sin(theta)

with ``B = -m``, ``C1 = -m C cos(phi)`` and ``C2 = m C sin(phi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, InvalidArgumentError

TWO_PI = 2.0 * math.pi


def _normalize_phase(phi: float) -> float:
    p = math.fmod(phi, TWO_PI)
    if p < 0.0:
        p += TWO_PI
    if p >= TWO_PI:
        p = 0.0
    return p


@dataclass(frozen=True)
class LpplParams:
    """The seven model parameters. ``phi`` is normalised to ``[0, 2*pi)``."""

    A: float
    m: float
    C: float
    t_c: float
    alpha: float
    omega: float
    phi: float

    def __post_init__(self):
        for name in ("A", "m", "C", "t_c", "alpha", "omega", "phi"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidArgumentError(f"parameter {name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "phi", _normalize_phase(self.phi))

    @property
    def nonlinear(self) -> tuple[float, float, float]:
        return (self.t_c, self.alpha, self.omega)

    def canonical(self) -> LpplParams:
        """Fold a negative ``C`` into the phase so that ``C >= 0``."""
        if self.C >= 0.0:
            return self
        return LpplParams(self.A, self.m, -self.C, self.t_c, self.alpha, self.omega, self.phi + math.pi)

    def replace(self, **changes) -> LpplParams:
        values = self.as_dict()
        values.update(changes)
        return LpplParams(**values)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("A", "m", "C", "t_c", "alpha", "omega", "phi")}


# Fit of the monthly US all-commodities PPI, Jan 1913 - Mar 2012 (1982 = 100).
REFERENCE_PPI_PARAMS = LpplParams(A=252.7, m=44.01, C=0.092, t_c=2012.965, alpha=0.392, omega=9.46, phi=2.96)


@dataclass(frozen=True)
class LinearizedParams:
    t_c: float
    alpha: float
    omega: float
    A: float
    B: float
    C1: float
    C2: float

    @property
    def nonlinear(self) -> tuple[float, float, float]:
        return (self.t_c, self.alpha, self.omega)

    @property
    def linear(self) -> tuple[float, float, float, float]:
        return (self.A, self.B, self.C1, self.C2)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Observations ``values[i]`` at strictly increasing decimal years ``t[i]``.

    Both arrays are stored as read-only float64 copies.
    """

    t: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.array(self.t, dtype=np.float64).reshape(-1)
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        if t.shape != v.shape:
            raise InvalidArgumentError(f"timestamps and values differ in length ({t.size} vs {v.size})")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise InvalidArgumentError("timestamps and values must be finite")
        if t.size > 1:
            bad = np.flatnonzero(np.diff(t) <= 0.0)
            if bad.size:
                i = int(bad[0]) + 1
                raise InvalidArgumentError(f"timestamps not strictly increasing at index {i} ({t[i - 1]!r} -> {t[i]!r})")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return np.array_equal(self.t, other.t) and np.array_equal(self.values, other.values)

    __hash__ = None

    @classmethod
    def from_pairs(cls, pairs) -> TimeSeries:
        pairs = list(pairs)
        if not pairs:
            return cls(np.empty(0), np.empty(0))
        t, v = zip(*pairs)
        return cls(np.asarray(t), np.asarray(v))

    def __len__(self) -> int:
        return int(self.t.size)

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.values.tolist()))

    @property
    def last_t(self) -> float:
        return float(self.t[-1])


def to_decimal_year(year: int, month: int) -> float:
    """Mid-month decimal year: ``year + (month - 0.5) / 12``."""
    if not isinstance(month, (int, np.integer)) or not 1 <= month <= 12:
        raise InvalidArgumentError(f"month must be an integer in 1..12, got {month!r}")
    return year + (month - 0.5) / 12.0


def monthly_timestamps(start: tuple[int, int], end: tuple[int, int]) -> np.ndarray:
    """Mid-month decimal years from ``start`` to ``end`` inclusive, as (year, month)."""
    (y0, m0), (y1, m1) = start, end
    to_decimal_year(y0, m0)
    to_decimal_year(y1, m1)
    first = 12 * y0 + (m0 - 1)
    last = 12 * y1 + (m1 - 1)
    if last < first:
        raise InvalidArgumentError(f"end {end} precedes start {start}")
    idx = np.arange(first, last + 1)
    return np.array([to_decimal_year(int(i // 12), int(i % 12) + 1) for i in idx])


def _check_domain(t_c: float, t: np.ndarray) -> None:
    if t.size and not t.max() < t_c:
        i = int(np.flatnonzero(~(t < t_c))[0])
        raise DomainError(f"timestamp {t[i]!r} at index {i} is not before t_c = {t_c!r}", index=i)


def evaluate(params: LpplParams, t: float) -> float:
    """Model value at a single decimal year ``t < t_c``."""
    dt = params.t_c - t
    if not dt > 0.0:
        raise DomainError(f"timestamp {t!r} is not before t_c = {params.t_c!r}", index=0)
    f = dt**params.alpha
    return params.A - params.m * f * (1.0 + params.C * math.cos(params.omega * math.log(dt) + params.phi))


def evaluate_series(params: LpplParams, timestamps) -> np.ndarray:
    t = np.asarray(timestamps, dtype=np.float64).reshape(-1)
    _check_domain(params.t_c, t)
    dt = params.t_c - t
    L = np.log(dt)
    return params.A - params.m * np.exp(params.alpha * L) * (1.0 + params.C * np.cos(params.omega * L + params.phi))


def evaluate_linearized(lin: LinearizedParams, timestamps) -> np.ndarray:
    t = np.asarray(timestamps, dtype=np.float64).reshape(-1)
    _check_domain(lin.t_c, t)
    L = np.log(lin.t_c - t)
    f = np.exp(lin.alpha * L)
    th = lin.omega * L
    return lin.A + f * (lin.B + lin.C1 * np.cos(th) + lin.C2 * np.sin(th))


def split(params: LpplParams) -> LinearizedParams:
    mc = params.m * params.C
    return LinearizedParams(
        t_c=params.t_c,
        alpha=params.alpha,
        omega=params.omega,
        A=params.A,
        B=-params.m,
        C1=-mc * math.cos(params.phi),
        C2=mc * math.sin(params.phi),
    )


def compose(lin: LinearizedParams) -> LpplParams:
    """Inverse of :func:`split`, returning canonical parameters (``C >= 0``).

    With ``m == 0`` the oscillation cannot be expressed relative to the
    power-law amplitude; ``C`` and ``phi`` are then set to zero.
    """
    m = -lin.B
    R = math.hypot(lin.C1, lin.C2)
    if m == 0.0 or R == 0.0:
        C, phi = 0.0, 0.0
    else:
        sgn = 1.0 if m > 0.0 else -1.0
        C = R / abs(m)
        phi = math.atan2(sgn * lin.C2, -sgn * lin.C1)
    return LpplParams(A=lin.A, m=m, C=C, t_c=lin.t_c, alpha=lin.alpha, omega=lin.omega, phi=phi)


def oscillation_extrema(params: LpplParams, t_from: float, t_to: float) -> np.ndarray:
    """Times in ``[t_from, t_to]`` where the log-periodic cosine equals +-1.

    These satisfy ``omega ln(t_c - t) + phi = k pi``, i.e.
    ``t = t_c - exp((k pi - phi) / omega)``. Returned in ascending order.
    """
    if not (t_from < t_to < params.t_c):
        raise InvalidArgumentError(f"need t_from < t_to < t_c, got {t_from!r}, {t_to!r}, t_c={params.t_c!r}")
    if not params.omega > 0.0:
        raise InvalidArgumentError("omega must be positive")
    w, phi = params.omega, params.phi
    k_lo = math.ceil((w * math.log(params.t_c - t_to) + phi) / math.pi)
    k_hi = math.floor((w * math.log(params.t_c - t_from) + phi) / math.pi)
    ks = np.arange(k_hi, k_lo - 1, -1, dtype=np.float64)
    times = params.t_c - np.exp((ks * math.pi - phi) / w)
    return times[(times >= t_from) & (times <= t_to)]
