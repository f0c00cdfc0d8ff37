"""Series files, fit reports, plot data and the PPI snapshot.

Series files are comma-separated text with a header row. The date column
holds either ``YYYY-MM`` (placed mid-month) or a decimal year. All floats
are written with ``repr`` so that a read-back reproduces them exactly.
"""
from __future__ import annotations

import csv
import json
import math
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .calibration import TcScanProfile
from .exceptions import InvalidArgumentError, LpplError, SeriesFormatError
from .model import LpplParams, TimeSeries, evaluate_series, to_decimal_year

PPI_SNAPSHOT_ENV = "LPPLFIT_PPI_SNAPSHOT"
PPI_SNAPSHOT_NAME = "ppi_all_commodities_1913_2012.csv"

_YEAR_MONTH = re.compile(r"^(\d{4})-(\d{2})$")


class SnapshotUnavailableError(LpplError, FileNotFoundError):
    pass


@dataclass(frozen=True)
class SeriesFileSchema:
    date_column: str = "date"
    value_column: str = "value"
    delimiter: str = ","


def _parse_date(text: str) -> float:
    m = _YEAR_MONTH.match(text)
    if m:
        return to_decimal_year(int(m.group(1)), int(m.group(2)))
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"non-finite date {text!r}")
    return v


def read_series(path, schema: SeriesFileSchema = SeriesFileSchema()) -> TimeSeries:
    """Load a series file.

    Raises:
        FileNotFoundError: ``path`` does not exist.
        SeriesFormatError: missing header/columns, a malformed row (its
            1-based line number is attached), non-increasing timestamps or
            no data rows.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=schema.delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SeriesFormatError(f"{path}: empty file, header row required", line=1) from None
        try:
            di = header.index(schema.date_column)
            vi = header.index(schema.value_column)
        except ValueError:
            raise SeriesFormatError(
                f"{path}: header {header} lacks columns {schema.date_column!r} and {schema.value_column!r}", line=1
            ) from None
        ts, vs = [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            try:
                t = _parse_date(row[di].strip())
                v = float(row[vi])
            except (IndexError, ValueError, InvalidArgumentError) as exc:
                raise SeriesFormatError(f"{path}:{line}: malformed row {row!r} ({exc})", line=line) from None
            if not math.isfinite(v):
                raise SeriesFormatError(f"{path}:{line}: non-finite value {row[vi]!r}", line=line)
            if ts and not t > ts[-1]:
                raise SeriesFormatError(f"{path}:{line}: timestamp {t!r} does not increase", line=line)
            ts.append(t)
            vs.append(v)
    if not ts:
        raise SeriesFormatError(f"{path}: no data rows")
    return TimeSeries(np.array(ts), np.array(vs))


def write_series(series: TimeSeries, path, schema: SeriesFileSchema = SeriesFileSchema()) -> None:
    """Write decimal-year timestamps and values at full precision."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=schema.delimiter, lineterminator="\n")
        w.writerow([schema.date_column, schema.value_column])
        for t, v in series.pairs():
            w.writerow([repr(t), repr(v)])


def load_ppi_snapshot() -> TimeSeries:
    """Monthly all-commodities PPI, Jan 1913 - Mar 2012 (1982 = 100).

    Looks at ``$LPPLFIT_PPI_SNAPSHOT`` first, then at the file vendored in
    ``lpplfit/data``. See ``lpplfit/data/PROVENANCE.md`` for the expected
    content.
    """
    env = os.environ.get(PPI_SNAPSHOT_ENV)
    if env:
        return read_series(env)
    vendored = resources.files("lpplfit").joinpath("data", PPI_SNAPSHOT_NAME)
    if vendored.is_file():
        with resources.as_file(vendored) as p:
            return read_series(p)
    raise SnapshotUnavailableError(
        f"PPI snapshot not found: set ${PPI_SNAPSHOT_ENV} or place {PPI_SNAPSHOT_NAME} "
        "in lpplfit/data (see lpplfit/data/PROVENANCE.md)"
    )


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    return x


@dataclass(frozen=True)
class FitReport:
    """Everything needed to reproduce and audit one fit."""

    input: dict
    params: LpplParams
    objective: float
    singularity_date: str
    sanity: list = field(default_factory=list)
    tool_version: str = ""
    config: dict = field(default_factory=dict)
    fit: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "fit": self.fit,
            "input": self.input,
            "objective": self.objective,
            "params": self.params.as_dict(),
            "sanity": self.sanity,
            "singularity_date": self.singularity_date,
            "tool_version": self.tool_version,
        }

    @classmethod
    def from_dict(cls, d: dict) -> FitReport:
        return cls(
            input=d["input"],
            params=LpplParams(**d["params"]),
            objective=float(d["objective"]),
            singularity_date=d["singularity_date"],
            sanity=d.get("sanity", []),
            tool_version=d.get("tool_version", ""),
            config=d.get("config", {}),
            fit=d.get("fit", {}),
        )


def dumps_report(report: FitReport) -> str:
    return json.dumps(_jsonable(report.to_dict()), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(report: FitReport, path) -> None:
    Path(path).write_text(dumps_report(report), encoding="utf-8")


def read_report(path) -> FitReport:
    return FitReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def read_params(path) -> LpplParams:
    """Parameters from a JSON file: a bare parameter object or a fit report."""
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    if "params" in d:
        d = d["params"]
    try:
        return LpplParams(**{k: float(d[k]) for k in ("A", "m", "C", "t_c", "alpha", "omega", "phi")})
    except KeyError as exc:
        raise InvalidArgumentError(f"{path}: parameter {exc.args[0]!r} missing") from None


def write_params(params: LpplParams, path) -> None:
    Path(path).write_text(json.dumps(params.as_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_plot_data(series: TimeSeries, params: LpplParams, path) -> None:
    """Three-column table ``t,observed,fitted``."""
    fitted = evaluate_series(params, series.t)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "observed", "fitted"])
        for t, o, f in zip(series.t.tolist(), series.values.tolist(), fitted.tolist()):
            w.writerow([repr(t), repr(o), repr(f)])


def write_profile(profile: TcScanProfile, path) -> None:
    """Two-column ``t_c,objective`` table preceded by ``#`` lines naming the argmin."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# argmin_t_c={profile.best_tc!r}\n")
        fh.write(f"# best_index={profile.best_index}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_c", "objective"])
        for t, f in zip(profile.grid.tolist(), profile.profile_objective.tolist()):
            w.writerow([repr(t), repr(f)])


def read_profile(path) -> tuple[np.ndarray, np.ndarray, int]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta = dict(l[2:].split("=", 1) for l in lines if l.startswith("# "))
    rows = [l.split(",") for l in lines if l and not l.startswith("#")][1:]
    grid = np.array([float(r[0]) for r in rows])
    obj = np.array([float(r[1]) for r in rows])
    return grid, obj, int(meta["best_index"])
