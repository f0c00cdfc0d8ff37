import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from lpplfit import TimeSeries, evaluate_series
from lpplfit.data_io import (
    FitReport,
    SeriesFileSchema,
    dumps_report,
    read_params,
    read_profile,
    read_report,
    read_series,
    write_params,
    write_plot_data,
    write_profile,
    write_report,
    write_series,
)
from lpplfit.calibration import TcScanProfile
from lpplfit.diagnostics import forecast_date, sanity_check
from lpplfit.exceptions import DomainError, SeriesFormatError


def _write(tmp_path, text, name="s.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_read_year_month(tmp_path):
    s = read_series(_write(tmp_path, "date,value\n1913-01,12.1\n1913-02,12.0\n"))
    np.testing.assert_allclose(s.t, [1913 + 0.5 / 12, 1913 + 1.5 / 12], rtol=0, atol=1e-12)
    assert round(s.t[0], 4) == 1913.0417 and s.t[1] == 1913.125
    assert s.values.tolist() == [12.1, 12.0]


def test_read_decimal_and_custom_schema(tmp_path):
    p = _write(tmp_path, "v;when\n1.5;2001.25\n2.5;2001.5\n")
    s = read_series(p, SeriesFileSchema(date_column="when", value_column="v", delimiter=";"))
    assert s.t.tolist() == [2001.25, 2001.5] and s.values.tolist() == [1.5, 2.5]


def test_read_duplicate_month(tmp_path):
    with pytest.raises(SeriesFormatError) as ei:
        read_series(_write(tmp_path, "date,value\n1913-01,1\n1913-02,2\n1913-02,3\n"))
    assert ei.value.line == 4


@pytest.mark.parametrize(
    "text, line",
    [
        ("date,value\n1913-01,1\n1913-13,2\n", 3),
        ("date,value\n1913-01,abc\n", 2),
        ("date,value\n1913-01\n", 2),
        ("date,value\n1913-01,nan\n", 2),
        ("date,value\n1913-01,1\n\n1912-05,2\n", 4),
    ],
)
def test_read_malformed_reports_line(tmp_path, text, line):
    with pytest.raises(SeriesFormatError) as ei:
        read_series(_write(tmp_path, text))
    assert ei.value.line == line
    assert f":{line}:" in str(ei.value)


def test_read_header_and_empty(tmp_path):
    with pytest.raises(SeriesFormatError):
        read_series(_write(tmp_path, "time,price\n2000.0,1\n"))
    with pytest.raises(SeriesFormatError):
        read_series(_write(tmp_path, "date,value\n"))
    with pytest.raises(SeriesFormatError):
        read_series(_write(tmp_path, ""))
    with pytest.raises(FileNotFoundError):
        read_series(tmp_path / "missing.csv")


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=60, deadline=None)
@given(
    steps=hnp.arrays(np.float64, st.integers(1, 40), elements=st.floats(1e-6, 10.0)),
    values=st.lists(finite, min_size=40, max_size=40),
    start=st.floats(-1e4, 1e4),
)
def test_series_round_trip(tmp_path_factory, steps, values, start):
    t = start + np.cumsum(steps)
    if np.any(np.diff(t) <= 0):
        return
    s = TimeSeries(t, np.array(values[: t.size]))
    p = tmp_path_factory.mktemp("rt") / "s.csv"
    write_series(s, p)
    back = read_series(p)
    np.testing.assert_array_equal(back.t, s.t)
    np.testing.assert_array_equal(back.values, s.values)


def _report(params, series):
    return FitReport(
        input={"path": "x.csv", "rows": len(series), "first_t": float(series.t[0]), "last_t": float(series.t[-1])},
        params=params,
        objective=1.0 / 3.0,
        singularity_date=forecast_date(params.t_c).isoformat(),
        sanity=sanity_check(params, series).to_list(),
        tool_version="0.1.0",
        config={"seed": 0, "tc_bounds": [2012.3, 2022.2]},
        fit={"converged": True, "starts_evaluated": 1536},
    )


def test_report_deterministic_and_round_trip(tmp_path, noiseless, paper_params):
    rep = _report(paper_params, noiseless)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    write_report(rep, a)
    write_report(_report(paper_params, noiseless), b)
    assert a.read_bytes() == b.read_bytes()
    back = read_report(a)
    assert back.params == paper_params
    assert back.objective == rep.objective
    assert dumps_report(back) == a.read_text()


def test_report_keys_sorted(tmp_path, noiseless, paper_params):
    text = dumps_report(_report(paper_params, noiseless))
    d = json.loads(text)
    assert list(d) == sorted(d)
    assert text == json.dumps(d, sort_keys=True, indent=2) + "\n"


def test_report_singularity_date(noiseless, paper_params):
    text = dumps_report(_report(paper_params, noiseless))
    date = json.loads(text)["singularity_date"]
    # 2012-12-17 within the +-2 day convention window
    assert date == "2012-12-19"
    assert date[:8] == "2012-12-" and abs(int(date[8:]) - 17) <= 2


def test_params_file(tmp_path, noiseless, paper_params):
    p = tmp_path / "p.json"
    write_params(paper_params, p)
    assert read_params(p) == paper_params
    r = tmp_path / "r.json"
    write_report(_report(paper_params, noiseless), r)
    assert read_params(r) == paper_params


def test_plot_data(tmp_path, noiseless, paper_params):
    p = tmp_path / "plot.csv"
    write_plot_data(noiseless, paper_params, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "t,observed,fitted" and len(lines) == 1192
    data = np.loadtxt(p, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 0], noiseless.t)
    np.testing.assert_array_equal(data[:, 2], evaluate_series(paper_params, noiseless.t))
    np.testing.assert_array_equal(data[:, 1], data[:, 2])


def test_plot_data_empty_and_domain(tmp_path, noiseless, paper_params):
    p = tmp_path / "e.csv"
    write_plot_data(TimeSeries([], []), paper_params, p)
    assert p.read_text() == "t,observed,fitted\n"
    with pytest.raises(DomainError):
        write_plot_data(noiseless, paper_params.replace(t_c=2000.0), tmp_path / "d.csv")


def test_profile_file(tmp_path):
    prof = TcScanProfile(
        grid=np.array([2013.0, 2013.1, 2013.2]),
        profile_objective=np.array([3.0, 1.0, np.inf]),
        best_index=1,
        alpha=np.array([0.3, 0.4, np.nan]),
        omega=np.array([8.0, 9.0, np.nan]),
    )
    p = tmp_path / "prof.csv"
    write_profile(prof, p)
    assert p.read_text().splitlines()[0] == "# argmin_t_c=2013.1"
    grid, obj, best = read_profile(p)
    np.testing.assert_array_equal(grid, prof.grid)
    np.testing.assert_array_equal(obj, prof.profile_objective)
    assert best == 1
