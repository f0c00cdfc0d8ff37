"""Examples that need the PPI snapshot; skipped when it is not installed."""
import numpy as np
import pytest

from lpplfit import REFERENCE_PPI_PARAMS, objective, residuals, sanity_check
from lpplfit.data_io import SnapshotUnavailableError, load_ppi_snapshot, write_plot_data


@pytest.fixture(scope="module")
def ppi():
    try:
        return load_ppi_snapshot()
    except SnapshotUnavailableError as exc:
        pytest.skip(str(exc))


def test_snapshot_shape(ppi):
    assert len(ppi) == 1191
    assert round(ppi.t[0], 4) == 1913.0417 and round(ppi.t[-1], 4) == 2012.2083


def test_reference_objective_matches_plain_loop(ppi):
    p = REFERENCE_PPI_PARAMS
    acc = 0.0
    for t, x in zip(ppi.t.tolist(), ppi.values.tolist()):
        d = p.t_c - t
        acc += (x - (p.A - p.m * d**p.alpha * (1 + p.C * np.cos(p.omega * np.log(d) + p.phi)))) ** 2
    value = objective(p, ppi)
    assert value > 0
    assert value == pytest.approx(acc / len(ppi), rel=1e-12)
    r = residuals(ppi, p).values
    assert float(np.mean(r**2)) == pytest.approx(value, rel=1e-12)


def test_reference_sanity(ppi):
    assert sanity_check(REFERENCE_PPI_PARAMS, ppi).passed


def test_reference_plot_data(ppi, tmp_path):
    out = tmp_path / "fig.csv"
    write_plot_data(ppi, REFERENCE_PPI_PARAMS, out)
    assert len(out.read_text().splitlines()) == 1192
