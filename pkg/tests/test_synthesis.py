import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpplfit import SyntheticSpec, TimeSeries, evaluate_series, generate, monthly_timestamps, truncate
from lpplfit.exceptions import DomainError, InvalidArgumentError


def test_zero_noise_is_model_image(grid_1913_2012, paper_params):
    s = generate(SyntheticSpec(paper_params, grid_1913_2012))
    np.testing.assert_array_equal(s.values, evaluate_series(paper_params, grid_1913_2012))
    np.testing.assert_array_equal(s.t, grid_1913_2012)


def test_seeded_determinism(grid_1913_2012, paper_params):
    spec = SyntheticSpec(paper_params, grid_1913_2012, noise_sigma=2.0, seed=3)
    a, b = generate(spec), generate(spec)
    np.testing.assert_array_equal(a.values, b.values)
    c = generate(SyntheticSpec(paper_params, grid_1913_2012, noise_sigma=2.0, seed=4))
    assert not np.array_equal(a.values, c.values)


def test_noise_level(paper_params):
    ts = 1913.0 + np.arange(10_000) / 1200.0
    p = paper_params.replace(t_c=2030.0)
    noisy = generate(SyntheticSpec(p, ts, noise_sigma=2.0, seed=7))
    clean = generate(SyntheticSpec(p, ts))
    sd = float(np.std(noisy.values - clean.values, ddof=1))
    assert 1.9 <= sd <= 2.1
    # frozen value for this seed and generator
    assert sd == pytest.approx(1.98865, abs=5e-5)


def test_spec_validation(grid_1913_2012, paper_params):
    with pytest.raises(InvalidArgumentError):
        SyntheticSpec(paper_params, grid_1913_2012, noise_sigma=-1.0)
    with pytest.raises(InvalidArgumentError):
        SyntheticSpec(paper_params, [2000.0, 1999.0])
    with pytest.raises(DomainError):
        SyntheticSpec(paper_params, [2000.0, 2013.0])


def test_truncate_examples(noiseless):
    assert truncate(noiseless, 2100.0) == noiseless
    assert len(truncate(noiseless, 1900.0)) == 0
    cut = truncate(noiseless, 2000.0)
    assert len(cut) == 1044
    # direct enumeration of mid-month stamps Jan 1913 - Dec 1999
    assert len(monthly_timestamps((1913, 1), (1999, 12))) == 1044
    assert cut.t[-1] < 2000.0 < noiseless.t[len(cut)]


@settings(max_examples=100, deadline=None)
@given(t1=st.floats(1900.0, 2020.0), t2=st.floats(1900.0, 2020.0))
def test_truncate_composes(noiseless, t1, t2):
    assert truncate(truncate(noiseless, t1), t2) == truncate(noiseless, min(t1, t2))


def test_truncate_includes_endpoint():
    s = TimeSeries([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert len(truncate(s, 2.0)) == 2
