import pytest
from hypothesis import given, strategies as st

from layersim.errors import EmptySeries, SeriesTooShort
from layersim.predictor import (
    LoadSeries,
    ewma_forecast,
    forecast_error,
    window_mean_forecast,
)


def series(*rates):
    return LoadSeries(tuple((float(i), float(r)) for i, r in enumerate(rates)))


rate_lists = st.lists(st.floats(0.0, 1e4, allow_nan=False), min_size=1, max_size=40)
alphas = st.floats(0.01, 1.0)


class TestEwma:
    def test_constant_series_is_fixed_point(self):
        for alpha in (0.1, 0.5, 1.0):
            assert ewma_forecast(series(7, 7, 7, 7), alpha) == pytest.approx(7.0)

    def test_alpha_one_returns_last_observation(self):
        assert ewma_forecast(series(3, 9, 4, 11), alpha=1.0) == 11.0

    def test_one_step_arithmetic(self):
        assert ewma_forecast(series(10, 20), alpha=0.5) == pytest.approx(15.0)

    def test_empty_series(self):
        with pytest.raises(EmptySeries):
            ewma_forecast(series(), 0.3)

    @given(rates=rate_lists, alpha=alphas)
    def test_bounded_by_series_range(self, rates, alpha):
        f = ewma_forecast(series(*rates), alpha)
        assert min(rates) - 1e-9 <= f <= max(rates) + 1e-9

    @given(rates=rate_lists, alpha=alphas, c=st.floats(-100.0, 100.0))
    def test_shift_equivariance(self, rates, alpha, c):
        c = max(c, -min(rates))     # keep shifted rates in the valid domain
        base = ewma_forecast(series(*rates), alpha)
        shifted = ewma_forecast(series(*[r + c for r in rates]), alpha)
        assert shifted == pytest.approx(base + c, abs=1e-6)

    @given(rates=rate_lists, alpha=alphas, lam=st.floats(0.01, 100.0))
    def test_scale_equivariance(self, rates, alpha, lam):
        base = ewma_forecast(series(*rates), alpha)
        scaled = ewma_forecast(series(*[r * lam for r in rates]), alpha)
        assert scaled == pytest.approx(base * lam, rel=1e-9, abs=1e-9)


class TestWindowMean:
    def test_mean_of_last_k(self):
        assert window_mean_forecast(series(1, 2, 3, 4), k=3) == pytest.approx(3.0)

    def test_k_larger_than_series(self):
        assert window_mean_forecast(series(2, 4), k=10) == pytest.approx(3.0)

    def test_single_sample(self):
        assert window_mean_forecast(series(5), k=3) == 5.0

    @given(rates=rate_lists, c=st.floats(-100.0, 100.0))
    def test_shift_equivariance(self, rates, c):
        c = max(c, -min(rates))     # keep shifted rates in the valid domain
        base = window_mean_forecast(series(*rates), k=5)
        shifted = window_mean_forecast(series(*[r + c for r in rates]), k=5)
        assert shifted == pytest.approx(base + c, abs=1e-6)

    @given(rates=rate_lists, lam=st.floats(0.01, 100.0))
    def test_scale_equivariance(self, rates, lam):
        base = window_mean_forecast(series(*rates), k=5)
        scaled = window_mean_forecast(series(*[r * lam for r in rates]), k=5)
        assert scaled == pytest.approx(base * lam, rel=1e-9, abs=1e-9)


class TestForecastError:
    def test_constant_series_scores_zero(self):
        s = series(*([5] * 20))
        assert forecast_error(s, lambda p: ewma_forecast(p, 0.3), horizon=10) == 0.0
        assert forecast_error(s, lambda p: window_mean_forecast(p, 5), horizon=10) == 0.0

    def test_alternating_series_worst_case_lag(self):
        s = series(*([0, 10] * 10))
        mae = forecast_error(s, lambda p: window_mean_forecast(p, 1), horizon=10)
        assert mae == pytest.approx(10.0)

    def test_high_alpha_tracks_ramp_better(self):
        s = series(*range(100))
        fast = forecast_error(s, lambda p: ewma_forecast(p, 0.9), horizon=50)
        slow = forecast_error(s, lambda p: ewma_forecast(p, 0.1), horizon=50)
        assert fast < slow

    def test_series_too_short(self):
        with pytest.raises(SeriesTooShort):
            forecast_error(series(1, 2), lambda p: ewma_forecast(p, 0.3), horizon=2)
