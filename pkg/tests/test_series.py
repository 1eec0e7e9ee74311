import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from perpstat.errors import (
    DegenerateSeries,
    IncompleteWindow,
    IrregularSeries,
    LagTooLarge,
    NonPositiveValue,
    SeriesTooShort,
)
from perpstat.series import (
    Series,
    acf,
    correlogram,
    cumulative_sum,
    first_difference,
    log_returns,
    parse_duration,
    square,
    twap,
)

from conftest import regular


def brute_acf(x, k):
    """Autocorrelation at lag k by explicit double loop."""
    n = len(x)
    m = sum(x) / n
    num = sum((x[t] - m) * (x[t - k] - m) for t in range(k, n))
    den = sum((v - m) ** 2 for v in x)
    return num / den


class TestSeries:
    def test_rejects_irregular_spacing(self):
        ts = np.array(["2020-01-01T00:00", "2020-01-01T08:00", "2020-01-01T20:00"],
                      dtype="datetime64[s]")
        with pytest.raises(IrregularSeries):
            Series(ts, [1.0, 2.0, 3.0], "8h")

    def test_rejects_unsorted(self):
        ts = np.array(["2020-01-01T08:00", "2020-01-01T00:00"], dtype="datetime64[s]")
        with pytest.raises(IrregularSeries):
            Series(ts, [1.0, 2.0], "8h")

    def test_rejects_empty(self):
        with pytest.raises(SeriesTooShort):
            Series(np.array([], dtype="datetime64[s]"), [], "8h")

    def test_values_are_read_only(self):
        s = regular([1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 5.0

    def test_parse_duration(self):
        assert parse_duration("8h") == np.timedelta64(28800, "s")
        assert parse_duration("1min") == np.timedelta64(60, "s")
        with pytest.raises(ValueError):
            parse_duration("0h")


class TestTransforms:
    def test_log_returns_examples(self):
        assert np.allclose(log_returns(regular([1, math.e, math.e])).values, [1, 0])
        assert np.array_equal(log_returns(regular([5, 5, 5])).values, [0, 0])
        np.testing.assert_allclose(log_returns(regular([1, 2, 4, 8])).values,
                                   [math.log(2)] * 3, rtol=0, atol=1e-15)

    def test_log_returns_timestamps_are_later_observation(self):
        s = regular([1, 2, 4])
        assert np.array_equal(log_returns(s).timestamps, s.timestamps[1:])

    def test_log_returns_errors(self):
        with pytest.raises(NonPositiveValue):
            log_returns(regular([1.0, -0.5, 2.0]))
        with pytest.raises(NonPositiveValue):
            log_returns(regular([1.0, 0.0]))
        with pytest.raises(SeriesTooShort):
            log_returns(regular([1.0]))

    def test_first_difference_examples(self):
        assert np.array_equal(first_difference(regular([1, 2, 4])).values, [1, 2])
        assert np.array_equal(first_difference(regular([3, 3, 3])).values, [0, 0])
        np.testing.assert_allclose(first_difference(regular([-0.0005, 0.0001, -0.0002])).values,
                                   [0.0006, -0.0003], rtol=1e-12)
        with pytest.raises(SeriesTooShort):
            first_difference(regular([1.0]))

    def test_square_examples(self):
        assert np.array_equal(square(regular([-2, 3])).values, [4, 9])
        assert np.array_equal(square(regular([0, 0])).values, [0, 0])
        np.testing.assert_allclose(square(regular([0.0001, -0.0003])).values, [1e-8, 9e-8],
                                   rtol=1e-12)

    @given(st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=200))
    def test_cumsum_difference_round_trip(self, ints):
        # exact for integer-valued data (no rounding in either direction)
        s = regular(ints)
        back = first_difference(cumulative_sum(s))
        assert np.array_equal(back.values, s.values[1:])
        assert np.array_equal(back.timestamps, s.timestamps[1:])

    @given(st.lists(st.floats(1e-6, 1e6), min_size=2, max_size=200))
    def test_log_returns_equal_difference_of_logs(self, vals):
        s = regular(vals)
        via_diff = first_difference(s.derive(np.log(s.values)))
        np.testing.assert_allclose(log_returns(s).values, via_diff.values, rtol=0, atol=1e-12)


def minute_series(values, start="2020-01-01T04:01:00"):
    return Series.regular(values, start=start, cadence="1min")


class TestTwap:
    def test_constant_window(self):
        out = twap(minute_series(np.full(480, 0.25)))
        assert len(out) == 1 and out.values[0] == 0.25
        assert out.timestamps[0] == np.datetime64("2020-01-01T12:00:00")
        assert out.cadence == np.timedelta64(8, "h")

    def test_ramp_mean(self):
        vals = np.arange(480.0)
        out = twap(minute_series(vals))
        assert out.values[0] == 239.5 == sum(vals) / 480

    def test_two_windows(self):
        out = twap(minute_series(np.r_[np.ones(480), -np.ones(480)]))
        assert np.array_equal(out.values, [1.0, -1.0])
        assert np.array_equal(out.timestamps.astype(str),
                              ["2020-01-01T12:00:00", "2020-01-01T20:00:00"])

    def test_boundary_minute_belongs_to_earlier_window(self):
        # 12:00 closes the window (04:00, 12:00]
        out = twap(minute_series(np.r_[np.zeros(479), [480.0], np.zeros(480)]))
        assert out.values[0] == 1.0 and out.values[1] == 0.0

    def test_partial_window(self):
        s = minute_series(np.ones(500))
        with pytest.raises(IncompleteWindow):
            twap(s)
        assert len(twap(s, drop_partial=True)) == 1

    def test_window_must_be_multiple_of_cadence(self):
        s = Series.regular(np.ones(10), cadence="7min")
        with pytest.raises(ValueError):
            twap(s, "8h")

    @given(st.integers(0, 2**32 - 1), st.floats(1e-8, 1e8))
    def test_permutation_invariance(self, seed, scale):
        rng = np.random.default_rng(seed)
        vals = scale * rng.standard_normal(960)
        shuffled = np.r_[rng.permutation(vals[:480]), rng.permutation(vals[480:])]
        assert np.array_equal(twap(minute_series(vals)).values,
                              twap(minute_series(shuffled)).values)


class TestCorrelogram:
    def test_matches_brute_force_oracle(self, rng):
        x = rng.standard_normal(300)
        rows = correlogram(regular(x), 5)
        for r in rows:
            assert r.acf == pytest.approx(brute_acf(list(x), r.lag), abs=1e-12)

    def test_white_noise_bound(self):
        x = np.random.default_rng(7).standard_normal(5000)
        rows = correlogram(regular(x), 20)
        assert all(abs(r.acf) < 3 / math.sqrt(5000) for r in rows)

    def test_ar1_acf(self):
        rng = np.random.default_rng(11)
        e = rng.standard_normal(10000)
        x = np.empty_like(e)
        x[0] = e[0]
        for t in range(1, len(e)):
            x[t] = 0.5 * x[t - 1] + e[t]
        rows = correlogram(regular(x), 3)
        assert abs(rows[0].acf - 0.5) < 0.03
        # PACF of an AR(1) cuts off after lag 1
        assert abs(rows[0].pacf - rows[0].acf) < 1e-12
        assert abs(rows[1].pacf) < 0.03

    def test_pacf_matches_regression_oracle(self, rng):
        # PACF at lag k equals the last coefficient of an AR(k) Yule-Walker solve
        x = rng.standard_normal(400)
        rho = acf(x, 4)
        rows = correlogram(x, 4)
        for k in range(1, 5):
            r = np.array([[rho[abs(i - j)] for j in range(k)] for i in range(k)])
            phi = np.linalg.solve(r, rho[1:k + 1])
            assert rows[k - 1].pacf == pytest.approx(phi[-1], abs=1e-12)

    def test_q_statistic_nondecreasing_and_bounded(self, rng):
        rows = correlogram(rng.standard_normal(500), 15)
        q = [r.q_stat for r in rows]
        assert all(b >= a for a, b in zip(q, q[1:]))
        assert all(0 <= r.q_pvalue <= 1 and -1 <= r.acf <= 1 and -1 <= r.pacf <= 1 for r in rows)

    def test_constant_is_degenerate(self):
        with pytest.raises(DegenerateSeries):
            correlogram(regular(np.ones(50)), 5)

    def test_lag_too_large(self):
        with pytest.raises(LagTooLarge):
            correlogram(regular(np.arange(10.0)), 5)

    @pytest.mark.slow
    def test_white_noise_exceedance_fraction(self):
        n, lags = 2000, 20
        fractions = []
        for seed in range(100):
            x = np.random.default_rng(seed).standard_normal(n)
            rows = correlogram(x, lags)
            fractions.append(sum(abs(r.acf) > 1.96 / math.sqrt(n) for r in rows) / lags)
        assert np.mean(fractions) <= 0.10
