import datetime as dt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from perpstat.errors import ConfigError, IncompleteWindow, InvertedBounds
from perpstat.funding import (
    DAMPENER,
    InterestInputs,
    MarginConfig,
    PremiumInputs,
    clamp,
    funding_payment,
    funding_rate,
    funding_schedule,
    interest_rate,
    premium_index,
)
from perpstat.series import Series

MARGIN = MarginConfig(0.01, 0.005)
rates = st.floats(-0.05, 0.05, allow_nan=False)


def test_interest_rate_examples():
    assert interest_rate(InterestInputs(0.0006, 0.0003, 3)) == pytest.approx(0.0001, abs=1e-18)
    assert interest_rate(InterestInputs(0.0004, 0.0004, 3)) == 0.0
    assert interest_rate(InterestInputs(0.0003, 0.0006, 3)) == pytest.approx(-0.0001, abs=1e-18)
    with pytest.raises(ValueError):
        interest_rate(InterestInputs(0.1, 0.0, 0))


class TestPremiumIndex:
    def test_mark_inside_spread(self):
        assert premium_index(PremiumInputs(9990, 10010, 10000, 10000)) == 0.0

    def test_literal_denominator_example(self):
        p = premium_index(PremiumInputs(10100, 10150, 10000, 10000))
        assert p == 100 / 20000 == 0.005

    def test_exchange_denominator(self):
        p = premium_index(PremiumInputs(10100, 10150, 10000, 10000), "exchange")
        assert p == 0.01

    def test_basis_prorated_over_eight_hours(self):
        inp = PremiumInputs(10100, 10150, 10000, 10000, current_funding_rate=0.001,
                            time_until_funding=dt.timedelta(hours=4))
        basis = 0.001 * 0.5
        assert premium_index(inp, "exchange") == pytest.approx(100 / (10000 * (1 + basis)),
                                                                rel=1e-15)
        assert premium_index(inp) == pytest.approx(100 / (10000 + 10000 * (1 + basis)), rel=1e-15)

    def test_antisymmetry(self):
        above = premium_index(PremiumInputs(10100, 10150, 10000, 10000))
        below = premium_index(PremiumInputs(9850, 9900, 10000, 10000))
        assert below == -above

    def test_input_validation(self):
        with pytest.raises(ValueError):
            PremiumInputs(10200, 10100, 10000, 10000)
        with pytest.raises(ValueError):
            PremiumInputs(10000, 10100, 0, 10000)
        with pytest.raises(ValueError):
            PremiumInputs(10000, 10100, 10000, 10000, time_until_funding=dt.timedelta(hours=9))

    @given(st.floats(1e3, 1e5), st.floats(0.01, 100.0), st.floats(0.01, 100.0))
    def test_numerator_antisymmetry_property(self, mark, gap, half_spread):
        hi = premium_index(PremiumInputs(mark + gap, mark + gap + 2 * half_spread, mark, mark))
        lo = premium_index(PremiumInputs(mark - gap - 2 * half_spread, mark - gap, mark, mark))
        assert lo == pytest.approx(-hi, rel=1e-12)


def test_clamp_examples():
    assert clamp(0.0003, 0.0005, -0.0005) == 0.0003
    assert clamp(0.002, 0.0005, -0.0005) == 0.0005
    assert clamp(-0.002, 0.0005, -0.0005) == -0.0005
    with pytest.raises(InvertedBounds):
        clamp(0.0, -1.0, 1.0)


class TestFundingRate:
    def test_interior_clamp_gives_interest(self):
        b = funding_rate(0.0001, 0.0, MARGIN)
        assert b.funding_rate == 0.0001 and not b.capped and b.clamp_value == 0.0001

    def test_cap_example(self):
        b = funding_rate(0.0001, 0.01, MARGIN)
        assert b.clamp_value == -0.0005
        assert b.cap_bound == pytest.approx(0.00375, abs=1e-18)
        assert b.funding_rate == b.cap_bound and b.capped

    def test_equal_components(self):
        assert funding_rate(0.0003, 0.0003, MARGIN).funding_rate == 0.0003

    def test_negative_cap(self):
        b = funding_rate(0.0, -0.02, MARGIN)
        assert b.capped and b.funding_rate == -b.cap_bound

    def test_margin_validation(self):
        for im, mm in ((0.005, 0.01), (0.01, 0.0), (1.2, 0.1)):
            with pytest.raises(ConfigError):
                MarginConfig(im, mm)

    @given(rates, rates)
    def test_dampener_bound(self, i, p):
        b = funding_rate(i, p, MarginConfig(0.9, 0.01))
        assert abs(b.clamp_value) <= DAMPENER
        if not b.capped:
            assert b.funding_rate == b.premium_index + b.clamp_value
            assert abs(b.funding_rate - p) <= DAMPENER * (1 + 1e-12)

    @given(rates, rates, rates)
    def test_monotone_in_interest(self, i1, i2, p):
        lo, hi = sorted((i1, i2))
        assert funding_rate(lo, p, MARGIN).funding_rate <= funding_rate(hi, p, MARGIN).funding_rate

    @given(rates, rates, rates)
    def test_monotone_in_premium(self, i, p1, p2):
        lo, hi = sorted((p1, p2))
        # P + clamp(I - P) is nondecreasing in P; allow one ulp for the addition
        a = funding_rate(i, lo, MARGIN).funding_rate
        b = funding_rate(i, hi, MARGIN).funding_rate
        assert a <= b + 1e-16


class TestPayments:
    def test_examples(self):
        assert funding_payment(10000, funding_rate(0.0001, 0.0, MARGIN)) == pytest.approx(1.0)
        assert funding_payment(10000, funding_rate(0.0, 0.0, MARGIN)) == 0.0
        b = funding_rate(-0.0002, -0.0002, MARGIN)
        assert funding_payment(10000, b) == pytest.approx(-2.0)
        assert funding_payment(-10000, b) == pytest.approx(2.0)

    @given(st.floats(0, 1e9), rates, rates)
    def test_matched_pair_sums_to_zero(self, value, i, p):
        b = funding_rate(i, p, MARGIN)
        assert funding_payment(value, b) + funding_payment(-value, b) == 0.0


class TestSchedule:
    def minute(self, values, name):
        return Series.regular(values, start="2020-01-01T04:01:00", cadence="1min", name=name)

    def test_two_periods(self):
        i = self.minute(np.full(960, 0.0001), "interest")
        p = self.minute(np.r_[np.zeros(480), np.full(480, 0.01)], "premium")
        rows = funding_schedule(i, p, MARGIN)
        assert [str(t) for t, _ in rows] == ["2020-01-01T12:00:00", "2020-01-01T20:00:00"]
        assert rows[0][1].funding_rate == pytest.approx(0.0001)
        assert rows[1][1].capped

    def test_partial(self):
        i = self.minute(np.zeros(500), "interest")
        with pytest.raises(IncompleteWindow):
            funding_schedule(i, i, MARGIN)
        assert len(funding_schedule(i, i, MARGIN, drop_partial=True)) == 1
