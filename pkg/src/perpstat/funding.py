"""Perpetual-swap funding: interest component, premium index, damped rate,
margin cap and payments.

Rates are decimal fractions per 8-hour funding period (``0.0001`` is 0.01%).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from perpstat.errors import ConfigError, InvertedBounds, ZeroDenominator
from perpstat.series import Series, twap

__all__ = [
    "DAMPENER",
    "FundingBreakdown",
    "InterestInputs",
    "MarginConfig",
    "PremiumInputs",
    "clamp",
    "funding_payment",
    "funding_rate",
    "funding_schedule",
    "interest_rate",
    "premium_index",
]

DAMPENER = 0.0005
CAP_FRACTION = 0.75
FUNDING_PERIOD = dt.timedelta(hours=8)

DenominatorMode = Literal["literal", "exchange"]


@dataclass(frozen=True)
class InterestInputs:
    quote_index: float
    base_index: float
    funding_interval_count: int = 3


@dataclass(frozen=True)
class PremiumInputs:
    impact_bid_price: float
    impact_ask_price: float
    mark_price: float
    spot_price: float
    current_funding_rate: float = 0.0
    time_until_funding: dt.timedelta = dt.timedelta(0)

    def __post_init__(self) -> None:
        prices = (self.impact_bid_price, self.impact_ask_price, self.mark_price, self.spot_price)
        if any(p <= 0 for p in prices):
            raise ValueError("prices must be strictly positive")
        if self.impact_bid_price > self.impact_ask_price:
            raise ValueError("impact bid price exceeds impact ask price")
        if not dt.timedelta(0) <= self.time_until_funding <= FUNDING_PERIOD:
            raise ValueError("time until funding must lie within one funding period")


@dataclass(frozen=True)
class MarginConfig:
    initial_margin: float = 0.01
    maintenance_margin: float = 0.005

    def __post_init__(self) -> None:
        if not 0.0 < self.maintenance_margin < self.initial_margin < 1.0:
            raise ConfigError(
                "margins must satisfy 0 < maintenance_margin < initial_margin < 1"
            )

    @property
    def cap_bound(self) -> float:
        return CAP_FRACTION * (self.initial_margin - self.maintenance_margin)


@dataclass(frozen=True)
class FundingBreakdown:
    interest_component: float
    premium_index: float
    clamp_value: float
    funding_rate: float
    capped: bool
    cap_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def interest_rate(inputs: InterestInputs) -> float:
    """Quote-minus-base borrow differential spread over the day's funding periods."""
    if inputs.funding_interval_count < 1:
        raise ValueError("funding_interval_count must be at least 1")
    return (inputs.quote_index - inputs.base_index) / inputs.funding_interval_count


def premium_index(inputs: PremiumInputs, denominator: DenominatorMode = "literal") -> float:
    """Impact-price premium (or discount) relative to the mark price.

    The numerator is ``max(0, IBP - mark) - max(0, mark - IAP)``.  The funding
    basis is the current rate pro-rated by the fraction of the 8-hour period
    left until funding.

    ``denominator="literal"`` divides by ``spot + spot * (1 + basis)``, i.e.
    spot price plus the fair basis taken as a price level.
    ``denominator="exchange"`` divides by ``spot * (1 + basis)``.
    """
    basis = inputs.current_funding_rate * (inputs.time_until_funding / FUNDING_PERIOD)
    spot = inputs.spot_price
    if denominator == "literal":
        denom = spot + spot * (1.0 + basis)
    elif denominator == "exchange":
        denom = spot * (1.0 + basis)
    else:
        raise ConfigError(f"unknown denominator mode {denominator!r}")
    if denom == 0.0:
        raise ZeroDenominator("premium index denominator is zero")
    num = max(0.0, inputs.impact_bid_price - inputs.mark_price) - max(
        0.0, inputs.mark_price - inputs.impact_ask_price
    )
    return num / denom


def clamp(x: float, hi: float, lo: float) -> float:
    if lo > hi:
        raise InvertedBounds(f"lower bound {lo} exceeds upper bound {hi}")
    return min(hi, max(lo, x))


def funding_rate(interest: float, premium_twap: float, margin: MarginConfig) -> FundingBreakdown:
    """Damped funding rate from 8-hour TWAPs of the interest and premium
    components, then capped at 75% of (initial - maintenance) margin."""
    damp = clamp(interest - premium_twap, DAMPENER, -DAMPENER)
    rate = premium_twap + damp
    bound = margin.cap_bound
    capped = abs(rate) > bound
    if capped:
        rate = bound if rate > 0 else -bound
    return FundingBreakdown(
        interest_component=interest,
        premium_index=premium_twap,
        clamp_value=damp,
        funding_rate=rate,
        capped=capped,
        cap_bound=bound,
    )


def funding_payment(position_value: float, breakdown: FundingBreakdown) -> float:
    """Amount paid by the holder of ``position_value``.

    Longs carry positive position values and shorts negative ones; a positive
    result is paid out, a negative one received.
    """
    return position_value * breakdown.funding_rate


def funding_schedule(
    interest: Series,
    premium: Series,
    margin: MarginConfig,
    window: str | np.timedelta64 = "8h",
    anchor: str | np.timedelta64 = "4h",
    drop_partial: bool = False,
) -> list[tuple[np.datetime64, FundingBreakdown]]:
    """Per-period breakdowns from minute samples of the interest and premium
    components.  Both series must share timestamps."""
    if not np.array_equal(interest.timestamps, premium.timestamps):
        raise ValueError("interest and premium samples must share timestamps")
    i_twap = twap(interest, window, anchor, drop_partial)
    p_twap = twap(premium, window, anchor, drop_partial)
    return [
        (ts, funding_rate(float(i), float(p), margin))
        for ts, i, p in zip(i_twap.timestamps, i_twap.values, p_twap.values)
    ]
