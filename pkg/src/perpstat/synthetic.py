"""Synthetic funding/price pair with known stage outcomes.

The price is a random walk and the funding rate is ARCH(1) noise plus a
multiple of the previous period's price return.  By construction the price is
I(1), the funding rate is I(0) with ARCH effects, and price returns Granger
cause the funding rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from perpstat.io import write_series_csv
from perpstat.series import Series
from perpstat.volatility import simulate

__all__ = ["SyntheticPair", "ground_truth_checks", "make_pair", "write_pair"]

START = "2016-06-01T04:00:00"


@dataclass(frozen=True)
class SyntheticPair:
    funding: Series
    price: Series


def make_pair(
    seed: int,
    n: int = 3649,
    arch_omega: float = 1.0,
    arch_alpha: float = 0.5,
    coupling: float = 0.3,
    price_start: float = 10000.0,
    price_step: float = 50.0,
    funding_scale: float = 1e-4,
) -> SyntheticPair:
    """Draw one pair of length ``n`` at 8-hour cadence.

    Price returns are ``price_step * z_t`` with standard normal ``z_t``;
    funding is ``funding_scale * (a_t + coupling * z_{t-1})`` with ``a_t``
    ARCH(1) noise.
    """
    ss = np.random.SeedSequence(seed)
    arch_seed, price_seed = (int(c.generate_state(1)[0]) for c in ss.spawn(2))
    z = np.random.default_rng(price_seed).standard_normal(n)
    price = price_start + price_step * np.cumsum(z)
    a = simulate("garch", {"omega": arch_omega, "alpha": arch_alpha, "beta": 0.0},
                 n, arch_seed).values
    lagged = np.concatenate([[0.0], z[:-1]])
    funding = funding_scale * (a + coupling * lagged)
    return SyntheticPair(
        funding=Series.regular(funding, start=START, name="funding"),
        price=Series.regular(price, start=START, name="price"),
    )


def write_pair(directory: str | Path, seed: int, n: int = 3649, **kwargs) -> tuple[Path, Path]:
    """Write ``funding.csv`` and ``price.csv`` into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    pair = make_pair(seed, n, **kwargs)
    fpath, ppath = d / "funding.csv", d / "price.csv"
    write_series_csv(pair.funding, fpath)
    write_series_csv(pair.price, ppath)
    return fpath, ppath


def ground_truth_checks(report) -> dict[str, bool]:
    """Stage outcomes a pipeline report on a synthetic pair should show."""
    orders = report.integration_order or {}
    price_to_funding = next(
        (g for g in report.granger or () if g.effect == report.labels["funding"]), None
    )
    return {
        "arch_rejected": bool(report.arch and report.arch.reject_null),
        "price_i1": orders.get("price") == 1,
        "funding_i0": orders.get("funding") == 0,
        "price_granger_causes_funding": bool(price_to_funding
                                             and price_to_funding.reject_noncausality),
    }
