"""GARCH-family volatility models."""

from perpstat.volatility.models import (
    BACKEND,
    FAMILIES,
    LABELS,
    ModelComparison,
    VarianceForecast,
    VolatilityFit,
    abs_moment,
    compare,
    fit,
    forecast,
    likelihood_grid_excess,
    log_likelihood,
    simulate,
)

__all__ = [
    "BACKEND",
    "FAMILIES",
    "LABELS",
    "ModelComparison",
    "VarianceForecast",
    "VolatilityFit",
    "abs_moment",
    "compare",
    "fit",
    "forecast",
    "likelihood_grid_excess",
    "log_likelihood",
    "simulate",
]
