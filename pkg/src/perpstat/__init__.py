"""Perpetual-swap funding mechanics and the time-series econometrics used to
study funding rates: ARCH LM, ADF and Granger tests, and GARCH-family
volatility models."""

__version__ = "0.1.0"
