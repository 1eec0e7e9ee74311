"""Pipeline configuration read from plain ``key = value`` text.

Blank lines and ``#`` comments are ignored, values may be quoted, and
``[section]`` headers are accepted but carry no meaning.  Lists are
comma-separated.  Unknown keys are errors so that typos do not pass silently.

Example
-------
::

    seed = 7
    level = 0.05
    stages = arch, correlogram, adf, granger, compare, forecast
    arch_lags = auto
    families = garch, egarch
    forecast_horizon = 30
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from perpstat.errors import ConfigError
from perpstat.funding import MarginConfig

__all__ = ["ALL_STAGES", "PipelineConfig", "load_config", "parse_config"]

ALL_STAGES = ("arch", "correlogram", "adf", "granger", "compare", "forecast")
ALL_FAMILIES = ("garch", "tarch", "egarch", "parch", "igarch")


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of the end-to-end run.

    Per-stage levels default to ``level`` when left unset.  ``arch_lags`` and
    ``granger_lags`` accept ``"auto"`` (AIC over ``1..*_max_lag``);
    ``adf_max_lag`` accepts ``"auto"`` (Schwert's rule).
    """

    seed: int = 0
    level: float = 0.05
    arch_level: float | None = None
    adf_level: float | None = None
    granger_level: float | None = None
    stages: tuple[str, ...] = ALL_STAGES
    workers: int = 1
    fill: str = "none"
    funding_transform: str = "difference"
    funding_label: str = "FundingRate"
    price_label: str = "8 Hour price"
    arch_lags: int | str = 1
    arch_mean_order: int = 0
    arch_max_lag: int = 10
    correlogram_lags: int = 20
    adf_max_lag: int | str = "auto"
    adf_spec: str = "constant"
    granger_lags: int | str = "auto"
    granger_max_lag: int = 10
    families: tuple[str, ...] = ALL_FAMILIES
    egarch_form: str = "nelson"
    demean: bool = True
    forecast_horizon: int = 30
    denominator: str = "literal"
    initial_margin: float = 0.01
    maintenance_margin: float = 0.005
    funding_window: str = "8h"
    funding_anchor: str = "4h"
    drop_partial: bool = False

    def __post_init__(self) -> None:
        _require(self.fill in ("none", "previous"), "fill must be 'none' or 'previous'")
        _require(self.funding_transform in ("difference", "log_returns"),
                 "funding_transform must be 'difference' or 'log_returns'")
        _require(self.egarch_form in ("nelson", "literal"), "egarch_form must be 'nelson' or 'literal'")
        _require(self.denominator in ("literal", "exchange"),
                 "denominator must be 'literal' or 'exchange'")
        _require(self.adf_spec in ("none", "constant", "constant_and_trend"),
                 "adf_spec must be none, constant or constant_and_trend")
        for name in ("level", "arch_level", "granger_level"):
            v = getattr(self, name)
            _require(v is None or 0 < v < 1, f"{name} must lie in (0, 1)")
        # tabulated critical values exist only at these levels
        _require(round(self.stage_level("adf"), 10) in (0.01, 0.05, 0.1),
                 "the ADF level must be 0.01, 0.05 or 0.10 (set adf_level)")
        unknown = [s for s in self.stages if s not in ALL_STAGES]
        _require(not unknown, f"unknown stages {unknown}")
        _require("forecast" not in self.stages or "compare" in self.stages,
                 "the forecast stage needs the compare stage")
        bad = [f for f in self.families if f not in ALL_FAMILIES]
        _require(not bad, f"unknown families {bad}")
        _require("compare" not in self.stages or len(set(self.families)) >= 2,
                 "compare needs at least two families")
        for name in ("arch_lags", "granger_lags", "adf_max_lag"):
            v = getattr(self, name)
            _require(v == "auto" or (isinstance(v, int) and v >= (0 if name == "adf_max_lag" else 1)),
                     f"{name} must be 'auto' or a positive integer")
        _require(self.arch_mean_order >= 0, "arch_mean_order must be non-negative")
        for name in ("arch_max_lag", "granger_max_lag", "correlogram_lags",
                     "forecast_horizon", "workers"):
            _require(getattr(self, name) >= 1, f"{name} must be at least 1")
        self.margin()

    def stage_level(self, stage: str) -> float:
        override = getattr(self, f"{stage}_level", None)
        return self.level if override is None else override

    def margin(self) -> MarginConfig:
        return MarginConfig(self.initial_margin, self.maintenance_margin)

    def snapshot(self) -> dict[str, Any]:
        """Plain-JSON view, used for provenance."""
        out = dataclasses.asdict(self)
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = list(v)
        return out

    @classmethod
    def from_snapshot(cls, data: dict[str, Any]) -> "PipelineConfig":
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})

    def replace(self, **changes: Any) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)


def _require(ok: bool, message: str) -> None:
    if not ok:
        raise ConfigError(message)


def _to_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _to_int_or_auto(text: str) -> int | str:
    return "auto" if text.lower() == "auto" else int(text)


def _to_optional_float(text: str) -> float | None:
    return None if text.lower() in ("", "none", "default") else float(text)


def _to_list(text: str) -> tuple[str, ...]:
    return tuple(_unquote(p.strip()).lower() for p in text.split(",") if p.strip())


_CONVERTERS = {
    "seed": int,
    "level": float,
    "arch_level": _to_optional_float,
    "adf_level": _to_optional_float,
    "granger_level": _to_optional_float,
    "stages": _to_list,
    "workers": int,
    "arch_lags": _to_int_or_auto,
    "arch_mean_order": int,
    "arch_max_lag": int,
    "correlogram_lags": int,
    "adf_max_lag": _to_int_or_auto,
    "granger_lags": _to_int_or_auto,
    "granger_max_lag": int,
    "families": _to_list,
    "demean": _to_bool,
    "forecast_horizon": int,
    "initial_margin": float,
    "maintenance_margin": float,
    "drop_partial": _to_bool,
}


def _unquote(text: str) -> str:
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def parse_config(text: str, source: str = "<config>") -> PipelineConfig:
    """Build a :class:`PipelineConfig` from ``key = value`` lines."""
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        value = _unquote(value)
        if key == "families" and value.lower() == "all":
            value = ",".join(ALL_FAMILIES)
        if key == "stages" and value.lower() == "all":
            value = ",".join(ALL_STAGES)
        try:
            values[key] = _CONVERTERS.get(key, str)(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    try:
        return PipelineConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path: str | Path | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
    return parse_config(text, str(p))
