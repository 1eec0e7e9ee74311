"""End-to-end analysis of a funding-rate / price pair.

Stages run in a fixed order, each consuming only what earlier stages
produced:

    normalize    first difference (or log return) of the funding rate
    arch         ARCH LM test on the demeaned normalised funding rate
    correlogram  ACF / PACF / Q of the normalised series and of its square
    adf          ADF at level and first difference, three specs, both series
    granger      Granger tests on the first-differenced pair
    compare      GARCH-family fits on the normalised funding rate
    forecast     variance forecast from the best AIC fit

Any failure inside a stage is re-raised as :class:`StageError` carrying the
stage name.  Disabled stages leave their report section as ``None``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np

from perpstat import __version__
from perpstat.archtest import ArchTestReport, arch_lm_test, demean, select_arch_lag
from perpstat.causality import GrangerReport, granger_test, select_var_lag
from perpstat.config import ALL_STAGES, PipelineConfig
from perpstat.errors import IncompleteReport, NonStationary, NotConverged, StageError
from perpstat.io import align, file_sha256, iso_utc, read_series_csv
from perpstat.series import CorrelogramRow, Series, correlogram, first_difference, log_returns, square
from perpstat.stationarity import SPEC_LABELS, AdfReport, adf_test
from perpstat.volatility import LABELS, VolatilityFit, compare, forecast

__all__ = [
    "ComparisonSection",
    "FitSummary",
    "ForecastSection",
    "PipelineReport",
    "Provenance",
    "analyse",
    "emit_report",
    "report_from_json",
    "run_pipeline",
    "verify_provenance",
]

ADF_SPECS = ("constant", "constant_and_trend", "none")
FORMATS = ("json", "text_tables", "plot_csv")


@dataclass(frozen=True)
class FitSummary:
    """A :class:`VolatilityFit` without its variance path."""

    family: str
    label: str
    params: dict[str, float]
    log_likelihood: float
    n_obs: int
    n_params: int
    aic: float
    sic: float
    hqc: float
    aic_per_obs: float
    sic_per_obs: float
    hqc_per_obs: float
    converged: bool
    iterations: int
    egarch_form: str

    @classmethod
    def from_fit(cls, f: VolatilityFit) -> "FitSummary":
        return cls(f.family, f.label, dict(f.params), f.log_likelihood, f.n_obs, f.n_params,
                   f.aic, f.sic, f.hqc, f.aic_per_obs, f.sic_per_obs, f.hqc_per_obs,
                   f.converged, f.iterations, f.egarch_form)


@dataclass(frozen=True)
class ComparisonSection:
    ranked: tuple[FitSummary, ...]
    sic_ranking: tuple[str, ...]
    hqc_ranking: tuple[str, ...]
    excluded: dict[str, str]


@dataclass(frozen=True)
class ForecastSection:
    family: str
    horizon: int
    origin: str
    timestamps: tuple[str, ...]
    variances: tuple[float, ...]


@dataclass(frozen=True)
class Provenance:
    funding_file: str
    price_file: str
    funding_sha256: str
    price_sha256: str
    config: dict[str, Any]
    seed: int
    version: str
    n_obs: int
    rows_filled: dict[str, int]
    rows_dropped: dict[str, int]


@dataclass(frozen=True)
class PipelineReport:
    """Consolidated output.  ``partial`` is true when any stage was disabled."""

    stages_run: tuple[str, ...]
    partial: bool
    labels: dict[str, str]
    arch: ArchTestReport | None = None
    correlogram: dict[str, tuple[CorrelogramRow, ...]] | None = None
    adf_funding: tuple[AdfReport, ...] | None = None
    adf_price: tuple[AdfReport, ...] | None = None
    integration_order: dict[str, int] | None = None
    granger: tuple[GrangerReport, GrangerReport] | None = None
    model_comparison: ComparisonSection | None = None
    forecast: ForecastSection | None = None
    provenance: Provenance | None = None


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def _pmap(fn, items, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _normalise(funding: Series, how: str) -> Series:
    return first_difference(funding) if how == "difference" else log_returns(funding)


def _arch(norm: Series, cfg: PipelineConfig) -> ArchTestReport:
    resid = demean(norm, cfg.arch_mean_order)
    lag = cfg.arch_lags
    if lag == "auto":
        lag = select_arch_lag(resid, cfg.arch_max_lag)
    return arch_lm_test(resid, lag, cfg.stage_level("arch"))


def _correlogram(norm: Series, cfg: PipelineConfig) -> dict[str, tuple[CorrelogramRow, ...]]:
    return {
        "series": tuple(correlogram(norm, cfg.correlogram_lags)),
        "squared": tuple(correlogram(square(demean(norm)), cfg.correlogram_lags)),
    }


def _adf(funding: Series, price: Series, cfg: PipelineConfig):
    max_lag = None if cfg.adf_max_lag == "auto" else cfg.adf_max_lag
    level = cfg.stage_level("adf")
    jobs = [(s, d, spec) for s in (funding, price) for d in (0, 1) for spec in ADF_SPECS]
    rows = _pmap(lambda j: adf_test(j[0], j[2], max_lag, level, difference=j[1]),
                 jobs, cfg.workers)
    f_rows, p_rows = tuple(rows[:6]), tuple(rows[6:])

    def order(rs: tuple[AdfReport, ...]) -> int:
        chosen = [r for r in rs if r.spec == cfg.adf_spec]
        for r in chosen:
            if r.reject_unit_root:
                return r.differencing_level
        return 2

    return f_rows, p_rows, {"funding": order(f_rows), "price": order(p_rows)}


def _granger(funding: Series, price: Series, cfg: PipelineConfig):
    level = cfg.stage_level("granger")
    df, dp = first_difference(funding), first_difference(price)
    max_lag = None if cfg.adf_max_lag == "auto" else cfg.adf_max_lag
    adf_level = cfg.stage_level("adf")
    for s in (df, dp):
        if not adf_test(s, cfg.adf_spec, max_lag, adf_level).reject_unit_root:
            raise NonStationary(f"first difference of {s.name!r} still has a unit root")
    lag = cfg.granger_lags
    if lag == "auto":
        lag = select_var_lag(dp, df, cfg.granger_max_lag)
    return granger_test(dp, df, lag, level)


def _compare(norm: Series, cfg: PipelineConfig):
    return compare(norm, cfg.families, workers=cfg.workers, seed=cfg.seed,
                   egarch_form=cfg.egarch_form, demean=cfg.demean)


def _forecast(comparison, cfg: PipelineConfig) -> ForecastSection:
    if not comparison.ranked:
        raise NotConverged("no family converged, nothing to forecast")
    fc = forecast(comparison.ranked[0], cfg.forecast_horizon)
    return ForecastSection(fc.family, fc.horizon, iso_utc(fc.origin_timestamp),
                           tuple(iso_utc(t) for t in fc.timestamps), fc.variances)


def analyse(
    funding: Series,
    price: Series,
    config: PipelineConfig | None = None,
    provenance: Provenance | None = None,
) -> PipelineReport:
    """Run the enabled stages on an aligned funding/price pair."""
    cfg = config or PipelineConfig()
    if not np.array_equal(funding.timestamps, price.timestamps):
        raise StageError("normalize", ValueError("funding and price must be aligned"))
    funding = funding.derive(funding.values, name=cfg.funding_label)
    price = price.derive(price.values, name=cfg.price_label)
    enabled = [s for s in ALL_STAGES if s in cfg.stages]
    norm = _stage("normalize", _normalise, funding, cfg.funding_transform)

    out: dict[str, Any] = {}
    if "arch" in enabled:
        out["arch"] = _stage("arch", _arch, norm, cfg)
    if "correlogram" in enabled:
        out["correlogram"] = _stage("correlogram", _correlogram, norm, cfg)
    if "adf" in enabled:
        f_rows, p_rows, orders = _stage("adf", _adf, funding, price, cfg)
        out.update(adf_funding=f_rows, adf_price=p_rows, integration_order=orders)
    if "granger" in enabled:
        out["granger"] = _stage("granger", _granger, funding, price, cfg)
    if "compare" in enabled:
        comparison = _stage("compare", _compare, norm, cfg)
        out["model_comparison"] = ComparisonSection(
            tuple(FitSummary.from_fit(f) for f in comparison.ranked),
            tuple(comparison.sic_ranking),
            tuple(comparison.hqc_ranking),
            dict(comparison.excluded),
        )
        if "forecast" in enabled:
            out["forecast"] = _stage("forecast", _forecast, comparison, cfg)
    return PipelineReport(
        stages_run=tuple(enabled),
        partial=tuple(enabled) != ALL_STAGES,
        labels={"funding": cfg.funding_label, "price": cfg.price_label},
        provenance=provenance,
        **out,
    )


def run_pipeline(
    funding_csv: str | Path,
    price_csv: str | Path,
    config: PipelineConfig | None = None,
) -> PipelineReport:
    """Ingest both files, align them on common timestamps and run
    :func:`analyse`.  Input problems raise :class:`InputError` subclasses."""
    cfg = config or PipelineConfig()
    f_in = read_series_csv(funding_csv, cfg.fill, name=cfg.funding_label)
    p_in = read_series_csv(price_csv, cfg.fill, name=cfg.price_label)
    al = align(f_in.series, p_in.series)
    prov = Provenance(
        funding_file=Path(funding_csv).name,
        price_file=Path(price_csv).name,
        funding_sha256=file_sha256(funding_csv),
        price_sha256=file_sha256(price_csv),
        config=cfg.snapshot(),
        seed=cfg.seed,
        version=__version__,
        n_obs=len(al.first),
        rows_filled={"funding": f_in.filled, "price": p_in.filled},
        rows_dropped={"funding": al.dropped_first, "price": al.dropped_second},
    )
    return analyse(al.first, al.second, cfg, prov)


def verify_provenance(report: PipelineReport, funding_csv: str | Path,
                      price_csv: str | Path) -> bool:
    """True when both files still hash to the digests in the report."""
    p = report.provenance
    if p is None:
        raise IncompleteReport("report carries no provenance")
    return (file_sha256(funding_csv) == p.funding_sha256
            and file_sha256(price_csv) == p.price_sha256)


# serialisation

def _to_plain(report: PipelineReport) -> dict[str, Any]:
    return asdict(report)


def _tuple_of(cls, items):
    return None if items is None else tuple(cls(**i) for i in items)


def _from_plain(d: dict[str, Any]) -> PipelineReport:
    arch = d.get("arch")
    if arch is not None:
        arch = ArchTestReport(**{**arch, "alpha_estimates": tuple(arch["alpha_estimates"])})
    corr = d.get("correlogram")
    if corr is not None:
        corr = {k: _tuple_of(CorrelogramRow, v) for k, v in corr.items()}
    granger = d.get("granger")
    if granger is not None:
        granger = tuple(GrangerReport(**g) for g in granger)
    mc = d.get("model_comparison")
    if mc is not None:
        mc = ComparisonSection(
            ranked=_tuple_of(FitSummary, mc["ranked"]),
            sic_ranking=tuple(mc["sic_ranking"]),
            hqc_ranking=tuple(mc["hqc_ranking"]),
            excluded=dict(mc["excluded"]),
        )
    fc = d.get("forecast")
    if fc is not None:
        fc = ForecastSection(fc["family"], fc["horizon"], fc["origin"],
                             tuple(fc["timestamps"]), tuple(fc["variances"]))
    prov = d.get("provenance")
    if prov is not None:
        prov = Provenance(**prov)
    return PipelineReport(
        stages_run=tuple(d["stages_run"]),
        partial=d["partial"],
        labels=dict(d["labels"]),
        arch=arch,
        correlogram=corr,
        adf_funding=_tuple_of(AdfReport, d.get("adf_funding")),
        adf_price=_tuple_of(AdfReport, d.get("adf_price")),
        integration_order=d.get("integration_order"),
        granger=granger,
        model_comparison=mc,
        forecast=fc,
        provenance=prov,
    )


def report_from_json(data: bytes | str) -> PipelineReport:
    """Inverse of ``emit_report(report, "json")``."""
    return _from_plain(json.loads(data))


def _num(x: float, digits: int = 6) -> str:
    if math.isinf(x) or math.isnan(x):
        return str(x)
    return f"{x:.{digits}f}"


def _prob(p: float) -> str:
    return f"{p:.4e}" if 0 < p < 1e-4 else f"{p:.4f}"


def _table(title: str, header: list[str], rows: list[list[str]]) -> list[str]:
    return [title, " | ".join(header), *(" | ".join(r) for r in rows), ""]


def _text_tables(r: PipelineReport) -> str:
    lines: list[str] = []
    if r.arch is not None:
        a = r.arch
        lines += _table("ARCH Test results", ["Statistic", "Value"], [
            ["Probability of F", _prob(a.f_pvalue)],
            [f"Probability of LM Statistic (Chi-Square({a.lag_order}))", _prob(a.lm_pvalue)],
            ["Probability of C", _prob(a.constant_pvalue)],
            *[[f"value of alpha{i + 1}(squared residuals)", _num(v, 4)]
              for i, v in enumerate(a.alpha_estimates)],
        ])
    header = ["Test for Unit root in", "Exogenous", "t-Statistic", "Probability",
              "1% level", "5% level", "10% level"]
    for key, rows in (("funding", r.adf_funding), ("price", r.adf_price)):
        if rows is None:
            continue
        body = [
            ["Level" if x.differencing_level == 0 else "First difference",
             SPEC_LABELS[x.spec], _num(x.t_statistic), _prob(x.p_value),
             *(_num(x.critical_values[k]) for k in ("1%", "5%", "10%"))]
            for x in rows
        ]
        lines += _table(f"Stationarity in {r.labels[key]}", header, body)
    if r.granger is not None:
        lines += _table("Causality test results", ["Null Hypothesis", "F-statistic", "Probability"], [
            [g.null_hypothesis, _num(g.f_statistic, 5), _prob(g.p_value)] for g in r.granger
        ])
    if r.model_comparison is not None:
        lines += _table("Information Criterion for various models", ["Model", "AIC", "SIC", "HQC"], [
            [LABELS[f.family], _num(f.aic_per_obs, 5), _num(f.sic_per_obs, 5),
             _num(f.hqc_per_obs, 5)] for f in r.model_comparison.ranked
        ])
    if r.forecast is not None:
        lines += _table(f"Variance forecast ({LABELS[r.forecast.family]})",
                        ["Horizon", "Timestamp", "Variance"], [
            [str(i + 1), t, f"{v:.6e}"]
            for i, (t, v) in enumerate(zip(r.forecast.timestamps, r.forecast.variances))
        ])
    return "\n".join(lines)


def _plot_csv(r: PipelineReport) -> str:
    if r.correlogram is None:
        raise IncompleteReport("plot_csv needs the correlogram stage")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "lag", "acf", "pacf", "q_stat", "q_pvalue"])
    for name in ("series", "squared"):
        for row in r.correlogram[name]:
            w.writerow([name, row.lag, repr(row.acf), repr(row.pacf), repr(row.q_stat),
                        repr(row.q_pvalue)])
    return buf.getvalue()


def emit_report(report: PipelineReport, format: str = "json") -> bytes:
    """Serialise deterministically.

    ``json`` is sorted-key JSON that :func:`report_from_json` reads back;
    ``text_tables`` prints pipe-separated tables laid out like the usual
    EViews-style result tables; ``plot_csv`` holds the correlogram data.
    """
    if format == "json":
        return (json.dumps(_to_plain(report), sort_keys=True, indent=2) + "\n").encode()
    if format == "text_tables":
        if not any(getattr(report, s) is not None for s in (
                "arch", "adf_funding", "granger", "model_comparison", "forecast")):
            raise IncompleteReport("report has no tabulated sections")
        return _text_tables(report).encode()
    if format == "plot_csv":
        return _plot_csv(report).encode()
    raise ValueError(f"format must be one of {FORMATS}")
