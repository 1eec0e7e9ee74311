"""Command-line interface.

Exit codes: 0 success, 2 input or configuration problem, 3 failure while
computing.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from perpstat.archtest import arch_lm_test, demean, select_arch_lag
from perpstat.causality import granger_test, select_var_lag
from perpstat.config import ALL_FAMILIES, load_config
from perpstat.errors import InputError, PerpstatError
from perpstat.funding import funding_schedule
from perpstat.io import align, iso_utc, read_minute_csv, read_series_csv, write_series_csv
from perpstat.pipeline import (
    ADF_SPECS,
    FORMATS,
    ComparisonSection,
    FitSummary,
    PipelineReport,
    emit_report,
    run_pipeline,
)
from perpstat.series import Series, first_difference, log_returns
from perpstat.stationarity import adf_test
from perpstat.volatility import compare, fit, forecast

log = logging.getLogger("perpstat")

EXIT_OK, EXIT_INPUT, EXIT_STAGE = 0, 2, 3


def _lag_arg(text: str) -> int | str:
    if text == "auto":
        return text
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("lag must be non-negative or 'auto'")
    return v


def _transform(s: Series, how: str) -> Series:
    if how == "difference":
        return first_difference(s)
    if how == "log_returns":
        return log_returns(s)
    return s


def _write(data: bytes, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def _json(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def _load(args, name: str = "input") -> Series:
    return read_series_csv(getattr(args, name), args.fill).series


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    report = run_pipeline(args.funding, args.price, cfg)
    p = report.provenance
    if p.rows_filled["funding"] or p.rows_filled["price"]:
        log.warning("filled rows: %s", p.rows_filled)
    if p.rows_dropped["funding"] or p.rows_dropped["price"]:
        log.warning("rows dropped in alignment: %s", p.rows_dropped)
    _write(emit_report(report, args.format), args.out)
    return EXIT_OK


def cmd_test_arch(args) -> int:
    resid = demean(_transform(_load(args), args.transform), args.mean_ar)
    lag = select_arch_lag(resid, args.max_lag) if args.lags == "auto" else args.lags
    rep = arch_lm_test(resid, lag, args.level)
    if args.format == "text_tables":
        _write(emit_report(PipelineReport(("arch",), True, {}, arch=rep), "text_tables"), args.out)
    else:
        _write(_json(asdict(rep)), args.out)
    return EXIT_OK


def cmd_test_adf(args) -> int:
    s = _load(args)
    specs = ADF_SPECS if args.spec == "all" else (args.spec,)
    max_lag = None if args.max_lag == "auto" else args.max_lag
    rows = tuple(adf_test(s, spec, max_lag, args.level, difference=d)
                 for d in (0, 1) for spec in specs)
    if args.format == "text_tables":
        rep = PipelineReport(("adf",), True, {"funding": s.name, "price": s.name},
                             adf_funding=rows)
        _write(emit_report(rep, "text_tables"), args.out)
    else:
        _write(_json([asdict(r) for r in rows]), args.out)
    return EXIT_OK


def cmd_test_granger(args) -> int:
    f_in = read_series_csv(args.funding, args.fill, name=args.funding_label)
    p_in = read_series_csv(args.price, args.fill, name=args.price_label)
    al = align(f_in.series, p_in.series)
    df, dp = first_difference(al.first), first_difference(al.second)
    lag = select_var_lag(dp, df, args.max_lag) if args.lags == "auto" else args.lags
    pair = granger_test(dp, df, lag, args.level)
    if args.format == "text_tables":
        rep = PipelineReport(("granger",), True, {}, granger=pair)
        _write(emit_report(rep, "text_tables"), args.out)
    else:
        _write(_json([asdict(g) for g in pair]), args.out)
    return EXIT_OK


def _fit_payload(f) -> dict:
    out = asdict(FitSummary.from_fit(f))
    out["mean"] = f.mean
    return out


def cmd_fit(args) -> int:
    s = _transform(_load(args), args.transform)
    f = fit(s, args.family, demean=not args.no_demean, egarch_form=args.egarch_form,
            seed=args.seed)
    if args.variance_csv:
        write_series_csv(f.conditional_variance, args.variance_csv, "variance")
    _write(_json(_fit_payload(f)), args.out)
    return EXIT_OK if f.converged else EXIT_STAGE


def _families(text: str) -> list[str]:
    return list(ALL_FAMILIES) if text == "all" else [t.strip() for t in text.split(",")]


def cmd_compare(args) -> int:
    s = _transform(_load(args), args.transform)
    c = compare(s, _families(args.families), workers=args.workers, seed=args.seed,
                egarch_form=args.egarch_form, demean=not args.no_demean)
    if args.format == "text_tables":
        section = ComparisonSection(tuple(FitSummary.from_fit(f) for f in c.ranked),
                                    tuple(c.sic_ranking), tuple(c.hqc_ranking), c.excluded)
        rep = PipelineReport(("compare",), True, {}, model_comparison=section)
        _write(emit_report(rep, "text_tables"), args.out)
    else:
        _write(_json({
            "ranked": [_fit_payload(f) for f in c.ranked],
            "sic_ranking": c.sic_ranking,
            "hqc_ranking": c.hqc_ranking,
            "excluded": c.excluded,
        }), args.out)
    for fam, why in c.excluded.items():
        log.warning("%s excluded: %s", fam, why)
    return EXIT_OK


def cmd_forecast(args) -> int:
    s = _transform(_load(args), args.transform)
    if args.family == "best":
        c = compare(s, _families(args.families), seed=args.seed, egarch_form=args.egarch_form)
        if not c.ranked:
            raise PerpstatError("no family converged")
        f = c.ranked[0]
    else:
        f = fit(s, args.family, seed=args.seed, egarch_form=args.egarch_form)
    fc = forecast(f, args.horizon)
    _write(_json({
        "family": fc.family,
        "horizon": fc.horizon,
        "origin_timestamp": iso_utc(fc.origin_timestamp),
        "timestamps": [iso_utc(t) for t in fc.timestamps],
        "variances": list(fc.variances),
    }), args.out)
    return EXIT_OK


def cmd_funding_compute(args) -> int:
    cfg = load_config(args.config)
    interest, premium = read_minute_csv(args.input)
    rows = funding_schedule(interest, premium, cfg.margin(), cfg.funding_window,
                            cfg.funding_anchor, cfg.drop_partial or args.drop_partial)
    lines = [json.dumps({"timestamp": iso_utc(ts), **b.to_dict()}, sort_keys=True)
             for ts, b in rows]
    _write(("\n".join(lines) + "\n").encode(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="perpstat", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def series_opts(sp, transform_default="difference"):
        sp.add_argument("--input", required=True, help="timestamp,value CSV")
        sp.add_argument("--fill", choices=("none", "previous"), default="none")
        sp.add_argument("--transform", choices=("difference", "log_returns", "none"),
                        default=transform_default)
        sp.add_argument("--out", help="output file (default stdout)")

    def model_opts(sp):
        sp.add_argument("--egarch-form", choices=("nelson", "literal"), default="nelson")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--no-demean", action="store_true")

    r = sub.add_parser("run", help="full pipeline on a funding/price pair")
    r.add_argument("--funding", required=True)
    r.add_argument("--price", required=True)
    r.add_argument("--config")
    r.add_argument("--out")
    r.add_argument("--format", choices=FORMATS, default="json")
    r.add_argument("--seed", type=int)
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("test", help="single hypothesis tests")
    tsub = t.add_subparsers(dest="test", required=True)
    ta = tsub.add_parser("arch", help="ARCH LM test")
    series_opts(ta)
    ta.add_argument("--lags", type=_lag_arg, default=1)
    ta.add_argument("--max-lag", type=int, default=10)
    ta.add_argument("--mean-ar", type=int, default=0,
                    help="AR order of the mean model (0 = constant mean)")
    ta.add_argument("--level", type=float, default=0.05)
    ta.add_argument("--format", choices=("json", "text_tables"), default="json")
    ta.set_defaults(func=cmd_test_arch)

    td = tsub.add_parser("adf", help="ADF unit-root test at level and first difference")
    series_opts(td, "none")
    td.add_argument("--spec", choices=("all", *ADF_SPECS), default="all")
    td.add_argument("--max-lag", type=_lag_arg, default="auto")
    td.add_argument("--level", type=float, choices=(0.01, 0.05, 0.1), default=0.05)
    td.add_argument("--format", choices=("json", "text_tables"), default="json")
    td.set_defaults(func=cmd_test_adf)

    tg = tsub.add_parser("granger", help="Granger tests on the first-differenced pair")
    tg.add_argument("--funding", required=True)
    tg.add_argument("--price", required=True)
    tg.add_argument("--fill", choices=("none", "previous"), default="none")
    tg.add_argument("--lags", type=_lag_arg, default="auto")
    tg.add_argument("--max-lag", type=int, default=10)
    tg.add_argument("--level", type=float, default=0.05)
    tg.add_argument("--funding-label", default="FundingRate")
    tg.add_argument("--price-label", default="8 Hour price")
    tg.add_argument("--format", choices=("json", "text_tables"), default="json")
    tg.add_argument("--out")
    tg.set_defaults(func=cmd_test_granger)

    f = sub.add_parser("fit", help="fit one volatility model")
    series_opts(f)
    model_opts(f)
    f.add_argument("--family", choices=ALL_FAMILIES, required=True)
    f.add_argument("--variance-csv", help="write the conditional variance path here")
    f.set_defaults(func=cmd_fit)

    c = sub.add_parser("compare", help="fit and rank several volatility models")
    series_opts(c)
    model_opts(c)
    c.add_argument("--families", default="all", help="'all' or comma-separated list")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--format", choices=("json", "text_tables"), default="json")
    c.set_defaults(func=cmd_compare)

    fc = sub.add_parser("forecast", help="multi-step variance forecast")
    series_opts(fc)
    model_opts(fc)
    fc.add_argument("--family", choices=("best", *ALL_FAMILIES), default="best")
    fc.add_argument("--families", default="all", help="candidates when --family best")
    fc.add_argument("--horizon", type=int, default=30)
    fc.set_defaults(func=cmd_forecast)

    fu = sub.add_parser("funding", help="funding-rate engine")
    fusub = fu.add_subparsers(dest="funding_cmd", required=True)
    fcmp = fusub.add_parser("compute", help="per-period funding from minute samples")
    fcmp.add_argument("--input", required=True, help="timestamp,interest,premium CSV")
    fcmp.add_argument("--config")
    fcmp.add_argument("--drop-partial", action="store_true")
    fcmp.add_argument("--out")
    fcmp.set_defaults(func=cmd_funding_compute)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PerpstatError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
