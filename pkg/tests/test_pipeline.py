import dataclasses
import json

import numpy as np
import pytest

from perpstat.config import ALL_STAGES, PipelineConfig
from perpstat.errors import IncompleteReport, ParseError, StageError
from perpstat.io import read_series_csv
from perpstat.pipeline import (
    analyse,
    emit_report,
    report_from_json,
    run_pipeline,
    verify_provenance,
)
from perpstat.series import Series, first_difference
from perpstat.synthetic import ground_truth_checks, make_pair, write_pair

SECTIONS = {
    "arch": ("arch",),
    "correlogram": ("correlogram",),
    "adf": ("adf_funding", "adf_price", "integration_order"),
    "granger": ("granger",),
    "compare": ("model_comparison",),
    "forecast": ("forecast",),
}


@pytest.fixture(scope="module")
def pair_files(tmp_path_factory):
    return write_pair(tmp_path_factory.mktemp("pair"), seed=0)


@pytest.fixture(scope="module")
def full_report(pair_files):
    return run_pipeline(*pair_files, PipelineConfig())


def test_ground_truth_on_seed_zero(full_report):
    assert all(ground_truth_checks(full_report).values())
    assert full_report.stages_run == ALL_STAGES and not full_report.partial


def test_report_shape(full_report):
    r = full_report
    assert len(r.adf_funding) == 6 and len(r.adf_price) == 6
    assert [(x.differencing_level, x.spec) for x in r.adf_funding[:3]] == [
        (0, "constant"), (0, "constant_and_trend"), (0, "none")]
    g_pf, g_fp = r.granger
    assert g_pf.null_hypothesis == "8 Hour price does not Granger Cause FundingRate"
    assert g_fp.null_hypothesis == "FundingRate does not Granger Cause 8 Hour price"
    assert g_pf.n_effective == g_fp.n_effective
    assert r.forecast.family == r.model_comparison.ranked[0].family
    assert len(r.forecast.variances) == 30
    assert r.provenance.n_obs == 3649 and r.provenance.seed == 0


def test_determinism_and_round_trip(pair_files, full_report):
    again = run_pipeline(*pair_files, PipelineConfig())
    a, b = emit_report(full_report), emit_report(again)
    assert a == b
    back = report_from_json(a)
    assert back == full_report
    assert emit_report(back) == a


def test_provenance(pair_files, full_report, tmp_path):
    assert verify_provenance(full_report, *pair_files)
    p = full_report.provenance
    assert p.funding_file == "funding.csv" and p.config == PipelineConfig().snapshot()
    changed = tmp_path / "funding.csv"
    changed.write_bytes(pair_files[0].read_bytes() + b"\n")
    assert not verify_provenance(full_report, changed, pair_files[1])


@pytest.mark.parametrize("stage", ALL_STAGES)
def test_stage_isolation(pair_files, full_report, stage):
    drop = {stage, "forecast"} if stage == "compare" else {stage}
    cfg = PipelineConfig(stages=tuple(s for s in ALL_STAGES if s not in drop))
    r = run_pipeline(*pair_files, cfg)
    assert r.partial
    for name, fields in SECTIONS.items():
        for f in fields:
            if name in drop:
                assert getattr(r, f) is None
            else:
                assert getattr(r, f) == getattr(full_report, f), f


def test_granger_input_is_plain_first_difference(pair_files, monkeypatch):
    import perpstat.pipeline as pl
    seen = {}
    real = pl.granger_test

    def spy(x, y, lag, level):
        seen["x"], seen["y"] = x, y
        return real(x, y, lag, level)

    monkeypatch.setattr(pl, "granger_test", spy)
    run_pipeline(*pair_files, PipelineConfig(stages=("granger",)))
    price = read_series_csv(pair_files[1]).series
    funding = read_series_csv(pair_files[0]).series
    assert np.array_equal(seen["x"].values, first_difference(price).values)
    assert np.array_equal(seen["y"].values, first_difference(funding).values)


def test_constant_series_fail_in_arch_stage():
    s = Series.regular(np.full(500, 3.0))
    with pytest.raises(StageError) as info:
        analyse(s, s)
    assert info.value.stage == "arch"
    assert type(info.value.cause).__name__ == "DegenerateSeries"


def test_empty_funding_file(tmp_path, pair_files):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ParseError, match="empty.csv"):
        run_pipeline(empty, pair_files[1])


def test_text_tables(full_report):
    text = emit_report(full_report, "text_tables").decode()
    assert ("Test for Unit root in | Exogenous | t-Statistic | Probability | "
            "1% level | 5% level | 10% level") in text
    assert "8 Hour price does not Granger Cause FundingRate" in text
    assert "Model | AIC | SIC | HQC" in text
    assert "value of alpha1(squared residuals)" in text


def test_plot_csv(full_report):
    rows = emit_report(full_report, "plot_csv").decode().splitlines()
    assert rows[0] == "series,lag,acf,pacf,q_stat,q_pvalue"
    assert len(rows) == 1 + 2 * 20
    partial = dataclasses.replace(full_report, correlogram=None)
    with pytest.raises(IncompleteReport):
        emit_report(partial, "plot_csv")
    with pytest.raises(ValueError):
        emit_report(full_report, "xml")


def test_json_is_sorted_and_parseable(full_report):
    data = json.loads(emit_report(full_report))
    assert list(data) == sorted(data)
    assert data["provenance"]["config"]["seed"] == 0


def test_synthetic_is_deterministic():
    a, b = make_pair(3), make_pair(3)
    assert np.array_equal(a.funding.values, b.funding.values)
    assert np.array_equal(a.price.values, b.price.values)


def test_arch_mean_order_is_used(pair_files):
    from perpstat.archtest import arch_lm_test, demean
    from perpstat.series import first_difference
    r = run_pipeline(*pair_files, PipelineConfig(stages=("arch",), arch_mean_order=2))
    norm = first_difference(read_series_csv(pair_files[0]).series)
    ref = arch_lm_test(demean(norm, 2), 1)
    assert r.arch.lm_statistic == ref.lm_statistic
