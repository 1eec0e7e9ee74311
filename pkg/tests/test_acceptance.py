"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary
(see ``conftest.py``).  ``python3 tests/test_acceptance.py`` runs the same
checks without pytest.
"""

import math
import statistics
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from perpstat.archtest import arch_lm_test, demean
from perpstat.causality import granger_test
from perpstat.config import PipelineConfig
from perpstat.funding import (
    InterestInputs,
    MarginConfig,
    PremiumInputs,
    clamp,
    funding_payment,
    funding_rate,
    interest_rate,
    premium_index,
)
from perpstat.pipeline import emit_report, run_pipeline
from perpstat.regression import aic, information_criteria, ols, sic_hqc
from perpstat.series import Series
from perpstat.stationarity import mackinnon_critical_values
from perpstat.synthetic import ground_truth_checks, write_pair
from perpstat.volatility import FAMILIES, compare, fit, log_likelihood, simulate

RESULTS: dict[int, str] = {}

# parameter points used for the recovery check; see the decision log for the
# choice of the power-ARCH point
RECOVERY_TRUTH = {
    "garch": {"omega": 0.1, "alpha": 0.1, "beta": 0.8},
    "tarch": {"omega": 0.1, "alpha": 0.05, "gamma": 0.1, "beta": 0.8},
    "egarch": {"omega": 0.0, "alpha": -0.1, "gamma": 0.2, "beta": 0.9},
    "parch": {"omega": 0.1, "alpha": 0.3, "gamma": 0.3, "beta": 0.6, "delta": 0.4},
    "igarch": {"omega": 0.05, "alpha": 0.1},
}
SELECTION_TRUTH = {"omega": 0.0, "alpha": 0.1291, "gamma": 0.4, "beta": 0.5466}


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"


def arch1(seed: int, n: int = 2000) -> Series:
    return simulate("garch", {"omega": 1.0, "alpha": 0.5, "beta": 0.0}, n, seed)


def test_criterion_1_adf_critical_values():
    t0 = time.perf_counter()
    c = mackinnon_critical_values("constant", 3649)
    ct = mackinnon_critical_values("constant_and_trend", 3649)
    errs = [abs(c["1%"] + 3.431965), abs(c["5%"] + 2.862139), abs(c["10%"] + 2.567132),
            abs(ct["1%"] + 3.960568), abs(ct["5%"] + 3.411044)]
    elapsed = time.perf_counter() - t0
    ok = max(errs) <= 0.01 and elapsed < 1.0
    record(1, ok, f"max abs error {max(errs):.2e}, {elapsed:.3f}s")
    assert ok


def test_criterion_2_and_3_arch_lm():
    t0 = time.perf_counter()
    power, alphas = 0, []
    for seed in range(200):
        rep = arch_lm_test(demean(arch1(seed)), 1, 0.05)
        power += rep.reject_null
        alphas.append(rep.alpha_estimates[0])
    size = sum(arch_lm_test(np.random.default_rng(10_000 + s).standard_normal(2000), 1,
                            0.05).reject_null for s in range(200))
    elapsed = time.perf_counter() - t0
    ok2 = power >= 190 and 4 <= size <= 18 and elapsed < 30
    med = statistics.median(alphas)
    ok3 = abs(med - 0.5) <= 0.12
    record(2, ok2, f"power {power}/200, size {size}/200, {elapsed:.1f}s")
    record(3, ok3, f"median alpha1 {med:.4f}")
    assert ok2 and ok3


def test_criterion_4_granger_directionality():
    t0 = time.perf_counter()
    fwd = back = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(2000)
        y = rng.standard_normal(2000)
        y[1:] += 0.8 * x[:-1]
        fwd += granger_test(x, y, 1, 0.01)[0].reject_noncausality
        back += granger_test(x, y, 1, 0.05)[1].reject_noncausality
    elapsed = time.perf_counter() - t0
    ok = fwd >= 99 and 2 <= back <= 9 and elapsed < 30
    record(4, ok, f"x->y {fwd}/100 at 1%, y->x {back}/100 at 5%, {elapsed:.1f}s")
    assert ok


def _random_point(family, rng):
    u = rng.uniform
    if family == "egarch":
        return [u(-0.5, 0.5), u(-0.3, 0.3), u(0.0, 0.5), u(-0.5, 0.95)]
    if family == "igarch":
        return [u(0.05, 0.5), u(0.02, 0.5)]
    a = u(0.02, 0.3)
    if family == "garch":
        return [u(0.05, 0.5), a, u(0.0, 0.95 - a)]
    if family == "tarch":
        g = u(0.0, 0.3)
        return [u(0.05, 0.5), a, g, u(0.0, 0.9 - a - g / 2)]
    return [u(0.05, 0.5), a, u(-0.5, 0.5), u(0.0, 0.95 - a), u(0.5, 3.0)]


def _gradient_ok(rng) -> tuple[bool, float]:
    e = simulate("garch", RECOVERY_TRUTH["garch"], 300, 99).values
    worst = 0.0
    for fam in FAMILIES:
        for _ in range(20):
            theta = np.array(_random_point(fam, rng))
            _, g = log_likelihood(fam, theta, e, gradient=True)
            for i in range(theta.size):
                h = 1e-6 * max(1.0, abs(theta[i]))
                up, dn = theta.copy(), theta.copy()
                up[i] += h
                dn[i] -= h
                fd = (log_likelihood(fam, up, e) - log_likelihood(fam, dn, e)) / (2 * h)
                worst = max(worst, abs(g[i] - fd) / max(abs(fd), 1.0))
    return worst <= 1e-5, worst


@pytest.mark.slow
def test_criterion_5_parameter_recovery():
    t0 = time.perf_counter()
    hits = {}
    for fam, truth in RECOVERY_TRUTH.items():
        good = 0
        for seed in range(50):
            f = fit(simulate(fam, truth, 10_000, seed), fam)
            good += f.converged and all(abs(f.params[k] - v) <= 0.08 for k, v in truth.items())
        hits[fam] = good
    grad_ok, worst = _gradient_ok(np.random.default_rng(5))
    elapsed = time.perf_counter() - t0
    ok = all(h >= 45 for h in hits.values()) and grad_ok and elapsed < 300
    summary = ", ".join(f"{k} {v}/50" for k, v in hits.items())
    record(5, ok, f"{summary}; worst gradient error {worst:.1e}; {elapsed:.0f}s")
    assert ok


@pytest.mark.slow
def test_criterion_6_model_selection():
    t0 = time.perf_counter()
    wins = 0
    for seed in range(100):
        s = simulate("egarch", SELECTION_TRUTH, 3649, seed)
        c = compare(s, ["egarch", "garch"])
        aics = {f.family: f.aic for f in c.ranked}
        wins += "egarch" in aics and aics["egarch"] < aics.get("garch", math.inf)
    elapsed = time.perf_counter() - t0
    ok = wins >= 80 and elapsed < 600
    record(6, ok, f"EGARCH ahead of GARCH in {wins}/100, {elapsed:.0f}s")
    assert ok


def test_criterion_7_funding_examples():
    t0 = time.perf_counter()
    margin = MarginConfig(0.01, 0.005)
    checks = [
        interest_rate(InterestInputs(0.0006, 0.0003, 3)) == (0.0006 - 0.0003) / 3,
        interest_rate(InterestInputs(0.0004, 0.0004, 3)) == 0.0,
        premium_index(PremiumInputs(9990, 10010, 10000, 10000)) == 0.0,
        premium_index(PremiumInputs(10100, 10150, 10000, 10000)) == 0.005,
        premium_index(PremiumInputs(9850, 9900, 10000, 10000)) == -0.005,
        clamp(0.0003, 0.0005, -0.0005) == 0.0003,
        clamp(0.002, 0.0005, -0.0005) == 0.0005,
        clamp(-0.002, 0.0005, -0.0005) == -0.0005,
    ]
    interior = funding_rate(0.0001, 0.0, margin)
    checks += [interior.funding_rate == 0.0001, not interior.capped]
    capped = funding_rate(0.0001, 0.01, margin)
    checks += [capped.clamp_value == -0.0005, capped.capped,
               capped.cap_bound == 0.75 * (0.01 - 0.005), capped.funding_rate == capped.cap_bound]
    checks.append(funding_rate(0.0003, 0.0003, margin).funding_rate == 0.0003)
    for value in (1.0, 10000.0, 123456.789):
        for i, p in ((0.0001, 0.0), (0.0, -0.0002), (0.0001, 0.01)):
            b = funding_rate(i, p, margin)
            checks.append(funding_payment(value, b) + funding_payment(-value, b) == 0.0)
    checks.append(funding_payment(10000, funding_rate(0.0001, 0.0, margin)) == 1.0)
    elapsed = time.perf_counter() - t0
    ok = all(checks) and elapsed < 1.0
    record(7, ok, f"{sum(checks)}/{len(checks)} exact checks, {elapsed:.3f}s")
    assert ok


@pytest.mark.slow
def test_criterion_8_pipeline():
    t0 = time.perf_counter()
    met = 0
    identical = True
    with tempfile.TemporaryDirectory() as d:
        for seed in range(20):
            files = write_pair(Path(d) / str(seed), seed)
            cfg = PipelineConfig(seed=seed)
            report = run_pipeline(*files, cfg)
            if seed == 0:
                identical = emit_report(report) == emit_report(run_pipeline(*files, cfg))
            met += all(ground_truth_checks(report).values())
    elapsed = time.perf_counter() - t0
    ok = identical and met >= 18 and elapsed < 120
    record(8, ok, f"byte-identical {identical}, ground truth met in {met}/20, {elapsed:.0f}s")
    assert ok


def test_criterion_9_information_criteria():
    sic, hqc = sic_hqc(-100.0, 2, 100)
    checks = [
        abs(aic(-100.0, 2) - 204.0) <= 1e-9,
        abs(sic - (200.0 + 2 * math.log(100))) <= 1e-9,
        abs(hqc - (200.0 + 4 * math.log(math.log(100)))) <= 1e-9,
        abs(sic - 209.2103403719762) <= 1e-9,
        abs(hqc - 206.10871850323161) <= 1e-9,
    ]
    rng = np.random.default_rng(0)
    for n in (37, 100, 3649):
        f = ols(rng.standard_normal(n), rng.standard_normal((n, 2)))
        ic = information_criteria(f.log_likelihood, f.n_params, f.n_obs)
        checks += [ic.aic_per_obs == ic.aic / n, ic.sic_per_obs == ic.sic / n,
                   ic.hqc_per_obs == ic.hqc / n]
    vf = fit(simulate("garch", RECOVERY_TRUTH["garch"], 1000, 1), "garch")
    checks += [vf.aic_per_obs == vf.aic / vf.n_obs, vf.sic_per_obs == vf.sic / vf.n_obs]
    ok = all(checks)
    record(9, ok, f"{sum(checks)}/{len(checks)} checks")
    assert ok


if __name__ == "__main__":
    import sys

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    for k in sorted(RESULTS):
        print(RESULTS[k])
    sys.exit(0 if all("PASS" in v for v in RESULTS.values()) else 1)
