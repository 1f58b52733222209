import numpy as np
import pytest

from volterra_choquet.capacities import DistortedLebesgue, distortion
from volterra_choquet.functions import preset
from volterra_choquet.verify import (
    MAX_STORED_VIOLATIONS,
    SuiteReport,
    equicontinuity_failure_demo,
    run_suite,
    span_residual,
    suite_names,
)
from volterra_choquet.volterra import iterate_volterra

EXP = DistortedLebesgue(distortion("exp-saturation"))


def test_unknown_suite_and_bad_samples():
    with pytest.raises(ValueError):
        run_suite("no-such-suite", 1, 10)
    with pytest.raises(ValueError):
        run_suite("homogeneity", 1, 0)


def test_reports_are_reproducible():
    a = run_suite("translation", 9, 40)
    b = run_suite("translation", 9, 40)
    da, db = a.to_dict(), b.to_dict()
    da.pop("runtime_ms"), db.pop("runtime_ms")
    assert da == db


def test_report_invariant_violations_iff_worst_margin_bad():
    rep = run_suite("homogeneity", 42, 30)
    assert (not rep.violations) == (rep.worst_margin >= -rep.tolerance)


def test_every_suite_smoke_runs_clean_or_as_expected():
    for name in suite_names():
        rep = run_suite(name, 7, 12)
        assert rep.ok, (name, rep.violations[:2])


def test_negative_control_suite_fails_on_purpose():
    # meta-check that suites can fail: convex distortion breaks submodularity
    rep = run_suite("capacity-laws[t^2]", 7, 500)
    assert rep.expect_violations
    assert rep.violation_count >= 1
    assert rep.ok
    assert any("submodularity" in v["witness"] for v in rep.violations)
    # and a healthy suite reports expect_violations = False
    assert not run_suite("capacity-laws", 7, 60).expect_violations


def test_violation_storage_is_capped_but_counted():
    rep = run_suite("capacity-laws[t^2]", 7, 2000)
    assert rep.violation_count > MAX_STORED_VIOLATIONS
    assert len(rep.violations) == MAX_STORED_VIOLATIONS


def test_span_residual_member_of_span():
    rec = iterate_volterra(preset("one"), 3, EXP, 257)
    rows = span_residual([rec.iterates[3]], 3, EXP, 257)[0]
    assert rows[3][1] <= 1e-9


def test_span_residual_constant_target():
    rows = span_residual([preset("one")], 4, EXP, 129)[0]
    assert all(res <= 1e-9 for _, res in rows)


def test_span_residuals_nonincreasing():
    targets = [preset("sin-pi", 257), preset("square", 257)]
    for rows in span_residual(targets, 12, EXP, 257):
        residuals = [res for _, res in rows]
        assert all(b <= a + 1e-12 for a, b in zip(residuals, residuals[1:]))


def test_span_residual_u_operator():
    rows = span_residual([preset("square", 257)], 6, EXP, 257, operator="u")[0]
    assert rows[-1][1] <= 1e-5
    residuals = [res for _, res in rows]
    assert all(b <= a + 1e-12 for a, b in zip(residuals, residuals[1:]))


def test_span_residual_validation():
    with pytest.raises(ValueError):
        span_residual([preset("one")], 0, EXP)
    with pytest.raises(ValueError):
        span_residual([preset("one")], 2, EXP, operator="w")


def test_equicontinuity_failure_demo():
    rows = equicontinuity_failure_demo()
    for row in rows:
        assert row["l1_norm"] == pytest.approx(1.0, abs=1e-9)
        assert row["oscillation_over_window"] == pytest.approx(1.0, abs=1e-9)
    windows = [row["window"] for row in rows]
    assert windows == sorted(windows, reverse=True)


def test_suite_report_to_dict_fields():
    rep = run_suite("fast-path", 3, 8)
    d = rep.to_dict()
    for key in ("suite", "seed", "samples", "violations", "worst_margin", "runtime_ms"):
        assert key in d
    assert isinstance(rep, SuiteReport)
