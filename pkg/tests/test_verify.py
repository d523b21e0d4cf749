import numpy as np
import pytest

from affine_vlab.core.errors import ConfigValidationError, OutOfRange
from affine_vlab.verify.base import BaseCheck, Measurement, SuiteContext
from affine_vlab.verify.corpus import RANDOM_FIELDS, build_corpus
from affine_vlab.verify.registry import EXPECTED_CHECKS, CheckRegistry
from affine_vlab.verify.suite import all_passed, format_report, run_suite

CHEAP_CHECKS = ["alpha_identity", "sharp_constant_agreement", "truncated_bubble_ratio"]


def test_registry_covers_every_check():
    import affine_vlab.verify.checks  # noqa: F401

    assert CheckRegistry.count() == EXPECTED_CHECKS == 19
    names = CheckRegistry.names()
    assert len(set(names)) == len(names)
    assert names[0] == "comparison_inequality"
    assert "pohozaev_residual" in names and "nonexistence_witness" in names
    for name in ("energy_homogeneity", "subcritical_level_positivity", "restart_determinism"):
        assert name in names
    assert names.index("energy_homogeneity") < names.index("truncation_superadditivity")


def test_unknown_check_name():
    with pytest.raises(ConfigValidationError):
        CheckRegistry.build(["no_such_check"])


def test_unknown_suite_level():
    with pytest.raises(ConfigValidationError):
        run_suite(level="exhaustive")


def test_corpus_layout():
    corpus = build_corpus(seed=0, level="fast")
    assert len(corpus) == 3 * (RANDOM_FIELDS + 6)
    assert len(corpus) >= 100
    assert len(corpus.select(kind="radial")) == 9
    assert corpus.select(dim=3) == []
    again = build_corpus(seed=0, level="fast")
    assert all(np.array_equal(a.values, b.values) for a, b in zip(corpus.entries, again.entries))


def test_cheap_checks_pass_in_registry_order():
    reports = run_suite("fast", seed=0, only=list(reversed(CHEAP_CHECKS)))
    assert [r.name for r in reports] == CHEAP_CHECKS
    assert all_passed(reports), format_report(reports)
    assert all(r.error is None for r in reports)


def test_corrupted_corpus_fails_with_non_finite():
    reports = run_suite("fast", seed=0, only=["comparison_inequality"], corrupt=True)
    assert len(reports) == 1
    assert not reports[0].passed
    assert reports[0].error == "NonFinite"
    assert "FAIL" in format_report(reports)


@pytest.mark.slow
def test_corpus_checks_pass():
    only = [
        "comparison_inequality",
        "zero_energy_equivalence",
        "energy_homogeneity",
        "kernel_identities",
        "truncation_superadditivity",
    ]
    reports = run_suite("fast", seed=0, only=only)
    assert all_passed(reports), format_report(reports)


class _Exploding(BaseCheck):
    name = "exploding"
    anchor = "raises"
    tolerance = 0.0

    def measure(self, ctx: SuiteContext) -> Measurement:
        raise OutOfRange("boom")


class _Crashing(BaseCheck):
    name = "crashing"
    anchor = "raises a plain exception"
    tolerance = 0.0

    def measure(self, ctx: SuiteContext) -> Measurement:
        raise ZeroDivisionError("division by zero")


def test_check_errors_become_failed_reports():
    ctx = SuiteContext(level="fast", seed=0, corpus=None)
    report = _Exploding().run(ctx)
    assert not report.passed
    assert report.error == "OutOfRange"
    assert report.detail == "boom"
    assert _Crashing().run(ctx).error == "ZeroDivisionError"


def test_anchors_state_the_property():
    import affine_vlab.verify.checks  # noqa: F401

    checks = CheckRegistry.build()
    assert all(check.anchor for check in checks)
    for check in checks:
        assert not any(label in check.anchor for label in ("Theorem", "Proposition", "Eq.", "§"))
    anchors = {check.name: check.anchor for check in checks}
    assert anchors["comparison_inequality"] == "E_{p,Ω}(u) ≤ ‖∇u‖_{L^p} for p ≥ 1"
    assert "√(2π)" in anchors["radial_equality"]


@pytest.mark.slow
def test_radial_and_eigen_checks_pass():
    only = ["radial_equality", "affine_invariance", "eigen_upper_bound"]
    reports = run_suite("fast", seed=0, only=only)
    assert [r.name for r in reports] == only
    assert all_passed(reports), format_report(reports)
    assert "j01^2" in reports[2].detail
    assert reports[0].measured <= 0.01


@pytest.mark.slow
def test_solver_checks_pass():
    only = ["subcritical_level_positivity", "restart_determinism", "pohozaev_residual", "lambda_star_positive"]
    reports = run_suite("fast", seed=0, only=only)
    assert all_passed(reports), format_report(reports)
    assert reports[1].measured == 0.0
