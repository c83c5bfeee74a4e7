import pytest
from pydantic import ValidationError

from krtrace.core.errors import EnumerationLimitError
from krtrace.core.gf import make_field
from krtrace.core.localmodel import classify_by_minors
from krtrace.core.report import Params, StratumResult, render_json
from krtrace.core.verify import (
    VerificationReport,
    admissible_table,
    census_report,
    check_identities,
    predicted_count,
    stratum_census,
    verify_theorem,
)
from krtrace.core.weyl import AdmLabel, admissible


@pytest.fixture
def f3():
    """F_3"""
    return make_field(3, 1)


def test_admissible_table():
    """Test the 13-row table with duality constant 2"""
    table = admissible_table()
    assert len(table.rows) == 13
    assert all(row.duality == 2 for row in table.rows)
    tau = table.rows[-1]
    assert (tau.t0, tau.t1, tau.t2) == ("1100", "0110", "0011")


def test_census_f3(f3):
    """Test stratum sizes over F_3"""
    counts = stratum_census(f3)
    assert counts[AdmLabel.TAU] == 1
    assert counts[AdmLabel.S1] == 2
    assert counts[AdmLabel.S02] == 4
    assert counts[AdmLabel.S010] == counts[AdmLabel.S212] == 14
    assert counts[AdmLabel.S201] == counts[AdmLabel.S102] == 8
    assert sum(counts.values()) == 71


def test_census_f5():
    """Test stratum sizes over F_5"""
    counts = stratum_census(make_field(5, 1))
    assert counts[AdmLabel.TAU] == 1
    assert counts[AdmLabel.S02] == 16
    assert counts[AdmLabel.S010] == 4 * 21
    assert sum(counts.values()) == 389


@pytest.mark.parametrize("p,r", [(3, 1), (5, 1), (3, 2)])
def test_census_matches_prediction(p, r):
    """Test the census against the closed-form sizes"""
    report = census_report(make_field(p, r))
    assert not report.failed()
    assert report.total == report.expected_total
    assert predicted_count(AdmLabel.S102, 9) == 512


@pytest.mark.parametrize("p,r,total", [(3, 1, 71), (5, 1, 389), (3, 2, 2537)])
def test_verify_theorem(p, r, total):
    """Test trace = Phi(s_x, w) at every special point"""
    report = verify_theorem(make_field(p, r), timing=False)
    assert report.verdict == "pass"
    assert report.total == total
    assert report.witness is None
    assert report.elapsed_ms is None
    assert all(s.failed == 0 for s in report.strata)


@pytest.mark.slow
def test_verify_theorem_f25():
    """Test the full comparison over F_25"""
    report = verify_theorem(make_field(5, 2), workers=4, timing=False)
    assert report.verdict == "pass"
    assert report.total == 59449


@pytest.mark.parametrize("p,r,workers", [(3, 1, 2), (3, 2, 3)])
def test_workers_do_not_change_the_report(p, r, workers):
    """Test that splitting across processes gives the same report"""
    fq = make_field(p, r)
    inline = verify_theorem(fq, workers=1, timing=False)
    pooled = verify_theorem(fq, workers=workers, timing=False)
    assert render_json(inline) == render_json(pooled)


def test_injected_failure_gives_witness(f3, monkeypatch):
    """Test that a wrong Phi is reported at the smallest failing point"""
    monkeypatch.setattr("krtrace.core.verify.phi_scaled", lambda s, w, ctx: 0)
    report = verify_theorem(f3, timing=False)
    assert report.verdict == "fail"
    assert report.failed()
    assert report.witness is not None
    assert report.witness.point == (0, 0, 0, 0, 0)
    assert report.witness.stratum == AdmLabel.TAU
    assert report.witness.trace == -20
    assert report.witness.trace_report.trace == -20


def test_enumeration_limit(f3):
    """Test that verification refuses oversize fields"""
    with pytest.raises(EnumerationLimitError):
        verify_theorem(f3, limit=100)


def test_report_json_round_trip(f3):
    """Test that the JSON report parses back to the same model"""
    report = verify_theorem(f3, timing=False)
    text = render_json(report)
    assert '"verdict": "pass"' in text
    assert VerificationReport.model_validate_json(text) == report


def test_report_validates_totals():
    """Test that inconsistent totals are rejected"""
    with pytest.raises(ValidationError):
        VerificationReport(
            params=Params(p=3, r=1, q=3),
            strata=[StratumResult.of("τ", 1, 1, 0)],
            total=2,
            verdict="pass",
        )
    with pytest.raises(ValidationError):
        VerificationReport(
            params=Params(p=3, r=1, q=3),
            strata=[StratumResult.of("τ", 1, 0, 1)],
            total=1,
            verdict="pass",
        )


def test_identities_pass(f3):
    """Test the identity suite over F_3"""
    report = check_identities(f3)
    assert report.verdict == "pass"
    names = [c.name for c in report.checks]
    assert names == ["similitude", "ot_pattern", "layer_vanishing", "containment"]
    checked = {c.name: c.checked for c in report.checks}
    assert checked["similitude"] == 71
    assert checked["layer_vanishing"] == 100


@pytest.mark.parametrize("p,r", [(3, 2), (5, 1)])
def test_identities_pass_larger_fields(p, r):
    """Test the identity suite over F_9 and F_5"""
    report = check_identities(make_field(p, r))
    assert report.verdict == "pass"
    assert all(c.violations == 0 for c in report.checks)


def test_identities_catch_swapped_classifier(f3):
    """Test that swapping two strata breaks the zero-pattern check"""
    swap = {AdmLabel.S010: AdmLabel.S102, AdmLabel.S102: AdmLabel.S010}

    def swapped(point):
        elem = classify_by_minors(point)
        return admissible(swap[elem.label]) if elem.label in swap else elem

    report = check_identities(f3, classifier=swapped)
    assert report.verdict == "fail"
    pattern = next(c for c in report.checks if c.name == "ot_pattern")
    assert pattern.violations == 14 + 8
    assert pattern.witness is not None
