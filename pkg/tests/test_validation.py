"""Validation suite plumbing (the criteria themselves run in acceptance)."""

import pytest

from cellsim.validation import SUITES, CriterionResult, run_suite


def test_suites_cover_the_documented_names():
    assert set(SUITES) == {"evt-cdf", "symmetric-bounds", "asymmetric-limits", "jp-sanity"}


def test_result_line_formats():
    ok = CriterionResult("check", 0.5, 1.0, "<=", True, detail="why")
    assert "PASS" in ok.line() and "why" in ok.line() and "<= 1" in ok.line()
    bad = CriterionResult("check", 2.0, 1.0, "<=", False)
    assert "FAIL" in bad.line()
    ranged = CriterionResult("fit", 5.0, 12.0, "in", True, threshold_low=2.0)
    assert "[2, 12]" in ranged.line()


def test_run_suite_unknown_name():
    with pytest.raises(KeyError, match="unknown validation suite"):
        run_suite("everything")


def test_run_suite_emits_lines(monkeypatch):
    fake = [
        CriterionResult("a", 1.0, 1.0, "==", True),
        CriterionResult("b", 2.0, 1.0, "<=", False),
    ]
    monkeypatch.setitem(SUITES, "fake", lambda workers: fake)
    lines = []
    results = run_suite("fake", emit=lines.append)
    assert results == fake
    assert len(lines) == 2 and "FAIL" in lines[1]
