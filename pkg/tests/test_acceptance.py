"""Acceptance criteria 1 to 8, one test each.

Each test prints a single PASS/FAIL line (visible without ``-s``) and then
asserts the verdict, so the suite doubles as the acceptance report.
"""
import pytest

from k3lg.acceptance import CHECKS, run_check


@pytest.mark.parametrize("number", [c[0] for c in CHECKS], ids=[f"{c[0]}-{c[1].replace(' ', '-')}" for c in CHECKS])
def test_acceptance_criterion(number, capsys):
    result = run_check(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
