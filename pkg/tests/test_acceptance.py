"""Acceptance criteria, one test (and one printed PASS/FAIL line) per criterion."""

import pytest

from recurzeta.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion, capsys):
    result = run_criterion(criterion)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
