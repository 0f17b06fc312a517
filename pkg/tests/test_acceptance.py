"""Acceptance criteria 1-11 at their stated tolerances, one line per criterion."""
import pytest

from ultraborel.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA])
def test_criterion(number, capsys):
    res = run_criterion(number, quick=False)
    with capsys.disabled():
        print("\n" + res.line)
    assert res.passed, res.details
    assert res.elapsed <= res.budget
