"""One test per acceptance criterion, at the stated tolerances.

Each test prints its pass/fail line (also collected into the terminal
summary by ``conftest.py``).
"""
import pytest

from laplace_tails import acceptance

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("check", acceptance.CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(check):
    res = acceptance.timed(check)
    line = acceptance.format_line(res)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert res.seconds < 60, f"criterion {res.number} exceeded the 60 s budget"
    assert res.passed, line


def test_drift_detector():
    ys = [1, 2, 5, 10, 20]
    assert acceptance.drift_windows(ys, [1, 1.5, 2.5, 3, 3])[0] == pytest.approx(3.0)
    # a non-monotone window is not counted as drift
    assert acceptance.drift_windows(ys, [1, 3, 1, 3, 1])[0] == 1.0
