"""Every acceptance criterion at its stated tolerance and replication count.

One PASS/FAIL line per criterion is printed in the terminal summary; the
individual checks follow it. Simulation criteria (4, 8, 9, 10) take minutes
and carry the ``slow`` marker, so ``-m "not slow"`` skips them.
"""

import pytest

from spatial_aloha import validation

from .conftest import ACCEPTANCE_LINES

SIMULATED = {4, 8, 9, 10}


@pytest.mark.parametrize(
    "number",
    [pytest.param(n, marks=pytest.mark.slow) if n in SIMULATED else n for n in sorted(validation.CRITERIA)],
)
def test_criterion(number):
    result = validation.run_criterion(number, seed=0)
    ACCEPTANCE_LINES.append(result.summary())
    ACCEPTANCE_LINES.extend(check.line() for check in result.checks)
    print(result.summary())
    for check in result.checks:
        print(check.line())
    assert result.passed, "\n".join(c.line() for c in result.checks if not c.passed)
