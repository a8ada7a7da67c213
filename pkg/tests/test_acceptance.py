"""The ten acceptance criteria at their stated tolerances.

Each criterion prints one ``[PASS]``/``[FAIL]`` line; the lines are also
repeated in the pytest terminal summary.  Run this file directly to get just
the ten lines.
"""

import sys

import pytest

from monometric.acceptance import CRITERIA, run_criterion

RESULT_LINES: list[str] = []


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = run_criterion(number)
    line = result.line()
    RESULT_LINES.append(line)
    print(line)
    assert result.passed, result.detail


if __name__ == "__main__":
    failed = 0
    for n in sorted(CRITERIA):
        r = run_criterion(n)
        print(r.line(), flush=True)
        failed += not r.passed
    sys.exit(1 if failed else 0)
