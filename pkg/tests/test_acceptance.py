"""End-to-end acceptance checks; each prints one PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines, or use
``isoq selftest``.
"""

import pytest

from isoq.acceptance import CHECKS, format_check, run_check


@pytest.mark.parametrize("number", [k for k, _, _ in CHECKS],
                         ids=[f"{k:02d}-{t.replace(' ', '-')}" for k, t, _ in CHECKS])
def test_criterion(number):
    result = run_check(number)
    print(format_check(result))
    assert result.passed, result.detail
