"""One test per acceptance criterion.

Each result line is printed and also collected for the terminal summary
(see conftest.py), so the pass/fail table appears in every pytest run.
"""

import pytest

from brauerloop import acceptance

RESULTS: dict = {}


@pytest.mark.slow
@pytest.mark.parametrize("number", [k for k, _, _ in acceptance.CRITERIA])
def test_criterion(number):
    crit = acceptance.run(number)
    RESULTS[number] = crit
    print(crit.line())
    assert crit.ok, crit.detail
