"""Shared fixtures: the default operating point is expensive enough to reuse."""

import pytest

from ommlab import default_params, evaluate_point


@pytest.fixture(scope="session")
def default_point():
    """Full evaluation of the default operating point, all three pairs."""
    return evaluate_point(default_params(), pairs=("ab", "am", "c2b"))
