"""
Shared fixtures and hypothesis profiles
"""

import os
from fractions import Fraction

import hypothesis
import hypothesis.strategies as st
import pytest

from reclab.util import debugStats

hypothesis.settings.register_profile('default', max_examples=50, deadline=None)
hypothesis.settings.register_profile('fast', max_examples=5, deadline=None)
hypothesis.settings.register_profile('ci', max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'default'))


def rationals(maxDenominator=64, lo=0, hi=1):
    """
    Strategy of exact rationals in [lo, hi)
    """
    return st.integers(1, maxDenominator).flatmap(
        lambda den: st.integers(lo * den, hi * den - 1).map(lambda num: Fraction(num, den)))


@pytest.fixture(autouse=True)
def cleanStats():
    """Call statistics do not leak between tests"""
    debugStats.clear()
    yield
    debugStats.clear()
