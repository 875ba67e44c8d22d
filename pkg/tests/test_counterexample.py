"""
Tests of the certified counterexample pipeline
"""

from fractions import Fraction
import copy
import random

from hypothesis import given
import hypothesis.strategies as st
import pytest

from conftest import rationals
from reclab.util import ReclabError, SchemaError
from reclab.torus import distToZero
from reclab.cfrac import buildTheoremBQuotients
from reclab.dynsys import SkewTower
from reclab.counterexample import (HTILDE, SIXTH, hEval, riemannClosedForm, riemannDirectSum,
                                   riemannIsPeriodic, riemannBound, selectBeta, TheoremBConfig,
                                   buildTheoremBConfig, certifyGap, verifyTranscript, gapAt,
                                   spotCheckGap)


@pytest.fixture(name='deskConfig', scope='module')
def fixtureDeskConfig():
    """Depth 3 schedule starting at a1 = 3: q = 1, 3, 19684"""
    return buildTheoremBConfig(depth=3, a1=3)


@pytest.fixture(name='smallConfig', scope='module')
def fixtureSmallConfig():
    """Depth 2 schedule starting at a1 = 4: q = 1, 4, 262145"""
    return buildTheoremBConfig(depth=2, a1=4)


def test_hEval():
    assert hEval(0) == Fraction(-1, 30)
    assert hEval(1) == Fraction(-1, 30)
    assert hEval(Fraction(1, 2)) == Fraction(7, 240)
    with pytest.raises(ReclabError):
        hEval(2)


def test_riemannClosedForm():
    assert riemannClosedForm(4, 0) == Fraction(-1, 1920)
    assert riemannDirectSum(4, 0) == Fraction(-1, 1920)
    assert riemannClosedForm(4, Fraction(1, 8)) == riemannDirectSum(4, Fraction(1, 8))
    with pytest.raises(ReclabError):
        riemannClosedForm(4, Fraction(1, 3))
    with pytest.raises(ReclabError):
        riemannClosedForm(0, 0)


@given(st.integers(1, 30), rationals(maxDenominator=200))
def test_riemannClosedFormMatchesSum(n, y):
    x = y / n
    assert riemannClosedForm(n, x) == riemannDirectSum(n, x)
    assert riemannIsPeriodic(n, x)


@given(st.integers(4, 40), rationals(maxDenominator=200))
def test_riemannBound(n, y):
    assert abs(riemannClosedForm(n, y / n)) <= riemannBound(n)


def test_riemannBoundDomain():
    assert riemannBound(4) == Fraction(121, 1920)
    with pytest.raises(ReclabError):
        riemannBound(3)


def test_selectBeta():
    assert selectBeta([3, 19684]) == (Fraction(1, 8), [0, 1])
    assert selectBeta([4]) == (Fraction(2, 5), [0])
    beta, _ = selectBeta([3, 19684], modulus=2)
    assert beta.denominator % 2 == 1
    with pytest.raises(ReclabError):
        selectBeta([])
    with pytest.raises(ReclabError):
        selectBeta([1], threshold=Fraction(1, 2))


def test_configValidation():
    alpha = buildTheoremBQuotients(3, 3)
    with pytest.raises(SchemaError):
        TheoremBConfig(alpha, Fraction(1, 8), delta=Fraction(1, 144))
    with pytest.raises(SchemaError):
        TheoremBConfig(Fraction(1, 3), Fraction(1, 8))
    config = TheoremBConfig(alpha, Fraction(1, 8), lipschitz=6, delta=Fraction(1, 100))
    assert config.lipschitz == 6
    assert isinstance(config.tower(), SkewTower)


def test_buildConfig(deskConfig, smallConfig):
    assert deskConfig.beta == Fraction(1, 8)
    assert deskConfig.selectedIndices == [1, 2]
    assert deskConfig.lipschitz == 12
    assert deskConfig.toJson()['m'] == [3, 19684]
    assert deskConfig.toJson()['beta'] == '1/8'
    assert smallConfig.beta == Fraction(2, 5)
    assert smallConfig.selectedIndices == [1]


def test_certifyGap(deskConfig):
    result = certifyGap(deskConfig, 2)
    assert result.holds
    assert result.m == 19684
    assert [record['link'] for record in result.transcript] == [
        'convergentDepth', 'indexPositive', 'mAtLeast4', 'coprime', 'nearestInteger',
        'convergentError', 'permutation', 'rearrangement', 'deltaBelow', 'riemannBound',
        'supBound', 'betaNorm', 'margin']
    assert result.supBoundOnHm == Fraction(289, 1740)
    assert result.betaNormLower == Fraction(1, 2)
    assert result.margin == Fraction(581, 1740)
    assert result.toJson()['margin'] == '581/1740'
    assert verifyTranscript(result.transcript)


def test_certifyGapSmall(smallConfig):
    result = certifyGap(smallConfig, 1)
    assert result.holds
    assert result.m == 4
    assert result.margin == Fraction(407, 1740)


@pytest.mark.parametrize('index, failedLink, m', [(0, 'indexPositive', None),
                                                  (1, 'mAtLeast4', 3),
                                                  (3, 'convergentDepth', None)])
def test_certifyGapFailures(deskConfig, index, failedLink, m):
    result = certifyGap(deskConfig, index)
    assert not result.holds
    assert result.failedLink == failedLink
    assert result.m == m
    assert result.margin is None
    assert verifyTranscript(result.transcript)


def test_certifyGapBadBeta(deskConfig):
    config = TheoremBConfig(deskConfig.alpha, Fraction(1, 2), selectedIndices=[2])
    result = certifyGap(config, 2)
    assert result.failedLink == 'betaNorm'
    assert result.betaNormLower == 0


def test_verifyTranscript(smallConfig):
    transcript = certifyGap(smallConfig, 1).transcript
    tampered = copy.deepcopy(transcript)
    tampered[-1]['holds'] = False
    assert not verifyTranscript(tampered)
    del tampered[0]['relation']
    with pytest.raises(SchemaError):
        verifyTranscript(tampered)


@given(rationals(maxDenominator=500))
def test_gapAt(smallConfig, x):
    m, alpha = 4, smallConfig.alpha.value()
    direct = sum((HTILDE.unwrapped(x + i * alpha) for i in range(m)), Fraction(0))
    gap = gapAt(smallConfig, 1, x)
    assert gap == distToZero(direct + m * smallConfig.beta)
    assert gap > SIXTH


def test_spotCheckGap(smallConfig, deskConfig):
    report = spotCheckGap(smallConfig, 1, 40, seed=1)
    assert report['m'] == 4
    assert report['exceedsSixth']
    assert report == spotCheckGap(smallConfig, 1, 40, seed=1)
    assert spotCheckGap(deskConfig, 2, 0)['minimum'] is None


@pytest.mark.slow
def test_spotCheckGapParallel(deskConfig):
    report = spotCheckGap(deskConfig, 2, 64, seed=5, nbPar=2)
    assert report['exceedsSixth']
    assert report == spotCheckGap(deskConfig, 2, 64, seed=5)


def test_selectBetaExamples():
    assert selectBeta([2, 3]) == (Fraction(1, 5), [0, 1])
    assert selectBeta([1]) == (Fraction(1, 2), [0])
    # ||2 beta|| > 1/3 forces ||4 beta|| < 1/3
    assert selectBeta([2, 4]) == (Fraction(1, 4), [0])


def test_riemannValues(deskConfig):
    assert riemannBound(10) == Fraction(121, 30000)
    assert riemannClosedForm(1, 0) == Fraction(-1, 30)
    assert gapAt(deskConfig, 2, 0) > SIXTH


@pytest.mark.slow
def test_riemannAcceptance():
    generator = random.Random(256)
    for n in range(1, 257):
        for _ in range(64):
            den = generator.randrange(1, 10 ** 4)
            x = Fraction(generator.randrange(den + 1), den * n)
            assert riemannClosedForm(n, x) == riemannDirectSum(n, x)
        if n >= 4:
            bound = riemannBound(n)
            for j in range(1024 // n + 1):
                assert abs(riemannClosedForm(n, Fraction(j, 1024))) <= bound


@pytest.mark.slow
def test_spotCheckGapAcceptance(deskConfig):
    report = spotCheckGap(deskConfig, 2, 1000, seed=2, nbPar=4)
    assert report['sampleCount'] == 1000
    assert report['exceedsSixth']
    assert report['minimum'] >= certifyGap(deskConfig, 2).margin
