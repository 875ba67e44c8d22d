"""
Tests of the skew maps, base systems and towers
"""

from fractions import Fraction
import random

from hypothesis import given
import hypothesis.strategies as st
import pytest

from conftest import rationals
from reclab.util import ReclabError, SchemaError
from reclab.torus import TorusPoint, OdometerPoint, ProductPoint
from reclab.cfrac import buildTheoremBQuotients
from reclab.dynsys import (LinearWinding, PolyLift, TrigPoly, Constant, Sum, CylinderMap,
                           TorusRotation, Odometer, SkewTower, IteratedSkewState,
                           winding, lift, mean, lipschitzBound, parseSkewMap, cocycleSum,
                           towerStep, towerOrbit, binomPoly, iteratedTower,
                           iteratedIdClosedForm, iteratedIdTrajectory, sequenceToIteratedSkew,
                           hiddenFrequencies, towerFromConfig)

HTILDE = PolyLift([Fraction(-1, 30), 0, 1, -2, 1])


def test_winding():
    assert winding(LinearWinding(2)) == 2
    assert winding(HTILDE) == 0
    assert winding(Sum([LinearWinding(1), LinearWinding(-3)])) == -2
    with pytest.raises(ReclabError):
        winding(CylinderMap(1, [0, Fraction(1, 2)], (2, )))


def test_lift():
    assert lift(HTILDE)(0) == Fraction(-1, 30)
    assert lift(HTILDE).polynomial == list(HTILDE.coeffs)
    assert lift(Constant(Fraction(1, 4)))(Fraction(2, 3)) == Fraction(1, 4)
    with pytest.raises(ReclabError):
        lift(LinearWinding(1))


@given(rationals(maxDenominator=1000, lo=-2, hi=2))
def test_liftProjectsOnMap(value):
    skewMap = Sum([HTILDE, Constant(Fraction(3, 7))])
    assert TorusPoint(lift(skewMap)(value)) == skewMap(TorusPoint(value))


def test_mean():
    assert mean(HTILDE) == 0
    assert mean(Constant(Fraction(5, 4))) == Fraction(1, 4)
    assert mean(TrigPoly([Fraction(3, 7), 1], [2])) == Fraction(3, 7)
    assert mean(Sum([HTILDE, Constant(Fraction(1, 8))])) == Fraction(1, 8)
    with pytest.raises(ReclabError):
        mean(LinearWinding(2))


def test_lipschitzBound():
    assert lipschitzBound(HTILDE) == 12
    assert lipschitzBound(LinearWinding(-3)) == 3
    assert lipschitzBound(Constant(Fraction(1, 3))) == 0
    assert lipschitzBound(TrigPoly([0, 1])) == Fraction(44, 7)


def test_polyLiftContinuity():
    with pytest.raises(ReclabError):
        PolyLift([0, 1])


def test_trigPolyEnclosure():
    cosine = TrigPoly([0, 1])
    enclosure = cosine.unwrapped(Fraction(1, 4))
    assert enclosure.contains(0)
    assert enclosure.radius < Fraction(1, 2 ** 80)
    assert cosine.unwrapped(0).contains(1)
    assert TrigPoly([Fraction(1, 5)]).unwrapped(Fraction(1, 3)) == Fraction(1, 5)


@pytest.mark.parametrize('text', ['linear:3', 'poly:-1/30,0,1,-2,1', 'const:1/4',
                                  'trig:cos=1/2,1/3;sin=1/5', 'sum:linear:1|const:1/2'])
def test_parseSkewMapRoundTrip(text):
    skewMap = parseSkewMap(text)
    assert parseSkewMap(skewMap.tag()) == skewMap


def test_parseSkewMapErrors():
    for text in ('unknown:1', 'nothing', 'poly:0,1', 'linear:x', 'cyl:depth=1;table=0,1'):
        with pytest.raises(SchemaError):
            parseSkewMap(text)
    cylinder = parseSkewMap('cyl:depth=1;table=0,1/2', bases=[2])
    assert cylinder(OdometerPoint((2, ), (1, ))) == TorusPoint(Fraction(1, 2))


def test_cocycleSum():
    base = TorusRotation([Fraction(1, 4)])
    origin = base.origin()
    assert cocycleSum(base, HTILDE, 0, origin)[0] == TorusPoint(0)
    assert cocycleSum(base, Constant(Fraction(1, 8)), 4, origin) == \
        (TorusPoint(Fraction(1, 2)), Fraction(1, 2))
    assert cocycleSum(base, HTILDE, 4, origin)[1] == Fraction(-1, 1920)
    assert cocycleSum(base, LinearWinding(1), 4, origin)[1] is None


@given(rationals(maxDenominator=40), rationals(maxDenominator=40),
       st.integers(0, 12), st.integers(0, 12))
def test_cocycleIdentity(alpha, x, first, second):
    base = TorusRotation([alpha])
    skewMap = Sum([HTILDE, LinearWinding(1)])
    point = (TorusPoint(x), )
    total = cocycleSum(base, skewMap, first + second, point)[0]
    split = cocycleSum(base, skewMap, first, point)[0] + \
        cocycleSum(base, skewMap, second, base.step(point, first))[0]
    assert total == split


@pytest.mark.parametrize('skewMap', [LinearWinding(2), Sum([HTILDE, LinearWinding(-1)]),
                                     Sum([LinearWinding(3), LinearWinding(-1), HTILDE])])
def test_cocycleWinding(skewMap):
    alpha, m = Fraction(2, 7), 5
    increment = sum(skewMap.unwrapped(1 + i * alpha) - skewMap.unwrapped(i * alpha)
                    for i in range(m))
    assert increment == m * winding(skewMap)


def test_towerOrbit():
    tower = SkewTower(TorusRotation([Fraction(1, 3)]), Constant(Fraction(1, 3)))
    origin = tower.origin()
    assert towerOrbit(tower, origin, 0) == origin
    assert towerOrbit(tower, origin, 3) == origin
    assert towerOrbit(tower, origin, 1) == \
        ProductPoint((Fraction(1, 3), ), [Fraction(1, 3)])
    with pytest.raises(ReclabError):
        towerOrbit(tower, ProductPoint((0, ), [0, 0]), 1)


def test_towerValidation():
    odometer = Odometer((2, ))
    with pytest.raises(ReclabError):
        SkewTower(odometer, HTILDE)
    with pytest.raises(ReclabError):
        SkewTower(TorusRotation([Fraction(1, 2)]), CylinderMap(1, [0, 0], (2, )))
    with pytest.raises(ReclabError):
        SkewTower(odometer, CylinderMap(1, [0, 0, 0], (3, )))
    tower = SkewTower(odometer, CylinderMap(1, [0, Fraction(1, 2)], (2, )), [LinearWinding(1)])
    point = towerStep(tower, tower.origin())
    assert point == ProductPoint(OdometerPoint((2, ), (1, )), [0, 0])
    point = towerStep(tower, point)
    assert point == ProductPoint(OdometerPoint((2, ), (0, 1)), [Fraction(1, 2), 0])


def test_odometerReturnDistance():
    odometer = Odometer((2, ))
    assert odometer.returnDistance(4) == Fraction(1, 4)
    assert odometer.returnDistance(3) == 1
    assert odometer.power(2).returnDistance(2) == Fraction(1, 4)


def test_rotationReturnDistance():
    assert TorusRotation([Fraction(1, 3), Fraction(1, 4)]).returnDistance(2) == \
        Fraction(1, 3) + Fraction(1, 2)
    cf = buildTheoremBQuotients(3, 3)
    assert TorusRotation([cf]).returnDistance(cf.q(2)).hi < Fraction(1, 10 ** 30)


def test_binomPoly():
    tVec = (Fraction(1, 3), Fraction(1, 5))
    assert binomPoly(tVec, 2) == TorusPoint(Fraction(13, 15))
    assert binomPoly(tVec[:1], 17) == TorusPoint(Fraction(1, 3))
    assert binomPoly((Fraction(1, 7), Fraction(2, 7), Fraction(3, 7)), 0) == \
        TorusPoint(Fraction(3, 7))
    with pytest.raises(ReclabError):
        binomPoly((), 3)


def _directOrbit(base, skewMap, state, horizon):
    tower = iteratedTower(base, skewMap, state.k)
    point = ProductPoint(state.x, state.tVec)
    points = [point]
    for _ in range(horizon):
        point = towerStep(tower, point)
        points.append(point)
    return points


def test_iteratedIdClosedForm():
    base = TorusRotation([Fraction(2, 7)])
    state = IteratedSkewState(base.origin(), [Fraction(1, 3), Fraction(1, 5), Fraction(1, 9)])
    assert iteratedIdClosedForm(base, HTILDE, state, 0) == \
        ProductPoint(base.origin(), state.tVec)
    single = IteratedSkewState(base.origin(), [Fraction(1, 3)])
    assert iteratedIdClosedForm(base, HTILDE, single, 6).fibers[0] == \
        TorusPoint(Fraction(1, 3)) + cocycleSum(base, HTILDE, 6, base.origin())[0]
    assert iteratedIdTrajectory(base, HTILDE, state, 60) == _directOrbit(base, HTILDE, state, 60)


def test_iteratedIdOnOdometer():
    base = Odometer((2, 3))
    skewMap = CylinderMap(2, [0, Fraction(1, 6), Fraction(1, 3), Fraction(1, 2),
                              Fraction(2, 3), Fraction(5, 6)], (2, 3))
    state = IteratedSkewState(base.origin(), [Fraction(1, 4), Fraction(1, 8)])
    assert iteratedIdTrajectory(base, skewMap, state, 40) == \
        _directOrbit(base, skewMap, state, 40)


@pytest.mark.slow
@pytest.mark.parametrize('k', [1, 2, 3, 4])
def test_iteratedIdClosedFormAcceptance(k):
    generator = random.Random(k)
    for _ in range(20):
        base = TorusRotation([Fraction(generator.randrange(1, 97), 97)])
        skewMap = Sum([HTILDE, Constant(Fraction(generator.randrange(50), 50))])
        state = IteratedSkewState((TorusPoint(Fraction(generator.randrange(64), 64)), ),
                                  [Fraction(generator.randrange(30), 30) for _ in range(k)])
        assert iteratedIdTrajectory(base, skewMap, state, 2000) == \
            _directOrbit(base, skewMap, state, 2000)


@given(st.lists(rationals(maxDenominator=30), min_size=6, max_size=25), st.integers(1, 4))
def test_sequenceToIteratedSkew(values, k):
    result = sequenceToIteratedSkew(values, k)
    assert result['reconstructed']
    assert len(result['tVec']) == k


def test_hiddenFrequencies():
    tower = SkewTower(TorusRotation([Fraction(1, 5)]), Sum([HTILDE, Constant(Fraction(1, 8))]),
                      [LinearWinding(1), Constant(Fraction(1, 3))])
    assert hiddenFrequencies(tower) == [Fraction(1, 5), Fraction(1, 8), Fraction(1, 3)]
    with pytest.raises(ReclabError):
        hiddenFrequencies(SkewTower(Odometer((2, )), Constant(0)))


def test_towerFromConfig():
    tower = towerFromConfig({'base': 'rotation', 'alpha': '1/5', 'h1': 'poly:-1/30,0,1,-2,1',
                             'h3': 'const:1/3', 'h2': 'linear:1'})
    assert tower.maps == [HTILDE, LinearWinding(1), Constant(Fraction(1, 3))]
    base = towerFromConfig({'base': 'rotation', 'alpha': '1/3,1/7'})
    assert base.dimension == 2
    odometerTower = towerFromConfig({'base': 'odometer', 'bases': '2,3',
                                     'h1': 'cyl:depth=1;table=0,1/2'})
    assert odometerTower.h1(OdometerPoint((2, 3), (1, ))) == TorusPoint(Fraction(1, 2))
    withCf = towerFromConfig({'base': 'rotation', 'cf': ['3', '6561'], 'h1': 'const:1/8'})
    assert not withCf.base.exact
    for bad in ({'base': 'sphere'}, {'base': 'rotation'},
                {'base': 'odometer', 'bases': '1'},
                {'base': 'rotation', 'alpha': '1/3', 'h1': 'linear:1', 'fiber': ['cyl:depth=1']}):
        with pytest.raises(SchemaError):
            towerFromConfig(bad)


def test_trigPolyTower():
    tower = SkewTower(TorusRotation([Fraction(2, 7)]), TrigPoly([Fraction(1, 4), Fraction(1, 50)]))
    image = towerOrbit(tower, tower.origin(), 1)
    assert image.base == (TorusPoint(Fraction(2, 7)), )
    fiber = image.fibers[0]
    assert fiber.value.contains(Fraction(27, 100))
    assert isinstance(fiber.center.numerator, int) and isinstance(fiber.center.denominator, int)
    # the cosine terms cancel over a full period of the base
    assert towerOrbit(tower, tower.origin(), 7).fibers[0].value.contains(Fraction(3, 4))
    assert towerStep(tower, image).base == (TorusPoint(Fraction(4, 7)), )
