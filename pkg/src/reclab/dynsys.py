"""
Systems and skew towers.

The continuous maps are restricted to a closed class of skew maps for which
winding number, lift, mean and a Lipschitz bound are computable exactly:
  - LinearWinding(k): x -> kx mod 1
  - PolyLift(coeffs): polynomial lift with p(0) = p(1)
  - TrigPoly(cosCoeffs, sinCoeffs): trigonometric polynomial, evaluated in
    interval arithmetic (mpmath.iv) and returned as a Ball
  - Constant(c)
  - Sum(parts): flat sum of the above
  - CylinderMap(depth, table, bases): locally constant map on an odometer

Base systems are torus rotations (alpha exact or given by a continued
fraction) and odometers. A SkewTower acts on (x, t_1, ..., t_d) by
(Tx, t_1 + h_1(x), t_2 + h_2(t_1), ..., t_d + h_d(t_(d-1))).
"""

from fractions import Fraction
import math
import logging

from mpmath import iv
from mpmath.libmp import to_rational

from reclab.util import debugDecor, ReclabError, SchemaError, parseRational, formatRational
from reclab.torus import (Ball, TorusPoint, OdometerPoint, ProductPoint, reduceMod1,
                          integerDigits, odometerBase)
from reclab.cfrac import ContinuedFraction, normMultiple

# Rational upper bound of 2 pi
TWO_PI_BOUND = Fraction(44, 7)


def _exactRational(value):
    """
    :param value: mpf endpoint of an mpmath interval
    :return: the exact Fraction (plain ints, whatever the mpmath backend)
    """
    num, den = to_rational(value)
    return Fraction(int(num), int(den))


################################################################################
# Skew maps


class SkewMap:
    """
    Base class of the skew maps
    """
    isCircleMap = True

    def winding(self):
        """
        :return: the winding number phi(1) - phi(0)
        """
        raise NotImplementedError

    def lipschitzBound(self):
        """
        :return: certified upper bound of the Lipschitz constant of the lift
        """
        raise NotImplementedError

    def mean(self):
        """
        :return: exact integral of the lift over [0, 1]
        """
        raise NotImplementedError

    def tag(self):
        """
        :return: the textual description understood by parseSkewMap
        """
        raise NotImplementedError

    def _unwrappedExact(self, value):
        raise NotImplementedError

    def unwrapped(self, value):
        """
        Continuous lift on R: phi(u + 1) = phi(u) + winding
        :param value: Fraction or Ball
        :return: phi(value), a Fraction or a Ball
        """
        if isinstance(value, Ball):
            if value.radius == 0:
                return self._unwrappedExact(value.center)
            return self._unwrappedExact(value.center) + \
                Ball(0, self.lipschitzBound() * value.radius)
        return self._unwrappedExact(Fraction(value))

    def __call__(self, point):
        """
        :param point: TorusPoint (or value)
        :return: the image TorusPoint
        """
        value = point.value if isinstance(point, TorusPoint) else point
        return TorusPoint(self.unwrapped(value))

    def __repr__(self):
        return f'{self.__class__.__name__}({self.tag()})'

    def __eq__(self, other):
        return type(self) is type(other) and self.tag() == other.tag()

    def __hash__(self):
        return hash(self.tag())


class LinearWinding(SkewMap):
    """
    x -> kx mod 1
    """
    def __init__(self, k):
        self.k = int(k)

    def winding(self):
        return self.k

    def lipschitzBound(self):
        return Fraction(abs(self.k))

    def mean(self):
        raise ReclabError(f'The map x -> {self.k}x has no mean (winding {self.k})')

    def tag(self):
        return f'linear:{self.k}'

    def _unwrappedExact(self, value):
        return self.k * value


class PolyLift(SkewMap):
    """
    Map whose lift on [0, 1) is the polynomial sum_i c_i x^i, with p(0) = p(1)
    """
    def __init__(self, coeffs):
        """
        :param coeffs: coefficients c_0, c_1, ... (ascending degree)
        """
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        if len(self.coeffs) == 0:
            raise ReclabError('Empty polynomial')
        if sum(self.coeffs[1:]) != 0:
            raise ReclabError(f'Polynomial {self.coeffs} does not satisfy p(0) = p(1)')

    def winding(self):
        return 0

    def lipschitzBound(self):
        return sum((i * abs(c) for i, c in enumerate(self.coeffs)), Fraction(0))

    def mean(self):
        return sum((c / (i + 1) for i, c in enumerate(self.coeffs)), Fraction(0))

    def tag(self):
        return 'poly:' + ','.join(formatRational(c) for c in self.coeffs)

    def evaluate(self, value):
        """
        :param value: exact rational
        :return: p(value) (Horner)
        """
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * value + c
        return result

    def _unwrappedExact(self, value):
        return self.evaluate(value - math.floor(value))


class TrigPoly(SkewMap):
    """
    a_0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x)
    """
    PRECISION = 96

    def __init__(self, cosCoeffs, sinCoeffs=()):
        """
        :param cosCoeffs: a_0, a_1, ...
        :param sinCoeffs: b_1, b_2, ...
        """
        self.cosCoeffs = tuple(Fraction(c) for c in cosCoeffs) or (Fraction(0), )
        self.sinCoeffs = tuple(Fraction(c) for c in sinCoeffs)

    def winding(self):
        return 0

    def lipschitzBound(self):
        total = sum((k * abs(a) for k, a in enumerate(self.cosCoeffs)), Fraction(0))
        total += sum((k * abs(b) for k, b in enumerate(self.sinCoeffs, start=1)), Fraction(0))
        return TWO_PI_BOUND * total

    def mean(self):
        return self.cosCoeffs[0]

    def tag(self):
        return 'trig:cos=' + ','.join(formatRational(c) for c in self.cosCoeffs) + \
               ';sin=' + ','.join(formatRational(c) for c in self.sinCoeffs)

    def _unwrappedExact(self, value):
        if all(a == 0 for a in self.cosCoeffs[1:]) and all(b == 0 for b in self.sinCoeffs):
            return self.cosCoeffs[0]
        oldPrec = iv.prec
        iv.prec = self.PRECISION
        try:
            angle = 2 * iv.pi * (iv.mpf(value.numerator) / value.denominator)
            total = iv.mpf(0)
            for k, a in enumerate(self.cosCoeffs):
                if a != 0:
                    total += (iv.mpf(a.numerator) / a.denominator) * iv.cos(k * angle)
            for k, b in enumerate(self.sinCoeffs, start=1):
                if b != 0:
                    total += (iv.mpf(b.numerator) / b.denominator) * iv.sin(k * angle)
            lo, hi = total._mpi_  # pylint: disable=protected-access
        finally:
            iv.prec = oldPrec
        return Ball.fromBounds(_exactRational(lo), _exactRational(hi))


class Constant(SkewMap):
    """
    Constant map, also valid over an odometer base
    """
    def __init__(self, value):
        self.value = TorusPoint(value).value

    def winding(self):
        return 0

    def lipschitzBound(self):
        return Fraction(0)

    def mean(self):
        return self.value

    def tag(self):
        return 'const:' + formatRational(self.value)

    def _unwrappedExact(self, value):
        return self.value

    def __call__(self, point):
        return TorusPoint(self.value)


class Sum(SkewMap):
    """
    Flat sum of skew maps
    """
    def __init__(self, parts):
        flat = []
        for part in parts:
            if isinstance(part, Sum):
                flat.extend(part.parts)
            elif isinstance(part, CylinderMap):
                raise ReclabError('Cylinder maps cannot be summed with circle maps')
            else:
                flat.append(part)
        if len(flat) == 0:
            raise ReclabError('Empty sum of skew maps')
        self.parts = tuple(flat)

    def winding(self):
        return sum(part.winding() for part in self.parts)

    def lipschitzBound(self):
        return sum((part.lipschitzBound() for part in self.parts), Fraction(0))

    def mean(self):
        if self.winding() != 0:
            raise ReclabError(f'Sum with winding {self.winding()} has no mean')
        # the linear parts have lifts (sum k) u = 0
        return sum((part.mean() for part in self.parts if part.winding() == 0), Fraction(0))

    def tag(self):
        return 'sum:' + '|'.join(part.tag() for part in self.parts)

    def _unwrappedExact(self, value):
        return sum((part.unwrapped(value) for part in self.parts), Fraction(0))


class CylinderMap(SkewMap):
    """
    Locally constant map on an odometer, constant on the cylinders of a given depth
    """
    isCircleMap = False

    def __init__(self, depth, table, bases):
        """
        :param depth: cylinder depth j
        :param table: values indexed by the j-prefix (mixed radix, least significant first)
        :param bases: odometer bases
        """
        self.depth = int(depth)
        self.bases = tuple(bases)
        self.table = tuple(TorusPoint(value) for value in table)
        expected = math.prod(odometerBase(self.bases, i) for i in range(self.depth))
        if len(self.table) != expected:
            raise ReclabError(f'Cylinder map of depth {self.depth} needs {expected} ' +
                              f'values, got {len(self.table)}')

    def index(self, point):
        """
        :param point: OdometerPoint
        :return: the table index of the cylinder containing point
        """
        result, weight = 0, 1
        for i in range(self.depth):
            result += point.digit(i) * weight
            weight *= odometerBase(self.bases, i)
        return result

    def winding(self):
        raise ReclabError('The winding number of a cylinder map is undefined')

    def lipschitzBound(self):
        raise ReclabError('A cylinder map has no Lipschitz bound on the circle')

    def mean(self):
        raise ReclabError('A cylinder map has no lift')

    def tag(self):
        return f'cyl:depth={self.depth};table=' + \
               ','.join(formatRational(value.value) for value in self.table)

    def _unwrappedExact(self, value):
        raise ReclabError('A cylinder map has no lift')

    def __call__(self, point):
        if not isinstance(point, OdometerPoint):
            raise ReclabError('A cylinder map is evaluated on odometer points')
        return self.table[self.index(point)]


class Lift:
    """
    Real-valued lift of a zero-winding skew map
    """
    def __init__(self, skewMap):
        self.skewMap = skewMap
        self.polynomial = list(skewMap.coeffs) if isinstance(skewMap, PolyLift) else None

    def __call__(self, value):
        """
        :param value: Fraction or Ball
        :return: the lift at value (Fraction, or Ball for trigonometric parts)
        """
        return self.skewMap.unwrapped(value)


@debugDecor
def winding(skewMap):
    """
    :param skewMap: circle map
    :return: its winding number
    """
    return skewMap.winding()


@debugDecor
def lift(skewMap):
    """
    :param skewMap: zero-winding circle map
    :return: its continuous lift (a Lift instance)
    """
    if skewMap.winding() != 0:
        raise ReclabError(f'{skewMap} has winding {skewMap.winding()} and no lift')
    return Lift(skewMap)


@debugDecor
def mean(skewMap):
    """
    :param skewMap: zero-winding circle map
    :return: the exact mean of its lift
    """
    if skewMap.winding() != 0:
        raise ReclabError(f'{skewMap} has winding {skewMap.winding()} and no mean')
    return skewMap.mean()


@debugDecor
def lipschitzBound(skewMap):
    """
    :param skewMap: circle map
    :return: a certified Lipschitz bound
    """
    return skewMap.lipschitzBound()


def _splitList(text):
    return [item for item in (part.strip() for part in text.split(',')) if item != '']


@debugDecor
def parseSkewMap(text, bases=None):
    """
    :param text: 'linear:k', 'poly:c0,c1,...', 'trig:cos=a0,a1;sin=b1', 'const:c',
                 'sum:<map>|<map>' or 'cyl:depth=j;table=v0,v1,...'
    :param bases: odometer bases, needed by cylinder maps
    :return: the SkewMap
    """
    kind, sep, body = text.strip().partition(':')
    if sep == '':
        raise SchemaError(f"Skew map '{text}' has no tag")
    try:
        if kind == 'linear':
            return LinearWinding(int(body))
        if kind == 'poly':
            return PolyLift([parseRational(c) for c in _splitList(body)])
        if kind == 'const':
            return Constant(parseRational(body))
        if kind == 'sum':
            return Sum([parseSkewMap(part, bases) for part in body.split('|')])
        if kind in ('trig', 'cyl'):
            fields = dict(field.split('=', 1) for field in body.split(';') if '=' in field)
            if kind == 'trig':
                return TrigPoly([parseRational(c) for c in _splitList(fields.get('cos', ''))],
                                [parseRational(c) for c in _splitList(fields.get('sin', ''))])
            if bases is None:
                raise SchemaError('Cylinder maps need the odometer bases')
            return CylinderMap(int(fields['depth']),
                               [parseRational(c) for c in _splitList(fields['table'])], bases)
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"Invalid skew map '{text}'") from exc
    except ReclabError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"Invalid skew map '{text}': {exc}") from exc
    raise SchemaError(f"Unknown skew map tag '{kind}'")

################################################################################
# Base systems


class TorusRotation:
    """
    x -> x + alpha on T^d, alpha exact or given by a continued fraction
    """
    kind = 'torus'

    def __init__(self, alphas, multiplier=1):
        """
        :param alphas: list of Fraction (or 'p/q' strings) or ContinuedFraction
        :param multiplier: the system is the multiplier-th power of the rotation by alphas
        """
        self.alphas = tuple(alpha if isinstance(alpha, ContinuedFraction)
                            else parseRational(alpha) for alpha in alphas)
        if len(self.alphas) == 0:
            raise ReclabError('A torus rotation needs a dimension d >= 1')
        self.multiplier = multiplier

    @property
    def dimension(self):
        """Dimension d of the torus"""
        return len(self.alphas)

    @property
    def shape(self):
        """Shape of the base points"""
        return ('torus', self.dimension)

    @property
    def exact(self):
        """True if no frequency is given by a continued fraction"""
        return not any(isinstance(alpha, ContinuedFraction) for alpha in self.alphas)

    def frequency(self, index):
        """
        :param index: coordinate index
        :return: the rotation number of the coordinate (Fraction, or Ball for a cf alpha)
        """
        alpha = self.alphas[index]
        if isinstance(alpha, ContinuedFraction):
            return alpha.alphaBall() * self.multiplier
        return alpha * self.multiplier

    def origin(self):
        """
        :return: the base point 0
        """
        return tuple(TorusPoint(0) for _ in self.alphas)

    def step(self, point, n=1):
        """
        :param point: tuple of TorusPoint
        :param n: nonnegative number of steps
        :return: T^n point
        """
        return tuple(coord + self.frequency(j) * n for j, coord in enumerate(point))

    def returnDistance(self, n):
        """
        :param n: number of steps
        :return: d(x, T^n x) = sum_j ||n alpha_j||, independent of x
        """
        return sum((normMultiple(alpha, n * self.multiplier) for alpha in self.alphas),
                   Fraction(0))

    def power(self, k):
        """
        :return: the system T^k
        """
        return TorusRotation(self.alphas, self.multiplier * k)

    def describe(self):
        """
        :return: JSON-ready description
        """
        return {'kind': 'rotation', 'multiplier': self.multiplier,
                'alpha': [alpha.toJson() if isinstance(alpha, ContinuedFraction)
                          else formatRational(alpha) for alpha in self.alphas]}


class Odometer:
    """
    x -> x + increment on the odometer with bases b_1, b_2, ...
    """
    kind = 'odometer'

    def __init__(self, bases, increment=1):
        self.bases = tuple(int(base) for base in bases)
        if len(self.bases) == 0 or any(base < 2 for base in self.bases):
            raise ReclabError(f'Odometer bases must be >= 2, got {self.bases}')
        if increment < 1:
            raise ReclabError('The odometer increment must be positive')
        self.increment = increment

    @property
    def shape(self):
        """Shape of the base points"""
        return ('odometer', self.bases)

    exact = True

    def origin(self):
        """
        :return: the base point 0
        """
        return OdometerPoint(self.bases)

    def step(self, point, n=1):
        """
        :param point: OdometerPoint
        :param n: nonnegative number of steps
        :return: T^n point
        """
        return point + n * self.increment

    def returnDistance(self, n):
        """
        :param n: number of steps
        :return: 2^(-j) with j the first nonzero digit of n * increment, independent of x
        """
        digits = integerDigits(self.bases, n * self.increment)
        for index, digit in enumerate(digits):
            if digit != 0:
                return Fraction(1, 2 ** index)
        return Fraction(0)

    def power(self, k):
        """
        :return: the system T^k
        """
        return Odometer(self.bases, self.increment * k)

    def describe(self):
        """
        :return: JSON-ready description
        """
        return {'kind': 'odometer', 'bases': list(self.bases), 'increment': self.increment}

################################################################################
# Towers


class SkewTower:
    """
    (x, t_1, ..., t_d) -> (Tx, t_1 + h_1(x), t_2 + h_2(t_1), ..., t_d + h_d(t_(d-1)))
    On a multidimensional torus base, h_1 reads the first coordinate.
    """
    def __init__(self, base, h1, fibers=()):
        self.base = base
        self.h1 = h1
        self.fibers = tuple(fibers)
        if any(not fiber.isCircleMap for fiber in self.fibers):
            raise ReclabError('Fiber maps must be circle maps')
        if isinstance(base, Odometer):
            if not isinstance(h1, (CylinderMap, Constant)):
                raise ReclabError('Over an odometer, h1 must be a cylinder or constant map')
            if isinstance(h1, CylinderMap) and \
               any(odometerBase(h1.bases, i) != odometerBase(base.bases, i)
                   for i in range(h1.depth)):
                raise ReclabError('Cylinder map and odometer bases differ')
        elif not h1.isCircleMap:
            raise ReclabError('Over a torus, h1 must be a circle map')

    @property
    def maps(self):
        """[h_1, ..., h_d]"""
        return [self.h1] + list(self.fibers)

    @property
    def depth(self):
        """Number d of fibers"""
        return 1 + len(self.fibers)

    @property
    def shape(self):
        """Shape of the points"""
        return self.base.shape + (self.depth, )

    def origin(self):
        """
        :return: the point with all coordinates 0
        """
        return ProductPoint(self.base.origin(), [0] * self.depth)

    def h1At(self, basePoint):
        """
        :param basePoint: base point
        :return: h_1(basePoint)
        """
        if isinstance(basePoint, OdometerPoint):
            return self.h1(basePoint)
        return self.h1(basePoint[0])

    def power(self, k):
        """
        :return: the system T^k
        """
        return PoweredTower(self, k)

    def describe(self):
        """
        :return: JSON-ready description
        """
        return {'base': self.base.describe(), 'maps': [h.tag() for h in self.maps]}


class PoweredTower:
    """
    k-th power of a skew tower
    """
    def __init__(self, tower, exponent):
        self.tower = tower
        self.exponent = exponent

    def power(self, k):
        """
        :return: the system (T^exponent)^k
        """
        return PoweredTower(self.tower, self.exponent * k)


def _checkShape(tower, point):
    if point.shape != tower.shape:
        raise ReclabError(f'Point of shape {point.shape} on a tower of shape {tower.shape}')


@debugDecor
def towerStep(tower, point):
    """
    :param tower: SkewTower
    :param point: ProductPoint
    :return: the image of point by one application of the tower map
    """
    _checkShape(tower, point)
    fibers = [point.fibers[0] + tower.h1At(point.base)]
    for j, fiberMap in enumerate(tower.fibers, start=1):
        fibers.append(point.fibers[j] + fiberMap(point.fibers[j - 1]))
    return ProductPoint(tower.base.step(point.base, 1), fibers)


@debugDecor
def towerOrbit(tower, point, n):
    """
    :param tower: SkewTower
    :param point: ProductPoint
    :param n: number of steps (>= 0)
    :return: T^n point
    """
    _checkShape(tower, point)
    if n < 0:
        raise ReclabError('Only forward orbits are computed')
    for _ in range(n):
        point = towerStep(tower, point)
    return point


@debugDecor
def cocycleSum(base, skewMap, m, point):
    """
    :param base: TorusRotation or Odometer
    :param skewMap: map from the base to T (on a torus, it reads the first coordinate)
    :param m: number of terms (>= 0)
    :param point: base point x
    :return: (h_m(x), H_m(x)) where H_m is the real sum of the lift values
             (None when the map has no lift)
    """
    if m < 0:
        raise ReclabError('Cocycle sums need m >= 0')
    onTorus = not isinstance(point, OdometerPoint)
    hasLift = isinstance(skewMap, Constant) or \
        (onTorus and skewMap.isCircleMap and skewMap.winding() == 0)
    total = TorusPoint(0)
    liftTotal = Fraction(0) if hasLift else None
    for _ in range(m):
        image = skewMap(point[0] if onTorus else point)
        total = total + image
        if hasLift:
            liftTotal = liftTotal + (skewMap.value if isinstance(skewMap, Constant)
                                     else skewMap.unwrapped(point[0].value))
        point = base.step(point, 1)
    if total.radius > Fraction(1, 4):
        raise ReclabError(f'Cocycle sum enclosure of width {2 * total.radius} is uncertifiable')
    return total, liftTotal


@debugDecor
def binomPoly(tVec, n):
    """
    :param tVec: (t_1, ..., t_j)
    :param n: integer >= 0
    :return: sum_(i<j) C(n, i) t_(j-i) reduced modulo 1
    """
    j = len(tVec)
    if j == 0:
        raise ReclabError('binomPoly needs j >= 1')
    return reduceMod1(sum((math.comb(n, i) * TorusPoint(tVec[j - i - 1]).value
                           for i in range(j)), Fraction(0)))


class IteratedSkewState:
    """
    Starting point (x, t_1, ..., t_k) of an iterated identity skew
    """
    def __init__(self, x, tVec):
        self.x = x
        self.tVec = tuple(TorusPoint(t) for t in tVec)
        if len(self.tVec) == 0:
            raise ReclabError('An iterated skew state needs k >= 1')

    @property
    def k(self):
        """Number of fiber coordinates"""
        return len(self.tVec)


def iteratedTower(base, skewMap, k):
    """
    :return: the tower T_(h, Id, ..., Id) with k fibers
    """
    return SkewTower(base, skewMap, [LinearWinding(1)] * (k - 1))


def _iteratedSums(driver, k, horizon):
    """
    :param driver: h_(0,m) for m < horizon (TorusPoint)
    :param k: number of levels
    :param horizon: last index N
    :return: levels[j][n] = h_(j+1,n) for n = 0..N
    """
    levels = []
    previous = driver
    for _ in range(k):
        current = [TorusPoint(0)]
        for n in range(horizon):
            current.append(current[-1] + previous[n])
        levels.append(current)
        previous = current
    return levels


@debugDecor
def iteratedIdTrajectory(base, skewMap, state, horizon):
    """
    :param base: base system
    :param skewMap: map h from the base to T
    :param state: IteratedSkewState
    :param horizon: last time N
    :return: the list of T^n (x, t_1, ..., t_k) for n = 0..N, computed from the closed form
             p_(t_j)(n) + h_(j,n)(x)
    """
    tower = iteratedTower(base, skewMap, state.k)
    driver, basePoints = [], [state.x]
    for _ in range(horizon):
        driver.append(tower.h1At(basePoints[-1]))
        basePoints.append(base.step(basePoints[-1], 1))
    levels = _iteratedSums(driver, state.k, horizon)
    return [ProductPoint(basePoints[n],
                         [binomPoly(state.tVec[:j + 1], n) + levels[j][n]
                          for j in range(state.k)])
            for n in range(horizon + 1)]


@debugDecor
def iteratedIdClosedForm(base, skewMap, state, n):
    """
    :param base: base system
    :param skewMap: map h from the base to T
    :param state: IteratedSkewState
    :param n: time
    :return: T^n (x, t_1, ..., t_k) for the tower T_(h, Id, ..., Id)
    """
    return iteratedIdTrajectory(base, skewMap, state, n)[n]


@debugDecor
def sequenceToIteratedSkew(values, k):
    """
    Writes a torus-valued window f(0..N) as the last coordinate of an iterated
    identity skew driven by the sequence (Delta^k f)
    :param values: f(0), ..., f(N)
    :param k: number of fiber coordinates (N >= k)
    :return: dict with tVec (t_i = Delta^(k-i) f(0)), driver (Delta^k f) and the
             result of the exact reconstruction check
    """
    values = [TorusPoint(value) for value in values]
    if k < 1 or len(values) < k + 1:
        raise ReclabError('The window must contain at least k + 1 values, k >= 1')
    differences = [values]
    for _ in range(k):
        last = differences[-1]
        differences.append([last[n + 1] - last[n] for n in range(len(last) - 1)])
    tVec = [differences[k - i][0] for i in range(1, k + 1)]
    driver = differences[k]
    horizon = len(values) - 1
    padded = driver + [TorusPoint(0)] * (horizon - len(driver))
    levels = _iteratedSums(padded, k, horizon)
    rebuilt = [binomPoly(tVec, n) + levels[k - 1][n] for n in range(horizon + 1)]
    return {'tVec': tVec, 'driver': driver, 'reconstructed': rebuilt == values}


@debugDecor
def hiddenFrequencies(tower):
    """
    :param tower: SkewTower over a torus rotation
    :return: the base frequencies followed by the means of the zero-winding maps
    """
    if not isinstance(tower.base, TorusRotation):
        raise ReclabError('Hidden frequencies are defined for torus rotation bases')
    frequencies = list(tower.base.alphas)
    if tower.base.multiplier != 1:
        raise ReclabError('Hidden frequencies of a powered rotation are not supported')
    for skewMap in tower.maps:
        if skewMap.winding() == 0:
            frequencies.append(skewMap.mean())
    return frequencies


def _asList(value):
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [str(item) for item in value]
    return _splitList(str(value))


@debugDecor
def towerFromConfig(mapping):
    """
    :param mapping: key-value description with keys
                    base ('rotation' or 'odometer'), alpha (comma-separated rationals),
                    cf (comma-separated partial quotients, one rotation coordinate),
                    bases, increment, h1 and the fiber maps h2, h3, ... (or a 'fiber' list)
    :return: the SkewTower (or the base system alone when h1 is absent)
    """
    kind = mapping.get('base') or 'rotation'
    if kind == 'rotation':
        alphas = [parseRational(alpha) for alpha in _asList(mapping.get('alpha'))]
        if mapping.get('cf'):
            alphas.append(ContinuedFraction.fromJson(_asList(mapping['cf'])))
        if len(alphas) == 0:
            raise SchemaError("A rotation needs 'alpha' or 'cf'")
        base = TorusRotation(alphas)
        bases = None
    elif kind == 'odometer':
        try:
            bases = [int(b) for b in _asList(mapping.get('bases'))]
            base = Odometer(bases, int(mapping.get('increment') or 1))
        except ValueError as exc:
            raise SchemaError(f"Invalid odometer description: {mapping}") from exc
        except ReclabError as exc:
            raise SchemaError(str(exc)) from exc
    else:
        raise SchemaError(f"Unknown base kind '{kind}'")

    if not mapping.get('h1'):
        return base
    fiberTexts = [mapping[key] for key in sorted((key for key in mapping
                                                  if key[0] == 'h' and key[1:].isdigit() and
                                                  key != 'h1' and mapping[key]),
                                                 key=lambda key: int(key[1:]))]
    fiberTexts.extend(mapping.get('fiber') or [])
    try:
        tower = SkewTower(base, parseSkewMap(mapping['h1'], bases),
                          [parseSkewMap(text) for text in fiberTexts])
    except ReclabError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from exc
    logging.info('Tower loaded with %i fiber(s)', tower.depth)
    return tower
