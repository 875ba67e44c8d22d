"""
This module implements the arithmetic on the torus T = R/Z and on the product
spaces (base x T^k) on which the skew towers act.

A coordinate is either exact (a Fraction) or error-tracked (a Ball: exact
center and certified radius). The two metrics used everywhere are:
  - the distance to the nearest integer ||t|| on T,
  - the L1 (taxicab) metric on products, with the 2^(-j) ultrametric on an
    odometer base (j is the length of the longest common digit prefix).
"""

from fractions import Fraction
import math

from reclab.util import debugDecor, ReclabError

HALF = Fraction(1, 2)


class Ball:
    """
    Error-tracked real: the true value lies in [center - radius, center + radius]
    """
    __slots__ = ('center', 'radius')

    def __init__(self, center, radius=0):
        """
        :param center: exact center (int or Fraction)
        :param radius: nonnegative exact radius
        """
        radius = Fraction(radius)
        if radius < 0:
            raise ReclabError(f'Negative radius {radius}')
        self.center = Fraction(center)
        self.radius = radius

    @property
    def lo(self):
        """Lower end of the enclosure"""
        return self.center - self.radius

    @property
    def hi(self):
        """Upper end of the enclosure"""
        return self.center + self.radius

    @classmethod
    def fromBounds(cls, lo, hi):
        """
        :param lo, hi: exact bounds with lo <= hi
        :return: the Ball whose enclosure is [lo, hi]
        """
        lo, hi = Fraction(lo), Fraction(hi)
        assert lo <= hi, 'empty enclosure'
        return cls((lo + hi) / 2, (hi - lo) / 2)

    def contains(self, value):
        """
        :param value: exact value
        :return: True if value belongs to the enclosure
        """
        return self.lo <= value <= self.hi

    def __add__(self, other):
        if isinstance(other, Ball):
            return Ball(self.center + other.center, self.radius + other.radius)
        if isinstance(other, (int, Fraction)):
            return Ball(self.center + other, self.radius)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Ball(-self.center, self.radius)

    def __sub__(self, other):
        if isinstance(other, (Ball, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Ball(self.center * other, self.radius * abs(other))
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Ball) and \
            (self.center, self.radius) == (other.center, other.radius)

    def __hash__(self):
        return hash((self.center, self.radius))

    def __repr__(self):
        return f'Ball({self.center}, {self.radius})'


def _frac(value):
    """Fractional part of an exact value"""
    return value - math.floor(value)


def _norm(value):
    """Distance to the nearest integer of an exact value"""
    value = _frac(value)
    return min(value, 1 - value)


def _ballNorm(ball):
    """
    :param ball: Ball
    :return: Ball enclosing the set of ||v|| for v in the ball
    """
    if ball.radius >= HALF:
        return Ball.fromBounds(0, HALF)
    center = _frac(ball.center)
    lo, hi = center - ball.radius, center + ball.radius
    # lo > -1/2 and hi < 3/2, the only half-integer within reach is 1/2
    normLo = 0 if (lo <= 0 or hi >= 1) else min(_norm(lo), _norm(hi))
    normHi = HALF if lo <= HALF <= hi else max(_norm(lo), _norm(hi))
    return Ball.fromBounds(normLo, normHi)


class TorusPoint:
    """
    Element of T, the value is reduced to [0, 1)
    """
    __slots__ = ('value', )

    def __init__(self, value):
        """
        :param value: Fraction, int, Ball or TorusPoint
        """
        if isinstance(value, TorusPoint):
            value = value.value
        if isinstance(value, Ball) and value.radius > 0:
            self.value = Ball(_frac(value.center), value.radius)
        elif isinstance(value, Ball):
            self.value = _frac(value.center)
        else:
            self.value = _frac(Fraction(value))

    @property
    def exact(self):
        """True if the point is not error-tracked"""
        return not isinstance(self.value, Ball)

    @property
    def center(self):
        """Exact representative (the center for an error-tracked point)"""
        return self.value.center if isinstance(self.value, Ball) else self.value

    @property
    def radius(self):
        """Certified radius (0 for an exact point)"""
        return self.value.radius if isinstance(self.value, Ball) else Fraction(0)

    def _other(self, other):
        if isinstance(other, TorusPoint):
            return other.value
        if isinstance(other, (int, Fraction, Ball)):
            return other
        return None

    def __add__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return TorusPoint(self.value + other)

    __radd__ = __add__

    def __neg__(self):
        return TorusPoint(-self.value)

    def __sub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return TorusPoint(self.value - other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return TorusPoint(self.value * other)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TorusPoint(other)
        return isinstance(other, TorusPoint) and self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f'TorusPoint({self.value})'


@debugDecor
def reduceMod1(value):
    """
    :param value: Fraction, int or Ball
    :return: the TorusPoint congruent to value modulo 1
    """
    return TorusPoint(value)


def distToZero(point):
    """
    :param point: TorusPoint (or a value reduced on the fly)
    :return: ||point||, a Fraction in [0, 1/2] or a Ball for an error-tracked point
    """
    value = point.value if isinstance(point, TorusPoint) else point
    if isinstance(value, Ball):
        return _ballNorm(value)
    return _norm(Fraction(value))


################################################################################
# Odometer


def odometerBase(bases, index):
    """
    :param bases: declared bases b_1, b_2, ... of the odometer
    :param index: digit index (0-based)
    :return: the base of the digit, the last declared base is repeated beyond the list
    """
    return bases[index] if index < len(bases) else bases[-1]


def integerDigits(bases, number):
    """
    :param bases: odometer bases
    :param number: nonnegative integer
    :return: mixed-radix digits of number (least significant first, no trailing zeros)
    """
    if number < 0:
        raise ReclabError('Odometer translations must be nonnegative')
    digits = []
    index = 0
    while number:
        number, digit = divmod(number, odometerBase(bases, index))
        digits.append(digit)
        index += 1
    return tuple(digits)


class OdometerPoint:
    """
    Point of an odometer, finitely supported digit sequence (trailing zeros are implicit)
    """
    __slots__ = ('bases', 'digits')

    def __init__(self, bases, digits=()):
        """
        :param bases: tuple of odometer bases (each >= 2)
        :param digits: digits, least significant first
        """
        self.bases = tuple(bases)
        if len(self.bases) == 0 or any(base < 2 for base in self.bases):
            raise ReclabError(f'Odometer bases must be >= 2, got {self.bases}')
        digits = list(digits)
        for index, digit in enumerate(digits):
            if not 0 <= digit < odometerBase(self.bases, index):
                raise ReclabError(f'Digit {digit} out of range at index {index}')
        while digits and digits[-1] == 0:
            digits.pop()
        self.digits = tuple(digits)

    def digit(self, index):
        """
        :param index: digit index
        :return: the digit (0 beyond the support)
        """
        return self.digits[index] if index < len(self.digits) else 0

    def prefix(self, depth):
        """
        :param depth: prefix length
        :return: tuple of the first depth digits
        """
        return tuple(self.digit(index) for index in range(depth))

    def __add__(self, number):
        """
        Adds a nonnegative integer with carry
        """
        if not isinstance(number, int):
            return NotImplemented
        if number < 0:
            raise ReclabError('Odometer translations must be nonnegative')
        digits = list(self.digits)
        index, carry = 0, number
        while carry:
            base = odometerBase(self.bases, index)
            if index == len(digits):
                digits.append(0)
            carry, digits[index] = divmod(digits[index] + carry, base)
            index += 1
        return OdometerPoint(self.bases, digits)

    def __eq__(self, other):
        return isinstance(other, OdometerPoint) and \
            (self.bases, self.digits) == (other.bases, other.digits)

    def __hash__(self):
        return hash((self.bases, self.digits))

    def __repr__(self):
        return f'OdometerPoint({self.digits})'


def odometerDist(first, second):
    """
    :param first, second: OdometerPoint with the same bases
    :return: 2^(-j) with j the length of the longest common prefix (0 if equal)
    """
    if first.bases != second.bases:
        raise ReclabError('Odometer points with different bases')
    if first == second:
        return Fraction(0)
    index = 0
    while first.digit(index) == second.digit(index):
        index += 1
    return Fraction(1, 2 ** index)

################################################################################
# Products


class ProductPoint:
    """
    Point of (base x T^k): base is a tuple of TorusPoint or an OdometerPoint,
    fibers is a tuple of TorusPoint (t_1, ..., t_k)
    """
    __slots__ = ('base', 'fibers')

    def __init__(self, base, fibers=()):
        if isinstance(base, OdometerPoint):
            self.base = base
        else:
            self.base = tuple(TorusPoint(coord) for coord in base)
            if len(self.base) == 0:
                raise ReclabError('A torus base point needs at least one coordinate')
        self.fibers = tuple(TorusPoint(fiber) for fiber in fibers)

    @property
    def shape(self):
        """
        :return: (base kind, base dimension or bases, number of fibers)
        """
        if isinstance(self.base, OdometerPoint):
            return ('odometer', self.base.bases, len(self.fibers))
        return ('torus', len(self.base), len(self.fibers))

    def __eq__(self, other):
        return isinstance(other, ProductPoint) and \
            (self.base, self.fibers) == (other.base, other.fibers)

    def __hash__(self):
        return hash((self.base, self.fibers))

    def __repr__(self):
        return f'ProductPoint({self.base}, {self.fibers})'


@debugDecor
def baseDist(first, second):
    """
    :param first, second: base points (tuples of TorusPoint or OdometerPoint)
    :return: the base metric (L1 over torus coordinates, or the odometer ultrametric)
    """
    if isinstance(first, OdometerPoint) and isinstance(second, OdometerPoint):
        return odometerDist(first, second)
    if isinstance(first, OdometerPoint) or isinstance(second, OdometerPoint) or \
       len(first) != len(second):
        raise ReclabError('Shape mismatch between base points')
    return sum((distToZero(TorusPoint(a) - TorusPoint(b)) for a, b in zip(first, second)),
               Fraction(0))


@debugDecor
def l1Dist(first, second):
    """
    :param first, second: ProductPoint of identical shape
    :return: base metric plus the sum of ||a_i - b_i|| over the fibers
    """
    if first.shape != second.shape:
        raise ReclabError(f'Shape mismatch: {first.shape} vs {second.shape}')
    return baseDist(first.base, second.base) + \
        sum((distToZero(a - b) for a, b in zip(first.fibers, second.fibers)), Fraction(0))
