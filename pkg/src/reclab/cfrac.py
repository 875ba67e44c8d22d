"""
Continued fractions: convergents, certified evaluation of ||n alpha|| and the
growth schedules used by the counterexample construction.

A ContinuedFraction stores the known prefix a_1, ..., a_J of the expansion
alpha = [0; a_1, a_2, ...]. The number alpha itself is never materialized:
consumers receive a convergent together with its certified error bound.

Convergents are indexed from 0: (p_0, q_0) = (0, 1), q_1 = a_1 and
q_i = a_i q_(i-1) + q_(i-2).
"""

from fractions import Fraction
import logging

from reclab.util import debugDecor, ReclabError, SchemaError
from reclab.torus import Ball, distToZero


@debugDecor
def convergents(quotients):
    """
    :param quotients: partial quotients a_1, ..., a_J (positive integers)
    :return: the J + 1 convergents (p_0, q_0), ..., (p_J, q_J)
    """
    quotients = list(quotients)
    if len(quotients) == 0:
        raise ReclabError('A continued fraction needs at least one partial quotient')
    if any((not isinstance(a, int)) or a < 1 for a in quotients):
        raise ReclabError(f'Partial quotients must be positive integers, got {quotients}')
    pPrev, qPrev = 1, 0  # (p_-1, q_-1)
    p, q = 0, 1
    result = [(p, q)]
    for a in quotients:
        p, pPrev = a * p + pPrev, p
        q, qPrev = a * q + qPrev, q
        result.append((p, q))
    return result


class ContinuedFraction:
    """
    Known prefix of the continued fraction expansion of alpha in (0, 1)
    """

    def __init__(self, partialQuotients, smoothnessOrder=None):
        """
        :param partialQuotients: a_1, ..., a_J
        :param smoothnessOrder: optional integer K recorded with the growth schedule
        """
        self.partialQuotients = tuple(partialQuotients)
        self.convergents = convergents(self.partialQuotients)
        self.smoothnessOrder = smoothnessOrder

    @property
    def depth(self):
        """Number J of known partial quotients"""
        return len(self.partialQuotients)

    def q(self, index):
        """Denominator q_index"""
        return self.convergents[index][1]

    def p(self, index):
        """Numerator p_index"""
        return self.convergents[index][0]

    def value(self):
        """
        :return: exact value of the stored finite expansion, p_J/q_J
        """
        p, q = self.convergents[-1]
        return Fraction(p, q)

    def alphaBall(self, index=None):
        """
        :param index: convergent index J (defaults to the deepest certified one)
        :return: Ball(p_J/q_J, 1/(q_J q_(J+1))) enclosing alpha
        """
        approx, error = approxWithError(self, self.depth - 1 if index is None else index)
        return Ball(approx, error)

    def toJson(self):
        """
        :return: list of decimal strings
        """
        return [str(a) for a in self.partialQuotients]

    @classmethod
    def fromJson(cls, data, smoothnessOrder=None):
        """
        :param data: list of decimal strings (or integers)
        :return: a ContinuedFraction, convergents are recomputed
        """
        try:
            return cls([int(a) for a in data], smoothnessOrder=smoothnessOrder)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f'Invalid partial quotients: {data}') from exc

    def __eq__(self, other):
        return isinstance(other, ContinuedFraction) and \
            self.partialQuotients == other.partialQuotients

    def __hash__(self):
        return hash(self.partialQuotients)

    def __repr__(self):
        return f'ContinuedFraction({list(self.partialQuotients)})'


@debugDecor
def expandRational(value):
    """
    :param value: rational in (0, 1)
    :return: the partial quotients of value (Euclid's algorithm)
    """
    value = Fraction(value)
    if not 0 < value < 1:
        raise ReclabError(f'{value} is not in (0, 1)')
    quotients = []
    num, den = value.numerator, value.denominator
    while num:
        a, rem = divmod(den, num)
        quotients.append(a)
        num, den = rem, num
    return quotients


@debugDecor
def approxWithError(cf, index):
    """
    :param cf: ContinuedFraction
    :param index: convergent index J, 0 <= J <= depth - 1 (q_(J+1) is needed)
    :return: (p_J/q_J, 1/(q_J q_(J+1)))

    For an alpha whose expansion continues beyond the stored prefix the
    bound is strict; it is reached when alpha equals the stored finite expansion
    and J = depth - 1.
    """
    if not 0 <= index <= cf.depth - 1:
        raise ReclabError(f'Convergent index {index} out of range [0, {cf.depth - 1}]')
    p, q = cf.convergents[index]
    return Fraction(p, q), Fraction(1, q * cf.q(index + 1))


@debugDecor
def normMultiple(alpha, n, tolerance=None):
    """
    :param alpha: Fraction or ContinuedFraction
    :param n: positive integer
    :param tolerance: maximal width of the returned enclosure (cf alpha only);
                      None to use the deepest convergent
    :return: ||n alpha|| exactly for a rational alpha, a Ball otherwise
    """
    if not isinstance(alpha, ContinuedFraction):
        return distToZero(Fraction(alpha) * n)
    if tolerance is None:
        index = alpha.depth - 1
    else:
        tolerance = Fraction(tolerance)
        index = None
        for j in range(alpha.depth):
            if 2 * n * approxWithError(alpha, j)[1] <= tolerance:
                index = j
                break
        if index is None:
            raise ReclabError(f'Not enough partial quotients to evaluate ||{n} alpha|| ' +
                              f'within {tolerance}')
    return distToZero(alpha.alphaBall(index) * n)


@debugDecor
def checkGrowth(cf, mode, smoothness=None):
    """
    :param cf: ContinuedFraction with at least 2 quotients
    :param mode: 'HL' (a_(i+1) >= q_i^(2K)) or 'ThmB' (a_(i+1) >= q_i^8)
    :param smoothness: the order K for the 'HL' mode
    :return: (dict index -> bool for i = 1..J-1, conjunction)
    """
    if cf.depth < 2:
        raise ReclabError('The growth condition needs at least 2 partial quotients')
    if mode == 'HL':
        if smoothness is None:
            raise ReclabError("The 'HL' mode needs the smoothness order K")
        exponent = 2 * smoothness
    elif mode == 'ThmB':
        exponent = 8
    else:
        raise ReclabError(f'Unknown growth mode {mode}')
    perIndex = {}
    for i in range(1, cf.depth):
        # partialQuotients[i] is a_(i+1)
        perIndex[i] = cf.partialQuotients[i] >= cf.q(i) ** exponent
    return perIndex, all(perIndex.values())


@debugDecor
def buildTheoremBQuotients(depth=3, a1=3):
    """
    Minimal growth schedule a_(i+1) = q_i^8
    :param depth: number of partial quotients (>= 2)
    :param a1: first partial quotient
    :return: the ContinuedFraction, with smoothness order 4
    """
    if depth < 2:
        raise ReclabError('The schedule needs a depth >= 2')
    if a1 < 1:
        raise ReclabError('The first partial quotient must be positive')
    quotients = [a1]
    while len(quotients) < depth:
        quotients.append(convergents(quotients)[-1][1] ** 8)
    logging.info('Growth schedule built with %i quotients', depth)
    return ContinuedFraction(quotients, smoothnessOrder=4)
