"""
Explicit counterexample pipeline: a rotation by alpha (continued fraction with
fast-growing partial quotients) extended by the skewing function
h = H + beta, where H is the zero-mean polynomial lift

    H(x) = x^4 - 2x^3 + x^2 - 1/30.

Along the convergent denominators m = q_i, the m-step sums of H are uniformly
small (Riemann-sum closed form plus a rearrangement bound), while ||m beta|| > 1/3;
hence ||H_m(x) + m beta|| > 1/6 for every x. The chain of inequalities is
certified with exact rational arithmetic and written as a transcript.
"""

from fractions import Fraction
from multiprocessing import Pool
import logging
import math
import random

from reclab.util import (debugDecor, ReclabError, SchemaError, InvariantError,
                         formatRational, parseRational)
from reclab.torus import distToZero
from reclab.cfrac import ContinuedFraction, approxWithError, buildTheoremBQuotients
from reclab.dynsys import PolyLift, Constant, Sum, SkewTower, TorusRotation, lipschitzBound

HTILDE = PolyLift([Fraction(-1, 30), 0, 1, -2, 1])
THIRD = Fraction(1, 3)
SIXTH = Fraction(1, 6)
TWELFTH = Fraction(1, 12)
DEFAULT_DELTA = Fraction(1, 145)


@debugDecor
def hEval(x):
    """
    :param x: rational in [0, 1]
    :return: H(x) exactly
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ReclabError(f'{x} is not in [0, 1]')
    return HTILDE.evaluate(x)


def _checkRiemannArgs(n, x):
    if n < 1:
        raise ReclabError('n must be positive')
    x = Fraction(x)
    if not 0 <= x <= Fraction(1, n):
        raise ReclabError(f'{x} is not in [0, 1/{n}]')
    return x


@debugDecor
def riemannClosedForm(n, x):
    """
    :param n: integer >= 1
    :param x: rational in [0, 1/n]
    :return: sum_(i<n) H(x + i/n) through n x^4 - 2x^3 + x^2/n - 1/(30 n^3)
    """
    x = _checkRiemannArgs(n, x)
    return n * x ** 4 - 2 * x ** 3 + x ** 2 / n - Fraction(1, 30 * n ** 3)


@debugDecor
def riemannDirectSum(n, x):
    """
    :param n: integer >= 1
    :param x: rational
    :return: sum_(i<n) H({x + i/n}) by direct summation
    """
    if n < 1:
        raise ReclabError('n must be positive')
    x = Fraction(x)
    return sum((HTILDE.unwrapped(x + Fraction(i, n)) for i in range(n)), Fraction(0))


@debugDecor
def riemannIsPeriodic(n, x):
    """
    :return: True if the n-term Riemann sum is unchanged by x -> x + 1/n
    """
    return riemannDirectSum(n, x) == riemannDirectSum(n, Fraction(x) + Fraction(1, n))


@debugDecor
def riemannBound(n):
    """
    :param n: integer >= 4
    :return: 121/(30 n^3), a bound of |sum_(i<n) H(x + i/n)| valid for all x
    """
    if n < 4:
        raise ReclabError(f'The Riemann-sum bound needs n >= 4, got {n}')
    bound = Fraction(121, 30 * n ** 3)
    if not bound < TWELFTH:
        raise InvariantError(f'121/(30 n^3) = {bound} is not below 1/12')
    return bound


@debugDecor
def selectBeta(nList, threshold=THIRD, denominatorCap=64, modulus=None):
    """
    Exhaustive search of a rational beta = a/d (d <= cap, gcd(a, d) = 1) maximizing
    the number of n in nList with ||n beta|| > threshold
    :param nList: nonempty list of positive integers
    :param threshold: rational threshold
    :param denominatorCap: largest denominator tried
    :param modulus: if given, denominators must be coprime to it
    :return: (beta, indices of nList satisfied by beta); ties keep the first beta found
             (denominators then numerators in increasing order)
    """
    nList = list(nList)
    if len(nList) == 0:
        raise ReclabError('selectBeta needs a nonempty list')
    threshold = Fraction(threshold)
    best, bestIndices = None, []
    for den in range(2, denominatorCap + 1):
        if modulus is not None and math.gcd(den, modulus) != 1:
            continue
        for num in range(1, den):
            if math.gcd(num, den) != 1:
                continue
            beta = Fraction(num, den)
            indices = [i for i, n in enumerate(nList) if distToZero(n * beta) > threshold]
            if len(indices) > len(bestIndices):
                best, bestIndices = beta, indices
                if len(indices) == len(nList):
                    return best, bestIndices
    if best is None:
        raise ReclabError(f'No beta with denominator <= {denominatorCap} satisfies any index')
    logging.info('beta=%s satisfies %i of %i indices', best, len(bestIndices), len(nList))
    return best, bestIndices


class TheoremBConfig:
    """
    Parameters of the counterexample: alpha, beta, delta, the Lipschitz bound L of H
    and the selected convergent indices
    """
    def __init__(self, alpha, beta, delta=DEFAULT_DELTA, lipschitz=None, selectedIndices=()):
        """
        :param alpha: ContinuedFraction
        :param beta: rational
        :param delta: rational with 0 < delta < 1/(12 L)
        :param lipschitz: Lipschitz bound of H (defaults to the coefficient-sum bound 12)
        :param selectedIndices: convergent indices i whose q_i form the recurrence set
        """
        if not isinstance(alpha, ContinuedFraction):
            raise SchemaError('alpha must be given by its continued fraction')
        self.alpha = alpha
        self.beta = Fraction(beta)
        self.delta = Fraction(delta)
        self.lipschitz = lipschitzBound(HTILDE) if lipschitz is None else Fraction(lipschitz)
        self.selectedIndices = list(selectedIndices)
        if not 0 < self.delta < 1 / (12 * self.lipschitz):
            raise SchemaError(f'delta={self.delta} does not satisfy 0 < delta < 1/(12 L)')

    def skewMap(self):
        """
        :return: h = H + beta
        """
        return Sum([HTILDE, Constant(self.beta)])

    def tower(self):
        """
        :return: the skew product over the rotation by alpha
        """
        return SkewTower(TorusRotation([self.alpha]), self.skewMap())

    def toJson(self):
        """
        :return: JSON-ready dict
        """
        return {'alpha': self.alpha.toJson(), 'beta': formatRational(self.beta),
                'delta': formatRational(self.delta), 'L': formatRational(self.lipschitz),
                'selectedIndices': self.selectedIndices,
                'm': [self.alpha.q(i) for i in self.selectedIndices]}


@debugDecor
def buildTheoremBConfig(depth=3, a1=3, delta=DEFAULT_DELTA, lipschitz=None,
                        denominatorCap=64, threshold=THIRD):
    """
    Builds the growth schedule, selects beta over the candidate denominators q_i and keeps
    the indices for which both ||q_i beta|| > threshold and q_i ||q_i alpha|| < delta hold
    :return: TheoremBConfig
    """
    alpha = buildTheoremBQuotients(depth, a1)
    delta = Fraction(delta)
    candidates = list(range(1, alpha.depth))
    beta, satisfied = selectBeta([alpha.q(i) for i in candidates], threshold, denominatorCap)
    selected = []
    for position in satisfied:
        i = candidates[position]
        error = approxWithError(alpha, i)[1]
        if alpha.q(i) * alpha.q(i) * error < delta:
            selected.append(i)
    logging.info('Selected indices %s with beta=%s', selected, beta)
    return TheoremBConfig(alpha, beta, delta, lipschitz, selected)


class CertifiedMargin:
    """
    Result of the certification at one index
    """
    def __init__(self, m, transcript, supBoundOnHm=None, betaNormLower=None):
        self.m = m
        self.transcript = transcript
        self.supBoundOnHm = supBoundOnHm
        self.betaNormLower = betaNormLower

    @property
    def failedLink(self):
        """Name of the first failing link (None on success)"""
        for record in self.transcript:
            if not record['holds']:
                return record['link']
        return None

    @property
    def holds(self):
        """True if every link holds"""
        return self.failedLink is None

    @property
    def margin(self):
        """||m beta|| minus the sup bound of |H_m|"""
        if self.supBoundOnHm is None or self.betaNormLower is None:
            return None
        return self.betaNormLower - self.supBoundOnHm

    def toJson(self):
        """
        :return: JSON-ready dict
        """
        def fmt(value):
            return None if value is None else formatRational(value)
        return {'m': self.m, 'holds': self.holds, 'failedLink': self.failedLink,
                'supBoundOnHm': fmt(self.supBoundOnHm), 'betaNormLower': fmt(self.betaNormLower),
                'margin': fmt(self.margin), 'transcript': self.transcript}


_RELATIONS = {
    '<': lambda lhs, rhs: lhs < rhs,
    '<=': lambda lhs, rhs: lhs <= rhs,
    '==': lambda lhs, rhs: lhs == rhs,
    '>': lambda lhs, rhs: lhs > rhs,
    '>=': lambda lhs, rhs: lhs >= rhs,
}


def _link(transcript, name, lhs, relation, rhs):
    holds = _RELATIONS[relation](Fraction(lhs), Fraction(rhs))
    transcript.append({'link': name, 'lhs': formatRational(lhs), 'rhs': formatRational(rhs),
                       'relation': relation, 'holds': holds})
    if not holds:
        logging.warning('Link %s fails: %s %s %s is false', name, lhs, relation, rhs)
    return holds


@debugDecor
def certifyGap(config, index):
    """
    Runs the exact inequality chain at m = q_index; the chain stops at the first failing link
    :param config: TheoremBConfig
    :param index: convergent index i
    :return: CertifiedMargin (its transcript holds one record per link)
    """
    alpha, delta, lipschitz = config.alpha, config.delta, config.lipschitz
    transcript = []
    if not _link(transcript, 'convergentDepth', index + 1, '<=', alpha.depth) or \
       not _link(transcript, 'indexPositive', index, '>=', 1):
        return CertifiedMargin(None, transcript)
    m, k = alpha.q(index), alpha.p(index)
    error = approxWithError(alpha, index)[1]
    result = CertifiedMargin(m, transcript)

    if not _link(transcript, 'mAtLeast4', m, '>=', 4):
        return result
    # k = p_i is the nearest integer to m alpha and is coprime to m
    if not _link(transcript, 'coprime', math.gcd(k, m), '==', 1) or \
       not _link(transcript, 'nearestInteger', m * error, '<', Fraction(1, 2)):
        return result
    # |alpha - k/m| < delta/m^2
    if not _link(transcript, 'convergentError', error, '<', delta / m ** 2):
        return result
    # sigma(i) = i k mod m is a permutation of {0..m-1}
    if not _link(transcript, 'permutation', len({(i * k) % m for i in range(m)}), '==', m):
        return result
    # sum_i ||i alpha - sigma(i)/m|| <= sum_i i |alpha - k/m| <= delta
    if not _link(transcript, 'rearrangement', error * m * (m - 1) / 2, '<=', delta):
        return result
    if not _link(transcript, 'deltaBelow', delta, '<', 1 / (12 * lipschitz)):
        return result
    if not _link(transcript, 'riemannBound', riemannBound(m), '<', TWELFTH):
        return result
    supBound = lipschitz * delta + TWELFTH
    result.supBoundOnHm = supBound
    if not _link(transcript, 'supBound', supBound, '<', SIXTH):
        return result
    betaNorm = distToZero(m * config.beta)
    result.betaNormLower = betaNorm
    if not _link(transcript, 'betaNorm', betaNorm, '>', THIRD):
        return result
    _link(transcript, 'margin', betaNorm - supBound, '>', SIXTH)
    return result


@debugDecor
def verifyTranscript(transcript):
    """
    :param transcript: list of records {link, lhs, rhs, relation, holds}
    :return: True if every recorded verdict is reproduced from the serialized rationals
    """
    for record in transcript:
        try:
            recomputed = _RELATIONS[record['relation']](parseRational(record['lhs']),
                                                        parseRational(record['rhs']))
        except KeyError as exc:
            raise SchemaError(f'Malformed transcript record {record}') from exc
        if recomputed != record['holds']:
            return False
    return True


def _integerGap(args):
    """
    :param args: (x, m, alpha, beta) with exact rationals
    :return: ||H_m(x) + m beta|| computed with integer power sums
    """
    x, m, alpha, beta = args
    den = math.lcm(x.denominator, alpha.denominator)
    start = x.numerator * (den // x.denominator)
    increment = alpha.numerator * (den // alpha.denominator)
    total = 0
    for i in range(m):
        rem = (start + i * increment) % den
        total += (rem * (den - rem)) ** 2
    # H(r/D) = (r (D - r))^2 / D^4 - 1/30
    return distToZero(Fraction(total, den ** 4) - Fraction(m, 30) + m * beta)


@debugDecor
def gapAt(config, index, x):
    """
    :param config: TheoremBConfig
    :param index: convergent index i (m = q_i)
    :param x: rational point
    :return: ||H_m(x) + m beta|| where alpha is replaced by the value of its stored expansion
    """
    return _integerGap((Fraction(x), config.alpha.q(index), config.alpha.value(), config.beta))


@debugDecor
def spotCheckGap(config, index, sampleCount, seed=0, nbPar=1):
    """
    Direct summation of H_m(x) + m beta at random rationals x = r/2^32
    :param config: TheoremBConfig
    :param index: convergent index i (m = q_i)
    :param sampleCount: number of samples
    :param seed: seed of the random generator
    :param nbPar: number of processes
    :return: dict report with the sampled minimum of ||H_m(x) + m beta||
    """
    m = config.alpha.q(index)
    report = {'m': m, 'sampleCount': sampleCount, 'seed': seed,
              'minimum': None, 'argmin': None, 'exceedsSixth': None}
    if sampleCount == 0:
        return report
    generator = random.Random(seed)
    points = [Fraction(generator.randrange(2 ** 32), 2 ** 32) for _ in range(sampleCount)]
    args = [(x, m, config.alpha.value(), config.beta) for x in points]
    if nbPar > 1 and sampleCount > 1:
        logging.info('Spot check of %i samples with %i processes', sampleCount, nbPar)
        with Pool(nbPar) as pool:
            gaps = pool.map(_integerGap, args)
    else:
        gaps = [_integerGap(arg) for arg in args]
    position = min(range(sampleCount), key=lambda i: (gaps[i], i))
    report.update({'minimum': gaps[position], 'argmin': points[position],
                   'exceedsSixth': gaps[position] > SIXTH})
    return report
