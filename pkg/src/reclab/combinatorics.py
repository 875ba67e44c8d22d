"""
Finite combinatorial procedures around the recurrence questions: difference sets,
the two-coloring dichotomy, zero-sum and eps-sum block lengths, the 2-adic
construction phi, the doubling sequence and the colorability of the graphs G_R.

All quantifiers over N or Z are truncated to the window and every resulting set
is stamped with its horizon. Difference sets and prefix-sum scans use Python
integers as bitsets (bit j set <=> j belongs to the set).
"""

from fractions import Fraction
import csv
import logging

from reclab.util import (debugDecor, ReclabError, SchemaError, BudgetError, InvariantError,
                         parseRational)
from reclab.torus import TorusPoint, distToZero
from reclab.recurrence import WindowSet, maxGap

COVERS, PERIOD, WINDOW_ARTIFACT = 'Covers', 'Period', 'WindowArtifact'


class Coloring:
    """
    Finite coloring c: {1..N} -> {1..r}
    """
    def __init__(self, values, numColors=None):
        """
        :param values: colors of 1, 2, ..., N (integers in [1, r])
        :param numColors: r (defaults to the largest color used, at least 1)
        """
        self.values = tuple(values)
        self.numColors = max(self.values, default=1) if numColors is None else numColors
        if self.numColors < 1:
            raise SchemaError('A coloring needs at least one color')
        for value in self.values:
            if not (isinstance(value, int) and 1 <= value <= self.numColors):
                raise SchemaError(f'Color {value} is not in [1, {self.numColors}]')

    @property
    def horizon(self):
        """Window length N"""
        return len(self.values)

    def color(self, n):
        """Color of n in [1, N]"""
        return self.values[n - 1]

    def colorClass(self, color):
        """
        :param color: color in [1, r]
        :return: the WindowSet A_color
        """
        return WindowSet(self.horizon, [n for n, value in enumerate(self.values, start=1)
                                        if value == color])

    def classes(self):
        """A_1, ..., A_r"""
        return [self.colorClass(color) for color in range(1, self.numColors + 1)]

    def __repr__(self):
        return f'Coloring(r={self.numColors}, {list(self.values)})'


class CyclicSeq:
    """
    Window f(0), ..., f(N-1) of a sequence with values in Z/kZ
    """
    def __init__(self, modulus, values):
        """
        :param modulus: k >= 2
        :param values: integers, reduced modulo k
        """
        if modulus < 2:
            raise SchemaError(f'The modulus must be >= 2, got {modulus}')
        self.modulus = modulus
        self.values = tuple(value % modulus for value in values)

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return f'CyclicSeq(k={self.modulus}, {list(self.values)})'


class DichotomyVerdict:
    """
    Result of the two-coloring dichotomy on the window [1, M]
    """
    def __init__(self, kind, window, absent=None, certificate=()):
        """
        :param kind: 'Covers', 'Period' or 'WindowArtifact'
        :param window: M, the range on which the union of difference sets is examined
        :param absent: the least d absent from the union (Period and WindowArtifact)
        :param certificate: for Period, the multiples of 2d up to M (each lies in both
                            difference sets); for WindowArtifact, the multiples that do not
        """
        self.kind = kind
        self.window = window
        self.absent = absent
        self.certificate = tuple(certificate)

    @property
    def period(self):
        """2d for a Period verdict"""
        return None if self.absent is None else 2 * self.absent

    def toJson(self):
        """
        :return: JSON-ready dict
        """
        return {'kind': self.kind, 'window': self.window, 'd': self.absent,
                'period': self.period, 'certificate': list(self.certificate)}

    def __repr__(self):
        return f'DichotomyVerdict({self.kind}, d={self.absent}, M={self.window})'


################################################################################
# Difference sets


def _toBits(members):
    bits = 0
    for member in members:
        bits |= 1 << member
    return bits


def _fromBits(bits, horizon):
    return [j for j in range(1, horizon + 1) if bits >> j & 1]


def _positiveDifferences(bits):
    """
    :param bits: bitset of a finite set S of integers >= 0
    :return: bitset of { s - s' > 0 : s, s' in S }
    """
    result = 0
    work = bits
    while work:
        low = work & -work
        shift = low.bit_length() - 1
        result |= bits >> shift
        work ^= low
    return result & ~1


@debugDecor
def diffSet(window):
    """
    :param window: WindowSet A
    :return: { a - a' > 0 : a, a' in A } with the horizon of A
    """
    return WindowSet(window.horizon,
                     _fromBits(_positiveDifferences(_toBits(window)), window.horizon))


@debugDecor
def twoColorDichotomy(coloring):
    """
    On the window M = (N - 1) // 2: either every n <= M lies in (A_1 - A_1) u (A_2 - A_2),
    or the least absent d gives the period 2d: the multiples of 2d in [1, M] lie in both
    difference sets
    :param coloring: Coloring with r = 2
    :return: DichotomyVerdict
    """
    if coloring.numColors != 2:
        raise ReclabError(f'The dichotomy needs a 2-coloring, got r={coloring.numColors}')
    first, second = (diffSet(cls) for cls in coloring.classes())
    window = (coloring.horizon - 1) // 2
    absent = next((n for n in range(1, window + 1) if n not in first and n not in second), None)
    if absent is None:
        return DichotomyVerdict(COVERS, window)
    multiples = range(2 * absent, window + 1, 2 * absent)
    missing = [n for n in multiples if n not in first or n not in second]
    if missing:
        logging.warning('Inclusion of the multiples of %i fails on the window: %s',
                        2 * absent, missing)
        return DichotomyVerdict(WINDOW_ARTIFACT, window, absent, missing)
    return DichotomyVerdict(PERIOD, window, absent, multiples)


@debugDecor
def twoSyndeticDifferences(window, shift):
    """
    If A u (A - shift) covers [1, N - shift], colors that range by (A, complement) and
    applies the dichotomy; the complement shifted by +shift lies in A, so both difference
    sets are contained in A - A
    :param window: WindowSet A
    :param shift: the translate ell >= 1
    :return: dict with d (the multiples of d in [1, M] lie in A - A), the verdict and the check
    """
    if shift < 1:
        raise ReclabError('The shift must be positive')
    span = window.horizon - shift
    uncovered = [n for n in range(1, span + 1) if n not in window and n + shift not in window]
    if uncovered:
        raise ReclabError(f'A u (A - {shift}) misses {uncovered[:10]} on the window')
    coloring = Coloring([1 if n in window else 2 for n in range(1, span + 1)], numColors=2)
    verdict = twoColorDichotomy(coloring)
    step = 1 if verdict.kind == COVERS else verdict.period
    differences = diffSet(window)
    verified = all(n in differences for n in range(step, verdict.window + 1, step))
    if not verified:
        raise InvariantError(f'Multiples of {step} up to {verdict.window} are not all in A - A')
    return {'d': step, 'window': verdict.window, 'verdict': verdict.toJson(), 'verified': verified}


################################################################################
# Block sums


@debugDecor
def zeroSumLengths(sequence):
    """
    :param sequence: CyclicSeq f(0..N-1)
    :return: { m <= N : f(n) + ... + f(n+m-1) = 0 mod k for some block inside the window }
    """
    horizon = len(sequence)
    positions = {}
    prefix = 0
    for index in range(horizon + 1):
        positions[prefix] = positions.get(prefix, 0) | (1 << index)
        if index < horizon:
            prefix = (prefix + sequence.values[index]) % sequence.modulus
    # g(n) = g(n + m) on the prefix sums of one residue class
    bits = 0
    for classBits in positions.values():
        bits |= _positiveDifferences(classBits)
    return WindowSet(horizon, _fromBits(bits, horizon))


@debugDecor
def epsSumLengths(values, eps):
    """
    :param values: torus values f(0..N-1) (exact rationals)
    :param eps: positive rational
    :return: { m <= N : ||f(n) + ... + f(n+m-1)|| < eps for some block inside the window }
    """
    eps = Fraction(eps)
    prefixes = [Fraction(0)]
    for value in values:
        prefixes.append(TorusPoint(prefixes[-1] + Fraction(value)).value)
    horizon = len(values)
    members = []
    for m in range(1, horizon + 1):
        if any(distToZero(prefixes[n + m] - prefixes[n]) < eps for n in range(horizon - m + 1)):
            members.append(m)
    return WindowSet(horizon, members)


@debugDecor
def sequenceReturnSet(values, eps):
    """
    :param values: torus values f(0..N)
    :param eps: positive rational
    :return: { m <= N : min_n ||f(n + m) - f(n)|| < eps } (window-truncated)
    """
    eps = Fraction(eps)
    points = [TorusPoint(value) for value in values]
    horizon = len(points) - 1
    members = [m for m in range(1, horizon + 1)
               if any(distToZero(points[n + m] - points[n]) < eps
                      for n in range(horizon - m + 1))]
    return WindowSet(horizon, members, 'window-truncated')


################################################################################
# 2-adic construction and doubling


def phiBinary(n):
    """
    :param n: nonnegative integer
    :return: sum of d_i(n) 2^(-i) over the binary digits d_i(n) of n
    """
    if n < 0:
        raise ReclabError('phi is defined on nonnegative integers')
    total = Fraction(0)
    index = 0
    while n:
        if n & 1:
            total += Fraction(1, 2 ** index)
        n >>= 1
        index += 1
    return total


@debugDecor
def example48Window(eps, horizon):
    """
    :param eps: rational in (0, 1/2)
    :param horizon: N
    :return: (A, maxGap(A), diffSet(A)) with A = { n <= N : ||phi(1) + ... + phi(n)|| < eps }
    """
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise SchemaError(f'eps={eps} is not in (0, 1/2)')
    # phi(j) 2^B is an integer for j < 2^B
    scale = 2 ** max(horizon.bit_length(), 1)
    total = 0
    members = []
    for n in range(1, horizon + 1):
        digits, index = n, 0
        while digits:
            if digits & 1:
                total += scale >> index
            digits >>= 1
            index += 1
        total %= scale
        if min(total, scale - total) < eps * scale:
            members.append(n)
    window = WindowSet(horizon, members)
    return window, maxGap(window), diffSet(window)


def _multiplicativeOrder(base, modulus):
    if modulus == 1:
        return 1
    order, value = 1, base % modulus
    while value != 1:
        value = value * base % modulus
        order += 1
    return order


@debugDecor
def doublingOrbitSet(alpha, eps, horizon):
    """
    :param alpha: rational
    :param eps: positive rational
    :param horizon: N
    :return: { m <= N : min_n ||2^(n+m) alpha - 2^n alpha|| < eps }, the minimum over n
             being taken on the preperiod and one period of the orbit
    """
    alpha, eps = TorusPoint(parseRational(alpha)).value, Fraction(eps)
    num, den = alpha.numerator, alpha.denominator
    odd, preperiod = den, 0
    while odd % 2 == 0:
        odd //= 2
        preperiod += 1
    period = _multiplicativeOrder(2, odd)
    orbit = [num * pow(2, n, den) % den for n in range(preperiod + period)]
    threshold = eps * den
    members = []
    for m in range(1, horizon + 1):
        factor = pow(2, m, den) - 1
        for value in orbit:
            rem = value * factor % den
            if min(rem, den - rem) < threshold:
                members.append(m)
                break
    return WindowSet(horizon, members)


@debugDecor
def doublingAlphaFromColoring(coloring, k):
    """
    :param coloring: Coloring with r colors
    :param k: digit block size with 2^k > 2r
    :return: alpha = sum_n 2 c(n) / 2^(k n)
    """
    if 2 ** k <= 2 * coloring.numColors:
        raise ReclabError(f'2^{k} must exceed 2r = {2 * coloring.numColors}')
    return sum((Fraction(2 * coloring.color(n), 2 ** (k * n))
                for n in range(1, coloring.horizon + 1)), Fraction(0))


@debugDecor
def cyclicSeqFromColoring(coloring):
    """
    :param coloring: Coloring with r colors
    :return: CyclicSeq f(n) = c(n + 2) - c(n + 1) mod 2r + 1, n = 0..N-2; its zero-sum
             lengths are exactly the union of the (A_i - A_i)
    """
    values = [coloring.color(n + 1) - coloring.color(n) for n in range(1, coloring.horizon)]
    return CyclicSeq(2 * coloring.numColors + 1, values)


################################################################################
# Colorability of G_R


class ColorabilityResult:
    """
    Outcome of the search: a proper coloring, or the exhaustion of the search tree
    """
    def __init__(self, colorable, coloring, nodes):
        """
        :param colorable: bool
        :param coloring: Coloring or None
        :param nodes: number of color assignments explored
        """
        self.colorable = colorable
        self.coloring = coloring
        self.nodes = nodes

    def toJson(self):
        """
        :return: JSON-ready dict
        """
        return {'colorable': self.colorable, 'nodes': self.nodes,
                'coloring': None if self.coloring is None else list(self.coloring.values),
                'certificate': None if self.colorable else 'exhausted'}


def isProperColoring(distances, coloring):
    """
    :param distances: iterable of forbidden differences R
    :param coloring: Coloring
    :return: True if c(n) != c(n + d) whenever both ends lie in the window
    """
    horizon = coloring.horizon
    return all(coloring.color(n) != coloring.color(n + d)
               for d in distances for n in range(1, horizon - d + 1))


@debugDecor
def grColorability(distances, horizon, numColors, budget=10 ** 6):
    """
    Backtracking with forward checking: vertices in increasing order, colors in increasing
    order, a new color opened only after the previous ones (symmetry breaking)
    :param distances: WindowSet or iterable R of forbidden differences
    :param horizon: N (vertices 1..N)
    :param numColors: r
    :param budget: maximal number of assignments
    :return: ColorabilityResult
    """
    if numColors < 1:
        raise SchemaError('The number of colors must be positive')
    distances = sorted({d for d in distances if 1 <= d < horizon})
    forward = [[v + d for d in distances if v + d <= horizon] for v in range(horizon + 1)]
    full = (1 << numColors) - 1
    domains = [full] * (horizon + 2)
    colors = [0] * (horizon + 2)
    maxUsed = [0] * (horizon + 2)
    trail = [[] for _ in range(horizon + 2)]
    nodes = 0
    vertex = 1
    while 1 <= vertex <= horizon:
        for other, domain in trail[vertex]:
            domains[other] = domain
        trail[vertex] = []
        limit = min(numColors, maxUsed[vertex] + 1)
        color = colors[vertex] + 1
        while color <= limit and not domains[vertex] >> (color - 1) & 1:
            color += 1
        if color > limit:
            colors[vertex] = 0
            vertex -= 1
            continue
        nodes += 1
        if nodes > budget:
            raise BudgetError(f'Colorability search exceeded {budget} assignments')
        colors[vertex] = color
        bit = 1 << (color - 1)
        wipeout = False
        for other in forward[vertex]:
            if domains[other] & bit:
                trail[vertex].append((other, domains[other]))
                domains[other] &= ~bit
                if domains[other] == 0:
                    wipeout = True
                    break
        if not wipeout:
            maxUsed[vertex + 1] = max(maxUsed[vertex], color)
            vertex += 1
    if vertex == 0:
        logging.info('No proper %i-coloring of [1, %i] (%i assignments)', numColors, horizon, nodes)
        return ColorabilityResult(False, None, nodes)
    return ColorabilityResult(True, Coloring(colors[1:horizon + 1], numColors), nodes)


@debugDecor
def chromaticNumber(distances, horizon, budget=10 ** 6):
    """
    :return: (least r such that G_R restricted to [1, N] is r-colorable, ColorabilityResult)
    """
    distances = list(distances)
    for numColors in range(1, max(horizon, 1) + 1):
        result = grColorability(distances, horizon, numColors, budget)
        if result.colorable:
            return numColors, result
    raise InvariantError(f'No coloring found with {horizon} colors')


################################################################################
# CSV loaders


def _readPairs(filename):
    try:
        with open(filename, newline='', encoding='utf-8') as stream:
            rows = [row for row in csv.reader(stream) if row and not row[0].startswith('#')]
    except OSError as exc:
        raise SchemaError(f'Cannot read {filename}: {exc}') from exc
    if rows and not rows[0][0].strip().lstrip('-').isdigit():
        rows = rows[1:]  # header
    try:
        pairs = sorted((int(index), int(value)) for index, value in rows)
    except ValueError as exc:
        raise SchemaError(f'{filename} must contain (index, value) integer pairs') from exc
    return pairs


@debugDecor
def loadColoringCsv(filename, numColors=None):
    """
    :param filename: CSV file of (n, color) rows for n = 1..N
    :return: Coloring
    """
    pairs = _readPairs(filename)
    if [index for index, _ in pairs] != list(range(1, len(pairs) + 1)):
        raise SchemaError(f'{filename}: indexes must be 1..N')
    return Coloring([value for _, value in pairs], numColors)


@debugDecor
def loadCyclicSeqCsv(filename, modulus):
    """
    :param filename: CSV file of (n, value) rows for n = 0..N-1
    :return: CyclicSeq
    """
    pairs = _readPairs(filename)
    if [index for index, _ in pairs] != list(range(len(pairs))):
        raise SchemaError(f'{filename}: indexes must be 0..N-1')
    return CyclicSeq(modulus, [value for _, value in pairs])

