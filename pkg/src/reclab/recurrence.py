"""
Return sets, Bohr windows and the certified return-membership machinery.

Every set is a WindowSet: a finite subset of {1..N} stamped with its horizon N.
Membership of m in the eps-return set { m : inf_x d(x, T^m x) < eps } is
three-valued (In, Out, Unknown):
  - In carries a point whose return distance is verified below eps,
  - Out carries a lower bound >= eps valid for every point (grid minimum
    minus the grid spacing times a Lipschitz bound of the return distance),
  - Unknown when neither certificate is available at the given budget.
Multidimensional Bohr windows use the L1 convention sum_j ||n alpha_j|| < delta.
"""

from fractions import Fraction
from multiprocessing import Pool
import itertools
import logging
import math

from reclab.util import debugDecor, ReclabError, SchemaError, BudgetError, formatRational
from reclab.torus import Ball, TorusPoint, OdometerPoint, ProductPoint, distToZero, l1Dist
from reclab.cfrac import ContinuedFraction, normMultiple
from reclab.dynsys import (TorusRotation, Odometer, SkewTower, PoweredTower, CylinderMap,
                           towerOrbit, cocycleSum, hiddenFrequencies, mean)

IN, OUT, UNKNOWN = 'In', 'Out', 'Unknown'


class WindowSet:
    """
    Finite subset of {1..N} with its horizon N
    """
    def __init__(self, horizon, members=(), note=None):
        """
        :param horizon: N >= 0
        :param members: elements of [1, N]
        :param note: optional semantics flag (e.g. 'window-truncated')
        """
        self.horizon = horizon
        self._memberSet = frozenset(members)
        self.members = tuple(sorted(self._memberSet))
        self.note = note
        if horizon < 0:
            raise ReclabError(f'Negative horizon {horizon}')
        if self.members and (self.members[0] < 1 or self.members[-1] > horizon):
            raise ReclabError(f'Members outside [1, {horizon}]')

    def __contains__(self, value):
        return value in self._memberSet

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return isinstance(other, WindowSet) and \
            (self.horizon, self.members) == (other.horizon, other.members)

    def __hash__(self):
        return hash((self.horizon, self.members))

    def __repr__(self):
        return f'WindowSet(N={self.horizon}, {list(self.members)})'

    def toJson(self):
        """
        :return: JSON-ready dict
        """
        result = {'N': self.horizon, 'members': list(self.members)}
        if self.note is not None:
            result['note'] = self.note
        return result


class BohrSpec:
    """
    Frequencies alpha in T^d and radius delta of a Bohr window
    """
    def __init__(self, alphas, delta):
        """
        :param alphas: list of Fraction or ContinuedFraction
        :param delta: 0 < delta <= 1/2
        """
        self.alphas = tuple(alpha if isinstance(alpha, ContinuedFraction) else Fraction(alpha)
                            for alpha in alphas)
        self.delta = Fraction(delta)
        if len(self.alphas) == 0:
            raise SchemaError('A Bohr window needs at least one frequency')
        if not 0 < self.delta <= Fraction(1, 2):
            raise SchemaError(f'delta={self.delta} is not in (0, 1/2]')


class CertifiedMembership:
    """
    Three-valued verdict on the membership of m in a return set
    """
    def __init__(self, verdict, witness=None, bound=None):
        """
        :param verdict: 'In', 'Out' or 'Unknown'
        :param witness: for 'In', a point whose return distance is below eps
        :param bound: for 'In', the certified return distance of the witness;
                      for 'Out', the certified lower bound of the return distance
        """
        assert verdict in (IN, OUT, UNKNOWN)
        self.verdict = verdict
        self.witness = witness
        self.bound = bound

    def toJson(self):
        """
        :return: JSON-ready dict
        """
        return {'verdict': self.verdict,
                'bound': None if self.bound is None else formatRational(self.bound)}

    def __repr__(self):
        return f'CertifiedMembership({self.verdict}, {self.bound})'


class WindowPartition:
    """
    Partition of {1..N} into In/Out/Unknown verdicts
    """
    def __init__(self, horizon, verdicts):
        self.horizon = horizon
        self.verdicts = dict(verdicts)

    def _select(self, verdict):
        return WindowSet(self.horizon, [m for m, membership in self.verdicts.items()
                                        if membership.verdict == verdict])

    @property
    def inSet(self):
        """Certified returns"""
        return self._select(IN)

    @property
    def outSet(self):
        """Certified non-returns"""
        return self._select(OUT)

    @property
    def unknownSet(self):
        """Undecided indices"""
        return self._select(UNKNOWN)

    @property
    def maxGapIn(self):
        """Max gap of the certified returns"""
        return maxGap(self.inSet)

    def toJson(self):
        """
        :return: { "N", "in", "out", "unknown", "max_gap_in" } (max_gap_in is null if infinite)
        """
        gap = self.maxGapIn
        return {'N': self.horizon, 'in': list(self.inSet), 'out': list(self.outSet),
                'unknown': list(self.unknownSet),
                'max_gap_in': None if gap == math.inf else gap}

################################################################################
# Windows


def _lowHigh(value):
    if isinstance(value, Ball):
        return value.lo, value.hi
    return value, value


def _l1Norm(frequencies, n):
    return sum((normMultiple(alpha, n) for alpha in frequencies), Fraction(0))


def _windowOfDistances(distanceAt, threshold, horizon, note=None):
    """
    :param distanceAt: function n -> exact distance or Ball
    :return: WindowSet of the n <= horizon with distance < threshold
    """
    members = []
    for n in range(1, horizon + 1):
        lo, hi = _lowHigh(distanceAt(n))
        if hi < threshold:
            members.append(n)
        elif lo < threshold:
            raise ReclabError(f'Membership of {n} is undecidable at the available precision')
    return WindowSet(horizon, members, note)


@debugDecor
def bohrWindow(spec, horizon):
    """
    :param spec: BohrSpec
    :param horizon: N
    :return: { n <= N : sum_j ||n alpha_j|| < delta }
    """
    if all(isinstance(alpha, Fraction) for alpha in spec.alphas):
        # integer fast path over the common denominator
        common = math.lcm(*(alpha.denominator for alpha in spec.alphas))
        pairs = [(alpha.numerator * (common // alpha.denominator), common)
                 for alpha in spec.alphas]
        threshold = spec.delta * common
        members = []
        for n in range(1, horizon + 1):
            total = 0
            for num, den in pairs:
                rem = (n * num) % den
                total += min(rem, den - rem)
            if total < threshold:
                members.append(n)
        return WindowSet(horizon, members, 'l1')
    return _windowOfDistances(lambda n: _l1Norm(spec.alphas, n), spec.delta, horizon, 'l1')


@debugDecor
def scaleSet(window, m, mode):
    """
    :param window: WindowSet
    :param m: positive integer
    :param mode: 'Times' ({ m s <= N }, horizon N) or
                 'DividedBy' ({ n <= N // m : n m in S }, horizon N // m)
    """
    if m < 1:
        raise ReclabError('The scale factor must be positive')
    if mode == 'Times':
        return WindowSet(window.horizon, [m * s for s in window if m * s <= window.horizon])
    if mode == 'DividedBy':
        return WindowSet(window.horizon // m, [s // m for s in window if s % m == 0])
    raise ReclabError(f'Unknown scaling mode {mode}')


@debugDecor
def maxGap(window):
    """
    :param window: WindowSet
    :return: the largest gap between consecutive members, the gap from 0 to the
             first member included (math.inf for an empty set)
    """
    if len(window) == 0:
        return math.inf
    previous, gap = 0, 0
    for member in window:
        gap = max(gap, member - previous)
        previous = member
    return gap


@debugDecor
def equicontinuousWindow(base, eps, horizon):
    """
    :param base: TorusRotation or Odometer
    :return: { n <= N : sup_x d(x, T^n x) < eps }
    """
    return _windowOfDistances(base.returnDistance, Fraction(eps), horizon)


@debugDecor
def maxGapStabilizes(windowAt, horizon):
    """
    :param windowAt: function N -> WindowSet
    :param horizon: N
    :return: dict with the max gaps at N and 2N and whether they are equal and finite
    """
    gap = maxGap(windowAt(horizon))
    doubled = maxGap(windowAt(2 * horizon))
    return {'horizon': horizon, 'gap': gap, 'doubledGap': doubled,
            'stable': gap == doubled and gap != math.inf}

################################################################################
# Certified membership


def _decide(distance, eps, witness):
    lo, hi = _lowHigh(distance)
    if hi < eps:
        return CertifiedMembership(IN, witness, distance)
    if lo >= eps:
        return CertifiedMembership(OUT, bound=lo)
    return CertifiedMembership(UNKNOWN)


def _lipschitzOfReturn(tower, steps):
    """
    :return: Lipschitz bound (L1 in the free coordinates) of the fiber part of the
             return distance after steps iterations
    """
    onOdometer = isinstance(tower.base, Odometer)
    previous = [Fraction(0 if onOdometer else 1)] * steps
    total = Fraction(0)
    for level, skewMap in enumerate(tower.maps):
        bound = Fraction(0) if (level == 0 and onOdometer) else skewMap.lipschitzBound()
        total += bound * sum(previous, Fraction(0))
        current = [Fraction(1)]
        for i in range(steps - 1):
            current.append(current[-1] + bound * previous[i])
        previous = current
    return total


def _gridBasePoints(tower, gridSize):
    """
    :return: list of base point candidates in canonical order (odometer cylinders are exact)
    """
    base = tower.base
    if isinstance(base, Odometer):
        depth = tower.h1.depth if isinstance(tower.h1, CylinderMap) else 0
        prefixes = itertools.product(*[range(base.bases[i] if i < len(base.bases)
                                             else base.bases[-1]) for i in range(depth)])
        return [OdometerPoint(base.bases, prefix) for prefix in prefixes]
    rest = [TorusPoint(0)] * (base.dimension - 1)
    return [(TorusPoint(Fraction(a, gridSize)), *rest) for a in range(gridSize)]


@debugDecor
def returnMembership(system, m, eps, budget=64):
    """
    :param system: TorusRotation, Odometer, SkewTower or PoweredTower
    :param m: return time (>= 1)
    :param eps: positive rational
    :param budget: grid resolution g per free coordinate
    :return: CertifiedMembership
    """
    eps = Fraction(eps)
    if isinstance(system, (TorusRotation, Odometer)):
        # x-independent distance
        return _decide(system.returnDistance(m), eps, system.origin())

    if isinstance(system, PoweredTower):
        tower, steps = system.tower, m * system.exponent
    else:
        tower, steps = system, m

    basePoints = _gridBasePoints(tower, budget)
    fiberGrid = [TorusPoint(Fraction(a, budget)) for a in range(budget)]
    minLow = None
    for basePoint in basePoints:
        for fibers in itertools.product(fiberGrid, repeat=tower.depth - 1):
            point = ProductPoint(basePoint, list(fibers) + [TorusPoint(0)])
            distance = l1Dist(point, towerOrbit(tower, point, steps))
            lo, hi = _lowHigh(distance)
            if hi < eps:
                return CertifiedMembership(IN, point, distance)
            minLow = lo if minLow is None else min(minLow, lo)

    # every free coordinate lies within 1/(2 budget) of a grid point
    slack = Fraction(1, 2 * budget) * _lipschitzOfReturn(tower, steps)
    if minLow - slack >= eps:
        return CertifiedMembership(OUT, bound=minLow - slack)

    try:
        point, distance = towerWitness(tower, steps, budget)
    except BudgetError:
        logging.info('No witness found for m=%i within the budget', m)
    else:
        if _lowHigh(distance)[1] < eps:
            return CertifiedMembership(IN, point, distance)
    return CertifiedMembership(UNKNOWN)


def _rotationVerdicts(rotation, eps, horizon):
    """
    Integer scan of sum_j ||m alpha_j|| over the common denominator of the frequencies
    :return: iterator of (m, CertifiedMembership), as returnMembership decides them
    """
    frequencies = [rotation.frequency(j) for j in range(rotation.dimension)]
    common = math.lcm(*(alpha.denominator for alpha in frequencies))
    numerators = [alpha.numerator * (common // alpha.denominator) for alpha in frequencies]
    origin = rotation.origin()
    for m in range(1, horizon + 1):
        total = 0
        for num in numerators:
            rem = (m * num) % common
            total += min(rem, common - rem)
        yield m, _decide(Fraction(total, common), eps, origin)


@debugDecor
def returnWindow(system, eps, horizon, budget=64, nbPar=1):
    """
    :param system: TorusRotation, Odometer, SkewTower or PoweredTower
    :param eps: positive rational
    :param horizon: N
    :param budget: grid resolution
    :param nbPar: number of processes
    :return: WindowPartition of {1..N}
    """
    if isinstance(system, TorusRotation) and system.exact:
        return WindowPartition(horizon, _rotationVerdicts(system, Fraction(eps), horizon))
    args = [(system, m, Fraction(eps), budget) for m in range(1, horizon + 1)]
    if nbPar > 1 and horizon > 1:
        logging.info('Scanning %i return times with %i processes', horizon, nbPar)
        with Pool(nbPar) as pool:
            verdicts = pool.starmap(returnMembership, args)
    else:
        verdicts = [returnMembership(*arg) for arg in args]
    return WindowPartition(horizon, zip(range(1, horizon + 1), verdicts))


def _powerOf(system, k):
    if isinstance(system, (TorusRotation, Odometer, SkewTower, PoweredTower)):
        return system.power(k)
    raise ReclabError(f'Cannot compute the power of {system}')


@debugDecor
def powerReturnCheck(system, k, eps, horizon, budget=64, nbPar=1):
    """
    Compares the partition of T^k on {1..N//k} with the partition of T on {1..N} divided by k
    :return: dict with the verdict, the mismatches and the excluded (Unknown) indices
    """
    if k < 1:
        raise ReclabError('The power must be positive')
    partition = returnWindow(system, eps, horizon, budget, nbPar)
    powered = returnWindow(_powerOf(system, k), eps, horizon // k, budget, nbPar)
    mismatches, excluded = [], []
    for n in range(1, horizon // k + 1):
        first, second = partition.verdicts[n * k].verdict, powered.verdicts[n].verdict
        if UNKNOWN in (first, second):
            excluded.append(n)
        elif first != second:
            mismatches.append(n)
    inDivided = scaleSet(partition.inSet, k, 'DividedBy')
    outDivided = scaleSet(partition.outSet, k, 'DividedBy')
    decided = set(range(1, horizon // k + 1)) - set(excluded)
    return {'k': k, 'passes': len(mismatches) == 0,
            'mismatches': mismatches, 'unknownExcluded': excluded,
            'inEqual': set(powered.inSet) & decided == set(inDivided) & decided,
            'outEqual': set(powered.outSet) & decided == set(outDivided) & decided}

################################################################################
# Sequences


@debugDecor
def almostPeriods(values, eps, mode='torus'):
    """
    :param values: f(0), ..., f(N) (TorusPoint-compatible values, or reals in 'real' mode)
    :param eps: positive rational
    :param mode: 'torus' or 'real'
    :return: { m <= N/2 : max_(n <= N - m) d(f(n + m), f(n)) < eps }, flagged window-truncated
    """
    if mode not in ('torus', 'real'):
        raise ReclabError(f'Unknown mode {mode}')
    horizon = len(values) - 1
    if horizon < 2:
        raise ReclabError('The window must contain at least 3 values')
    eps = Fraction(eps)
    if mode == 'torus':
        points = [TorusPoint(value) for value in values]

        def dist(a, b):
            return distToZero(points[a] - points[b])
    else:
        def dist(a, b):
            return abs(values[a] - values[b])
    members = [m for m in range(1, horizon // 2 + 1)
               if all(_lowHigh(dist(n + m, n))[1] < eps for n in range(horizon - m + 1))]
    return WindowSet(horizon // 2, members, 'window-truncated')


@debugDecor
def prop32Witness(values, m, beta, eps):
    """
    :param values: real-valued window f(0), f(1), ...
    :param m: block length (<= window length)
    :param beta: target mean
    :param eps: positive rational
    :return: the least n with |f(n) + ... + f(n + m - 1) - m beta| < eps, or None
    """
    if not 1 <= m <= len(values):
        raise ReclabError(f'Block length {m} is not in [1, {len(values)}]')
    target = m * Fraction(beta)
    total = sum(values[:m], Fraction(0))
    for n in range(len(values) - m + 1):
        if n > 0:
            total += values[n + m - 1] - values[n - 1]
        gap = total - target
        if _lowHigh(_absBall(gap) if isinstance(gap, Ball) else abs(gap))[1] < eps:
            return n
    return None


@debugDecor
def prop32Check(values, period, eps, beta=None, skewMap=None):
    """
    For a periodic real-valued window f(n) = H(x0 + n alpha), every eps/2-almost period m
    admits a block of length m whose sum is eps-close to m beta
    :param values: f(0), ..., f(N) with f(n + period) = f(n) and N >= 2 period
    :param period: the period of f
    :param eps: positive rational
    :param beta: target mean; defaults to the mean of skewMap, else to the mean over one period
    :param skewMap: the zero-winding map H the observable is sampled from
    :return: dict with the mean, the almost periods, the witnesses and the missing m
    """
    if period < 1 or len(values) < 2 * period + 1:
        raise ReclabError('The window must cover two periods')
    eps = Fraction(eps)
    if beta is not None:
        beta = Fraction(beta)
    elif skewMap is not None:
        beta = mean(skewMap)
    else:
        beta = sum(values[:period], Fraction(0)) / period
    window = almostPeriods(values, eps / 2, mode='real')
    witnesses, missing = {}, []
    for m in window:
        n = prop32Witness(values, m, beta, eps)
        if n is None:
            missing.append(m)
        else:
            witnesses[m] = n
    if missing:
        logging.warning('No block witness for %s', missing)
    return {'beta': beta, 'almostPeriods': window, 'witnesses': witnesses,
            'missing': missing, 'holds': len(missing) == 0}


def _absBall(ball):
    lo, hi = ball.lo, ball.hi
    if lo >= 0:
        return ball
    if hi <= 0:
        return -ball
    return Ball.fromBounds(0, max(-lo, hi))

################################################################################
# Witness search along the towers


def _sign(value):
    lo, hi = _lowHigh(value)
    if lo > 0:
        return 1
    if hi < 0:
        return -1
    return 0


def _bisect(levelSum, lo, hi, signLo, tolerance):
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        sign = _sign(levelSum(mid))
        if sign == 0:
            return mid
        if sign == signLo:
            lo = mid
        else:
            hi = mid
    return lo


def _solveLevel(levelSum, windingTotal, target, budget, tolerance):
    """
    :param levelSum: u -> G(u) - target is computed by the caller through target
    :return: u in [0, 1) with G(u) = target modulo 1 (up to tolerance)
    """
    if windingTotal != 0:
        start = levelSum(Fraction(0))
        center = start.center if isinstance(start, Ball) else start
        integer = math.ceil(center) if windingTotal > 0 else math.floor(center)

        def shifted(u):
            return levelSum(u) - integer
        signLo = _sign(shifted(Fraction(0)))
        if signLo == 0:
            return Fraction(0)
        return _bisect(shifted, Fraction(0), Fraction(1), signLo, tolerance)

    def centered(u):
        return levelSum(u) - target
    gridSize = 8
    while True:
        signs = [_sign(centered(Fraction(a, gridSize))) for a in range(gridSize)]
        for a, sign in enumerate(signs):
            if sign == 0:
                return Fraction(a, gridSize)
        for a in range(gridSize):
            if signs[a] != signs[(a + 1) % gridSize]:
                return _bisect(centered, Fraction(a, gridSize), Fraction(a + 1, gridSize),
                               signs[a], tolerance)
        if gridSize >= budget:
            raise BudgetError(f'No sign change of the level sum on a grid of size {gridSize}')
        gridSize *= 2


def _levelSum(skewMap, offsets):
    def levelSum(u):
        return sum((skewMap.unwrapped(u + offset) for offset in offsets), Fraction(0))
    return levelSum


def _displacements(skewMap, coordinates):
    """
    :param coordinates: values of the previous coordinate along the orbit
    :return: D_i = sum_(l<i) h(coordinate_l) modulo 1 for i < len(coordinates)
    """
    result = [TorusPoint(0)]
    for value in coordinates[:-1]:
        result.append(result[-1] + skewMap(value))
    return result


@debugDecor
def towerWitness(tower, m, budget=64, tolerance=Fraction(1, 2 ** 40)):
    """
    Level-by-level witness search: at each level, the free coordinate is chosen so that the
    m-step displacement vanishes (nonzero winding) or equals m times the mean (zero winding)
    :param tower: SkewTower
    :param m: return time (>= 1)
    :param budget: maximal grid size of the sign-change search
    :param tolerance: bisection tolerance
    :return: (point, certified return distance of the point)
    """
    if m < 1:
        raise ReclabError('Return times are positive')
    base = tower.base
    if isinstance(base, Odometer):
        if isinstance(tower.h1, CylinderMap):
            digitRanges = [range(base.bases[i] if i < len(base.bases) else base.bases[-1])
                           for i in range(tower.h1.depth)]
            candidates = [OdometerPoint(base.bases, prefix)
                          for prefix in itertools.product(*digitRanges)]
        else:
            candidates = [base.origin()]
        best = None
        for candidate in candidates:
            norm = distToZero(cocycleSum(base, tower.h1, m, candidate)[0])
            if best is None or norm < best[0]:
                best = (norm, candidate)
        basePoint = best[1]
    else:
        alpha = base.frequency(0)
        offsets = [alpha * i for i in range(m)]
        skewMap = tower.h1
        target = m * skewMap.mean() if skewMap.winding() == 0 else 0
        u = _solveLevel(_levelSum(skewMap, offsets), m * skewMap.winding(), target,
                        budget, tolerance)
        basePoint = (TorusPoint(u), *[TorusPoint(0)] * (base.dimension - 1))

    orbit = [basePoint]
    for _ in range(m - 1):
        orbit.append(base.step(orbit[-1], 1))
    displacements = _displacements(tower.h1At, orbit)

    fibers = []
    for skewMap in tower.fibers:
        offsets = [d.value for d in displacements]
        target = m * skewMap.mean() if skewMap.winding() == 0 else 0
        u = _solveLevel(_levelSum(skewMap, offsets), m * skewMap.winding(), target,
                        budget, tolerance)
        fibers.append(TorusPoint(u))
        displacements = _displacements(skewMap, [TorusPoint(u) + d for d in displacements])
    fibers.append(TorusPoint(0))

    point = ProductPoint(basePoint, fibers)
    return point, l1Dist(point, towerOrbit(tower, point, m))


@debugDecor
def guaranteedWindow(tower, eps, horizon):
    """
    :param tower: SkewTower over a torus rotation
    :return: { m <= N : sum_f ||m f|| < eps } over the hidden frequencies
    """
    if not isinstance(tower.base, TorusRotation):
        raise ReclabError('The guaranteed window is defined for torus rotation bases')
    frequencies = hiddenFrequencies(tower)
    return _windowOfDistances(lambda n: _l1Norm(frequencies, n), Fraction(eps), horizon, 'l1')


@debugDecor
def bohrLargeReturnsDiagnostic(tower, eps, horizon, budget=64):
    """
    Finite-window check: every index of the guaranteed window has a certified witness
    and the max gap of the guaranteed window is finite and stable from N to 2N
    :return: dict report
    """
    eps = Fraction(eps)
    window = guaranteedWindow(tower, eps, horizon)
    certified, uncertified = [], []
    for m in window:
        try:
            distance = towerWitness(tower, m, budget)[1]
        except BudgetError:
            uncertified.append(m)
            continue
        (certified if _lowHigh(distance)[1] < eps else uncertified).append(m)
    stabilization = maxGapStabilizes(lambda n: guaranteedWindow(tower, eps, n), horizon)
    return {'window': window, 'certified': certified, 'uncertified': uncertified,
            'stabilization': stabilization,
            'holds': len(uncertified) == 0 and stabilization['stable']}
