"""
Tests of the difference sets, block sums and colorings
"""

from fractions import Fraction
import itertools
import random

from hypothesis import given
import hypothesis.strategies as st
import pytest

from reclab.util import ReclabError, SchemaError, BudgetError
from reclab.recurrence import WindowSet, BohrSpec, bohrWindow
from reclab.counterexample import HTILDE
from reclab.combinatorics import (COVERS, PERIOD, Coloring, CyclicSeq, diffSet,
                                  twoColorDichotomy, twoSyndeticDifferences, zeroSumLengths,
                                  epsSumLengths, sequenceReturnSet, phiBinary, example48Window,
                                  doublingOrbitSet, doublingAlphaFromColoring,
                                  cyclicSeqFromColoring, isProperColoring, grColorability,
                                  chromaticNumber, loadColoringCsv, loadCyclicSeqCsv)

EXAMPLE48_BOHR_WINDOWS = [BohrSpec([Fraction(1, 3)], Fraction(1, 10)),
                          BohrSpec([Fraction(2, 7)], Fraction(1, 10)),
                          BohrSpec([Fraction(3, 10)], Fraction(1, 20)),
                          BohrSpec([Fraction(1, 11)], Fraction(1, 10)),
                          BohrSpec([Fraction(1, 2), Fraction(1, 5)], Fraction(1, 10))]


def colorings(maxColors=3, minSize=1, maxSize=16):
    """
    Strategy of random colorings
    """
    return st.integers(1, maxColors).flatmap(
        lambda r: st.lists(st.integers(1, r), min_size=minSize, max_size=maxSize).map(
            lambda values: Coloring(values, r)))


def test_coloring():
    coloring = Coloring([1, 2, 2, 1])
    assert coloring.numColors == 2
    assert coloring.horizon == 4
    assert coloring.colorClass(2) == WindowSet(4, [2, 3])
    assert [len(cls) for cls in coloring.classes()] == [2, 2]
    for values, numColors in (([0], None), ([1, 3], 2), ([], 0)):
        with pytest.raises(SchemaError):
            Coloring(values, numColors)
    assert CyclicSeq(3, [4, -1]).values == (1, 2)
    with pytest.raises(SchemaError):
        CyclicSeq(1, [0])


def test_diffSet():
    assert diffSet(WindowSet(6, [1, 4, 6])) == WindowSet(6, [2, 3, 5])
    assert len(diffSet(WindowSet(6, [4]))) == 0


@given(st.lists(st.integers(1, 40), max_size=15), st.integers(0, 20))
def test_diffSetShift(members, shift):
    window = WindowSet(40, members)
    expected = {a - b for a in members for b in members if a > b}
    assert set(diffSet(window)) == expected
    shifted = WindowSet(40 + shift, [a + shift for a in members])
    assert diffSet(shifted).members == diffSet(window).members


def test_twoColorDichotomy():
    verdict = twoColorDichotomy(Coloring([1, 2] * 4 + [1]))
    assert verdict.kind == PERIOD
    assert (verdict.window, verdict.absent, verdict.period) == (4, 1, 2)
    assert verdict.toJson() == {'kind': 'Period', 'window': 4, 'd': 1, 'period': 2,
                                'certificate': [2, 4]}
    covers = twoColorDichotomy(Coloring([1, 1, 2, 2, 2]))
    assert covers.kind == COVERS
    assert covers.period is None
    with pytest.raises(ReclabError):
        twoColorDichotomy(Coloring([1, 2, 3]))


@given(st.lists(st.integers(1, 2), min_size=3, max_size=40))
def test_twoColorDichotomyNeverArtifact(values):
    coloring = Coloring(values, 2)
    verdict = twoColorDichotomy(coloring)
    assert verdict.kind in (COVERS, PERIOD)
    union = set(diffSet(coloring.colorClass(1))) | set(diffSet(coloring.colorClass(2)))
    if verdict.kind == COVERS:
        assert set(range(1, verdict.window + 1)) <= union
    else:
        assert verdict.absent not in union
        assert all(n in diffSet(coloring.colorClass(1)) and n in diffSet(coloring.colorClass(2))
                   for n in verdict.certificate)


def test_twoSyndeticDifferences():
    result = twoSyndeticDifferences(WindowSet(10, [2, 4, 6, 8, 10]), 1)
    assert result['d'] == 2
    assert result['window'] == 4
    assert result['verified']
    assert result['verdict']['kind'] == 'Period'
    with pytest.raises(ReclabError):
        twoSyndeticDifferences(WindowSet(10, [5]), 1)
    with pytest.raises(ReclabError):
        twoSyndeticDifferences(WindowSet(10, [5]), 0)


def test_zeroSumLengths():
    assert zeroSumLengths(CyclicSeq(3, [1, 1, 1])) == WindowSet(3, [3])
    assert zeroSumLengths(CyclicSeq(2, [0, 1, 1])) == WindowSet(3, [1, 2, 3])
    assert zeroSumLengths(CyclicSeq(5, [])) == WindowSet(0)


@given(st.integers(2, 7).flatmap(
    lambda k: st.lists(st.integers(0, k - 1), max_size=25).map(lambda v: CyclicSeq(k, v))))
def test_zeroSumLengthsOracle(sequence):
    values, horizon = sequence.values, len(sequence)
    expected = {m for m in range(1, horizon + 1) for n in range(horizon - m + 1)
                if sum(values[n:n + m]) % sequence.modulus == 0}
    assert set(zeroSumLengths(sequence)) == expected


def test_epsSumLengths():
    third = Fraction(1, 3)
    assert epsSumLengths([third] * 3, Fraction(1, 10)) == WindowSet(3, [3])
    assert epsSumLengths([Fraction(1, 2), Fraction(1, 2)], Fraction(1, 10)) == WindowSet(2, [2])
    window = sequenceReturnSet([0, third, 2 * third, 0], Fraction(1, 10))
    assert window == WindowSet(3, [3])
    assert window.note == 'window-truncated'


def test_phiBinary():
    assert [phiBinary(n) for n in range(1, 9)] == [
        1, Fraction(1, 2), Fraction(3, 2), Fraction(1, 4), Fraction(5, 4), Fraction(3, 4),
        Fraction(7, 4), Fraction(1, 8)]
    assert phiBinary(0) == 0
    with pytest.raises(ReclabError):
        phiBinary(-1)


@given(st.integers(0, 10 ** 6), st.integers(0, 12), st.integers(1, 1000))
def test_phiBinaryContinuity(n, k, j):
    # numbers congruent modulo 2^k have close images
    assert abs(phiBinary(n + j * 2 ** k) - phiBinary(n)) < Fraction(2, 2 ** k)


def test_example48Window():
    window, gap, differences = example48Window(Fraction(1, 10), 8)
    assert window == WindowSet(8, [1, 3, 7])
    assert gap == 4
    assert differences == WindowSet(8, [2, 4, 6])
    for eps in (0, Fraction(1, 2)):
        with pytest.raises(SchemaError):
            example48Window(eps, 8)


@given(st.integers(1, 200), st.integers(1, 49).map(lambda a: Fraction(a, 100)))
def test_example48WindowDirect(horizon, eps):
    window = example48Window(eps, horizon)[0]
    total, members = Fraction(0), []
    for n in range(1, horizon + 1):
        total += phiBinary(n)
        fractional = total - int(total)
        if min(fractional, 1 - fractional) < eps:
            members.append(n)
    assert window.members == tuple(members)


def test_doublingOrbitSet():
    assert doublingOrbitSet(Fraction(1, 3), Fraction(1, 10), 6) == WindowSet(6, [2, 4, 6])
    assert doublingOrbitSet('1/4', Fraction(1, 10), 3) == WindowSet(3, [1, 2, 3])
    assert len(doublingOrbitSet(Fraction(1, 7), Fraction(1, 10), 2)) == 0


def test_doublingAlphaFromColoring():
    assert doublingAlphaFromColoring(Coloring([1, 2]), 3) == Fraction(5, 16)
    with pytest.raises(ReclabError):
        doublingAlphaFromColoring(Coloring([1, 2]), 2)


@given(colorings(minSize=2))
def test_cyclicSeqFromColoring(coloring):
    sequence = cyclicSeqFromColoring(coloring)
    assert sequence.modulus == 2 * coloring.numColors + 1
    assert len(sequence) == coloring.horizon - 1
    union = set()
    for cls in coloring.classes():
        union |= set(diffSet(cls))
    assert set(zeroSumLengths(sequence)) == union


def test_grColorability():
    result = grColorability([1, 2], 4, 2)
    assert not result.colorable
    assert result.toJson()['certificate'] == 'exhausted'
    result = grColorability(WindowSet(4, [1, 2]), 4, 3)
    assert result.colorable
    assert isProperColoring([1, 2], result.coloring)
    assert grColorability([1], 5, 2).coloring.values == (1, 2, 1, 2, 1)
    assert chromaticNumber([1, 2], 4)[0] == 3
    assert chromaticNumber([1], 5)[0] == 2
    assert chromaticNumber([], 5)[0] == 1
    with pytest.raises(BudgetError):
        grColorability([1], 30, 2, budget=5)
    with pytest.raises(SchemaError):
        grColorability([1], 3, 0)


@given(st.sets(st.integers(1, 6), max_size=4), st.integers(1, 7), st.integers(1, 3))
def test_grColorabilityOracle(distances, horizon, numColors):
    result = grColorability(distances, horizon, numColors)
    exists = any(isProperColoring(distances, Coloring(values, numColors))
                 for values in itertools.product(range(1, numColors + 1), repeat=horizon))
    assert result.colorable == exists
    if result.colorable:
        assert isProperColoring(distances, result.coloring)


def test_csvLoaders(tmp_path):
    coloringFile = tmp_path / 'coloring.csv'
    coloringFile.write_text('n,color\n2,2\n1,1\n3,1\n', encoding='utf-8')
    assert loadColoringCsv(str(coloringFile)).values == (1, 2, 1)
    sequenceFile = tmp_path / 'sequence.csv'
    sequenceFile.write_text('0,4\n1,5\n', encoding='utf-8')
    assert loadCyclicSeqCsv(str(sequenceFile), 3).values == (1, 2)
    with pytest.raises(SchemaError):
        loadCyclicSeqCsv(str(coloringFile), 3)
    badFile = tmp_path / 'bad.csv'
    badFile.write_text('1,a\n', encoding='utf-8')
    for filename in (str(badFile), str(tmp_path / 'missing.csv')):
        with pytest.raises(SchemaError):
            loadColoringCsv(filename)


def test_diffSetMultiples():
    multiples = WindowSet(30, range(3, 31, 3))
    assert diffSet(multiples) == WindowSet(30, range(3, 28, 3))


def test_twoColorDichotomyExamples():
    parity = twoColorDichotomy(Coloring([1, 2] * 50))
    assert parity.kind == PERIOD
    assert (parity.window, parity.absent, parity.period) == (49, 1, 2)
    halves = twoColorDichotomy(Coloring([1] * 50 + [2] * 50))
    assert halves.kind == COVERS and halves.window == 49
    assert twoColorDichotomy(Coloring([1] * 100, 2)).kind == COVERS


def _sameColorAt(values, n, color=None):
    """
    :return: True if some a, a + n (1-based window) share a color (the given one if any)
    """
    return any(values[a] == values[a + n] and color in (None, values[a])
               for a in range(len(values) - n))


def _checkDichotomyVerdict(coloring):
    verdict = twoColorDichotomy(coloring)
    values = coloring.values
    if verdict.kind == COVERS:
        assert all(_sameColorAt(values, n) for n in range(1, verdict.window + 1))
    else:
        assert verdict.kind == PERIOD
        assert not _sameColorAt(values, verdict.absent)
        assert all(_sameColorAt(values, n) for n in range(1, verdict.absent))
        assert all(_sameColorAt(values, n, 1) and _sameColorAt(values, n, 2)
                   for n in range(verdict.period, verdict.window + 1, verdict.period))
    return verdict


@pytest.mark.slow
def test_twoColorDichotomyAcceptance():
    generator = random.Random(48)
    for _ in range(500):
        coloring = Coloring([generator.randint(1, 2) for _ in range(2000)], 2)
        _checkDichotomyVerdict(coloring)
    # blocks of length d alternate: d is the least absent difference
    for block in range(1, 11):
        coloring = Coloring([1 + (n // block) % 2 for n in range(2000)], 2)
        verdict = _checkDichotomyVerdict(coloring)
        assert (verdict.kind, verdict.absent, verdict.period) == (PERIOD, block, 2 * block)


def test_zeroSumLengthsExamples():
    assert zeroSumLengths(CyclicSeq(3, [1] * 30)) == WindowSet(30, range(3, 31, 3))
    assert zeroSumLengths(CyclicSeq(3, [0] * 10)) == WindowSet(10, range(1, 11))
    alternating = zeroSumLengths(CyclicSeq(3, [1, 2] * 10))
    assert all(m in alternating for m in range(2, 21, 2))


@pytest.mark.slow
def test_zeroSumLengthsAcceptance():
    generator = random.Random(5)
    for _ in range(100):
        modulus = generator.choice([2, 3, 5, 7])
        values = [generator.randrange(modulus) for _ in range(500)]
        expected = set()
        for start in range(500):
            total = 0
            for m in range(1, 501 - start):
                total = (total + values[start + m - 1]) % modulus
                if total == 0:
                    expected.add(m)
        assert set(zeroSumLengths(CyclicSeq(modulus, values))) == expected


def test_epsSumLengthsExamples():
    eps = Fraction(1, 10)
    assert epsSumLengths([Fraction(1, 4)] * 20, eps) == WindowSet(20, [4, 8, 12, 16, 20])
    assert epsSumLengths([0] * 6, eps) == WindowSet(6, range(1, 7))
    # one period of H at the fifths sums to -1/3750
    observable = [HTILDE.unwrapped(Fraction(n, 5)) for n in range(12)]
    lengths = epsSumLengths(observable, Fraction(1, 100))
    assert 5 in lengths and 10 in lengths


def test_phiBinaryExamples():
    assert phiBinary(5) == Fraction(5, 4)
    assert all(phiBinary(2 ** j) == Fraction(1, 2 ** j) for j in range(20))


def test_example48WindowLarge():
    window, _, _ = example48Window(Fraction(1, 100), 10 ** 4)
    # phi(0) + ... + phi(2^k - 1) = 2^k - 1
    assert all(2 ** k - 1 in window for k in range(1, 14))


@pytest.mark.parametrize('horizon, size', [(10 ** 4, 2030), (2 * 10 ** 4, 4059)])
def test_example48WindowRegression(horizon, size):
    window, gap, differences = example48Window(Fraction(1, 10), horizon)
    assert len(window) == size
    # the max gap is the same at both horizons
    assert gap == 42
    for spec in EXAMPLE48_BOHR_WINDOWS:
        assert set(differences) & set(bohrWindow(spec, horizon))


def test_doublingOrbitSetExamples():
    assert doublingOrbitSet(0, Fraction(1, 10), 8) == WindowSet(8, range(1, 9))
    assert doublingOrbitSet(Fraction(1, 5), Fraction(1, 10), 12) == WindowSet(12, [4, 8, 12])


def test_grColorabilityResidueCliques():
    # each residue class modulo 3 is a clique on 10 vertices
    result = grColorability(WindowSet(30, range(3, 31, 3)), 30, 3)
    assert not result.colorable
    assert result.coloring is None
