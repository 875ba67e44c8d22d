"""
This module contains the command line driver of the reclab experiments
"""

from fractions import Fraction
import argparse
import csv
import json
import logging
import math
import os
import random
import shlex
import sys

from reclab import __version__
from reclab.util import (ReclabError, SchemaError, CertificationError, InvariantError,
                         setVerbosity, printInfos, parseRational, formatRational, getNbPar)
from reclab.torus import Ball, TorusPoint, OdometerPoint, ProductPoint
from reclab.cfrac import ContinuedFraction, checkGrowth
from reclab.dynsys import (SkewTower, IteratedSkewState, towerFromConfig, iteratedTower,
                           iteratedIdTrajectory, towerStep)
from reclab.recurrence import (WindowSet, WindowPartition, BohrSpec, bohrWindow, returnWindow,
                               maxGap, prop32Check, towerWitness, bohrLargeReturnsDiagnostic)
from reclab.counterexample import (HTILDE, TheoremBConfig, buildTheoremBConfig, certifyGap,
                                   spotCheckGap, riemannClosedForm, riemannDirectSum,
                                   riemannBound, DEFAULT_DELTA)
from reclab.combinatorics import (Coloring, loadColoringCsv, loadCyclicSeqCsv,
                                  twoColorDichotomy, zeroSumLengths, epsSumLengths,
                                  example48Window, doublingOrbitSet, grColorability,
                                  chromaticNumber, twoSyndeticDifferences)

EXIT_SCHEMA, EXIT_CERTIFICATION, EXIT_INVARIANT, EXIT_OTHER = 2, 3, 4, 1

# Arguments that are not parameters of the experiment
_NOT_PARAMETERS = ('func', 'logLevel', 'output', 'csv', 'config', 'optsByEnv', 'nbPar')


################################################################################
# JSON


def toJsonReady(obj):
    """
    Recursively converts results into JSON-compatible objects, exact rationals
    being written as 'p/q' strings
    :param obj: object to convert
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return None if math.isinf(obj) else obj
    if isinstance(obj, (Fraction, Ball)):
        return formatRational(obj)
    if isinstance(obj, TorusPoint):
        return formatRational(obj.value)
    if isinstance(obj, OdometerPoint):
        return {'digits': list(obj.digits)}
    if isinstance(obj, ProductPoint):
        return {'base': toJsonReady(obj.base), 'fibers': toJsonReady(obj.fibers)}
    if hasattr(obj, 'toJson'):
        return toJsonReady(obj.toJson())
    if isinstance(obj, dict):
        return {str(key): toJsonReady(value) for key, value in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [toJsonReady(item) for item in sorted(obj)]
    if isinstance(obj, (list, tuple, range)):
        return [toJsonReady(item) for item in obj]
    raise InvariantError(f'Cannot serialize {obj!r}')


def writeArtifact(args, result):
    """
    Writes the JSON artifact (parameters, seed and result)
    :param args: parsed arguments
    :param result: result of the subcommand
    """
    parameters = {key: value for key, value in vars(args).items()
                  if key not in _NOT_PARAMETERS and key not in ('command', 'seed')}
    artifact = {'command': args.command, 'version': __version__, 'seed': args.seed,
                'parameters': parameters, 'result': result}
    text = json.dumps(toJsonReady(artifact), sort_keys=True, indent=2) + '\n'
    if args.output is None or args.output == '-':
        sys.stdout.write(text)
    else:
        with open(args.output, 'w', encoding='utf-8') as stream:
            stream.write(text)
        logging.info('Artifact written in %s', args.output)


def writeCsv(filename, rows):
    """
    :param filename: CSV output file
    :param rows: table rows, header first
    """
    with open(filename, 'w', newline='', encoding='utf-8') as stream:
        csv.writer(stream, lineterminator='\n').writerows(rows)


def windowRows(window, name='member'):
    """
    :return: table rows for a WindowSet or a WindowPartition
    """
    if isinstance(window, WindowPartition):
        return [['m', 'verdict']] + [[m, window.verdicts[m].verdict]
                                     for m in sorted(window.verdicts)]
    return [[name]] + [[member] for member in window]


################################################################################
# Arguments


def _rationalList(text):
    return [parseRational(item) for item in text.split(',') if item.strip() != '']


def _intList(text):
    try:
        return [int(item) for item in text.split(',') if item.strip() != '']
    except ValueError as exc:
        raise SchemaError(f"'{text}' is not a comma-separated list of integers") from exc


def readConfigFile(filename):
    """
    :param filename: flat 'key = value' file ('#' starts a comment)
    :return: list of command line arguments ['--key', 'value', ...]
    """
    arguments = []
    try:
        with open(filename, encoding='utf-8') as stream:
            lines = stream.readlines()
    except OSError as exc:
        raise SchemaError(f'Cannot read the configuration file {filename}: {exc}') from exc
    for line in lines:
        line = line.split('#', 1)[0].strip()
        if line == '':
            continue
        key, sep, value = line.partition('=')
        if sep == '' or key.strip() == '':
            raise SchemaError(f"Invalid configuration line '{line}' (expected 'key = value')")
        arguments.extend(['--' + key.strip(), value.strip()])
    return arguments


def getArgs(parser, argv):
    """
    Parse arguments and interpret the --config and --optsByEnv options
    :param parser: argparse parser
    :param argv: command line arguments (without the program name)
    :return: an argparse namespace
    """
    arguments = list(argv)
    for index, arg in enumerate(argv):
        if arg == '--config' and index + 1 < len(argv):
            arguments.extend(readConfigFile(argv[index + 1]))
        elif arg.startswith('--config='):
            arguments.extend(readConfigFile(arg.split('=', 1)[1]))
    args = parser.parse_args(arguments)
    if getattr(args, 'optsByEnv', None) is not None:
        extra = os.environ.get(args.optsByEnv, '')
        args = parser.parse_args(arguments + shlex.split(extra))
    return args


def updateParserCommon(parser):
    """
    Arguments shared by all the subcommands
    :param parser: parser in which arguments are added
    """
    assert not parser.allow_abbrev, 'parser must be created with allow_abbrev=False'
    gen = parser.add_argument_group('General options')
    gen.add_argument('--logLevel', default='warning',
                     help='Provide logging level. Example --logLevel debug (default is warning)')
    gen.add_argument('--seed', default=0, type=int,
                     help='Seed of the random generators, recorded in the artifact')
    gen.add_argument('--output', default=None, type=str,
                     help='JSON artifact file (default is the standard output)')
    gen.add_argument('--csv', default=None, type=str,
                     help='Also write the window set as a CSV table in this file')
    gen.add_argument('--config', default=None, type=str,
                     help="File of 'key = value' lines, each one used as '--key value'")
    gen.add_argument('--nbPar', default=None, type=int,
                     help='Number of parallel processes (default is the number of cores, ' +
                          'capped by the RECLAB_THREADS environment variable)')
    gen.add_argument('--optsByEnv', default=None, type=str,
                     help='Name of the environment variable containing additional arguments ' +
                          'to use. These arguments are processed after all other arguments.')


def updateParserTower(parser, withMaps=True):
    """
    Arguments describing a base system (and the skewing maps)
    :param parser: parser in which arguments are added
    :param withMaps: to add the --h1 and --fiber arguments
    """
    gen = parser.add_argument_group('System description')
    gen.add_argument('--base', default='rotation', choices=['rotation', 'odometer'],
                     help='Kind of base system')
    gen.add_argument('--alpha', default=None, type=str,
                     help="Comma-separated rotation numbers ('p/q')")
    gen.add_argument('--cf', default=None, type=str,
                     help='Comma-separated partial quotients of an additional rotation number')
    gen.add_argument('--bases', default=None, type=str,
                     help='Comma-separated odometer bases (the last one is repeated)')
    gen.add_argument('--increment', default=1, type=int, help='Odometer increment')
    if withMaps:
        gen.add_argument('--h1', default=None, type=str,
                         help="Skewing map of the first fiber, e.g. 'poly:-1/30,0,1,-2,1'")
        gen.add_argument('--fiber', default=[], action='append',
                         help='Skewing map of the next fiber (can be repeated)')


def updateParserThmB(parser):
    """
    Arguments of the counterexample configuration
    :param parser: parser in which arguments are added
    """
    gen = parser.add_argument_group('Counterexample configuration')
    gen.add_argument('--depth', default=3, type=int, help='Number of partial quotients')
    gen.add_argument('--a1', default=3, type=int, help='First partial quotient')
    gen.add_argument('--delta', default=DEFAULT_DELTA, type=parseRational, help='delta')
    gen.add_argument('--L', default=None, type=parseRational,
                     help='Lipschitz bound of H (default is the coefficient-sum bound)')
    gen.add_argument('--denominatorCap', default=64, type=int,
                     help='Largest denominator of the beta search')
    gen.add_argument('--beta', default=None, type=parseRational,
                     help='Use this beta instead of the searched one')
    gen.add_argument('--index', default=2, type=int, help='Convergent index i (m = q_i)')


def _towerArgs(args):
    return {'base': args.base, 'alpha': args.alpha, 'cf': args.cf, 'bases': args.bases,
            'increment': args.increment, 'h1': getattr(args, 'h1', None),
            'fiber': getattr(args, 'fiber', [])}


def _thmBConfig(args):
    config = buildTheoremBConfig(args.depth, args.a1, args.delta, args.L, args.denominatorCap)
    if args.beta is not None:
        config = TheoremBConfig(config.alpha, args.beta, config.delta, config.lipschitz,
                                config.selectedIndices)
    return config


################################################################################
# Subcommands


def cmdReturnsWindow(args):
    """Return-set partition of a base system or a tower"""
    system = towerFromConfig(_towerArgs(args))
    partition = returnWindow(system, args.eps, args.N, args.budget, args.nbPar)
    description = system.describe()
    return {'system': description, 'partition': partition}, windowRows(partition)


def cmdBohrWindow(args):
    """Bohr window of explicit frequencies"""
    alphas = [] if args.alpha is None else _rationalList(args.alpha)
    if args.cf is not None:
        alphas.append(ContinuedFraction.fromJson(_intList(args.cf)))
    window = bohrWindow(BohrSpec(alphas, args.delta), args.N)
    return {'window': window, 'maxGap': maxGap(window)}, windowRows(window)


def cmdThmBCertify(args):
    """Certified inequality chain of the counterexample"""
    config = _thmBConfig(args)
    margin = certifyGap(config, args.index)
    report = {'config': config, 'growth': checkGrowth(config.alpha, 'ThmB')[1],
              'certificate': margin}
    if not margin.holds:
        raise CertificationError(f'Link {margin.failedLink} fails at index {args.index}',
                                 transcript=toJsonReady(report))
    return report, None


def cmdThmBSpot(args):
    """Random spot check of the counterexample gap"""
    config = _thmBConfig(args)
    report = spotCheckGap(config, args.index, args.samples, args.seed, args.nbPar)
    return {'config': config, 'spotCheck': report}, None


def cmdRiemann(args):
    """Closed form of the Riemann sums of H"""
    result = {'closedForm': riemannClosedForm(args.n, args.x),
              'directSum': riemannDirectSum(args.n, args.x)}
    if result['closedForm'] != result['directSum']:
        raise InvariantError('Closed form and direct sum differ')
    if args.n >= 4:
        result['bound'] = riemannBound(args.n)
    return result, None


def _coloring(args, generator):
    if args.coloring is not None:
        return loadColoringCsv(args.coloring, 2)
    if args.random is not None:
        return Coloring([generator.randint(1, 2) for _ in range(args.random)], 2)
    raise SchemaError('Use --coloring FILE or --random N')


def cmdTwoColor(args):
    """Two-coloring dichotomy"""
    coloring = _coloring(args, random.Random(args.seed))
    return {'N': coloring.horizon, 'verdict': twoColorDichotomy(coloring)}, None


def cmdZeroSum(args):
    """Zero-sum block lengths"""
    window = zeroSumLengths(loadCyclicSeqCsv(args.sequence, args.modulus))
    return {'lengths': window}, windowRows(window, 'length')


def cmdEpsSum(args):
    """eps-sum block lengths"""
    window = epsSumLengths(_rationalList(args.values), args.eps)
    return {'lengths': window}, windowRows(window, 'length')


def cmdExample48(args):
    """Return set of the 2-adic construction"""
    window, gap, differences = example48Window(args.eps, args.N)
    return {'A': window, 'maxGap': gap, 'diffSet': differences}, windowRows(window)


def cmdDoubling(args):
    """Return set of the doubling sequence"""
    window = doublingOrbitSet(args.alpha, args.eps, args.N)
    return {'window': window}, windowRows(window)


def cmdGrColor(args):
    """Colorability of G_R on [1, N]"""
    return {'result': grColorability(_intList(args.distances), args.N, args.colors,
                                     args.budget)}, None


def cmdChromatic(args):
    """Chromatic number of G_R on [1, N]"""
    number, result = chromaticNumber(_intList(args.distances), args.N, args.budget)
    return {'chromaticNumber': number, 'result': result}, None


def cmdTwoSyndetic(args):
    """Syndetic differences of a set covering the window with one translate"""
    window = WindowSet(args.N, _intList(args.set))
    return twoSyndeticDifferences(window, args.shift), None


def cmdIteratedSkewCheck(args):
    """Closed form of the iterated identity skew against the direct iteration"""
    base = towerFromConfig({**_towerArgs(args), 'h1': None, 'fiber': []})
    if not getattr(base, 'exact', True):
        raise SchemaError('The check needs exact rotation numbers')
    if args.h1 is None:
        raise SchemaError('The check needs --h1')
    skewMap = towerFromConfig(_towerArgs(args)).h1
    tVec = _rationalList(args.t)
    x = base.origin() if args.x is None else tuple(TorusPoint(v) for v in _rationalList(args.x))
    state = IteratedSkewState(x, tVec)
    trajectory = iteratedIdTrajectory(base, skewMap, state, args.N)
    tower = iteratedTower(base, skewMap, state.k)
    point = ProductPoint(x, tVec)
    for n in range(args.N + 1):
        if point != trajectory[n]:
            raise InvariantError(f'Closed form and iteration differ at n={n}')
        point = towerStep(tower, point)
    return {'k': state.k, 'N': args.N, 'agrees': True}, None


def cmdProp32(args):
    """Block-sum witnesses for a periodic observable H(x0 + n alpha)"""
    alpha = TorusPoint(args.alpha).value
    values = [HTILDE.unwrapped(args.x0 + n * alpha) for n in range(args.N + 1)]
    return prop32Check(values, alpha.denominator, args.eps, skewMap=HTILDE), None


def cmdTowerWitness(args):
    """Constructive return witness of a tower"""
    tower = towerFromConfig(_towerArgs(args))
    if not isinstance(tower, SkewTower):
        raise SchemaError('A tower needs --h1')
    point, distance = towerWitness(tower, args.m, args.budget)
    return {'system': tower.describe(), 'm': args.m, 'point': point, 'distance': distance}, None


def cmdBohrLarge(args):
    """Finite-window diagnostic of the Bohr-large returns property"""
    tower = towerFromConfig(_towerArgs(args))
    if not isinstance(tower, SkewTower):
        raise SchemaError('A tower needs --h1')
    report = bohrLargeReturnsDiagnostic(tower, args.eps, args.N, args.budget)
    return {'system': tower.describe(), 'diagnostic': report}, windowRows(report['window'])


def _addWindowArgs(parser, eps=True):
    gen = parser.add_argument_group('Window')
    gen.add_argument('--N', required=True, type=int, help='Horizon of the window')
    if eps:
        gen.add_argument('--eps', required=True, type=parseRational, help='Threshold eps')


def buildParser():
    """
    :return: the argparse parser with one sub-parser per experiment
    """
    parser = argparse.ArgumentParser(description='Recurrence laboratory', allow_abbrev=False)
    parser.add_argument('--version', action='version',
                        version='%(prog)s {version}'.format(version=__version__))
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    updateParserCommon(common)
    subparsers = parser.add_subparsers(dest='command', required=True)

    def add(name, func, helpText):
        sub = subparsers.add_parser(name, parents=[common], allow_abbrev=False, help=helpText)
        sub.set_defaults(func=func)
        return sub

    sub = add('returns-window', cmdReturnsWindow, 'Certified eps-return set on a window')
    updateParserTower(sub)
    _addWindowArgs(sub)
    sub.add_argument('--budget', default=64, type=int, help='Grid resolution')

    sub = add('bohr-window', cmdBohrWindow, 'Bohr window { n : sum ||n alpha|| < delta }')
    updateParserTower(sub, withMaps=False)
    _addWindowArgs(sub, eps=False)
    sub.add_argument('--delta', required=True, type=parseRational, help='Radius delta')

    sub = add('thmb-certify', cmdThmBCertify, 'Certify the counterexample inequality chain')
    updateParserThmB(sub)

    sub = add('thmb-spot', cmdThmBSpot, 'Spot check of the counterexample gap')
    updateParserThmB(sub)
    sub.add_argument('--samples', default=100, type=int, help='Number of random samples')

    sub = add('riemann', cmdRiemann, 'Riemann sums of H')
    sub.add_argument('--n', required=True, type=int, help='Number of terms')
    sub.add_argument('--x', required=True, type=parseRational, help='Point in [0, 1/n]')

    sub = add('two-color', cmdTwoColor, 'Two-coloring dichotomy')
    sub.add_argument('--coloring', default=None, type=str, help='CSV file (n, color)')
    sub.add_argument('--random', default=None, type=int,
                     help='Random 2-coloring of [1, N] drawn with the seed')

    sub = add('zero-sum', cmdZeroSum, 'Zero-sum block lengths of a Z/kZ sequence')
    sub.add_argument('--sequence', required=True, type=str, help='CSV file (n, value)')
    sub.add_argument('--modulus', required=True, type=int, help='Modulus k')

    sub = add('eps-sum', cmdEpsSum, 'eps-sum block lengths of a torus-valued sequence')
    sub.add_argument('--values', required=True, type=str, help="Comma-separated 'p/q' values")
    sub.add_argument('--eps', required=True, type=parseRational, help='Threshold eps')

    sub = add('example48', cmdExample48, 'Return set of the 2-adic construction')
    _addWindowArgs(sub)

    sub = add('doubling', cmdDoubling, 'Return set of n -> 2^n alpha')
    _addWindowArgs(sub)
    sub.add_argument('--alpha', required=True, type=parseRational, help='Rational alpha')

    for name, func, helpText in (('gr-color', cmdGrColor, 'Colorability of G_R'),
                                 ('chromatic', cmdChromatic, 'Chromatic number of G_R')):
        sub = add(name, func, helpText)
        _addWindowArgs(sub, eps=False)
        sub.add_argument('--distances', required=True, type=str,
                         help='Comma-separated forbidden differences R')
        sub.add_argument('--budget', default=10 ** 6, type=int, help='Maximal assignments')
        if name == 'gr-color':
            sub.add_argument('--colors', required=True, type=int, help='Number of colors')

    sub = add('two-syndetic', cmdTwoSyndetic, 'Syndetic differences of a covering set')
    _addWindowArgs(sub, eps=False)
    sub.add_argument('--set', required=True, type=str, help='Comma-separated members of A')
    sub.add_argument('--shift', required=True, type=int, help='Translate ell')

    sub = add('iterated-skew-check', cmdIteratedSkewCheck,
              'Closed form of the iterated identity skew against the iteration')
    updateParserTower(sub)
    _addWindowArgs(sub, eps=False)
    sub.add_argument('--t', required=True, type=str, help="Comma-separated 't_1,...,t_k'")
    sub.add_argument('--x', default=None, type=str, help='Base point (torus bases)')

    sub = add('prop32', cmdProp32, 'Block-sum witnesses of a periodic observable')
    _addWindowArgs(sub)
    sub.add_argument('--alpha', required=True, type=parseRational, help='Rational alpha')
    sub.add_argument('--x0', default=Fraction(0), type=parseRational, help='Starting point')

    sub = add('tower-witness', cmdTowerWitness, 'Constructive return witness of a tower')
    updateParserTower(sub)
    sub.add_argument('--m', required=True, type=int, help='Return time')
    sub.add_argument('--budget', default=64, type=int, help='Sign-change grid budget')

    sub = add('bohr-large', cmdBohrLarge, 'Bohr-large returns diagnostic of a tower')
    updateParserTower(sub)
    _addWindowArgs(sub)
    sub.add_argument('--budget', default=64, type=int, help='Sign-change grid budget')
    return parser


def run(argv=None):
    """
    Runs one experiment
    :param argv: command line arguments (default is sys.argv[1:])
    :return: the exit status
    """
    parser = buildParser()
    try:
        args = getArgs(parser, sys.argv[1:] if argv is None else argv)
        setVerbosity(args.logLevel)
        args.nbPar = getNbPar(None if args.nbPar is None or args.nbPar <= 0 else args.nbPar)
        result, rows = args.func(args)
    except SchemaError as exc:
        logging.error('Invalid parameters: %s', exc)
        return EXIT_SCHEMA
    except CertificationError as exc:
        logging.error('Certification failed: %s', exc)
        writeArtifact(args, {'failure': str(exc), 'transcript': exc.transcript})
        return EXIT_CERTIFICATION
    except InvariantError as exc:
        logging.error('Internal invariant breached: %s', exc)
        return EXIT_INVARIANT
    except ReclabError as exc:
        logging.error('%s', exc)
        return EXIT_OTHER
    writeArtifact(args, result)
    if args.csv is not None:
        if rows is None:
            logging.warning('The %s subcommand produces no table', args.command)
        else:
            writeCsv(args.csv, rows)
    return 0


def main():
    """
    Core of the reclab_tool.py command
    """
    status = run()
    printInfos()
    sys.exit(status)
