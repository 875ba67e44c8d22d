"""
This module implements some tools shared by all the reclab modules:
verbosity, tracing decorator, exceptions and the exact rational wire format
"""

from fractions import Fraction
from functools import wraps
import logging
import os
import sys
import time

################################################################################
# Verbosity, decorators and Exception

debugStats = {}


def debugDecor(func):
    """
    Defines a decorator to trace all function calling with arguments and results
    and count number of calls and time spent
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        # Logging call
        logger = logging.getLogger()
        if logger.isEnabledFor(logging.DEBUG):
            callstr = func.__name__ + \
                      '(' + ', '.join([str(a) for a in args] +
                                      [k + '=' + str(v) for (k, v) in kwargs.items()]) + ')'
            logging.debug('%s --> ...', callstr)
        else:
            callstr = None

        # Count and time
        if logger.isEnabledFor(logging.INFO):
            t0 = time.time()
        else:
            t0 = None

        # effective call
        result = func(*args, **kwargs)

        # Count and time
        if t0 is not None:
            # We test with t0 instead of the log level in case level evolved during func call
            if func.__name__ not in debugStats:
                debugStats[func.__name__] = dict(nb=0, totalTime=0)
            debugStats[func.__name__]['nb'] += 1
            duration = time.time() - t0
            debugStats[func.__name__]['totalTime'] += duration
            debugStats[func.__name__]['min'] = \
                min(duration, debugStats[func.__name__].get('min', duration))
            debugStats[func.__name__]['max'] = \
                max(duration, debugStats[func.__name__].get('max', duration))

        # logging result
        if callstr is not None:
            # We test with callstr instead of the log level in case level evolved during func call
            logging.debug('%s --> %s', callstr, str(result))

        return result
    return wrapper


def setVerbosity(level):
    """
    Set the verbosity level
    :param level: verbosity level used to set the logging module
    """
    logger = logging.getLogger()
    if isinstance(level, str):
        logger.setLevel(level=level.upper())
    else:
        logger.setLevel(level=level)


def printInfos():
    """
    Print statistics on methods and function usage
    The table goes to stderr, stdout may carry a JSON artifact
    """
    logger = logging.getLogger()
    if logger.isEnabledFor(logging.INFO):
        def _print(name, nb, vmin, vmax, mean):
            print('| ' + name.ljust(30) + '| ' + str(nb).ljust(14) + '| ' +
                  str(vmin).ljust(23) + '| ' + str(vmax).ljust(23) + '| ' +
                  str(mean).ljust(23) + '|', file=sys.stderr)
        _print('Name of the function', '# of calls', 'Min (s)', 'Max (s)', 'Total (s)')
        for funcName, values in debugStats.items():
            _print(funcName, values['nb'], values['min'], values['max'], values['totalTime'])


class ReclabError(Exception):
    """
    Exceptions for reclab
    """


class SchemaError(ReclabError):
    """
    Invalid parameters or configuration (exit status 2)
    """


class CertificationError(ReclabError):
    """
    A certification chain has a failing link (exit status 3)
    """
    def __init__(self, message, transcript=None):
        """
        :param message: description of the failing link
        :param transcript: list of link records computed before (and including) the failure
        """
        super().__init__(message)
        self.transcript = [] if transcript is None else transcript


class InvariantError(ReclabError):
    """
    An internal invariant was breached (exit status 4)
    """


class BudgetError(ReclabError):
    """
    A search ran out of budget; this is never a refutation
    """

################################################################################
# Rationals


def parseRational(string):
    """
    :param string: an integer or a 'p/q' string (no float syntax)
    :return: the exact Fraction
    """
    if isinstance(string, (int, Fraction)):
        return Fraction(string)
    text = str(string).strip()
    num, sep, den = text.partition('/')
    try:
        if sep == '':
            return Fraction(int(num))
        if int(den) == 0:
            raise SchemaError(f"Null denominator in rational '{string}'")
        return Fraction(int(num), int(den))
    except ValueError as exc:
        raise SchemaError(f"'{string}' is not an exact rational (expected 'p/q')") from exc


def formatRational(value):
    """
    :param value: Fraction, int or Ball
    :return: the 'num/den' string (a dict with center and radius for a Ball)
    """
    if hasattr(value, 'radius'):
        return {'center': formatRational(value.center), 'radius': formatRational(value.radius)}
    value = Fraction(value)
    return f'{value.numerator}/{value.denominator}'

################################################################################
# Other


def getNbPar(default=None):
    """
    :param default: number of processes wanted (None for the number of cores)
    :return: the number of processes, capped by the RECLAB_THREADS environment variable
    """
    nbPar = (os.cpu_count() or 1) if default is None else default
    cap = os.environ.get('RECLAB_THREADS')
    if cap is not None:
        try:
            nbPar = min(nbPar, max(1, int(cap)))
        except ValueError:
            logging.warning("RECLAB_THREADS='%s' is not an integer, ignored", cap)
    return max(1, nbPar)
