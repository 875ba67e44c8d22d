"""
reclab is a python package to explore, with exact rational arithmetic, the return
sets of torus rotations, odometers and their skew-product extensions, and the
combinatorial statements attached to them (difference sets, colorings, block sums).
"""

__version__ = "0.1.0"

# Import the public part of the package
from . import util  # pylint: disable=wrong-import-position # noqa: F401 E402
from . import torus  # pylint: disable=wrong-import-position # noqa: F401 E402
from . import cfrac  # pylint: disable=wrong-import-position # noqa: F401 E402
from . import dynsys  # pylint: disable=wrong-import-position # noqa: F401 E402
from . import recurrence  # pylint: disable=wrong-import-position # noqa: F401 E402
