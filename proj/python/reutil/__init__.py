"""Optimal gain/loss realization policies for realization-utility investors.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from reutil._reutil import *  # noqa: F401,F403
from reutil._reutil import __doc__  # noqa: F401

__version__ = "1.0.0"
