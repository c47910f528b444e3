"""Exact height coefficients and arithmetic dynamics on products of projective spaces."""

from ._heightdyn import *  # noqa: F401,F403
from ._heightdyn import __doc__  # noqa: F401

__version__ = "0.1.0"
