"""Tree quadrature: integrate f*p by fitting a regression tree to samples."""

from ._treequad import *  # noqa: F401,F403
from ._treequad import TreequadError, __doc__  # noqa: F401

__version__ = "0.1.0"
