"""Optimal sample size estimation for data augmentation.

Thin wrapper over the C++ core. The heavy lifting (KSG mutual information,
bound inversion, saturation-point search, ICD scoring) lives in `_core`;
this package re-exports it.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
