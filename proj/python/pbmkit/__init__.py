"""Support functions, intrinsic volumes and p-Brunn-Minkowski experiments."""

from ._pbmkit import *  # noqa: F401,F403
from ._pbmkit import __version__  # noqa: F401
