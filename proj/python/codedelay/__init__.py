"""In-order delay and efficiency of systematic network-coded transport."""

from ._codedelay import *  # noqa: F401,F403
from ._codedelay import __version__  # noqa: F401
