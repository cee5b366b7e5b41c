"""Python bindings for the xrai interpretation-network toolkit."""

from ._xrai import *  # noqa: F401,F403
from ._xrai import __version__  # noqa: F401
