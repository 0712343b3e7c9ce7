"""Schlafli-formula toolkit for constant-curvature spaces (C++ core)."""

from ._schlafli import *  # noqa: F401,F403
from ._schlafli import __doc__, SchlafliError  # noqa: F401
