"""Exact discrete quasi-copulas: domination, decomposition and copula series."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .grid import *  # noqa: F401,F403
from .domination import *  # noqa: F401,F403
from .decomposition import *  # noqa: F401,F403
from .bilinear import *  # noqa: F401,F403
from .gallery import *  # noqa: F401,F403
from .series import *  # noqa: F401,F403
from .span import *  # noqa: F401,F403
from .io import *  # noqa: F401,F403
