"""Residual checks for Lie algebroids, momentum sections and their morphisms.

Structures are given by symbolic component expressions on a coordinate chart;
every identity is checked by evaluating its residual at seeded sample points.
"""
__version__ = "0.1.0"

from .expr import *  # noqa: F401,F403
from .manifold import *  # noqa: F401,F403
from .algebroid import *  # noqa: F401,F403
from .connection import *  # noqa: F401,F403
from .geometry import *  # noqa: F401,F403
from .momentum import *  # noqa: F401,F403
from .courant import *  # noqa: F401,F403
from .morphism import *  # noqa: F401,F403
from .graded import *  # noqa: F401,F403
from .problem import *  # noqa: F401,F403
from .fixtures import *  # noqa: F401,F403
from .suites import *  # noqa: F401,F403
