"""Exact boundary functionals and isoperimetric certificates on the discrete cube."""

from .cube_core import (
    BoundaryProfile,
    CubeSet,
    Moment,
    Side,
    h_profile,
    hamming_ball,
    moment,
    subcube,
    w_profile,
)
from .errors import ResourceRefusal, SideConditionError
from .harper import digit_sum, harper_min, harper_set

__version__ = "0.1.0"
