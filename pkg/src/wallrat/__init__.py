"""Nevanlinna-Pick parameters, Wall rational functions, orthogonal rational
functions and Weyl disks for measures on the circle or the real line."""
from __future__ import annotations

from .geometry import AlphaSeq, Geometry, get_geometry
from .measure import Measure
from .schur import SchurParams, measure_params, np_params

__all__ = ["AlphaSeq", "Geometry", "Measure", "SchurParams", "get_geometry", "measure_params",
           "np_params"]
__version__ = "0.1.0"
