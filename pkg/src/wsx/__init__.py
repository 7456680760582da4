"""Numerical laboratory for phase-space analysis on strictly convex surfaces."""

__version__ = "0.1.0"

from .errors import WsxError
from .geometry import SurfaceModel, build_surface, surface_from_json

__all__ = ["WsxError", "SurfaceModel", "build_surface", "surface_from_json",
           "__version__"]
