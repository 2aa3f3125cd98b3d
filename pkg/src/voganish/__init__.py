"""Orbits, covers and vanishing-cycle certificates for type-A quiver representation varieties."""

__version__ = "0.1.0"

from .multiseg import (Multisegment, RankTriangle, closure_leq, enumerate_orbits, is_arthur_type,
                       multisegment_from_triangle, named, triangle_from_multisegment)
from .vogan import VoganSpace, compute_dual, jordan_partition, orbit_dim, representative, x_KS, y_KS_slice
