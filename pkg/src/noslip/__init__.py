"""Simulation and linear-stability analysis of planar no-slip billiards."""

from . import (collision, dynamics, geometry, stability, tables, verification,
               wedge)
from .collision import MassParams, mass_params, noslip_matrix, two_disc_matrix
from .dynamics import (State, TrajectoryRecord, billiard_map, detect_period,
                       period2_state, reverse_state, trajectory,
                       velocity_coords)
from .geometry import Arc, BoundaryLoc, Planar, Segment, Table, Torus, cast_ray, frame_at

__all__ = [
    "collision", "dynamics", "geometry", "stability", "tables",
    "verification", "wedge",
    "MassParams", "mass_params", "noslip_matrix", "two_disc_matrix",
    "State", "TrajectoryRecord", "billiard_map", "detect_period",
    "period2_state", "reverse_state", "trajectory", "velocity_coords",
    "Arc", "BoundaryLoc", "Planar", "Segment", "Table", "Torus",
    "cast_ray", "frame_at",
]
