"""Ground-plane extraction and ground alignment."""

from src.ground.alignment import align_ground, verify_ground_side
from src.ground.plane import fit_ground_plane, transform_plane
from src.ground.types import GroundAlignment, Plane


__all__ = [
    "GroundAlignment",
    "Plane",
    "align_ground",
    "fit_ground_plane",
    "transform_plane",
    "verify_ground_side",
]
