"""Yaw / x / y search on ground-removed clouds."""

from src.planar.search import reduced_cost, remove_ground, search_planar
from src.planar.types import PlanarEstimate, PlanarSearchConfig


__all__ = [
    "PlanarEstimate",
    "PlanarSearchConfig",
    "reduced_cost",
    "remove_ground",
    "search_planar",
]
