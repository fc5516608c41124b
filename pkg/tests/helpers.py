"""Small geometric builders shared by the test modules."""

import math

import numpy as np

from src.geometry import PointCloud


def plane_patch(
    rng: np.random.Generator,
    n: int,
    origin: tuple[float, float, float],
    u: tuple[float, float, float],
    v: tuple[float, float, float],
    extent: float,
) -> np.ndarray:
    """``n`` uniform samples on the square ``origin + s*u + t*v``, s, t in [0, extent]."""
    s, t = rng.uniform(0.0, extent, size=(2, n))
    return np.asarray(origin) + s[:, None] * np.asarray(u) + t[:, None] * np.asarray(v)


def corner_room(seed: int = 3, frame_id: str = "room") -> PointCloud:
    """Floor at z = -1 and walls at x = -3 and y = -3, seen from the origin."""
    rng = np.random.default_rng(seed)
    corner = (-3.0, -3.0, -1.0)
    points = np.vstack(
        [
            plane_patch(rng, 3000, corner, (1, 0, 0), (0, 1, 0), 6.0),
            plane_patch(rng, 2000, corner, (0, 1, 0), (0, 0, 1), 6.0),
            plane_patch(rng, 2000, corner, (1, 0, 0), (0, 0, 1), 6.0),
        ]
    )
    return PointCloud(points, frame_id)


def angle_between(a: np.ndarray, b: np.ndarray) -> float:
    cosine = np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return math.degrees(math.acos(float(np.clip(cosine, -1.0, 1.0))))


def rotation_error_deg(rotation: np.ndarray, truth: np.ndarray) -> float:
    """Angle of ``rotation @ truth.T`` in degrees."""
    cosine = (np.trace(rotation @ truth.T) - 1.0) / 2.0
    return math.degrees(math.acos(float(np.clip(cosine, -1.0, 1.0))))
