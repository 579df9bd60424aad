"""Planar geometry helpers for oriented rectangles."""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import InvalidArgumentError


@dataclass(frozen=True)
class Vec2:
    """A point or displacement in meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidArgumentError(f"Non-finite coordinates: ({self.x}, {self.y})")

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    @classmethod
    def from_heading(cls, heading: float) -> "Vec2":
        return cls(math.cos(heading), math.sin(heading))


def wrap_angle(angle: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def rectangle_corners(
    center: Vec2, heading: float, half_extent: Tuple[float, float]
) -> np.ndarray:
    """Corners of an oriented rectangle in counter-clockwise order, shape (4, 2)."""
    hx, hy = half_extent
    c, s = math.cos(heading), math.sin(heading)
    local = np.array([[hx, hy], [-hx, hy], [-hx, -hy], [hx, -hy]], dtype=float)
    rotation = np.array([[c, -s], [s, c]])
    return local @ rotation.T + np.array([center.x, center.y])


def _axes(corners: np.ndarray) -> np.ndarray:
    edges = np.roll(corners, -1, axis=0) - corners
    normals = np.stack([-edges[:, 1], edges[:, 0]], axis=1)
    lengths = np.linalg.norm(normals, axis=1, keepdims=True)
    return (normals / lengths)[:2]


def rectangles_intersect(a: np.ndarray, b: np.ndarray, tolerance: float = 1e-9) -> bool:
    """Separating-axis test for two convex quadrilaterals; touching counts as intersecting."""
    for axis in np.vstack([_axes(a), _axes(b)]):
        pa = a @ axis
        pb = b @ axis
        if pa.max() < pb.min() - tolerance or pb.max() < pa.min() - tolerance:
            return False
    return True


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0.0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def polygon_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Minimum distance between two convex polygons, 0 if they intersect."""
    if rectangles_intersect(a, b):
        return 0.0
    best = math.inf
    for poly_p, poly_q in ((a, b), (b, a)):
        for p in poly_p:
            for i in range(len(poly_q)):
                best = min(best, _point_segment_distance(p, poly_q[i], poly_q[(i + 1) % len(poly_q)]))
    return best


def points_in_rectangle(
    points: np.ndarray, center: Vec2, heading: float, half_extent: Tuple[float, float]
) -> np.ndarray:
    """Boolean mask of points (..., 2) lying inside an oriented rectangle (closed)."""
    c, s = math.cos(heading), math.sin(heading)
    dx = points[..., 0] - center.x
    dy = points[..., 1] - center.y
    along = dx * c + dy * s
    across = -dx * s + dy * c
    return (np.abs(along) <= half_extent[0]) & (np.abs(across) <= half_extent[1])


def segment_intersection(
    p1: np.ndarray, p2: np.ndarray, q1: np.ndarray, q2: np.ndarray
) -> Optional[Tuple[float, float]]:
    """Parameters (t, u) in [0, 1] where segments p1p2 and q1q2 cross, or None.

    Parallel and collinear segments report no crossing.
    """
    r = p2 - p1
    s = q2 - q1
    denom = r[0] * s[1] - r[1] * s[0]
    if abs(denom) < 1e-12:
        return None
    qp = q1 - p1
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    u = (qp[0] * r[1] - qp[1] * r[0]) / denom
    if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
        return float(t), float(u)
    return None
