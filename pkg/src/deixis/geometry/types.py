"""Domain types for the scene model.

All types are immutable value objects; geometry operations are pure
functions over them, so everything here is safe to share across threads.
Points are plain ``(x, y, z)`` tuples in meters.  Object positions live in
the robot-base frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

Vec3 = tuple[float, float, float]


def _as_vec3(v) -> Vec3:
    x, y, z = v
    return (float(x), float(y), float(z))


@dataclass(frozen=True)
class CameraModel:
    """Pinhole intrinsics plus the rigid camera-to-base extrinsic."""

    fx: float
    fy: float
    cx: float
    cy: float
    rotation: tuple  # 3x3, row-major nested tuples, camera axes -> base frame
    translation: Vec3  # camera origin in the base frame
    width: int = 640
    height: int = 480

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        r = np.asarray(self.rotation, dtype=np.float64)
        if r.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if not np.allclose(r @ r.T, np.eye(3), atol=1e-9):
            raise ValueError("rotation must be orthonormal")
        if abs(np.linalg.det(r) - 1.0) > 1e-9:
            raise ValueError("rotation determinant must be +1")

    @property
    def r(self) -> np.ndarray:
        return np.asarray(self.rotation, dtype=np.float64)

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.translation, dtype=np.float64)

    def camera_to_base(self, p_cam) -> Vec3:
        p = self.r @ np.asarray(p_cam, dtype=np.float64) + self.t
        return _as_vec3(p)

    def base_to_camera(self, p_base) -> Vec3:
        p = self.r.T @ (np.asarray(p_base, dtype=np.float64) - self.t)
        return _as_vec3(p)


@dataclass(frozen=True)
class Detection:
    """One 2D object detection with a sampled depth at the bbox center."""

    class_name: str
    bbox: tuple[float, float, float, float]  # x0, y0, x1, y1 in pixels
    depth_m: float
    timestamp: float
    confidence: float = 1.0
    object_id: Optional[str] = None  # stable id when the upstream tracker has one

    def __post_init__(self):
        x0, y0, x1, y1 = self.bbox
        if not (x1 > x0 and y1 > y0):
            raise ValueError("bbox must have positive width and height")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")

    @property
    def center(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.bbox
        return ((x0 + x1) / 2.0, (y0 + y1) / 2.0)


@dataclass(frozen=True)
class ObjectRecord:
    """A scene object: class label, base-frame position, and metric extents."""

    id: str
    class_name: str
    position: Vec3  # base-frame footprint center, z at the supporting surface
    height_m: float
    width_m: float

    def __post_init__(self):
        if self.height_m <= 0 or self.width_m <= 0:
            raise ValueError("object extents must be positive")
        object.__setattr__(self, "position", _as_vec3(self.position))

    @property
    def top(self) -> float:
        return self.position[2] + self.height_m

    def moved_to(self, position) -> "ObjectRecord":
        return replace(self, position=_as_vec3(position))


@dataclass(frozen=True)
class Scene:
    """An immutable snapshot of the detected objects."""

    objects: tuple[ObjectRecord, ...]
    timestamp: float = 0.0

    def __post_init__(self):
        ids = [o.id for o in self.objects]
        if len(ids) != len(set(ids)):
            raise ValueError("object ids must be pairwise distinct")
        object.__setattr__(self, "objects", tuple(self.objects))

    def __iter__(self):
        return iter(self.objects)

    def __len__(self):
        return len(self.objects)

    def get(self, object_id: str) -> Optional[ObjectRecord]:
        for o in self.objects:
            if o.id == object_id:
                return o
        return None

    def replace_object(self, record: ObjectRecord) -> "Scene":
        objs = tuple(record if o.id == record.id else o for o in self.objects)
        return Scene(objects=objs, timestamp=self.timestamp)


@dataclass(frozen=True)
class SkeletonFrame:
    """Right-arm keypoints of one tracked skeleton frame, base frame, meters."""

    timestamp: float
    right_elbow: Vec3
    right_wrist: Vec3
    confidence: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")
        object.__setattr__(self, "right_elbow", _as_vec3(self.right_elbow))
        object.__setattr__(self, "right_wrist", _as_vec3(self.right_wrist))
        if self.confidence > 0 and self.right_elbow == self.right_wrist:
            raise ValueError("elbow and wrist coincide in a confident frame")


MIN_RAY_LENGTH = 1e-6  # meters


@dataclass(frozen=True)
class DeicticRay:
    """A pointing line anchored at two points (elbow/wrist for forearm rays)."""

    r1: Vec3
    r2: Vec3
    timestamp: float
    source: str = "forearm"  # or "touch"

    def __post_init__(self):
        object.__setattr__(self, "r1", _as_vec3(self.r1))
        object.__setattr__(self, "r2", _as_vec3(self.r2))
        if self.length <= MIN_RAY_LENGTH:
            raise ValueError("ray anchors are too close together")

    @property
    def length(self) -> float:
        return math.dist(self.r1, self.r2)
