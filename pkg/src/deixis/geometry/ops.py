"""Geometry operations: back-projection, pointing rays, object selection."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..errors import (
    DegenerateBBox,
    DegenerateForearm,
    DegenerateRay,
    LowConfidence,
    NoMatchingClass,
    NonPositiveDepth,
    OutOfRange,
)
from .backend import kernels
from .types import (
    MIN_RAY_LENGTH,
    CameraModel,
    DeicticRay,
    Detection,
    ObjectRecord,
    Scene,
    SkeletonFrame,
)

DEFAULT_MIN_SKELETON_CONFIDENCE = 0.3
DEFAULT_SELECTION_RADIUS = 0.5  # meters


def back_project(det: Detection, cam: CameraModel, object_id: Optional[str] = None) -> ObjectRecord:
    """Lift a 2D detection into a base-frame ObjectRecord.

    The bbox center ray is scaled by the sampled depth and pushed through the
    camera extrinsic; bbox pixel extents become metric extents at that depth.
    """
    if det.depth_m <= 0:
        raise NonPositiveDepth(f"depth {det.depth_m} m")
    x0, y0, x1, y1 = det.bbox
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        raise DegenerateBBox(f"bbox {det.bbox}")
    u, v = det.center
    if not (0 <= u <= cam.width and 0 <= v <= cam.height):
        raise DegenerateBBox(f"bbox center ({u:.1f}, {v:.1f}) outside the image plane")
    z = det.depth_m
    p_cam = ((u - cam.cx) / cam.fx * z, (v - cam.cy) / cam.fy * z, z)
    position = cam.camera_to_base(p_cam)
    width_m = (x1 - x0) * z / cam.fx
    height_m = (y1 - y0) * z / cam.fy
    return ObjectRecord(
        id=object_id or det.object_id or f"{det.class_name}-{u:.0f}x{v:.0f}",
        class_name=det.class_name,
        position=position,
        height_m=height_m,
        width_m=width_m,
    )


def project_point(p_base, cam: CameraModel) -> tuple[float, float, float]:
    """Project a base-frame point to (u, v, depth); inverse of back_project.

    Used by the synthetic-episode generator and round-trip tests.
    """
    x, y, z = cam.base_to_camera(p_base)
    if z <= 0:
        raise NonPositiveDepth("point is behind the camera")
    return (cam.cx + cam.fx * x / z, cam.cy + cam.fy * y / z, z)


def forearm_ray(
    frame: SkeletonFrame, min_confidence: float = DEFAULT_MIN_SKELETON_CONFIDENCE
) -> DeicticRay:
    """Pointing ray through the right forearm: elbow anchors it, wrist aims it."""
    if frame.confidence < min_confidence:
        raise LowConfidence(f"skeleton confidence {frame.confidence:.2f} < {min_confidence:.2f}")
    if math.dist(frame.right_elbow, frame.right_wrist) <= MIN_RAY_LENGTH:
        raise DegenerateForearm("elbow and wrist coincide")
    return DeicticRay(
        r1=frame.right_elbow, r2=frame.right_wrist, timestamp=frame.timestamp, source="forearm"
    )


def touch_ray(px: float, py: float, cam: CameraModel, timestamp: float) -> DeicticRay:
    """Synthetic ray for touch selection: camera origin through the touched pixel.

    Serves the no-arm-movement path; downstream selection treats it exactly
    like a forearm ray.
    """
    p_cam = ((px - cam.cx) / cam.fx, (py - cam.cy) / cam.fy, 1.0)
    return DeicticRay(
        r1=tuple(cam.t), r2=cam.camera_to_base(p_cam), timestamp=timestamp, source="touch"
    )


def point_line_distance(ray: DeicticRay, point) -> float:
    """Perpendicular distance from a 3D point to the pointing line."""
    if ray.length <= MIN_RAY_LENGTH:
        raise DegenerateRay("ray anchors are too close together")
    return kernels.point_line_distance(ray.r1, ray.r2, tuple(point))


def ray_distances(ray: DeicticRay, scene: Scene) -> np.ndarray:
    """Distances from every scene object to the pointing line, in scene order."""
    if ray.length <= MIN_RAY_LENGTH:
        raise DegenerateRay("ray anchors are too close together")
    if len(scene) == 0:
        return np.empty(0, dtype=np.float64)
    pts = np.array([o.position for o in scene], dtype=np.float64)
    return kernels.point_line_distances(ray.r1, ray.r2, pts)


def select_object(
    ray: DeicticRay,
    scene: Scene,
    class_filter: Optional[str],
    selection_radius: float = DEFAULT_SELECTION_RADIUS,
) -> tuple[ObjectRecord, float]:
    """Nearest-to-ray object passing the class gate.

    Returns ``(record, distance)``.  Ties resolve to the smallest object id so
    replays stay deterministic.  ``class_filter=None`` disables the gate
    (hover feedback before a class was spoken).
    """
    candidates = [o for o in scene if class_filter is None or o.class_name == class_filter]
    if not candidates:
        raise NoMatchingClass(f"no object of class {class_filter!r} in scene")
    pts = np.array([o.position for o in candidates], dtype=np.float64)
    dists = kernels.point_line_distances(ray.r1, ray.r2, pts)
    best = min(range(len(candidates)), key=lambda i: (dists[i], candidates[i].id))
    if dists[best] > selection_radius:
        raise OutOfRange(
            f"nearest {class_filter!r} is {dists[best]:.3f} m from the ray "
            f"(selection radius {selection_radius:.3f} m)"
        )
    return candidates[best], float(dists[best])
