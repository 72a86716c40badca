"""Scene model and pointing geometry."""

from .backend import BACKEND
from .ops import (
    back_project,
    forearm_ray,
    point_line_distance,
    project_point,
    ray_distances,
    select_object,
    touch_ray,
)
from .types import (
    CameraModel,
    DeicticRay,
    Detection,
    ObjectRecord,
    Scene,
    SkeletonFrame,
)

__all__ = [
    "BACKEND",
    "CameraModel",
    "DeicticRay",
    "Detection",
    "ObjectRecord",
    "Scene",
    "SkeletonFrame",
    "back_project",
    "forearm_ray",
    "point_line_distance",
    "project_point",
    "ray_distances",
    "select_object",
    "touch_ray",
]
