"""Quasi-static manipulator workcell.

Executes validated action sequences step by step: move primitives set the
end-effector pose instantly, a grasped object tracks the gripper, and a
release drops the object onto the table (or into the bin).  One simulated
tick per primitive keeps the trajectory log strictly ordered.

The collision model is deliberately simple and shared with the plan
validator: a horizontal transit at height z clears the scene iff z is at
least the tallest intersecting obstacle top plus the safety margin, where
the corridor is the move segment widened by gripper-plus-held-object width.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Iterable, Optional

import numpy as np

if TYPE_CHECKING:
    from .config import WorkcellConfig

from .errors import CollisionPredicted, GraspMissed, ReleaseOverVoid, WorkcellError
from .geometry.backend import kernels
from .geometry.types import ObjectRecord, Scene

if TYPE_CHECKING:  # pragma: no cover
    from .planning.types import ActionSequence, ActionStep

Pose = tuple[float, float, float, float, float, float]


@dataclass(frozen=True)
class RobotState:
    """End-effector pose (x y z rx ry rz), gripper opening, and grasp feedback."""

    pose: Pose
    gripper_angle: float
    holding: Optional[str] = None

    @property
    def position(self) -> tuple[float, float, float]:
        return self.pose[:3]

    def as_dict(self) -> dict:
        return {
            "pose": list(self.pose),
            "gripper_angle": self.gripper_angle,
            "holding": self.holding,
        }


@dataclass(frozen=True)
class ClearanceVerdict:
    ok: bool
    transit_z: float
    required_z: Optional[float] = None
    object_id: Optional[str] = None


@dataclass(frozen=True)
class TrajectoryEntry:
    tick: int
    step_index: int
    primitive: str
    args: dict
    robot: RobotState
    events: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "tick": self.tick,
            "step_index": self.step_index,
            "primitive": self.primitive,
            "args": self.args,
            "robot": self.robot.as_dict(),
            "events": list(self.events),
        }


def clearance_check(
    from_pose: Iterable[float],
    to_pose: Iterable[float],
    scene: Scene,
    holding: Optional[str],
    cfg: WorkcellConfig,
) -> ClearanceVerdict:
    """Straight-line transit clearance against the scene boxes.

    Transit height is the lower of the two pose heights (conservative); the
    held object is excluded from the obstacle set but widens the corridor.
    """
    fx, fy, fz = tuple(from_pose)[:3]
    tx, ty, tz = tuple(to_pose)[:3]
    z = min(fz, tz)
    if len(scene) == 0:
        return ClearanceVerdict(ok=True, transit_z=z)
    held_width = 0.0
    exclude = -1
    objects = list(scene)
    for i, obj in enumerate(objects):
        if holding is not None and obj.id == holding:
            exclude = i
            held_width = obj.width_m
    half_width = (cfg.gripper_width_m + held_width) / 2.0
    centers = np.array([(o.position[0], o.position[1]) for o in objects], dtype=np.float64)
    half_extents = np.array([o.width_m / 2.0 for o in objects], dtype=np.float64)
    tops = np.array([o.top for o in objects], dtype=np.float64)
    idx = kernels.corridor_highest_obstacle(
        fx, fy, tx, ty, half_width, centers, half_extents, tops, exclude
    )
    if idx < 0:
        return ClearanceVerdict(ok=True, transit_z=z)
    required = tops[idx] + cfg.clearance_margin_m
    if z >= required:
        return ClearanceVerdict(ok=True, transit_z=z)
    return ClearanceVerdict(
        ok=False, transit_z=z, required_z=float(required), object_id=objects[idx].id
    )


def find_graspable(
    scene: Scene,
    ee_position: Iterable[float],
    holding: Optional[str],
    cfg: WorkcellConfig,
) -> Optional[tuple[ObjectRecord, tuple[float, float, float]]]:
    """The object a gripper closing at ``ee_position`` would catch, if any.

    Tolerance: horizontal offset within half the object width plus the slack,
    gripper height anywhere along the object plus the vertical window.
    Returns the object and the grasp offset (object position minus gripper).
    """
    ex, ey, ez = tuple(ee_position)[:3]
    best = None
    best_key = None
    for obj in scene:
        if holding is not None and obj.id == holding:
            continue
        ox, oy, oz = obj.position
        horiz = math.hypot(ox - ex, oy - ey)
        if horiz > obj.width_m / 2.0 + cfg.grasp_horizontal_slack_m:
            continue
        if not (oz - cfg.grasp_vertical_window_m <= ez <= obj.top + cfg.grasp_vertical_window_m):
            continue
        key = (horiz, obj.id)
        if best_key is None or key < best_key:
            best, best_key = obj, key
    if best is None:
        return None
    ox, oy, oz = best.position
    return best, (ox - ex, oy - ey, oz - ez)


def landing_for(x: float, y: float, cfg: WorkcellConfig) -> Optional[tuple[float, float, float]]:
    """Where a released object comes to rest, or None over the void."""
    if cfg.over_bin(x, y):
        return (cfg.bin_xy[0], cfg.bin_xy[1], 0.0)
    if cfg.on_table(x, y):
        return (x, y, 0.0)
    return None


class WorkcellState:
    """Owned by one session; execution mutates it in place."""

    def __init__(
        self,
        cfg: WorkcellConfig,
        scene: Scene,
        robot: Optional[RobotState] = None,
        gripper_open_angle: float = 0.85,
    ):
        self.cfg = cfg
        self.scene = scene
        self.gripper_open_angle = gripper_open_angle
        self.robot = robot or RobotState(
            pose=tuple(cfg.home_pose), gripper_angle=gripper_open_angle, holding=None
        )
        self.grasp_offset: tuple[float, float, float] = (0.0, 0.0, 0.0)
        self.tick = 0
        self.log: list[TrajectoryEntry] = []

    def seed_holding(self, object_id: str, grasp_fraction: Optional[float] = None):
        """Start the episode already grasping ``object_id`` (e.g. for throw)."""
        obj = self.scene.get(object_id)
        if obj is None:
            raise WorkcellError(f"cannot seed grasp: {object_id!r} not in scene")
        f = self.cfg.grasp_height_fraction if grasp_fraction is None else grasp_fraction
        ex, ey, ez = self.robot.position
        moved = obj.moved_to((ex, ey, ez - f * obj.height_m))
        self.scene = self.scene.replace_object(moved)
        self.grasp_offset = (0.0, 0.0, -f * obj.height_m)
        self.robot = replace(self.robot, holding=object_id, gripper_angle=0.4)

    # -- step semantics ---------------------------------------------------

    def _track_held(self):
        if self.robot.holding is None:
            return
        obj = self.scene.get(self.robot.holding)
        if obj is None:
            raise WorkcellError(f"held object {self.robot.holding!r} vanished from scene")
        ex, ey, ez = self.robot.position
        ox, oy, oz = self.grasp_offset
        self.scene = self.scene.replace_object(obj.moved_to((ex + ox, ey + oy, ez + oz)))

    def _move_to(self, pose: Pose, step_index: int):
        verdict = clearance_check(self.robot.pose, pose, self.scene, self.robot.holding, self.cfg)
        if not verdict.ok:
            raise CollisionPredicted(
                f"transit at z={verdict.transit_z:.3f} under required "
                f"z={verdict.required_z:.3f} over {verdict.object_id}",
                step_index=step_index,
                object_id=verdict.object_id,
            )
        self.robot = replace(self.robot, pose=pose)
        self._track_held()

    def execute_step(self, step: "ActionStep", step_index: int = 0) -> list[str]:
        """Apply one primitive; returns the events it generated."""
        name = step.primitive
        args = step.args
        events: list[str] = []
        if name == "move_linear":
            pose = (args["x"], args["y"], args["z"], args["rx"], args["ry"], args["rz"])
            self._move_to(pose, step_index)
        elif name == "move_vertical":
            x, y, z, rx, ry, rz = self.robot.pose
            nz = z + args["dz"]
            lo, hi = self.cfg.workspace_z
            if not (lo <= nz <= hi):
                raise WorkcellError(
                    f"move_vertical leaves the workspace (z={nz:.3f})", step_index=step_index
                )
            self.robot = replace(self.robot, pose=(x, y, nz, rx, ry, rz))
            self._track_held()
        elif name == "close_gripper":
            if self.robot.holding is not None:
                raise GraspMissed(
                    f"gripper already holds {self.robot.holding!r}", step_index=step_index
                )
            found = find_graspable(self.scene, self.robot.position, None, self.cfg)
            if found is None:
                raise GraspMissed("no object within grasp tolerance", step_index=step_index)
            obj, offset = found
            self.grasp_offset = offset
            self.robot = replace(self.robot, holding=obj.id, gripper_angle=args["angle"])
            events.append(f"grasped {obj.id}")
        elif name == "open_gripper":
            if self.robot.holding is not None:
                held = self.scene.get(self.robot.holding)
                landing = landing_for(held.position[0], held.position[1], self.cfg)
                if landing is None:
                    raise ReleaseOverVoid(
                        f"release at ({held.position[0]:.2f}, {held.position[1]:.2f}) "
                        "is outside every supporting surface",
                        step_index=step_index,
                    )
                self.scene = self.scene.replace_object(held.moved_to(landing))
                events.append(f"released {held.id}")
                if self.cfg.over_bin(held.position[0], held.position[1]):
                    events.append(f"binned {held.id}")
                self.robot = replace(self.robot, holding=None, gripper_angle=args["angle"])
                self.grasp_offset = (0.0, 0.0, 0.0)
            else:
                self.robot = replace(self.robot, gripper_angle=args["angle"])
        elif name == "rotate_ee":
            x, y, z, rx, ry, rz = self.robot.pose
            self.robot = replace(
                self.robot, pose=(x, y, z, rx, ry, rz + math.radians(args["angle"]))
            )
            self._track_held()
            if self.robot.holding is not None and abs(args["angle"]) >= self.cfg.pour_event_min_deg:
                target = self._pour_target()
                if target is not None:
                    events.append(f"poured into {target.id}")
        elif name == "go_home":
            self._move_to(tuple(self.cfg.home_pose), step_index)
        elif name == "wait":
            pass
        else:
            raise WorkcellError(f"unknown primitive {name!r}", step_index=step_index)
        self.tick += 1
        self.log.append(
            TrajectoryEntry(
                tick=self.tick,
                step_index=step_index,
                primitive=name,
                args=dict(args),
                robot=self.robot,
                events=tuple(events),
            )
        )
        return events

    def _pour_target(self) -> Optional[ObjectRecord]:
        ex, ey, _ = self.robot.position
        best = None
        for obj in self.scene:
            if obj.id == self.robot.holding:
                continue
            ox, oy, _ = obj.position
            if abs(ox - ex) <= obj.width_m / 2.0 and abs(oy - ey) <= obj.width_m / 2.0:
                if best is None or obj.id < best.id:
                    best = obj
        return best

    def execute_sequence(self, seq: "ActionSequence") -> "WorkcellState":
        """Fold execute_step over the sequence; aborts cleanly at first error."""
        for i, step in enumerate(seq):
            self.execute_step(step, step_index=i)
        return self

    def export_log(self) -> str:
        """Trajectory log as line-delimited JSON records."""
        return "\n".join(json.dumps(e.as_dict(), sort_keys=True) for e in self.log)

    def all_events(self) -> list[str]:
        return [ev for entry in self.log for ev in entry.events]
