"""Sequence validation: the execution gate for every plan, whatever produced it.

Three passes over each step, in order: (1) the primitive exists and its
arguments are inside their declared ranges, (2) stateful preconditions by
symbolic execution (gripper open/close pairing, holding transitions, grasp
feasibility at the symbolic pose), (3) collision clearance of every
horizontal transit against the scene boxes, with released objects moved in
the symbolic scene copy.  A sequence that passes here executes on the
workcell without grasp or collision faults.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ..config import WorkcellConfig

from ..errors import (
    ArgumentSchemaMismatch,
    CollisionPredicted,
    PreconditionViolated,
    UnknownApiCall,
)
from ..geometry.types import Scene
from ..workcell import RobotState, clearance_check, find_graspable, landing_for
from .types import ActionSequence, ApiSpec


def validate_sequence(
    seq: ActionSequence,
    scene: Scene,
    robot: RobotState,
    api: ApiSpec,
    cfg: WorkcellConfig,
) -> ActionSequence:
    """Returns the sequence unchanged iff every check passes."""
    if robot.holding is not None and scene.get(robot.holding) is None:
        raise PreconditionViolated(
            f"robot reports holding {robot.holding!r} but it is not in the scene"
        )
    sym_scene = scene
    sym_robot = robot
    grasp_offset = (0.0, 0.0, 0.0)

    def track_held():
        nonlocal sym_scene
        if sym_robot.holding is None:
            return
        obj = sym_scene.get(sym_robot.holding)
        ex, ey, ez = sym_robot.position
        ox, oy, oz = grasp_offset
        sym_scene = sym_scene.replace_object(obj.moved_to((ex + ox, ey + oy, ez + oz)))

    def check_transit(target_pose, i):
        verdict = clearance_check(sym_robot.pose, target_pose, sym_scene, sym_robot.holding, cfg)
        if not verdict.ok:
            raise CollisionPredicted(
                f"step {i}: transit at z={verdict.transit_z:.3f} under required "
                f"z={verdict.required_z:.3f} over {verdict.object_id}",
                step_index=i,
                object_id=verdict.object_id,
            )

    for i, step in enumerate(seq):
        if step.primitive not in api:
            raise UnknownApiCall(f"step {i}: {step.primitive!r} is not a robot primitive")
        try:
            step.check_against(api)
        except ArgumentSchemaMismatch as exc:
            raise ArgumentSchemaMismatch(f"step {i}: {exc}") from None

        name, args = step.primitive, step.args
        if name == "move_linear":
            pose = (args["x"], args["y"], args["z"], args["rx"], args["ry"], args["rz"])
            check_transit(pose, i)
            sym_robot = replace(sym_robot, pose=pose)
            track_held()
        elif name == "move_vertical":
            x, y, z, rx, ry, rz = sym_robot.pose
            nz = z + args["dz"]
            if not (cfg.workspace_z[0] <= nz <= cfg.workspace_z[1]):
                raise PreconditionViolated(
                    f"step {i}: move_vertical leaves the workspace (z={nz:.3f})", step_index=i
                )
            sym_robot = replace(sym_robot, pose=(x, y, nz, rx, ry, rz))
            track_held()
        elif name == "close_gripper":
            if sym_robot.holding is not None:
                raise PreconditionViolated(
                    f"step {i}: close_gripper while holding {sym_robot.holding!r}", step_index=i
                )
            found = find_graspable(sym_scene, sym_robot.position, None, cfg)
            if found is None:
                raise PreconditionViolated(
                    f"step {i}: close_gripper grasps nothing at "
                    f"({sym_robot.position[0]:.2f}, {sym_robot.position[1]:.2f}, "
                    f"{sym_robot.position[2]:.2f})",
                    step_index=i,
                )
            obj, grasp_offset = found
            sym_robot = replace(sym_robot, holding=obj.id, gripper_angle=args["angle"])
        elif name == "open_gripper":
            if sym_robot.holding is None:
                raise PreconditionViolated(
                    f"step {i}: open_gripper with nothing held (unpaired open)", step_index=i
                )
            held = sym_scene.get(sym_robot.holding)
            landing = landing_for(held.position[0], held.position[1], cfg)
            if landing is None:
                raise PreconditionViolated(
                    f"step {i}: release over the void at "
                    f"({held.position[0]:.2f}, {held.position[1]:.2f})",
                    step_index=i,
                )
            sym_scene = sym_scene.replace_object(held.moved_to(landing))
            sym_robot = replace(sym_robot, holding=None, gripper_angle=args["angle"])
            grasp_offset = (0.0, 0.0, 0.0)
        elif name == "rotate_ee":
            x, y, z, rx, ry, rz = sym_robot.pose
            sym_robot = replace(
                sym_robot, pose=(x, y, z, rx, ry, rz + math.radians(args["angle"]))
            )
            track_held()
        elif name == "go_home":
            pose = tuple(cfg.home_pose)
            check_transit(pose, i)
            sym_robot = replace(sym_robot, pose=pose)
            track_held()
        elif name == "wait":
            pass
        else:  # a primitive in the ApiSpec this validator does not model
            raise UnknownApiCall(f"step {i}: no symbolic model for {step.primitive!r}")
    return seq
