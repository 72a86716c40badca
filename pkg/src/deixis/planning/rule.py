"""Deterministic rule planner.

Expands each subcommand through its catalog template with computed
parameters.  This is a first-class plan source (the offline default), not a
test double: horizontal transits run at global clearance height (tallest
scene object + margin + pad) so its output validates by construction for
the high-transit actions.  Emitted text goes through the same strict parser
as model output, so both plan routes are interchangeable downstream.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from ..config import PlannerConfig, WorkcellConfig

from ..errors import PreconditionViolated, Unreachable
from ..fusion import Intention, SubCommand
from ..geometry.types import ObjectRecord, Scene
from ..grammar import MetricUnit
from ..workcell import RobotState
from .catalog import ActionCatalog
from .parse import parse_plan
from .types import ActionSequence, ApiSpec


def gripper_angle_from_width(width_m: float, cfg: PlannerConfig) -> float:
    """Linear width -> closing angle map, clamped to the gripper range."""
    g = cfg.grasp
    theta = g.theta_max_rad * (1.0 - width_m / g.b_max_m)
    return min(max(theta, g.theta_min_rad), g.theta_max_rad)


def transit_height(scene: Scene, wc: WorkcellConfig, cfg: PlannerConfig) -> float:
    """Clearance transit height over the whole scene (pad absorbs 6dp rounding)."""
    top = max((o.top for o in scene), default=0.0)
    return top + wc.clearance_margin_m + cfg.transit_pad_m


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _require_reachable(x: float, y: float, z: float, wc: WorkcellConfig, what: str):
    if not wc.in_workspace(x, y, z):
        raise Unreachable(f"{what} at ({x:.3f}, {y:.3f}, {z:.3f}) is outside the workspace")


def _pour_angle(sub: SubCommand, cfg: PlannerConfig) -> float:
    if sub.metric is not None and sub.metric.unit is MetricUnit.DEGREES:
        return float(sub.metric.value)
    return cfg.default_pour_angle_deg


def _push_direction(sub: SubCommand, obj: ObjectRecord) -> tuple[float, float]:
    """Unit push direction on the table plane; "near" slides toward the base."""
    ox, oy, _ = obj.position
    norm = math.hypot(ox, oy)
    if norm < 1e-9:
        return (0.0, 1.0)
    toward_base = (-ox / norm, -oy / norm)
    qualifier = sub.metric.value if sub.metric is not None else "near"
    if qualifier == "far":
        return (-toward_base[0], -toward_base[1])
    return toward_base


def plan_rule(
    intent: Intention,
    scene: Scene,
    robot: RobotState,
    catalog: ActionCatalog,
    api: ApiSpec,
    cfg: PlannerConfig,
    wc: WorkcellConfig,
) -> ActionSequence:
    transit_z = transit_height(scene, wc, cfg)
    if transit_z > wc.workspace_z[1]:
        raise Unreachable(f"clearance height {transit_z:.3f} exceeds the workspace ceiling")
    rx, ry, rz = robot.pose[3], robot.pose[4], robot.pose[5]
    base = {
        "rx": _fmt(rx),
        "ry": _fmt(ry),
        "rz": _fmt(rz),
        "transit_z": _fmt(transit_z),
        "open_angle": _fmt(cfg.grasp.theta_max_rad),
        "bin_x": _fmt(wc.bin_xy[0]),
        "bin_y": _fmt(wc.bin_xy[1]),
    }

    holding: Optional[str] = robot.holding
    lines: list[str] = []
    for sub in intent.subcommands:
        action = catalog.get(sub.action)
        params = dict(base)
        obj = sub.obj
        if action.object_dependent and obj is None:
            raise PreconditionViolated(f"{sub.action!r} requires a bound object")

        if sub.action == "pick":
            if holding is not None:
                raise PreconditionViolated(f"pick while already holding {holding!r}")
            grasp_z = obj.position[2] + wc.grasp_height_fraction * obj.height_m
            _require_reachable(obj.position[0], obj.position[1], transit_z, wc, "pick approach")
            params.update(
                obj_x=_fmt(obj.position[0]),
                obj_y=_fmt(obj.position[1]),
                descend_dz=_fmt(grasp_z - transit_z),
                grasp_angle=_fmt(gripper_angle_from_width(obj.width_m, cfg)),
                ascend_dz=_fmt(transit_z - grasp_z),
            )
            holding = obj.id
        elif sub.action == "put":
            held = _held_record(holding, intent, scene)
            place_z = (
                obj.top + wc.place_gap_m + wc.grasp_height_fraction * held.height_m
            )
            _require_reachable(obj.position[0], obj.position[1], transit_z, wc, "put approach")
            params.update(
                obj_x=_fmt(obj.position[0]),
                obj_y=_fmt(obj.position[1]),
                descend_dz=_fmt(place_z - transit_z),
                ascend_dz=_fmt(transit_z - place_z),
            )
            holding = None
        elif sub.action == "pour":
            _held_record(holding, intent, scene)
            angle = _pour_angle(sub, cfg)
            _require_reachable(obj.position[0], obj.position[1], transit_z, wc, "pour approach")
            params.update(
                obj_x=_fmt(obj.position[0]),
                obj_y=_fmt(obj.position[1]),
                pour_deg=_fmt(angle),
                neg_pour_deg=_fmt(-angle),
                pour_hold=_fmt(cfg.pour_hold_s),
            )
        elif sub.action == "push":
            if holding is not None:
                raise PreconditionViolated(f"push while holding {holding!r}")
            push_z = obj.position[2] + wc.grasp_height_fraction * obj.height_m
            dx, dy = _push_direction(sub, obj)
            to_x = obj.position[0] + dx * cfg.push_distance_m
            to_y = obj.position[1] + dy * cfg.push_distance_m
            if not wc.on_table(to_x, to_y):
                raise Unreachable(f"push target ({to_x:.3f}, {to_y:.3f}) leaves the table")
            _require_reachable(to_x, to_y, push_z, wc, "push target")
            params.update(
                obj_x=_fmt(obj.position[0]),
                obj_y=_fmt(obj.position[1]),
                descend_dz=_fmt(push_z - transit_z),
                grasp_angle=_fmt(gripper_angle_from_width(obj.width_m, cfg)),
                push_to_x=_fmt(to_x),
                push_to_y=_fmt(to_y),
                push_z=_fmt(push_z),
                ascend_dz=_fmt(transit_z - push_z),
            )
        elif sub.action == "throw":
            _held_record(holding, intent, scene)
            _require_reachable(wc.bin_xy[0], wc.bin_xy[1], transit_z, wc, "bin approach")
            holding = None
        elif sub.action == "clean":
            half = obj.width_m / 2.0
            wipe_z = obj.top + wc.clearance_margin_m + cfg.transit_pad_m
            _require_reachable(obj.position[0] - half, obj.position[1] - half / 2, wipe_z, wc, "wipe stroke")
            _require_reachable(obj.position[0] + half, obj.position[1] + half / 2, wipe_z, wc, "wipe stroke")
            params.update(
                stroke0_x=_fmt(obj.position[0] - half),
                stroke1_x=_fmt(obj.position[0] + half),
                stroke_y0=_fmt(obj.position[1] - half / 2),
                stroke_y1=_fmt(obj.position[1] + half / 2),
                wipe_z=_fmt(wipe_z),
                wipe_descend_dz=_fmt(wipe_z - transit_z),
                wipe_ascend_dz=_fmt(transit_z - wipe_z),
            )
        elif sub.action == "flush":
            fx, fy, fz = wc.flush_pose[0], wc.flush_pose[1], wc.flush_pose[2]
            flush_z = max(fz, transit_z)
            _require_reachable(fx, fy, flush_z, wc, "flush pose")
            params.update(flush_x=_fmt(fx), flush_y=_fmt(fy), flush_z=_fmt(flush_z), flush_hold=_fmt(0.5))
        elif sub.action == "home":
            pass
        else:
            # config-defined custom action: fill shared slots only
            pass

        try:
            lines.extend(line.format_map(params) for line in action.expansion)
        except KeyError as exc:
            raise PreconditionViolated(
                f"action {sub.action!r}: no value computed for template slot {exc}"
            ) from None
    text = "\n".join(lines)
    return parse_plan(text, api, provenance="rule")


def _held_record(holding: Optional[str], intent: Intention, scene: Scene) -> ObjectRecord:
    if holding is None:
        raise PreconditionViolated("nothing is held")
    for sub in intent.subcommands:
        if sub.obj is not None and sub.obj.id == holding:
            return sub.obj
    record = scene.get(holding)
    if record is None:
        raise PreconditionViolated(f"held object {holding!r} is not in the scene")
    return record
