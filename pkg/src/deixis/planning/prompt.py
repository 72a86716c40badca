"""Deterministic three-section prompt assembly for the model plan source.

Sections: (1) the callable API with argument ranges, (2) the natural-language
action definitions from the catalog, (3) worked example tasks.  The task
payload serializes the intention, the scene snapshot, and the robot state
(including what the gripper currently holds) as canonical JSON, so identical
inputs always produce byte-identical bundles.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import json

if TYPE_CHECKING:
    from ..config import PlannerConfig

from ..fusion import Intention
from ..geometry.types import Scene
from ..workcell import RobotState
from .catalog import ActionCatalog
from .types import ApiSpec, PromptBundle


def render_api_constraints(api: ApiSpec) -> str:
    lines = []
    for name in sorted(api.primitives):
        spec = api.primitives[name]
        if spec.params:
            args = ", ".join(
                f"{p.name}: {p.unit or 'number'} in [{p.min:g}, {p.max:g}]" for p in spec.params
            )
        else:
            args = ""
        lines.append(f"{name}({args})")
    lines.append("One call per line, exactly this form: name(key=value, ...).")
    lines.append("Plain decimal numbers only. Lines starting with # are comments.")
    lines.append("No other functions, no variables, no control flow, no prose.")
    return "\n".join(lines)


def render_action_definitions(catalog: ActionCatalog) -> str:
    blocks = []
    for name in catalog.names():
        action = catalog.get(name)
        dep = "object-dependent" if action.object_dependent else "no object"
        blocks.append(f"{name} ({dep}): {action.definition}")
    return "\n".join(blocks)


def render_example_tasks(cfg: PlannerConfig) -> str:
    blocks = []
    for ex in cfg.prompt_examples:
        plan = str(ex.get("plan", "")).rstrip()
        blocks.append(f"task: {ex.get('task', '')}\nplan:\n{plan}")
    return "\n\n".join(blocks) if blocks else "(none)"


def intention_payload(intent: Intention, scene: Scene, robot: RobotState) -> str:
    payload = {
        "intention": intent.as_dict(),
        "scene": [
            {
                "id": o.id,
                "class": o.class_name,
                "position": list(o.position),
                "height_m": o.height_m,
                "width_m": o.width_m,
            }
            for o in sorted(scene, key=lambda o: o.id)
        ],
        "robot": robot.as_dict(),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def build_prompt(
    intent: Intention,
    scene: Scene,
    robot: RobotState,
    catalog: ActionCatalog,
    api: ApiSpec,
    cfg: PlannerConfig,
) -> PromptBundle:
    for sub in intent.subcommands:
        catalog.get(sub.action)  # raises UnknownAction early
    return PromptBundle(
        api_constraints=render_api_constraints(api),
        action_definitions=render_action_definitions(catalog),
        example_tasks=render_example_tasks(cfg),
        intention_payload=intention_payload(intent, scene, robot),
    )
