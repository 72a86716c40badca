"""Intention -> validated action sequence."""

from __future__ import annotations

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from ..config import Config

from ..errors import PlannerError
from ..fusion import Intention
from ..geometry.types import Scene
from ..workcell import RobotState
from .catalog import ActionCatalog, ActionDef, catalog_from_dict
from .llm import LlmClient, plan_llm
from .parse import parse_plan, serialize_plan
from .prompt import build_prompt
from .rule import gripper_angle_from_width, plan_rule, transit_height
from .types import ActionSequence, ActionStep, ApiSpec, ParamSpec, PrimitiveSpec, PromptBundle
from .validate import validate_sequence

__all__ = [
    "ActionCatalog",
    "ActionDef",
    "ActionSequence",
    "ActionStep",
    "ApiSpec",
    "LlmClient",
    "ParamSpec",
    "PrimitiveSpec",
    "PromptBundle",
    "build_prompt",
    "catalog_from_dict",
    "gripper_angle_from_width",
    "parse_plan",
    "plan_intention",
    "plan_llm",
    "plan_rule",
    "serialize_plan",
    "transit_height",
    "validate_sequence",
]


def plan_intention(
    intent: Intention,
    scene: Scene,
    robot: RobotState,
    config: Config,
    client: Optional[LlmClient] = None,
) -> ActionSequence:
    """Plan via the configured source; fallback to rule only if opted in."""
    if config.planner.source == "llm":
        try:
            bundle = build_prompt(intent, scene, robot, config.catalog, config.api, config.planner)
            llm_client = client or LlmClient(config.planner.llm)
            text = plan_llm(bundle, llm_client)
            return parse_plan(text, config.api, provenance=f"llm:{llm_client.model or 'unknown'}")
        except PlannerError:
            if not config.planner.fallback_to_rule:
                raise
    return plan_rule(
        intent, scene, robot, config.catalog, config.api, config.planner, config.workcell
    )
