"""Action catalog: what each high-level action means and how it expands.

Definitions and expansion templates are plain config data so vocabulary and
recipes can be edited without touching code.  Template lines are written in
the plan grammar with ``{slot}`` placeholders that the rule planner fills
with computed values.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Mapping

from ..errors import ConfigError, UnknownAction
from .types import ApiSpec

_CALL_HEAD = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(")


@dataclass(frozen=True)
class ActionDef:
    name: str
    object_dependent: bool
    definition: str  # natural-language execution recipe (prompt section 2)
    expansion: tuple[str, ...]  # template lines in the plan grammar

    def slots(self) -> set[str]:
        fields = set()
        fmt = string.Formatter()
        for line in self.expansion:
            for _, field_name, _, _ in fmt.parse(line):
                if field_name:
                    fields.add(field_name)
        return fields


@dataclass(frozen=True)
class ActionCatalog:
    actions: Mapping[str, ActionDef]

    def get(self, name: str) -> ActionDef:
        try:
            return self.actions[name]
        except KeyError:
            raise UnknownAction(f"action {name!r} is not in the catalog") from None

    def __contains__(self, name: str) -> bool:
        return name in self.actions

    def is_object_dependent(self, name: str) -> bool:
        return self.get(name).object_dependent

    def names(self) -> tuple[str, ...]:
        return tuple(self.actions)

    def validate_against(self, api: ApiSpec):
        """Every expansion line must call a declared primitive."""
        for action in self.actions.values():
            if not action.expansion:
                raise ConfigError(f"action {action.name!r} has an empty expansion")
            for line in action.expansion:
                m = _CALL_HEAD.match(line)
                if not m:
                    raise ConfigError(
                        f"action {action.name!r}: expansion line {line!r} is not a call"
                    )
                if m.group(1) not in api:
                    raise ConfigError(
                        f"action {action.name!r} expands to unknown primitive {m.group(1)!r}"
                    )


def catalog_from_dict(raw: Mapping) -> ActionCatalog:
    actions = {}
    for name, body in raw.items():
        try:
            actions[name] = ActionDef(
                name=name,
                object_dependent=bool(body["object_dependent"]),
                definition=str(body["definition"]),
                expansion=tuple(body["expansion"]),
            )
        except KeyError as exc:
            raise ConfigError(f"catalog entry {name!r} is missing {exc}") from None
    return ActionCatalog(actions=actions)
