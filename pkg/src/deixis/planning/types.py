"""Typed plan representation: primitive specs, steps, sequences, prompts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..errors import ArgumentSchemaMismatch, ConfigError, UnknownApiCall


@dataclass(frozen=True)
class ParamSpec:
    """Closed numeric range for one primitive argument."""

    name: str
    min: float
    max: float
    unit: str = ""

    def __post_init__(self):
        if not (self.min <= self.max):
            raise ConfigError(f"parameter {self.name!r}: empty range [{self.min}, {self.max}]")

    def check(self, value: float, primitive: str):
        if not (self.min <= value <= self.max):
            raise ArgumentSchemaMismatch(
                f"{primitive}({self.name}={value}) outside [{self.min}, {self.max}]"
            )


@dataclass(frozen=True)
class PrimitiveSpec:
    name: str
    params: tuple[ParamSpec, ...]

    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)


@dataclass(frozen=True)
class ApiSpec:
    """The closed set of callable robot primitives and their argument ranges."""

    primitives: Mapping[str, PrimitiveSpec]

    def __post_init__(self):
        for name, spec in self.primitives.items():
            if name != spec.name:
                raise ConfigError(f"primitive key {name!r} != spec name {spec.name!r}")

    def get(self, name: str) -> PrimitiveSpec:
        try:
            return self.primitives[name]
        except KeyError:
            raise UnknownApiCall(f"{name!r} is not a robot primitive") from None

    def __contains__(self, name: str) -> bool:
        return name in self.primitives


@dataclass(frozen=True)
class ActionStep:
    """One validated primitive call."""

    primitive: str
    args: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "args", dict(self.args))

    def check_against(self, api: ApiSpec):
        spec = api.get(self.primitive)
        expected = set(spec.param_names())
        got = set(self.args)
        if expected != got:
            raise ArgumentSchemaMismatch(
                f"{self.primitive}: expected args {sorted(expected)}, got {sorted(got)}"
            )
        for p in spec.params:
            p.check(self.args[p.name], self.primitive)

    def __eq__(self, other):
        if not isinstance(other, ActionStep):
            return NotImplemented
        return self.primitive == other.primitive and self.args == other.args


@dataclass(frozen=True)
class ActionSequence:
    """An ordered, nonempty list of primitive calls plus where it came from."""

    steps: tuple[ActionStep, ...]
    provenance: str = "rule"  # "rule" or "llm:<model-id>"

    def __post_init__(self):
        if not self.steps:
            raise ValueError("an action sequence must contain at least one step")
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


@dataclass(frozen=True)
class PromptBundle:
    """The three prompt sections plus the serialized task payload."""

    api_constraints: str
    action_definitions: str
    example_tasks: str
    intention_payload: str

    def __post_init__(self):
        for name in ("api_constraints", "action_definitions", "example_tasks"):
            if not getattr(self, name).strip():
                raise ValueError(f"prompt section {name} is empty")

    def text(self) -> str:
        return (
            "## Robot API constraints\n"
            f"{self.api_constraints}\n\n"
            "## Action definitions\n"
            f"{self.action_definitions}\n\n"
            "## Example tasks\n"
            f"{self.example_tasks}\n\n"
            "## Task\n"
            f"{self.intention_payload}\n"
        )
