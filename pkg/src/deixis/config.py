"""Configuration loading and validation.

A single YAML file configures the whole pipeline; user files deep-merge over
the packaged defaults.  Validation is strict: overlapping lexicon words,
actions without catalog entries, or catalog expansions that call undeclared
primitives are errors at load time, not runtime surprises.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

import yaml

from .errors import ConfigError, LexiconError, UnknownScenePreset
from .geometry.types import CameraModel, ObjectRecord, Scene
from .grammar import Lexicon, MetricUnit
from .planning.catalog import ActionCatalog, catalog_from_dict
from .planning.types import ApiSpec, ParamSpec, PrimitiveSpec


def _deep_merge(base: dict, override: Mapping) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass(frozen=True)
class SelectionConfig:
    radius_m: float = 0.5
    min_skeleton_confidence: float = 0.3


@dataclass(frozen=True)
class FusionConfig:
    alignment_window_s: float = 0.3
    reorder_tolerance_s: float = 0.1


@dataclass(frozen=True)
class GraspConfig:
    b_max_m: float = 0.12
    theta_min_rad: float = 0.0
    theta_max_rad: float = 0.85


@dataclass(frozen=True)
class LlmConfig:
    base_url_env: str = "DEIXIS_LLM_BASE_URL"
    model_env: str = "DEIXIS_LLM_MODEL"
    api_key_env: str = "DEIXIS_LLM_API_KEY"
    timeout_s: float = 10.0
    retries: int = 2
    backoff_s: float = 0.5


@dataclass(frozen=True)
class PlannerConfig:
    source: str = "rule"
    fallback_to_rule: bool = False
    grasp: GraspConfig = GraspConfig()
    default_pour_angle_deg: float = 90.0
    pour_hold_s: float = 1.0
    push_distance_m: float = 0.10
    clean_stroke_count: int = 3
    transit_pad_m: float = 0.01
    llm: LlmConfig = LlmConfig()
    prompt_examples: tuple[dict, ...] = ()


@dataclass(frozen=True)
class WorkcellConfig:
    workspace_x: tuple[float, float] = (-0.7, 0.7)
    workspace_y: tuple[float, float] = (-0.2, 0.8)
    workspace_z: tuple[float, float] = (0.0, 0.8)
    table_x: tuple[float, float] = (-0.65, 0.65)
    table_y: tuple[float, float] = (0.0, 0.65)
    home_pose: tuple[float, ...] = (0.0, 0.25, 0.45, 0.0, 0.0, 0.0)
    bin_xy: tuple[float, float] = (-0.5, 0.4)
    bin_radius_m: float = 0.12
    flush_pose: tuple[float, ...] = (0.5, 0.55, 0.3, 0.0, 0.0, 0.0)
    gripper_width_m: float = 0.08
    clearance_margin_m: float = 0.05
    grasp_horizontal_slack_m: float = 0.01
    grasp_vertical_window_m: float = 0.02
    grasp_height_fraction: float = 0.5
    place_gap_m: float = 0.01
    pour_event_min_deg: float = 45.0

    def in_workspace(self, x: float, y: float, z: float) -> bool:
        return (
            self.workspace_x[0] <= x <= self.workspace_x[1]
            and self.workspace_y[0] <= y <= self.workspace_y[1]
            and self.workspace_z[0] <= z <= self.workspace_z[1]
        )

    def on_table(self, x: float, y: float) -> bool:
        return self.table_x[0] <= x <= self.table_x[1] and self.table_y[0] <= y <= self.table_y[1]

    def over_bin(self, x: float, y: float) -> bool:
        bx, by = self.bin_xy
        return (x - bx) ** 2 + (y - by) ** 2 <= self.bin_radius_m**2


@dataclass(frozen=True)
class GatewayConfig:
    hover_hz: float = 10.0
    outbox_frames_cap: int = 256


@dataclass
class Config:
    camera: CameraModel
    selection: SelectionConfig
    fusion: FusionConfig
    lexicon: Lexicon
    planner: PlannerConfig
    workcell: WorkcellConfig
    catalog: ActionCatalog
    api: ApiSpec
    gateway: GatewayConfig
    scene_presets: dict[str, tuple[ObjectRecord, ...]] = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def preset_scene(self, name: str, timestamp: float = 0.0) -> Scene:
        if name not in self.scene_presets:
            raise UnknownScenePreset(
                f"unknown scene preset {name!r}; available: {sorted(self.scene_presets)}"
            )
        return Scene(objects=self.scene_presets[name], timestamp=timestamp)


def _camera_from_dict(raw: Mapping) -> CameraModel:
    try:
        return CameraModel(
            fx=float(raw["fx"]),
            fy=float(raw["fy"]),
            cx=float(raw["cx"]),
            cy=float(raw["cy"]),
            rotation=tuple(tuple(float(v) for v in row) for row in raw["rotation"]),
            translation=tuple(float(v) for v in raw["translation"]),
            width=int(raw.get("width", 640)),
            height=int(raw.get("height", 480)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid camera section: {exc}") from exc


def _lexicon_from_dict(raw: Mapping) -> Lexicon:
    def lower_keys(d: Mapping) -> dict:
        out = {}
        for k, v in d.items():
            k = str(k).lower()
            if k in out:
                raise LexiconError(f"duplicate lexicon word {k!r}")
            out[k] = v
        return out

    units = {}
    for word, kind in lower_keys(raw.get("metric_units", {})).items():
        try:
            units[word] = MetricUnit(kind)
        except ValueError:
            raise LexiconError(f"unknown metric unit kind {kind!r} for word {word!r}") from None
    try:
        return Lexicon(
            action_words=lower_keys(raw.get("actions", {})),
            class_words=lower_keys(raw.get("classes", {})),
            pronoun_words=frozenset(str(w).lower() for w in raw.get("pronouns", [])),
            metric_units=units,
            finish_words=frozenset(str(w).lower() for w in raw.get("finish", [])),
            number_words={k: float(v) for k, v in lower_keys(raw.get("numbers", {})).items()},
        )
    except LexiconError:
        raise
    except (ValueError, TypeError) as exc:
        raise LexiconError(f"invalid lexicon section: {exc}") from exc


def _api_from_dict(raw: Mapping) -> ApiSpec:
    primitives = {}
    for name, body in raw.items():
        params = []
        for pname, prange in (body.get("params") or {}).items():
            params.append(
                ParamSpec(
                    name=pname,
                    min=float(prange["min"]),
                    max=float(prange["max"]),
                    unit=str(prange.get("unit", "")),
                )
            )
        primitives[name] = PrimitiveSpec(name=name, params=tuple(params))
    return ApiSpec(primitives=primitives)


def _planner_from_dict(raw: Mapping) -> PlannerConfig:
    grasp = raw.get("grasp", {})
    llm = raw.get("llm", {})
    return PlannerConfig(
        source=str(raw.get("source", "rule")),
        fallback_to_rule=bool(raw.get("fallback_to_rule", False)),
        grasp=GraspConfig(
            b_max_m=float(grasp.get("b_max_m", 0.12)),
            theta_min_rad=float(grasp.get("theta_min_rad", 0.0)),
            theta_max_rad=float(grasp.get("theta_max_rad", 0.85)),
        ),
        default_pour_angle_deg=float(raw.get("pour", {}).get("default_angle_deg", 90.0)),
        pour_hold_s=float(raw.get("pour", {}).get("hold_s", 1.0)),
        push_distance_m=float(raw.get("push", {}).get("distance_m", 0.10)),
        clean_stroke_count=int(raw.get("clean", {}).get("stroke_count", 3)),
        transit_pad_m=float(raw.get("transit_pad_m", 0.01)),
        llm=LlmConfig(
            base_url_env=str(llm.get("base_url_env", "DEIXIS_LLM_BASE_URL")),
            model_env=str(llm.get("model_env", "DEIXIS_LLM_MODEL")),
            api_key_env=str(llm.get("api_key_env", "DEIXIS_LLM_API_KEY")),
            timeout_s=float(llm.get("timeout_s", 10.0)),
            retries=int(llm.get("retries", 2)),
            backoff_s=float(llm.get("backoff_s", 0.5)),
        ),
        prompt_examples=tuple(raw.get("prompt_examples", ())),
    )


def _workcell_from_dict(raw: Mapping) -> WorkcellConfig:
    ws = raw.get("workspace", {})
    table = raw.get("table", {})
    bin_ = raw.get("bin", {})

    def pair(section, key, default):
        v = section.get(key, default)
        return (float(v[0]), float(v[1]))

    return WorkcellConfig(
        workspace_x=pair(ws, "x", (-0.7, 0.7)),
        workspace_y=pair(ws, "y", (-0.2, 0.8)),
        workspace_z=pair(ws, "z", (0.0, 0.8)),
        table_x=pair(table, "x", (-0.65, 0.65)),
        table_y=pair(table, "y", (0.0, 0.65)),
        home_pose=tuple(float(v) for v in raw.get("home_pose", (0.0, 0.25, 0.45, 0.0, 0.0, 0.0))),
        bin_xy=(float(bin_.get("x", -0.5)), float(bin_.get("y", 0.4))),
        bin_radius_m=float(bin_.get("radius_m", 0.12)),
        flush_pose=tuple(float(v) for v in raw.get("flush_pose", (0.5, 0.55, 0.3, 0.0, 0.0, 0.0))),
        gripper_width_m=float(raw.get("gripper_width_m", 0.08)),
        clearance_margin_m=float(raw.get("clearance_margin_m", 0.05)),
        grasp_horizontal_slack_m=float(raw.get("grasp_horizontal_slack_m", 0.01)),
        grasp_vertical_window_m=float(raw.get("grasp_vertical_window_m", 0.02)),
        grasp_height_fraction=float(raw.get("grasp_height_fraction", 0.5)),
        place_gap_m=float(raw.get("place_gap_m", 0.01)),
        pour_event_min_deg=float(raw.get("pour_event_min_deg", 45.0)),
    )


def _scenes_from_dict(raw: Mapping) -> dict[str, tuple[ObjectRecord, ...]]:
    presets = {}
    for name, entries in (raw or {}).items():
        records = []
        for entry in entries:
            try:
                records.append(
                    ObjectRecord(
                        id=str(entry["id"]),
                        class_name=str(entry["class"]),
                        position=tuple(float(v) for v in entry["position"]),
                        height_m=float(entry["height_m"]),
                        width_m=float(entry["width_m"]),
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"scene preset {name!r}: bad entry {entry!r} ({exc})") from exc
        presets[name] = tuple(records)
    return presets


def default_config_dict() -> dict:
    text = resources.files("deixis.data").joinpath("default_config.yaml").read_text()
    return yaml.safe_load(text)


def load_config(path: Optional[str | Path] = None, overrides: Optional[Mapping] = None) -> Config:
    """Build a validated Config from the defaults, an optional file, and overrides."""
    raw = default_config_dict()
    if path is not None:
        with open(path, "r") as fh:
            user = yaml.safe_load(fh) or {}
        if not isinstance(user, dict):
            raise ConfigError(f"config file {path} must contain a mapping")
        raw = _deep_merge(raw, user)
    if overrides:
        raw = _deep_merge(raw, overrides)

    try:
        camera = _camera_from_dict(raw["camera"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lexicon = _lexicon_from_dict(raw.get("lexicon", {}))
    api = _api_from_dict(raw.get("api", {}))
    catalog = catalog_from_dict(raw.get("catalog", {}))
    catalog.validate_against(api)

    missing = sorted(lexicon.actions() - set(catalog.names()))
    if missing:
        raise LexiconError(f"lexicon actions without catalog entries: {missing}")

    gw = raw.get("gateway", {})
    return Config(
        camera=camera,
        selection=SelectionConfig(
            radius_m=float(raw.get("selection", {}).get("radius_m", 0.5)),
            min_skeleton_confidence=float(
                raw.get("selection", {}).get("min_skeleton_confidence", 0.3)
            ),
        ),
        fusion=FusionConfig(
            alignment_window_s=float(raw.get("fusion", {}).get("alignment_window_s", 0.3)),
            reorder_tolerance_s=float(raw.get("fusion", {}).get("reorder_tolerance_s", 0.1)),
        ),
        lexicon=lexicon,
        planner=_planner_from_dict(raw.get("planner", {})),
        workcell=_workcell_from_dict(raw.get("workcell", {})),
        catalog=catalog,
        api=api,
        gateway=GatewayConfig(
            hover_hz=float(gw.get("hover_hz", 10.0)),
            outbox_frames_cap=int(gw.get("outbox_frames_cap", 256)),
        ),
        scene_presets=_scenes_from_dict(raw.get("scenes", {})),
        raw=raw,
    )
