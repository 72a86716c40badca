"""Deterministic episode replay and the accuracy/robustness metrics.

Replay feeds every recorded event through the live pipeline (fusion ->
planner -> validator -> workcell) in global timestamp order.  Pipeline
errors become verdicts; an episode never crashes the harness.

Metric definitions: accuracy is the percentage of trials whose command
executed successfully (final-state predicate holds), robustness the
percentage of trials whose intent was detected correctly (emitted intention
equals the expectation).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

from ..config import Config
from ..errors import DeixisError, GrammarError
from ..fusion import IntentEncoder, Intention
from ..geometry.ops import back_project, forearm_ray, touch_ray
from ..geometry.types import Detection, ObjectRecord, Scene, SkeletonFrame
from ..grammar import TokenAssembler, WordToken
from ..planning import plan_intention, serialize_plan, validate_sequence
from ..planning.types import ActionSequence
from ..workcell import WorkcellState
from .episodes import Episode


class SceneBuilder:
    """Accumulates detections into a scene; repeated ids update in place.

    Back-projected bbox centers sit at the object's mid-height, so the
    builder drops each record by half its height to the footprint-base
    convention the workcell uses.
    """

    def __init__(self, config: Config, initial: tuple[ObjectRecord, ...] = ()):
        self.config = config
        self._records: dict[str, ObjectRecord] = {o.id: o for o in initial}
        self._count = 0
        self.timestamp = 0.0

    def add_detection(self, rec: dict) -> ObjectRecord:
        det = Detection(
            class_name=rec["class"],
            bbox=tuple(rec["bbox"]),
            depth_m=float(rec["depth_m"]),
            timestamp=float(rec["t"]),
            confidence=float(rec.get("confidence", 1.0)),
            object_id=rec.get("id"),
        )
        fallback_id = f"obj-{self._count:03d}"
        record = back_project(det, self.config.camera, object_id=det.object_id or fallback_id)
        self._count += 1
        x, y, z = record.position
        record = record.moved_to((x, y, z - record.height_m / 2.0))
        self._records[record.id] = record
        self.timestamp = det.timestamp
        return record

    def scene(self) -> Scene:
        return Scene(objects=tuple(self._records.values()), timestamp=self.timestamp)


@dataclass
class StageTimings:
    fusion_s: float = 0.0
    planning_s: float = 0.0
    validation_s: float = 0.0
    execution_s: float = 0.0

    def as_dict(self) -> dict:
        return {
            "fusion_s": self.fusion_s,
            "planning_s": self.planning_s,
            "validation_s": self.validation_s,
            "execution_s": self.execution_s,
        }


@dataclass
class ReplayResult:
    episode: str
    task: str
    intentions: list[Intention] = field(default_factory=list)
    plans: list[ActionSequence] = field(default_factory=list)
    verdicts: list[dict] = field(default_factory=list)
    workcell: Optional[WorkcellState] = None
    timings: StageTimings = field(default_factory=StageTimings)

    @property
    def ok(self) -> bool:
        return all(v.get("ok", False) for v in self.verdicts)

    @property
    def hard_errors(self) -> list[dict]:
        return [v for v in self.verdicts if not v.get("ok", False)]

    intent_match: Optional[bool] = None
    final_match: Optional[bool] = None

    def as_dict(self) -> dict:
        return {
            "episode": self.episode,
            "task": self.task,
            "intentions": [i.as_dict() for i in self.intentions],
            "plans": [serialize_plan(p) for p in self.plans],
            "verdicts": self.verdicts,
            "ok": self.ok,
            "intent_match": self.intent_match,
            "final_match": self.final_match,
        }


def _intention_comparable(d: dict) -> dict:
    return {
        "subcommands": [
            {"action": sc.get("action"), "object_id": sc.get("object_id")}
            for sc in d.get("subcommands", [])
        ],
        "omega": d.get("omega"),
    }


def intentions_match(emitted: list[Intention], expected: list[dict]) -> bool:
    if len(emitted) != len(expected):
        return False
    for intent, exp in zip(emitted, expected):
        if _intention_comparable(intent.as_dict()) != _intention_comparable(exp):
            return False
    return True


def check_final_predicates(preds: list[dict], result: ReplayResult, config: Config) -> bool:
    wc = result.workcell
    for pred in preds:
        kind = pred["kind"]
        if wc is None:
            return False
        if kind == "holding":
            if wc.robot.holding != pred["object_id"]:
                return False
        elif kind == "not_holding":
            if wc.robot.holding is not None:
                return False
        elif kind == "at":
            obj = wc.scene.get(pred["object_id"])
            tol = float(pred.get("tol", 0.05))
            if obj is None:
                return False
            if abs(obj.position[0] - pred["x"]) > tol or abs(obj.position[1] - pred["y"]) > tol:
                return False
        elif kind == "in_bin":
            obj = wc.scene.get(pred["object_id"])
            if obj is None or wc.robot.holding == obj.id:
                return False
            if not config.workcell.over_bin(obj.position[0], obj.position[1]):
                return False
        elif kind == "pose_near":
            tol = float(pred.get("tol", 1e-6))
            target = (pred["x"], pred["y"], pred["z"])
            if math.dist(wc.robot.position, target) > tol:
                return False
        elif kind == "poured_into":
            if f"poured into {pred['object_id']}" not in wc.all_events():
                return False
        elif kind == "nearer_base":
            obj = wc.scene.get(pred["object_id"])
            if obj is None:
                return False
            before = pred["initial_xy"]
            delta = math.hypot(*before) - math.hypot(obj.position[0], obj.position[1])
            if delta < float(pred.get("min_delta", 0.05)):
                return False
        else:
            raise ValueError(f"unknown final predicate kind {kind!r}")
    return True


def replay(episode: Episode, config: Config) -> ReplayResult:
    """Drive one episode through the full pipeline; errors become verdicts."""
    result = ReplayResult(episode=episode.name, task=episode.task)
    initial = config.scene_presets.get(episode.preset, ()) if episode.preset else ()
    builder = SceneBuilder(config, initial=initial)
    encoder = IntentEncoder(
        config.fusion, config.selection, config.catalog.is_object_dependent
    )
    assembler = TokenAssembler(config.lexicon)
    workcell: Optional[WorkcellState] = None

    def ensure_workcell() -> WorkcellState:
        nonlocal workcell
        if workcell is None:
            workcell = WorkcellState(
                config.workcell,
                builder.scene(),
                gripper_open_angle=config.planner.grasp.theta_max_rad,
            )
            if episode.initial_holding:
                workcell.seed_holding(episode.initial_holding)
            result.workcell = workcell
        return workcell

    t0 = time.perf_counter()
    for rec in episode.sorted_events():
        stream = rec["stream"]
        try:
            if stream == "detection":
                builder.add_detection(rec)
            elif stream == "skeleton":
                frame = SkeletonFrame(
                    timestamp=float(rec["t"]),
                    right_elbow=tuple(rec["right_elbow"]),
                    right_wrist=tuple(rec["right_wrist"]),
                    confidence=float(rec.get("confidence", 1.0)),
                )
                if frame.confidence < config.selection.min_skeleton_confidence:
                    continue  # sensor noise, not a protocol fault
                encoder.feed_ray(forearm_ray(frame, config.selection.min_skeleton_confidence))
            elif stream == "touch":
                encoder.feed_ray(
                    touch_ray(float(rec["px"]), float(rec["py"]), config.camera, float(rec["t"]))
                )
            elif stream == "word":
                word = WordToken(
                    text=rec["text"],
                    t_start=float(rec["t_start"]),
                    t_end=float(rec["t_end"]),
                    confidence=float(rec.get("confidence", 1.0)),
                )
                try:
                    tokens = assembler.feed(word)
                except GrammarError as exc:
                    result.verdicts.append(_fail("grammar", exc))
                    break
                intention = None
                for tok in tokens:
                    intention = encoder.feed_command(tok, builder.scene())
                if intention is not None:
                    result.intentions.append(intention)
                    result.timings.fusion_s += time.perf_counter() - t0
                    _plan_and_execute(intention, ensure_workcell(), config, result)
                    t0 = time.perf_counter()
                    if result.hard_errors:
                        break
        except DeixisError as exc:
            result.verdicts.append(_fail("fusion", exc))
            break
    if not result.hard_errors:
        result.timings.fusion_s += time.perf_counter() - t0
    ensure_workcell()

    if episode.expected:
        expected_intents = episode.expected.get("intentions")
        if expected_intents is None and "intention" in episode.expected:
            expected_intents = [episode.expected["intention"]]
        if expected_intents is not None:
            result.intent_match = intentions_match(result.intentions, expected_intents)
        final = episode.expected.get("final")
        if final:
            result.final_match = result.ok and check_final_predicates(final, result, config)
        elif result.intent_match is not None:
            result.final_match = result.ok and result.intent_match
    return result


def _fail(stage: str, exc: Exception) -> dict:
    return {
        "stage": stage,
        "ok": False,
        "error": type(exc).__name__,
        "message": str(exc),
    }


def _plan_and_execute(
    intention: Intention, workcell: WorkcellState, config: Config, result: ReplayResult
):
    t0 = time.perf_counter()
    try:
        seq = plan_intention(intention, workcell.scene, workcell.robot, config)
    except DeixisError as exc:
        result.verdicts.append(_fail("planning", exc))
        return
    result.timings.planning_s += time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        validate_sequence(seq, workcell.scene, workcell.robot, config.api, config.workcell)
    except DeixisError as exc:
        result.verdicts.append(_fail("validation", exc))
        return
    result.timings.validation_s += time.perf_counter() - t0

    result.plans.append(seq)
    t0 = time.perf_counter()
    try:
        workcell.execute_sequence(seq)
    except DeixisError as exc:
        result.verdicts.append(_fail("execution", exc))
        return
    result.timings.execution_s += time.perf_counter() - t0
    result.verdicts.append(
        {
            "stage": "pipeline",
            "ok": True,
            "intention": intention.as_dict(),
            "plan_steps": len(seq),
            "provenance": seq.provenance,
        }
    )
