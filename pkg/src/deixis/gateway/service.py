"""The session service: one websocket connection drives one isolated session.

Inbound word/ray/touch events feed the fusion engine; the session streams
back fusion state, hover selection feedback, the emitted intention, the
plan, validator verdicts, and per-step trajectory frames.  Sessions never
share state; an error in one closes nothing else.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import logging
from collections import deque
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from ..config import Config
from ..errors import DeixisError, GrammarError, MalformedMessage, UnknownScenePreset
from ..fusion import IntentEncoder, Intention
from ..geometry.ops import select_object, touch_ray
from ..geometry.types import DeicticRay
from ..grammar import TokenAssembler, WordToken
from ..harness.replay import SceneBuilder
from ..planning import plan_intention, serialize_plan, validate_sequence
from ..workcell import WorkcellState
from .messages import canonical_json, make_message, parse_inbound

log = logging.getLogger(__name__)

DEFAULT_PRESET = "two-cups-bowl-plate"


class SessionCore:
    """Synchronous session logic; the websocket layer is a thin shell."""

    def __init__(
        self,
        config: Config,
        session_id: str,
        preset: Optional[str] = None,
        seed_records: Optional[list[dict]] = None,
    ):
        self.config = config
        self.session_id = session_id
        self.preset = preset or DEFAULT_PRESET
        scene = config.preset_scene(self.preset)
        if seed_records:
            builder = SceneBuilder(config, initial=scene.objects)
            for rec in seed_records:
                if rec.get("stream") == "detection":
                    builder.add_detection(rec)
            scene = builder.scene()
        self.workcell = WorkcellState(
            config.workcell, scene, gripper_open_angle=config.planner.grasp.theta_max_rad
        )
        self.encoder = IntentEncoder(
            config.fusion, config.selection, config.catalog.is_object_dependent
        )
        self.assembler = TokenAssembler(config.lexicon)
        self._last_hover_t = float("-inf")
        self._seen_bind_events = 0
        self.closed = False

    # -- outbound builders --------------------------------------------------

    def _msg(self, kind: str, t: float, payload: dict) -> dict:
        return make_message(kind, self.session_id, t, payload)

    def _scene_payload(self) -> dict:
        return {
            "objects": [
                {
                    "id": o.id,
                    "class": o.class_name,
                    "position": list(o.position),
                    "height_m": o.height_m,
                    "width_m": o.width_m,
                }
                for o in self.workcell.scene
            ],
            "robot": self.workcell.robot.as_dict(),
        }

    def _state_update(self, t: float) -> dict:
        payload = {
            "fusion": self.encoder.state_summary(),
            **self._scene_payload(),
        }
        return self._msg("state_update", t, payload)

    def open_messages(self) -> list[dict]:
        return [self._state_update(0.0)]

    # -- inbound handling ----------------------------------------------------

    def handle(self, data) -> list[dict]:
        if self.closed:
            return [self._msg("error", 0.0, {"error": "SessionClosed", "message": "session closed"})]
        try:
            kind, payload, t = parse_inbound(data)
        except (MalformedMessage, ValueError, TypeError) as exc:
            return [
                self._msg(
                    "error", 0.0, {"error": "MalformedMessage", "message": str(exc)}
                )
            ]
        try:
            if kind == "word":
                return self._on_word(payload, t)
            if kind == "ray":
                ray = DeicticRay(
                    r1=tuple(payload["r1"]), r2=tuple(payload["r2"]), timestamp=t
                )
                return self._on_ray(ray)
            if kind == "touch":
                ray = touch_ray(
                    float(payload["px"]), float(payload["py"]), self.config.camera, t
                )
                return self._on_ray(ray)
            if kind == "scene_request":
                return [self._state_update(t)]
        except (ValueError, TypeError) as exc:
            return [
                self._msg("error", t, {"error": "MalformedMessage", "message": str(exc)})
            ]
        raise AssertionError(f"unhandled kind {kind}")  # pragma: no cover

    def _verdict(self, stage: str, t: float, exc: Exception) -> dict:
        return self._msg(
            "verdict",
            t,
            {"stage": stage, "ok": False, "error": type(exc).__name__, "message": str(exc)},
        )

    def _on_ray(self, ray: DeicticRay) -> list[dict]:
        out: list[dict] = []
        try:
            self.encoder.feed_ray(ray)
        except DeixisError as exc:
            return [self._verdict("fusion", ray.timestamp, exc)]
        hover = self._hover_feedback(ray)
        if hover is not None:
            out.append(hover)
        return out

    def _hover_feedback(self, ray: DeicticRay) -> Optional[dict]:
        """Advisory nearest-match feedback, throttled; binding stays with the pronoun."""
        pending = self.encoder.pending
        if not pending or pending[-1].class_filter is None or pending[-1].obj is not None:
            return None
        if ray.timestamp - self._last_hover_t < 1.0 / self.config.gateway.hover_hz:
            return None
        self._last_hover_t = ray.timestamp
        class_filter = pending[-1].class_filter
        try:
            record, distance = select_object(
                ray, self.workcell.scene, class_filter, self.config.selection.radius_m
            )
            payload = {
                "object_id": record.id,
                "distance_m": distance,
                "class": class_filter,
                "authoritative": False,
            }
        except DeixisError as exc:
            payload = {
                "object_id": None,
                "class": class_filter,
                "authoritative": False,
                "reason": type(exc).__name__,
            }
        return self._msg("selection_feedback", ray.timestamp, payload)

    def _on_word(self, payload: dict, t: float) -> list[dict]:
        word = WordToken(
            text=str(payload["text"]),
            t_start=float(payload["t_start"]),
            t_end=float(payload["t_end"]),
            confidence=float(payload.get("confidence", 1.0)),
        )
        out: list[dict] = []
        try:
            tokens = self.assembler.feed(word)
        except GrammarError as exc:
            return [self._verdict("grammar", t, exc)]
        intention: Optional[Intention] = None
        for tok in tokens:
            try:
                intention = self.encoder.feed_command(tok, self.workcell.scene)
            except DeixisError as exc:
                out.append(self._verdict("fusion", t, exc))
                out.append(self._state_update(t))
                return out
        out.extend(self._bind_feedback(t))
        out.append(self._state_update(t))
        if intention is not None:
            out.extend(self._run_pipeline(intention, t))
        return out

    def _bind_feedback(self, t: float) -> list[dict]:
        """Authoritative selection feedback for every new pronoun binding."""
        out = []
        events = self.encoder.events
        for ev in events[self._seen_bind_events:]:
            if ev.get("kind") == "bind":
                out.append(
                    self._msg(
                        "selection_feedback",
                        ev.get("t", t),
                        {
                            "object_id": ev["object_id"],
                            "distance_m": ev["distance"],
                            "authoritative": True,
                        },
                    )
                )
        self._seen_bind_events = len(events)
        return out

    def _run_pipeline(self, intention: Intention, t: float) -> list[dict]:
        out = [
            self._msg(
                "intention_emitted",
                t,
                {"intention": intention.as_dict(), "canonical": canonical_json(intention.as_dict())},
            )
        ]
        try:
            seq = plan_intention(intention, self.workcell.scene, self.workcell.robot, self.config)
        except DeixisError as exc:
            out.append(self._verdict("planning", t, exc))
            return out
        out.append(
            self._msg(
                "plan", t, {"text": serialize_plan(seq), "provenance": seq.provenance}
            )
        )
        try:
            validate_sequence(
                seq, self.workcell.scene, self.workcell.robot, self.config.api, self.config.workcell
            )
        except DeixisError as exc:
            out.append(self._verdict("validation", t, exc))
            return out
        out.append(
            self._msg("verdict", t, {"stage": "validation", "ok": True, "steps": len(seq)})
        )
        log_start = len(self.workcell.log)
        try:
            self.workcell.execute_sequence(seq)
        except DeixisError as exc:
            out.append(self._verdict("execution", t, exc))
        for entry in self.workcell.log[log_start:]:
            out.append(self._msg("trajectory_frame", t, entry.as_dict()))
        out.append(self._state_update(t))
        return out


class Outbox:
    """Outbound queue: bounded for trajectory frames (drop-oldest), unbounded
    for everything else so verdicts are never lost."""

    def __init__(self, frames_cap: int):
        self.frames_cap = frames_cap
        self.dropped_frames = 0
        self._dq: deque = deque()
        self._wakeup = asyncio.Event()
        self._closed = False

    def put(self, msg: dict):
        if msg["kind"] == "trajectory_frame":
            frames = sum(1 for m in self._dq if m["kind"] == "trajectory_frame")
            if frames >= self.frames_cap:
                for i, m in enumerate(self._dq):
                    if m["kind"] == "trajectory_frame":
                        del self._dq[i]
                        self.dropped_frames += 1
                        break
        self._dq.append(msg)
        self._wakeup.set()

    def close(self):
        self._closed = True
        self._wakeup.set()

    async def get(self) -> Optional[dict]:
        while True:
            if self._dq:
                return self._dq.popleft()
            if self._closed:
                return None
            self._wakeup.clear()
            await self._wakeup.wait()


def create_app(config: Config) -> FastAPI:
    app = FastAPI(title="deixis gateway")
    ids = itertools.count(1)

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "presets": sorted(config.scene_presets)}

    @app.websocket("/session")
    async def session_ws(websocket: WebSocket):
        await websocket.accept()
        preset = websocket.query_params.get("preset") or DEFAULT_PRESET
        session_id = f"s{next(ids):04d}"
        try:
            core = SessionCore(config, session_id, preset=preset)
        except UnknownScenePreset as exc:
            await websocket.send_text(
                canonical_json(
                    make_message(
                        "error",
                        session_id,
                        0.0,
                        {"error": "UnknownScenePreset", "message": str(exc)},
                    )
                )
            )
            await websocket.close(code=4004)
            return

        outbox = Outbox(frames_cap=config.gateway.outbox_frames_cap)

        async def sender():
            while True:
                msg = await outbox.get()
                if msg is None:
                    return
                await websocket.send_text(canonical_json(msg))

        sender_task = asyncio.create_task(sender())
        try:
            for msg in core.open_messages():
                outbox.put(msg)
            while True:
                try:
                    data = await websocket.receive_json()
                except json.JSONDecodeError:
                    outbox.put(
                        make_message(
                            "error",
                            session_id,
                            0.0,
                            {"error": "MalformedMessage", "message": "frame is not JSON"},
                        )
                    )
                    continue
                for msg in core.handle(data):
                    outbox.put(msg)
        except WebSocketDisconnect:
            pass
        except Exception:  # session isolation: log, never propagate to siblings
            log.exception("session %s crashed", session_id)
        finally:
            core.closed = True
            outbox.close()
            try:
                await asyncio.wait_for(sender_task, timeout=5.0)
            except (asyncio.TimeoutError, Exception):
                sender_task.cancel()

    return app
