"""Session service: protocol handling, isolation, outbox policy, golden transcript."""

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from deixis.config import load_config
from deixis.gateway import Outbox, SessionCore, canonical_json, create_app

CONFIG = load_config()
TRANSCRIPT = Path(__file__).parent.parent / "docs" / "golden_transcript.jsonl"


def load_transcript():
    return [json.loads(line) for line in TRANSCRIPT.read_text().splitlines()]


def fresh_core(session_id="s0001"):
    return SessionCore(CONFIG, session_id, preset="two-cups-bowl-plate")


def word(text, t0, t1):
    return {"v": 1, "kind": "word",
            "payload": {"text": text, "t_start": t0, "t_end": t1}}


def ray_toward(target_id, t, scene):
    from deixis.harness.synth import POINTER_ELBOW, aim_point, noisy_ray
    import numpy as np

    r = noisy_ray(np.random.default_rng(0), POINTER_ELBOW, aim_point(scene.get(target_id)), 0.0, t)
    return {"v": 1, "kind": "ray", "payload": {"r1": list(r.r1), "r2": list(r.r2), "t": t}}


class TestSessionCore:
    def test_open_reports_scene(self):
        core = fresh_core()
        (msg,) = core.open_messages()
        assert msg["kind"] == "state_update"
        assert len(msg["payload"]["objects"]) == 4
        assert msg["session_id"] == "s0001"

    def test_unknown_preset(self):
        from deixis.errors import UnknownScenePreset

        with pytest.raises(UnknownScenePreset):
            SessionCore(CONFIG, "s1", preset="atlantis")

    def test_malformed_message_keeps_session_open(self):
        core = fresh_core()
        (err,) = core.handle({"v": 1, "kind": "levitate", "payload": {}})
        assert err["kind"] == "error"
        assert err["payload"]["error"] == "MalformedMessage"
        # still serviceable
        out = core.handle({"v": 1, "kind": "scene_request", "t": 0.0, "payload": {}})
        assert out[0]["kind"] == "state_update"

    def test_missing_payload_field(self):
        core = fresh_core()
        (err,) = core.handle({"v": 1, "kind": "word", "payload": {"text": "pick"}})
        assert err["payload"]["error"] == "MalformedMessage"

    def test_wrong_protocol_version(self):
        core = fresh_core()
        (err,) = core.handle({"v": 99, "kind": "scene_request", "payload": {}})
        assert err["payload"]["error"] == "MalformedMessage"

    def test_full_flow_and_feedback_parity(self):
        core = fresh_core()
        scene = core.workcell.scene
        out = []
        out += core.handle(word("pick", 1.0, 1.2))
        out += core.handle(word("cup", 1.5, 1.7))
        out += core.handle(ray_toward("cup-red", 2.3, scene))
        out += core.handle(word("this", 2.2, 2.4))
        out += core.handle(word("finish", 2.8, 3.0))
        kinds = [m["kind"] for m in out]
        assert "intention_emitted" in kinds
        assert "plan" in kinds
        assert "trajectory_frame" in kinds
        intention = next(m for m in out if m["kind"] == "intention_emitted")
        bound = intention["payload"]["intention"]["subcommands"][0]["object_id"]
        feedback = [m for m in out if m["kind"] == "selection_feedback"]
        authoritative = [m for m in feedback if m["payload"]["authoritative"]]
        assert authoritative[-1]["payload"]["object_id"] == bound == "cup-red"
        verdict = next(m for m in out if m["kind"] == "verdict")
        assert verdict["payload"]["ok"] is True

    def test_fusion_error_becomes_verdict_and_session_survives(self):
        core = fresh_core()
        out = core.handle(word("this", 1.0, 1.2))  # pronoun before anything
        assert out[0]["kind"] == "verdict"
        assert out[0]["payload"]["error"] == "PronounBeforeClass"
        out = core.handle(word("pick", 2.0, 2.2))
        assert out[-1]["kind"] == "state_update"

    def test_hover_only_with_class_context(self):
        core = fresh_core()
        scene = core.workcell.scene
        out = core.handle(ray_toward("cup-red", 0.5, scene))
        assert out == []  # no class yet: no hover feedback
        core.handle(word("pick", 1.0, 1.2))
        core.handle(word("cup", 1.5, 1.7))
        out = core.handle(ray_toward("cup-red", 2.0, scene))
        assert out and out[0]["kind"] == "selection_feedback"
        assert out[0]["payload"]["object_id"] == "cup-red"

    def test_hover_throttled_to_configured_rate(self):
        core = fresh_core()
        scene = core.workcell.scene
        core.handle(word("pick", 1.0, 1.2))
        core.handle(word("cup", 1.5, 1.7))
        emitted = 0
        for i in range(20):  # 50 Hz burst
            emitted += len(core.handle(ray_toward("cup-red", 2.0 + i * 0.02, scene)))
        assert emitted <= 5  # 0.4 s of events at 10 Hz


class TestOutbox:
    def test_drop_oldest_frame_only(self):
        box = Outbox(frames_cap=3)
        box.put({"kind": "verdict", "n": 0})
        for n in range(5):
            box.put({"kind": "trajectory_frame", "n": n})
        box.put({"kind": "verdict", "n": 1})
        kinds = [m.get("n") for m in box._dq if m["kind"] == "trajectory_frame"]
        assert kinds == [2, 3, 4]  # oldest two frames dropped
        assert box.dropped_frames == 2
        verdicts = [m for m in box._dq if m["kind"] == "verdict"]
        assert len(verdicts) == 2  # never dropped

    def test_close_drains(self):
        import asyncio

        box = Outbox(frames_cap=2)
        box.put({"kind": "plan"})
        box.close()

        async def drain():
            out = []
            while True:
                msg = await box.get()
                if msg is None:
                    return out
                out.append(msg)

        assert asyncio.run(drain()) == [{"kind": "plan"}]


class TestWebSocket:
    def test_unknown_preset_closes(self):
        client = TestClient(create_app(CONFIG))
        with client.websocket_connect("/session?preset=atlantis") as ws:
            frame = json.loads(ws.receive_text())
            assert frame["kind"] == "error"
            assert frame["payload"]["error"] == "UnknownScenePreset"

    def test_sessions_are_isolated(self):
        client = TestClient(create_app(CONFIG))
        with client.websocket_connect("/session") as a, client.websocket_connect("/session") as b:
            fa = json.loads(a.receive_text())
            fb = json.loads(b.receive_text())
            assert fa["session_id"] != fb["session_id"]
            a.send_text(json.dumps(word("pick", 1.0, 1.2)))
            fa2 = json.loads(a.receive_text())
            assert fa2["kind"] == "state_update"
            assert fa2["payload"]["fusion"]["pending"]
            # b sees nothing from a's activity; its next frame answers its own request
            b.send_text(json.dumps({"v": 1, "kind": "scene_request", "t": 0.0, "payload": {}}))
            fb2 = json.loads(b.receive_text())
            assert fb2["session_id"] == fb["session_id"]
            assert fb2["payload"]["fusion"]["pending"] == []

    def test_replaying_golden_transcript_is_byte_identical(self):
        rows = load_transcript()
        client = TestClient(create_app(CONFIG))
        with client.websocket_connect("/session?preset=two-cups-bowl-plate") as ws:
            for row in rows:
                if row["dir"] == "in":
                    ws.send_text(canonical_json(row["frame"]))
                else:
                    got = ws.receive_text()
                    assert got == canonical_json(row["frame"])

    def test_healthz_lists_presets(self):
        client = TestClient(create_app(CONFIG))
        resp = client.get("/healthz")
        assert resp.status_code == 200
        assert "two-cups-bowl-plate" in resp.json()["presets"]


class TestSessionSeeding:
    def test_episode_detection_records_seed_the_scene(self):
        from deixis.harness.synth import detection_record
        from deixis.geometry.types import ObjectRecord

        extra = ObjectRecord(
            id="bottle-9", class_name="bottle", position=(0.5, 0.2, 0.0),
            height_m=0.2, width_m=0.06,
        )
        records = [detection_record(extra, CONFIG, 0.0)]
        core = SessionCore(CONFIG, "s0009", preset="two-cups-bowl-plate", seed_records=records)
        ids = {o.id for o in core.workcell.scene}
        assert "bottle-9" in ids and "cup-red" in ids
        assert len(ids) == 5
