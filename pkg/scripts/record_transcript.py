#!/usr/bin/env python3
"""Records the golden wire transcript for the session protocol.

Drives a SessionCore with a canonical drag+word session and writes:
  docs/golden_transcript.jsonl          (inbound/outbound frames, in order)
  frontend/fixtures/console_session.json (same session, console-test shape)

The gateway websocket test and the console transcript-equivalence test both
replay this fixture, so live behaviour, the recorded transcript, and the UI
stay in lockstep.
"""

from __future__ import annotations

import json
from pathlib import Path

from deixis.config import load_config
from deixis.gateway import SessionCore, canonical_json
from deixis.harness.synth import POINTER_ELBOW, aim_point, noisy_ray

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
RNG = np.random.default_rng(0)


def ray_payload(scene, target_id, t):
    ray = noisy_ray(RNG, POINTER_ELBOW, aim_point(scene.get(target_id)), 0.0, t)
    return {"r1": list(ray.r1), "r2": list(ray.r2), "t": t}


def word_payload(text, t0, t1):
    return {"text": text, "t_start": t0, "t_end": t1, "confidence": 0.95}


def inbound_frames(config):
    scene = config.preset_scene("two-cups-bowl-plate")
    msgs = [{"v": 1, "kind": "scene_request", "t": 0.0, "payload": {}}]

    def ray(target, t):
        msgs.append({"v": 1, "kind": "ray", "payload": ray_payload(scene, target, t)})

    def word(text, t0, t1):
        msgs.append({"v": 1, "kind": "word", "payload": word_payload(text, t0, t1)})

    ray("cup-red", 0.9)
    word("pick", 1.0, 1.2)
    ray("cup-red", 1.3)
    word("cup", 1.5, 1.7)
    for t in (1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.4):
        ray("cup-red", t)
    word("this", 2.2, 2.4)
    word("finish", 2.8, 3.0)
    return msgs


def main():
    config = load_config()
    core = SessionCore(config, "s0001", preset="two-cups-bowl-plate")
    frames = [{"dir": "out", "frame": m} for m in core.open_messages()]
    for msg in inbound_frames(config):
        frames.append({"dir": "in", "frame": msg})
        for out in core.handle(msg):
            frames.append({"dir": "out", "frame": out})

    transcript = ROOT / "docs" / "golden_transcript.jsonl"
    with open(transcript, "w") as fh:
        for row in frames:
            fh.write(canonical_json(row) + "\n")
    print(f"wrote {transcript} ({len(frames)} frames)")

    outbound = [r["frame"] for r in frames if r["dir"] == "out"]
    intention = next(f for f in outbound if f["kind"] == "intention_emitted")
    feedback = [f for f in outbound if f["kind"] == "selection_feedback"]
    authoritative = [f for f in feedback if f["payload"].get("authoritative")]
    fixture = {
        "preset": "two-cups-bowl-plate",
        "inbound": inbound_frames(config),
        "expected": {
            "intention_canonical": intention["payload"]["canonical"],
            "bound_object": authoritative[-1]["payload"]["object_id"],
            "hover_object_at_pronoun": feedback[-1]["payload"]["object_id"],
            "outbound_kinds": [f["kind"] for f in outbound],
        },
    }
    fixture_path = ROOT / "frontend" / "fixtures" / "console_session.json"
    fixture_path.parent.mkdir(parents=True, exist_ok=True)
    fixture_path.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n")
    print(f"wrote {fixture_path}")


if __name__ == "__main__":
    main()
