"""Wire message schema for the session protocol.

Every message is one JSON text frame::

    {"v": 1, "kind": <kind>, "session_id": <id>, "t": <event time>,
     "payload": {...}}

Inbound kinds carry the client's event timestamp; outbound kinds carry the
timestamp of the pipeline event they reflect, so a recorded transcript
replays byte-for-byte.  Serialization is canonical JSON (sorted keys,
compact separators).
"""

from __future__ import annotations

import json

from ..errors import MalformedMessage

PROTOCOL_VERSION = 1

INBOUND_KINDS = frozenset({"word", "ray", "touch", "scene_request"})
OUTBOUND_KINDS = frozenset(
    {
        "state_update",
        "selection_feedback",
        "intention_emitted",
        "plan",
        "verdict",
        "trajectory_frame",
        "error",
    }
)

_REQUIRED_PAYLOAD_FIELDS = {
    "word": ("text", "t_start", "t_end"),
    "ray": ("r1", "r2", "t"),
    "touch": ("px", "py", "t"),
    "scene_request": (),
}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def make_message(kind: str, session_id: str, t: float, payload: dict) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "kind": kind,
        "session_id": session_id,
        "t": t,
        "payload": payload,
    }


def parse_inbound(data) -> tuple[str, dict, float]:
    """Validate an inbound message; returns (kind, payload, timestamp)."""
    if not isinstance(data, dict):
        raise MalformedMessage("message must be a JSON object")
    if data.get("v") != PROTOCOL_VERSION:
        raise MalformedMessage(f"unsupported protocol version {data.get('v')!r}")
    kind = data.get("kind")
    if kind not in INBOUND_KINDS:
        raise MalformedMessage(f"unknown inbound kind {kind!r}")
    payload = data.get("payload")
    if not isinstance(payload, dict):
        raise MalformedMessage("payload must be an object")
    for field in _REQUIRED_PAYLOAD_FIELDS[kind]:
        if field not in payload:
            raise MalformedMessage(f"{kind} payload is missing {field!r}")
    if kind == "word":
        t = float(payload["t_end"])
    elif kind == "scene_request":
        t = float(data.get("t", 0.0))
    else:
        t = float(payload["t"])
    return kind, payload, t
