"""Live session service over a websocket wire protocol."""

from .messages import PROTOCOL_VERSION, canonical_json, make_message, parse_inbound
from .service import DEFAULT_PRESET, Outbox, SessionCore, create_app

__all__ = [
    "DEFAULT_PRESET",
    "Outbox",
    "PROTOCOL_VERSION",
    "SessionCore",
    "canonical_json",
    "create_app",
    "make_message",
    "parse_inbound",
]
