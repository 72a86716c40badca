"""Episode files: line-delimited JSON records with explicit stream tags.

An episode is a recorded multimodal trace (word / skeleton / detection /
touch events) plus optional ``meta`` and ``expected`` records.  The format
is deliberately human-editable; the bundled fixtures double as format
documentation.

Record shapes::

    {"stream": "meta", "name": ..., "task": ..., "preset": null,
     "initial_holding": null}
    {"stream": "expected", "intentions": [...], "final": [...]}
    {"stream": "detection", "t": 0.0, "class": "cup", "bbox": [x0,y0,x1,y1],
     "depth_m": 1.2, "confidence": 0.98, "id": "cup-red"}
    {"stream": "skeleton", "t": 0.5, "right_elbow": [x,y,z],
     "right_wrist": [x,y,z], "confidence": 0.9}
    {"stream": "word", "t_start": 1.0, "t_end": 1.2, "text": "pick",
     "confidence": 0.95}
    {"stream": "touch", "t": 1.1, "px": 320.0, "py": 240.0}

Word events order globally by ``t_end`` (the recognition instant).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

EVENT_STREAMS = ("word", "skeleton", "detection", "touch")


@dataclass
class Episode:
    name: str
    task: str
    events: list[dict]
    expected: Optional[dict] = None
    preset: Optional[str] = None
    initial_holding: Optional[str] = None
    notes: str = ""
    path: Optional[str] = None

    def sorted_events(self) -> list[dict]:
        """Events in global timestamp order (stable for equal stamps)."""
        return sorted(
            self.events, key=lambda r: (event_time(r), EVENT_STREAMS.index(r["stream"]))
        )


def event_time(record: dict) -> float:
    if record["stream"] == "word":
        return float(record["t_end"])
    return float(record["t"])


def _check_monotone(events: Iterable[dict], path) -> None:
    last: dict[str, float] = {}
    for rec in events:
        stream = rec["stream"]
        t = event_time(rec)
        if stream in last and t < last[stream]:
            raise ValueError(
                f"{path}: {stream} stream timestamps regress at t={t} (last {last[stream]})"
            )
        last[stream] = t


def _check_expected_refs(expected, events, meta, path) -> None:
    """Expected bindings must reference objects the episode can produce.

    Skipped when a scene preset seeds additional objects or when detections
    rely on auto-assigned ids.
    """
    if not expected or meta.get("preset"):
        return
    detections = [r for r in events if r["stream"] == "detection"]
    if any("id" not in r for r in detections):
        return
    known = {r["id"] for r in detections}
    if meta.get("initial_holding") and meta["initial_holding"] not in known:
        raise ValueError(f"{path}: initial_holding references unknown object")
    intents = expected.get("intentions") or ([expected["intention"]] if "intention" in expected else [])
    for intent in intents:
        for sub in intent.get("subcommands", []):
            obj = sub.get("object_id")
            if obj is not None and obj not in known:
                raise ValueError(
                    f"{path}: expected intention references {obj!r}, "
                    "which no detection event provides"
                )


def load_episode(path: str | Path) -> Episode:
    path = Path(path)
    meta: dict = {}
    expected: Optional[dict] = None
    events: list[dict] = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: bad JSON ({exc})") from exc
            stream = rec.get("stream")
            if stream == "meta":
                rec.pop("stream")
                meta = rec
            elif stream == "expected":
                rec.pop("stream")
                expected = rec
            elif stream in EVENT_STREAMS:
                events.append(rec)
            else:
                raise ValueError(f"{path}:{line_no}: unknown stream tag {stream!r}")
    _check_monotone(events, path)
    _check_expected_refs(expected, events, meta, path)
    name = meta.get("name") or path.stem
    return Episode(
        name=name,
        task=meta.get("task", name),
        events=events,
        expected=expected,
        preset=meta.get("preset"),
        initial_holding=meta.get("initial_holding"),
        notes=meta.get("notes", ""),
        path=str(path),
    )


def save_episode(episode: Episode, path: str | Path) -> None:
    path = Path(path)
    records: list[dict] = [
        {
            "stream": "meta",
            "name": episode.name,
            "task": episode.task,
            "preset": episode.preset,
            "initial_holding": episode.initial_holding,
            "notes": episode.notes,
        }
    ]
    if episode.expected is not None:
        rec = dict(episode.expected)
        rec["stream"] = "expected"
        records.append(rec)
    records.extend(episode.sorted_events())
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_episode_dir(path: str | Path) -> list[Episode]:
    files = sorted(Path(path).glob("*.jsonl"))
    if not files:
        raise FileNotFoundError(f"no .jsonl episodes under {path}")
    return [load_episode(f) for f in files]
