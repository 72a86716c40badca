#!/usr/bin/env python3
"""Regenerates the bundled protocol episodes under src/deixis/data/episodes/.

The fixtures are checked in (they double as format documentation); re-run
this script only when the episode format or the default scene changes.
"""

from __future__ import annotations

from pathlib import Path

from deixis.config import load_config
from deixis.harness.episodes import Episode, save_episode
from deixis.harness.synth import (
    POINTER_ELBOW,
    aim_point,
    detection_record,
    noisy_ray,
    skeleton_record,
    word_records,
)

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "src" / "deixis" / "data" / "episodes"
RNG = np.random.default_rng(0)  # sigma=0 everywhere: rays are exact

CONFIG = load_config()
SCENE = CONFIG.preset_scene("two-cups-bowl-plate")
RUBBISH = CONFIG.preset_scene("rubbish-held")


def detections(scene, t0=0.0):
    return [detection_record(o, CONFIG, t0 + 0.05 * i) for i, o in enumerate(scene)]


def frames(scene, target_id, stamps):
    target = aim_point(scene.get(target_id))
    return [
        skeleton_record(noisy_ray(RNG, POINTER_ELBOW, target, 0.0, t), confidence=0.9)
        for t in stamps
    ]


def episode(name, task, events, expected, preset=None, initial_holding=None, notes=""):
    return Episode(
        name=name, task=task, events=events, expected=expected,
        preset=preset, initial_holding=initial_holding, notes=notes,
    )


def build_all() -> list[Episode]:
    home_pose = CONFIG.workcell.home_pose
    episodes = []

    episodes.append(
        episode(
            "home", "home",
            events=word_records([("home", 1.0, 1.2), ("finish", 1.6, 1.8)]),
            expected={
                "intentions": [
                    {"subcommands": [{"action": "home", "object_id": None}], "omega": None}
                ],
                "final": [
                    {"kind": "pose_near", "x": home_pose[0], "y": home_pose[1],
                     "z": home_pose[2], "tol": 1e-9},
                    {"kind": "not_holding"},
                ],
            },
            notes="object-independent action, empty scene",
        )
    )

    episodes.append(
        episode(
            "throw", "throw",
            events=detections(RUBBISH) + word_records(
                [("throw", 1.0, 1.2), ("finish", 1.6, 1.8)]
            ),
            expected={
                "intentions": [
                    {"subcommands": [{"action": "throw", "object_id": None}], "omega": None}
                ],
                "final": [
                    {"kind": "in_bin", "object_id": "rubbish-1"},
                    {"kind": "not_holding"},
                ],
            },
            initial_holding="rubbish-1",
            notes="starts with the rubbish already grasped (carry-over from a pick)",
        )
    )

    episodes.append(
        episode(
            "pick-cup", "pick-cup",
            events=detections(SCENE)
            + frames(SCENE, "cup-red", [1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.4])
            + word_records(
                [("pick", 1.0, 1.2), ("cup", 1.5, 1.7), ("this", 2.2, 2.4),
                 ("finish", 2.8, 3.0)]
            ),
            expected={
                "intentions": [
                    {"subcommands": [{"action": "pick", "object_id": "cup-red"}], "omega": None}
                ],
                "final": [{"kind": "holding", "object_id": "cup-red"}],
            },
        )
    )

    episodes.append(
        episode(
            "push-plate-near", "push-plate-near",
            events=detections(SCENE)
            + frames(SCENE, "plate-1", [1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.4])
            + word_records(
                [("push", 1.0, 1.2), ("plate", 1.5, 1.7), ("this", 2.2, 2.4),
                 ("near", 2.8, 3.0), ("finish", 3.4, 3.6)]
            ),
            expected={
                "intentions": [
                    {
                        "subcommands": [{"action": "push", "object_id": "plate-1"}],
                        "omega": {"value": "near", "unit": "spatial-qualifier"},
                    }
                ],
                "final": [
                    {"kind": "nearer_base", "object_id": "plate-1",
                     "initial_xy": [-0.35, 0.25], "min_delta": 0.09},
                    {"kind": "not_holding"},
                ],
            },
        )
    )

    episodes.append(
        episode(
            "pick-cup-put-bowl", "pick-cup-put-bowl",
            events=detections(SCENE)
            + frames(SCENE, "cup-red", [1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.4])
            + frames(SCENE, "bowl-white", [3.6, 3.7, 3.8, 3.9, 4.0])
            + word_records(
                [("pick", 1.0, 1.2), ("cup", 1.5, 1.7), ("this", 2.2, 2.4),
                 ("put", 2.8, 3.0), ("bowl", 3.3, 3.5), ("that", 3.9, 4.1),
                 ("finish", 4.5, 4.7)]
            ),
            expected={
                "intentions": [
                    {
                        "subcommands": [
                            {"action": "pick", "object_id": "cup-red"},
                            {"action": "put", "object_id": "bowl-white"},
                        ],
                        "omega": None,
                    }
                ],
                "final": [
                    {"kind": "at", "object_id": "cup-red", "x": 0.0, "y": 0.5, "tol": 1e-6},
                    {"kind": "not_holding"},
                ],
            },
        )
    )

    episodes.append(
        episode(
            "pick-cup-pour-cup", "pick-cup-pour-cup",
            events=detections(SCENE)
            + frames(SCENE, "cup-red", [1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.4])
            + frames(SCENE, "cup-blue", [3.6, 3.7, 3.8, 3.9, 4.0])
            + word_records(
                [("pick", 1.0, 1.2), ("cup", 1.5, 1.7), ("this", 2.2, 2.4),
                 ("pour", 2.8, 3.0), ("cup", 3.3, 3.5), ("that", 3.9, 4.1),
                 ("finish", 4.5, 4.7)]
            ),
            expected={
                "intentions": [
                    {
                        "subcommands": [
                            {"action": "pick", "object_id": "cup-red"},
                            {"action": "pour", "object_id": "cup-blue"},
                        ],
                        "omega": None,
                    }
                ],
                "final": [
                    {"kind": "poured_into", "object_id": "cup-blue"},
                    {"kind": "holding", "object_id": "cup-red"},
                ],
            },
            notes="second pronoun binds the *other* cup: nearest-to-ray under the class gate",
        )
    )

    episodes.append(
        episode(
            "pick-cup-pour-bowl-90", "pick-cup-pour-bowl-90",
            events=detections(SCENE)
            + frames(SCENE, "cup-red", [1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.4])
            + frames(SCENE, "bowl-white", [3.6, 3.7, 3.8, 3.9, 4.0])
            + word_records(
                [("pick", 1.0, 1.2), ("cup", 1.5, 1.7), ("this", 2.2, 2.4),
                 ("pour", 2.8, 3.0), ("bowl", 3.3, 3.5), ("that", 3.9, 4.1),
                 ("ninety", 4.4, 4.6), ("degrees", 4.8, 5.0), ("finish", 5.4, 5.6)]
            ),
            expected={
                "intentions": [
                    {
                        "subcommands": [
                            {"action": "pick", "object_id": "cup-red"},
                            {"action": "pour", "object_id": "bowl-white"},
                        ],
                        "omega": {"value": 90.0, "unit": "degrees"},
                    }
                ],
                "final": [
                    {"kind": "poured_into", "object_id": "bowl-white"},
                    {"kind": "holding", "object_id": "cup-red"},
                ],
            },
        )
    )
    return episodes


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for ep in build_all():
        path = OUT / f"{ep.name}.jsonl"
        save_episode(ep, path)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
