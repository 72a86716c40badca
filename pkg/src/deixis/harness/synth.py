"""Synthetic fixtures: noisy-pointing trials and generated episodes.

Stands in for the human robustness trials: a virtual pointer aims at a known
target in the six-cup row while Gaussian angular noise perturbs the ray, and
we measure how often the intended cup is still selected.  Episode generation
wraps the same trials in full multimodal traces so they replay through every
pipeline stage.
"""

from __future__ import annotations

import math

import numpy as np

from ..config import Config
from ..errors import GeometryError
from ..geometry.ops import project_point, select_object
from ..geometry.types import DeicticRay, ObjectRecord, Scene
from .episodes import Episode

POINTER_ELBOW = (0.0, 1.05, 0.45)  # across the table from the robot
FOREARM_LEN = 0.25


def aim_point(obj: ObjectRecord) -> tuple[float, float, float]:
    x, y, z = obj.position
    return (x, y, z + obj.height_m / 2.0)


def noisy_ray(
    rng: np.random.Generator,
    elbow,
    target,
    sigma_deg: float,
    timestamp: float,
) -> DeicticRay:
    """Ray from elbow toward target with Gaussian angular noise on direction."""
    e = np.asarray(elbow, dtype=np.float64)
    d = np.asarray(target, dtype=np.float64) - e
    d /= np.linalg.norm(d)
    # orthonormal basis of the plane perpendicular to the aim direction
    helper = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(d, helper)
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    sigma = math.radians(sigma_deg)
    eps_u, eps_v = rng.normal(0.0, sigma, size=2) if sigma > 0 else (0.0, 0.0)
    direction = d + math.tan(eps_u) * u + math.tan(eps_v) * v
    direction /= np.linalg.norm(direction)
    wrist = e + FOREARM_LEN * direction
    return DeicticRay(r1=tuple(e), r2=tuple(wrist), timestamp=timestamp)


def clutter_scene(config: Config) -> Scene:
    return config.preset_scene("six-cups-row")


def clutter_rate(
    config: Config, sigma_deg: float, trials: int = 1000, seed: int = 20240601
) -> float:
    """Fraction of noisy-pointing trials that select the intended cup."""
    rng = np.random.default_rng(seed)
    scene = clutter_scene(config)
    cups = list(scene)
    hits = 0
    for _ in range(trials):
        intended = cups[rng.integers(len(cups))]
        ray = noisy_ray(rng, POINTER_ELBOW, aim_point(intended), sigma_deg, 0.0)
        try:
            selected, _ = select_object(ray, scene, "cup", config.selection.radius_m)
        except GeometryError:
            continue
        if selected.id == intended.id:
            hits += 1
    return hits / trials


def clutter_curve(
    config: Config,
    sigmas_deg=(0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0),
    trials: int = 1000,
    seed: int = 20240601,
) -> list[tuple[float, float]]:
    return [(s, clutter_rate(config, s, trials=trials, seed=seed)) for s in sigmas_deg]


def detection_record(obj: ObjectRecord, config: Config, t: float) -> dict:
    """Synthesize the detection event that back-projects to ``obj`` exactly."""
    u, v, depth = project_point(aim_point(obj), config.camera)
    du = obj.width_m * config.camera.fx / depth / 2.0
    dv = obj.height_m * config.camera.fy / depth / 2.0
    return {
        "stream": "detection",
        "t": round(t, 4),
        "class": obj.class_name,
        "bbox": [u - du, v - dv, u + du, v + dv],
        "depth_m": depth,
        "confidence": 0.98,
        "id": obj.id,
    }


def skeleton_record(ray: DeicticRay, confidence: float = 0.9) -> dict:
    return {
        "stream": "skeleton",
        "t": round(ray.timestamp, 4),
        "right_elbow": list(ray.r1),
        "right_wrist": list(ray.r2),
        "confidence": confidence,
    }


def word_records(words: list[tuple[str, float, float]]) -> list[dict]:
    return [
        {"stream": "word", "t_start": t0, "t_end": t1, "text": text, "confidence": 0.95}
        for text, t0, t1 in words
    ]


def make_clutter_episode(
    config: Config, seed: int, sigma_deg: float, index: int
) -> Episode:
    """A full pick-this-cup episode with a noise-perturbed pointing stream.

    The cup row keeps its 25 cm spacing but the whole row and the pointer
    jitter between episodes (within the camera frustum), so a generated
    bundle varies the scene, not just the ray noise.
    """
    rng = np.random.default_rng((seed, int(sigma_deg * 10), index))
    row_dx = float(rng.uniform(-0.02, 0.02))
    row_dy = float(rng.uniform(-0.05, 0.0))  # only away from the camera: edge cups stay in frame
    scene = Scene(
        objects=tuple(
            o.moved_to((o.position[0] + row_dx, o.position[1] + row_dy, o.position[2]))
            for o in clutter_scene(config)
        )
    )
    elbow = (
        float(rng.uniform(-0.1, 0.1)),
        float(rng.uniform(1.0, 1.1)),
        float(rng.uniform(0.4, 0.5)),
    )
    cups = list(scene)
    intended = cups[rng.integers(len(cups))]
    events: list[dict] = [detection_record(o, config, 0.05 * i) for i, o in enumerate(cups)]
    for k in range(8):
        t = 0.8 + 0.2 * k
        events.append(skeleton_record(noisy_ray(rng, elbow, aim_point(intended), sigma_deg, t)))
    events.extend(
        word_records(
            [("pick", 1.0, 1.2), ("cup", 1.5, 1.7), ("this", 2.0, 2.2), ("finish", 2.6, 2.8)]
        )
    )
    name = f"clutter-{sigma_deg:.1f}deg-{index:04d}"
    return Episode(
        name=name,
        task=f"clutter-{sigma_deg:.1f}deg",
        events=events,
        expected={
            "intentions": [
                {
                    "subcommands": [{"action": "pick", "object_id": intended.id}],
                    "omega": None,
                }
            ],
            "final": [{"kind": "holding", "object_id": intended.id}],
        },
    )
