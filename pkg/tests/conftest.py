import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `oracles`

from deixis.config import load_config
from deixis.geometry.types import ObjectRecord, Scene

CLASSES = ("cup", "bowl", "plate", "bottle", "scissors")


@pytest.fixture(scope="session")
def config():
    return load_config()


def make_scene(objs, timestamp=0.0) -> Scene:
    """objs: iterable of (id, class, (x, y, z), h, b)."""
    return Scene(
        objects=tuple(
            ObjectRecord(id=i, class_name=c, position=p, height_m=h, width_m=b)
            for i, c, p, h, b in objs
        ),
        timestamp=timestamp,
    )


def random_scene(
    rng: np.random.Generator,
    n_min=2,
    n_max=10,
    classes=CLASSES,
    min_spacing=0.0,
) -> Scene:
    """Random on-table scene; guarantees at least two distinct classes."""
    n = int(rng.integers(n_min, n_max + 1))
    records = []
    positions = []
    tries = 0
    while len(records) < n and tries < 500:
        tries += 1
        x = float(rng.uniform(-0.6, 0.6))
        y = float(rng.uniform(0.05, 0.6))
        if min_spacing and any(np.hypot(x - px, y - py) < min_spacing for px, py in positions):
            continue
        h = float(rng.uniform(0.02, 0.30))
        b = float(rng.uniform(0.03, 0.12))
        cls = classes[int(rng.integers(len(classes)))]
        i = len(records)
        records.append(
            ObjectRecord(
                id=f"obj-{i:02d}", class_name=cls, position=(x, y, 0.0), height_m=h, width_m=b
            )
        )
        positions.append((x, y))
    # force class diversity
    if len({r.class_name for r in records}) < 2 and len(records) >= 2:
        records[1] = ObjectRecord(
            id=records[1].id,
            class_name=classes[(classes.index(records[0].class_name) + 1) % len(classes)],
            position=records[1].position,
            height_m=records[1].height_m,
            width_m=records[1].width_m,
        )
    return Scene(objects=tuple(records))


def random_ray(rng: np.random.Generator):
    from deixis.geometry.types import DeicticRay

    while True:
        r1 = rng.uniform(-5, 5, size=3)
        direction = rng.normal(size=3)
        norm = np.linalg.norm(direction)
        if norm < 1e-6:
            continue
        length = rng.uniform(0.1, 3.0)
        return DeicticRay(r1=tuple(r1), r2=tuple(r1 + direction / norm * length), timestamp=0.0)
