"""Scene geometry: back-projection, rays, line distance, selection."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deixis.errors import (
    DegenerateBBox,
    DegenerateForearm,
    LowConfidence,
    NoMatchingClass,
    NonPositiveDepth,
    OutOfRange,
)
from deixis.geometry import (
    CameraModel,
    DeicticRay,
    Detection,
    SkeletonFrame,
    back_project,
    forearm_ray,
    point_line_distance,
    project_point,
    select_object,
)

from conftest import make_scene, random_ray, random_scene
from oracles import grid_min_distance, matrix_back_project, brute_force_select

IDENTITY_CAM = CameraModel(
    fx=600.0, fy=600.0, cx=320.0, cy=240.0,
    rotation=((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    translation=(0.0, 0.0, 0.0),
    width=2000, height=2000,
)


def random_rotation(rng):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, 2 * math.pi)
    k = np.array(
        [[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]]
    )
    r = np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)
    return tuple(tuple(row) for row in r)


class TestBackProject:
    def test_principal_point_ray(self):
        det = Detection(class_name="cup", bbox=(310, 230, 330, 250), depth_m=1.0, timestamp=0.0)
        rec = back_project(det, IDENTITY_CAM)
        np.testing.assert_allclose(rec.position, (0.0, 0.0, 1.0), atol=1e-12)

    def test_unit_tangent_offset_scales_with_depth(self):
        # bbox center at (cx + fx, cy), depth 2 -> x = 2, z = 2
        cx, cy, fx = IDENTITY_CAM.cx, IDENTITY_CAM.cy, IDENTITY_CAM.fx
        det = Detection(
            class_name="cup",
            bbox=(cx + fx - 10, cy - 10, cx + fx + 10, cy + 10),
            depth_m=2.0,
            timestamp=0.0,
        )
        rec = back_project(det, IDENTITY_CAM)
        np.testing.assert_allclose(rec.position, (2.0, 0.0, 2.0), atol=1e-12)

    def test_metric_extents(self):
        det = Detection(class_name="cup", bbox=(300, 220, 340, 260), depth_m=1.5, timestamp=0.0)
        rec = back_project(det, IDENTITY_CAM)
        assert rec.width_m == pytest.approx(40 * 1.5 / 600.0)
        assert rec.height_m == pytest.approx(40 * 1.5 / 600.0)

    def test_matches_matrix_composition_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            fx, fy = rng.uniform(200, 900, size=2)
            cx, cy = rng.uniform(200, 500, size=2)
            cam = CameraModel(
                fx=fx, fy=fy, cx=cx, cy=cy,
                rotation=random_rotation(rng),
                translation=tuple(rng.uniform(-2, 2, size=3)),
                width=1000, height=1000,
            )
            u, v = rng.uniform(50, 950, size=2)
            depth = rng.uniform(0.2, 4.0)
            w, h = rng.uniform(5, 80, size=2)
            det = Detection(
                class_name="cup",
                bbox=(u - w / 2, v - h / 2, u + w / 2, v + h / 2),
                depth_m=depth,
                timestamp=0.0,
            )
            rec = back_project(det, cam)
            expected = matrix_back_project(
                u, v, depth, fx, fy, cx, cy, cam.rotation, cam.translation
            )
            np.testing.assert_allclose(rec.position, expected, atol=1e-9)

    def test_projection_round_trip(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            cam = CameraModel(
                fx=rng.uniform(300, 800), fy=rng.uniform(300, 800),
                cx=400.0, cy=300.0,
                rotation=random_rotation(rng),
                translation=tuple(rng.uniform(-1, 1, size=3)),
                width=800, height=600,
            )
            # choose a point that lands inside the image and in front of the camera
            z = rng.uniform(0.5, 3.0)
            u, v = rng.uniform(100, 700), rng.uniform(100, 500)
            p_cam = ((u - cam.cx) / cam.fx * z, (v - cam.cy) / cam.fy * z, z)
            point = cam.camera_to_base(p_cam)
            uu, vv, depth = project_point(point, cam)
            det = Detection(
                class_name="x", bbox=(uu - 5, vv - 5, uu + 5, vv + 5),
                depth_m=depth, timestamp=0.0,
            )
            rec = back_project(det, cam)
            np.testing.assert_allclose(rec.position, point, atol=1e-9)

    def test_nonpositive_depth(self):
        det = Detection(class_name="cup", bbox=(0, 0, 10, 10), depth_m=0.0, timestamp=0.0)
        with pytest.raises(NonPositiveDepth):
            back_project(det, IDENTITY_CAM)

    def test_center_outside_image(self):
        det = Detection(
            class_name="cup", bbox=(2995, 0, 3010, 10), depth_m=1.0, timestamp=0.0
        )
        with pytest.raises(DegenerateBBox):
            back_project(det, IDENTITY_CAM)


class TestForearmRay:
    def test_copies_fields(self):
        frame = SkeletonFrame(
            timestamp=3.0, right_elbow=(0, 0, 1), right_wrist=(0.3, 0, 1), confidence=0.9
        )
        ray = forearm_ray(frame)
        assert ray.r1 == (0.0, 0.0, 1.0)
        assert ray.r2 == (0.3, 0.0, 1.0)
        assert ray.timestamp == 3.0

    def test_degenerate_forearm(self):
        frame = SkeletonFrame(
            timestamp=0.0, right_elbow=(1, 1, 1), right_wrist=(1, 1, 1), confidence=0.0
        )
        # confidence 0 bypasses the elbow != wrist invariant; the op still rejects
        with pytest.raises((LowConfidence, DegenerateForearm)):
            forearm_ray(frame, min_confidence=0.0)

    def test_low_confidence(self):
        frame = SkeletonFrame(
            timestamp=0.0, right_elbow=(0, 0, 1), right_wrist=(0.3, 0, 1), confidence=0.1
        )
        with pytest.raises(LowConfidence):
            forearm_ray(frame)


class TestPointLineDistance:
    def test_perpendicular_axis_case(self):
        ray = DeicticRay(r1=(0, 0, 0), r2=(1, 0, 0), timestamp=0.0)
        assert point_line_distance(ray, (0.5, 3.0, 4.0)) == pytest.approx(5.0, abs=1e-9)

    def test_point_on_line_is_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            ray = random_ray(rng)
            r1 = np.array(ray.r1)
            d = np.array(ray.r2) - r1
            point = r1 + 2.5 * d
            assert point_line_distance(ray, tuple(point)) == pytest.approx(0.0, abs=1e-9)

    def test_against_grid_minimization_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            ray = random_ray(rng)
            p = tuple(rng.uniform(-5, 5, size=3))
            got = point_line_distance(ray, p)
            assert got == pytest.approx(grid_min_distance(ray.r1, ray.r2, p), abs=1e-6)

    @given(
        s=st.floats(min_value=-1e3, max_value=1e3).filter(lambda v: abs(v) > 1e-3),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    @settings(max_examples=60, deadline=None)
    def test_anchor_rescaling_invariance(self, s, seed):
        rng = np.random.default_rng(seed)
        ray = random_ray(rng)
        p = tuple(rng.uniform(-5, 5, size=3))
        r1 = np.array(ray.r1)
        d = np.array(ray.r2) - r1
        scaled = DeicticRay(r1=tuple(r1), r2=tuple(r1 + s * d), timestamp=0.0)
        swapped = DeicticRay(r1=ray.r2, r2=ray.r1, timestamp=0.0)
        ref = point_line_distance(ray, p)
        assert point_line_distance(scaled, p) == pytest.approx(ref, abs=1e-9, rel=1e-9)
        assert point_line_distance(swapped, p) == pytest.approx(ref, abs=1e-9, rel=1e-9)


class TestSelectObject:
    X_RAY = DeicticRay(r1=(0, 0, 0), r2=(1, 0, 0), timestamp=0.0)

    def test_class_gate_beats_distance(self):
        scene = make_scene(
            [
                ("bowl-1", "bowl", (1.0, 0.001, 0.0), 0.07, 0.16),
                ("cup-1", "cup", (1.0, 0.02, 0.0), 0.12, 0.07),
            ]
        )
        rec, dist = select_object(self.X_RAY, scene, "cup")
        assert rec.id == "cup-1"
        assert dist == pytest.approx(0.02)

    def test_nearest_of_class_wins(self):
        scene = make_scene(
            [
                ("cup-a", "cup", (1.0, 0.30, 0.0), 0.12, 0.07),
                ("cup-b", "cup", (1.5, 0.10, 0.0), 0.12, 0.07),
            ]
        )
        rec, dist = select_object(self.X_RAY, scene, "cup")
        assert rec.id == "cup-b"
        assert dist == pytest.approx(0.10)

    def test_no_matching_class(self):
        scene = make_scene([("cup-a", "cup", (1.0, 0.1, 0.0), 0.12, 0.07)])
        with pytest.raises(NoMatchingClass):
            select_object(self.X_RAY, scene, "scissors")

    def test_out_of_range(self):
        scene = make_scene([("cup-a", "cup", (1.0, 0.8, 0.0), 0.12, 0.07)])
        with pytest.raises(OutOfRange):
            select_object(self.X_RAY, scene, "cup", selection_radius=0.5)

    def test_exact_tie_resolves_to_smallest_id(self):
        scene = make_scene(
            [
                ("cup-b", "cup", (1.0, 0.1, 0.2), 0.12, 0.07),
                ("cup-a", "cup", (1.5, -0.1, -0.2), 0.12, 0.07),
            ]
        )
        rec, _ = select_object(self.X_RAY, scene, "cup")
        assert rec.id == "cup-a"

    def test_matches_brute_force_on_random_scenes(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            scene = random_scene(rng)
            ray = random_ray(rng)
            cls = scene.objects[int(rng.integers(len(scene)))].class_name
            expected, info = brute_force_select(ray, scene, cls, 0.5)
            if expected is None:
                with pytest.raises((NoMatchingClass, OutOfRange)):
                    select_object(ray, scene, cls, 0.5)
            else:
                rec, dist = select_object(ray, scene, cls, 0.5)
                assert rec.id == expected.id
                assert rec.class_name == cls
                assert dist == pytest.approx(info, abs=1e-9)
