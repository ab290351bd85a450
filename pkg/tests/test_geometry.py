import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinpose import geometry as geo
from twinpose.geometry import (
    BehindCameraError,
    CameraIntrinsics,
    EulerAngles,
    Quaternion,
    RigidPose,
)

angles = st.floats(-math.pi, math.pi, allow_nan=False)


def rotation_xyz(e: EulerAngles) -> np.ndarray:
    """Independent oracle: multiply the three printed axis matrices directly."""
    cx, sx = math.cos(e.r_x), math.sin(e.r_x)
    cy, sy = math.cos(e.r_y), math.sin(e.r_y)
    cz, sz = math.cos(e.r_z), math.sin(e.r_z)
    rx = np.array([[1.0, 0, 0], [0, cx, -sx], [0, sx, cx]])
    ry = np.array([[cy, 0, sy], [0, 1.0, 0], [-sy, 0, cy]])
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1.0]])
    return rx @ (ry @ rz)


class TestEulerToMatrix:
    def test_zero_angles_identity(self):
        assert np.allclose(geo.euler_to_matrix(EulerAngles(0, 0, 0)), np.eye(3))

    def test_quarter_turn_about_x(self):
        r = geo.euler_to_matrix(EulerAngles(math.pi / 2, 0, 0))
        assert np.allclose(r @ np.array([0, 1, 0]), [0, 0, 1], atol=1e-12)

    def test_matches_axis_matrix_product(self):
        e = EulerAngles(0.3, 0.2, 0.1)
        assert np.allclose(geo.euler_to_matrix(e), rotation_xyz(e), atol=1e-15)

    @given(angles, angles, angles)
    @settings(max_examples=100, deadline=None)
    def test_orthonormal_det_one(self, rx, ry, rz):
        r = geo.euler_to_matrix(EulerAngles(rx, ry, rz))
        assert np.abs(r.T @ r - np.eye(3)).max() < 1e-9
        assert abs(np.linalg.det(r) - 1.0) < 1e-9

    @given(angles, angles, angles)
    @settings(max_examples=100, deadline=None)
    def test_matrix_euler_round_trip(self, rx, ry, rz):
        r = geo.euler_to_matrix(EulerAngles(rx, ry, rz))
        e2 = geo.matrix_to_euler(r)
        assert np.abs(geo.euler_to_matrix(e2) - r).max() < 1e-9


class TestQuaternion:
    def test_identity(self):
        q = geo.euler_to_quaternion(EulerAngles(0, 0, 0))
        assert np.allclose(q.as_array(), [1, 0, 0, 0])

    def test_half_turn_about_x(self):
        q = geo.euler_to_quaternion(EulerAngles(math.pi, 0, 0))
        assert np.allclose(q.as_array(), [0, 1, 0, 0], atol=1e-12)

    def test_sign_canonicalization(self):
        q = Quaternion(-0.5, 0.5, 0.5, 0.5)
        assert q.w >= 0
        assert np.allclose(q.as_array(), [0.5, -0.5, -0.5, -0.5])

    def test_non_unit_rejected(self):
        with pytest.raises(ValueError):
            Quaternion(1.0, 0.5, 0.0, 0.0)

    @given(angles, angles, angles)
    @settings(max_examples=100, deadline=None)
    def test_euler_quaternion_round_trip_preserves_matrix(self, rx, ry, rz):
        e = EulerAngles(rx, ry, rz)
        e2 = geo.quaternion_to_euler(geo.euler_to_quaternion(e))
        assert np.abs(geo.euler_to_matrix(e) - geo.euler_to_matrix(e2)).max() < 1e-9


class TestProjectPoint:
    k = CameraIntrinsics(721.5, 609.6, 172.9, 1242, 375)

    def test_optical_axis_hits_principal_point(self):
        for depth in (0.5, 3.0, 100.0):
            px = geo.project_point(self.k, [0, 0, depth])
            assert np.allclose(px, [609.6, 172.9])

    def test_pinhole_ratio(self):
        k = CameraIntrinsics(2.0, 0.0, 0.0, 4, 4)
        assert np.allclose(geo.project_point(k, [1, 1, 2]), [1, 1])

    def test_matches_homogeneous_oracle(self):
        p = np.array([1.2, -0.4, 10.0])
        homo = self.k.k_matrix() @ p
        expected = homo[:2] / homo[2]
        assert np.allclose(geo.project_point(self.k, p), expected, atol=1e-12)

    def test_behind_camera_rejected(self):
        with pytest.raises(BehindCameraError):
            geo.project_point(self.k, [0, 0, -1])
        with pytest.raises(BehindCameraError):
            geo.project_point(self.k, [0, 0, 0])

    @given(st.floats(0.1, 100), st.floats(-5, 5), st.floats(-5, 5), st.floats(1.01, 10))
    @settings(max_examples=50, deadline=None)
    def test_homogeneous_scale_invariance(self, z, x, y, lam):
        p = np.array([x, y, z])
        a = geo.project_point(self.k, p)
        b = geo.project_point(self.k, lam * p)
        assert np.abs(a - b).max() < 1e-9


class TestWorldToCamera:
    def test_origin_maps_to_depth_d(self):
        m = geo.world_to_camera(10.0)
        assert np.allclose(m[:3, :3] @ np.zeros(3) + m[:3, 3], [0, 0, 10])

    def test_camera_center_maps_to_origin(self):
        m = geo.world_to_camera(10.0)
        assert np.allclose(m[:3, :3] @ np.array([0, 0, 10.0]) + m[:3, 3], 0)

    def test_direct_rigid_evaluation(self):
        m = geo.world_to_camera(10.0)
        p = np.array([1.0, 2.0, 3.0])
        expected = np.diag([1.0, -1.0, -1.0]) @ (p - np.array([0, 0, 10.0]))
        assert np.allclose(m[:3, :3] @ p + m[:3, 3], expected, atol=1e-12)

    def test_proper_rotation(self):
        m = geo.world_to_camera(5.0)
        assert abs(np.linalg.det(m[:3, :3]) - 1.0) < 1e-12

    def test_round_trip_identity(self):
        m = geo.world_to_camera(7.0) @ geo.camera_to_world(7.0)
        assert np.abs(m - np.eye(4)).max() < 1e-12

    def test_rejects_nonpositive_d(self):
        with pytest.raises(ValueError):
            geo.world_to_camera(0.0)


class TestPaperLiteralMatrix:
    def test_product_is_negative_identity(self):
        assert np.allclose(geo.paper_world_to_camera_literal(), -np.eye(3))

    def test_determinant_is_minus_one(self):
        assert abs(np.linalg.det(geo.paper_world_to_camera_literal()) + 1.0) < 1e-12

    def test_differs_from_adopted_convention(self):
        assert not np.allclose(geo.paper_world_to_camera_literal(), geo.R_WORLD_TO_CAM)


class TestObjectToImage:
    k = CameraIntrinsics(721.5, 621.0, 187.5, 1242, 375)
    d = 721.5 / 1242

    def test_identity_pose_origin_hits_principal_point(self):
        px, behind = geo.object_to_image(self.k, RigidPose.identity(), self.d, [[0, 0, 0]])
        assert not behind.any()
        assert np.allclose(px[0], [self.k.c_x, self.k.c_y], atol=1e-9)

    def test_two_path_consistency(self, rng):
        pose = RigidPose(np.array([0.02, -0.01, 0.1]), EulerAngles(0.4, -0.8, 1.3))
        pts = rng.normal(size=(100, 3)) * 0.02
        px, behind = geo.object_to_image(self.k, pose, self.d, pts)
        assert not behind.any()
        r = geo.euler_to_matrix(pose.rotation)
        w2c = geo.world_to_camera(self.d)
        for p, expected in zip(pts, px):
            world = r @ p + pose.translation
            cam = w2c[:3, :3] @ world + w2c[:3, 3]
            assert np.abs(geo.project_point(self.k, cam) - expected).max() < 1e-9

    def test_perspective_magnification(self):
        pts = np.array([[0.1, 0.0, 0.0], [-0.1, 0.0, 0.0]])
        far = RigidPose(np.array([0.0, 0.0, 0.0]), EulerAngles(0, 0, 0))
        # Moving toward the camera means increasing world z (camera at z=d).
        near = RigidPose(np.array([0.0, 0.0, 0.3 * self.d]), EulerAngles(0, 0, 0))
        px_far, _ = geo.object_to_image(self.k, far, self.d, pts)
        px_near, _ = geo.object_to_image(self.k, near, self.d, pts)
        assert np.linalg.norm(px_near[0] - px_near[1]) > np.linalg.norm(px_far[0] - px_far[1])

    def test_behind_camera_flagged(self):
        pose = RigidPose(np.array([0.0, 0.0, 2 * self.d]), EulerAngles(0, 0, 0))
        _, behind = geo.object_to_image(self.k, pose, self.d, [[0, 0, 0]])
        assert behind.all()


class TestFrameConversion:
    def test_world_camera_pose_round_trip(self, rng):
        for _ in range(20):
            pose = RigidPose(rng.normal(size=3), EulerAngles(*rng.uniform(-3, 3, 3)))
            d = float(rng.uniform(0.1, 10))
            back = geo.world_pose_from_camera(geo.camera_pose_from_world(pose, d), d)
            assert np.abs(back.translation - pose.translation).max() < 1e-12
            assert (
                np.abs(
                    geo.euler_to_matrix(back.rotation) - geo.euler_to_matrix(pose.rotation)
                ).max()
                < 1e-12
            )
