"""Coordinate frames, rotation representations, and the pinhole projection chain.

All functions are pure and operate on plain numpy arrays or the small value
types below. Angles are radians, lengths are meters, pixel units are pixels.

Convention: the virtual camera sits at world ``(0, 0, d)`` looking down the
negative world z-axis. The world-to-camera rotation is ``diag(1, -1, -1)``,
so camera-frame +z is depth in front of the camera and the projected v axis
runs downward in the image, matching pixel coordinates with origin at the
top-left corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

#: Rotation part of the world-to-camera transform (self-inverse).
R_WORLD_TO_CAM = np.diag([1.0, -1.0, -1.0])


class BehindCameraError(ValueError):
    """A point lies at or behind the camera plane and cannot be projected."""


def _wrap_angle(a: float) -> float:
    """Wrap an angle to the canonical storage range (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


@dataclass(frozen=True)
class EulerAngles:
    """Rotation as successive rotations about x, y, z (applied in that order)."""

    r_x: float
    r_y: float
    r_z: float

    def __post_init__(self):
        for v in (self.r_x, self.r_y, self.r_z):
            if not math.isfinite(v):
                raise ValueError(f"non-finite Euler angle: {v}")
        object.__setattr__(self, "r_x", _wrap_angle(self.r_x))
        object.__setattr__(self, "r_y", _wrap_angle(self.r_y))
        object.__setattr__(self, "r_z", _wrap_angle(self.r_z))

    def as_array(self) -> np.ndarray:
        return np.array([self.r_x, self.r_y, self.r_z])


@dataclass(frozen=True)
class Quaternion:
    """Unit quaternion with canonical sign w >= 0."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if abs(n - 1.0) > 1e-6:
            raise ValueError(f"quaternion norm {n} deviates from 1 by more than 1e-6")
        w, x, y, z = self.w / n, self.x / n, self.y / n, self.z / n
        if w < 0.0:
            w, x, y, z = -w, -x, -y, -z
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])


@dataclass(frozen=True)
class RigidPose:
    """6DoF pose: translation plus Euler rotation."""

    translation: np.ndarray  # shape (3,), meters
    rotation: EulerAngles

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=float).reshape(3)
        if not np.all(np.isfinite(t)):
            raise ValueError("non-finite translation")
        object.__setattr__(self, "translation", t)

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous transform."""
        m = np.eye(4)
        m[:3, :3] = euler_to_matrix(self.rotation)
        m[:3, 3] = self.translation
        return m

    def quaternion(self) -> Quaternion:
        return euler_to_quaternion(self.rotation)

    @staticmethod
    def identity() -> "RigidPose":
        return RigidPose(np.zeros(3), EulerAngles(0.0, 0.0, 0.0))

    @staticmethod
    def from_params(params: np.ndarray) -> "RigidPose":
        p = np.asarray(params, dtype=float).reshape(6)
        return RigidPose(p[:3], EulerAngles(p[3], p[4], p[5]))

    def params(self) -> np.ndarray:
        return np.concatenate([self.translation, self.rotation.as_array()])


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics: single focal length, principal point, image size."""

    f: float
    c_x: float
    c_y: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.f > 0):
            raise ValueError("focal length must be positive")
        if self.width < 1 or self.height < 1:
            raise ValueError("image size must be at least 1x1")

    def k_matrix(self) -> np.ndarray:
        return np.array(
            [[self.f, 0.0, self.c_x], [0.0, self.f, self.c_y], [0.0, 0.0, 1.0]]
        )


def euler_to_matrix(e: EulerAngles) -> np.ndarray:
    """Rotation matrix as the product Rx(r_x) @ Ry(r_y) @ Rz(r_z)."""
    cx, sx = math.cos(e.r_x), math.sin(e.r_x)
    cy, sy = math.cos(e.r_y), math.sin(e.r_y)
    cz, sz = math.cos(e.r_z), math.sin(e.r_z)
    rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return rx @ ry @ rz


def matrix_to_euler(r: np.ndarray) -> EulerAngles:
    """Inverse of euler_to_matrix for proper rotations (Rx @ Ry @ Rz order)."""
    r = np.asarray(r, dtype=float)
    sy = float(np.clip(r[0, 2], -1.0, 1.0))
    r_y = math.asin(sy)
    if abs(abs(sy) - 1.0) < 1e-12:
        # Gimbal lock: r_x and r_z are coupled; fix r_z = 0.
        r_z = 0.0
        r_x = math.atan2(r[2, 1], r[1, 1])
    else:
        r_z = math.atan2(-r[0, 1], r[0, 0])
        r_x = math.atan2(-r[1, 2], r[2, 2])
    return EulerAngles(r_x, r_y, r_z)


def matrix_to_quaternion(r: np.ndarray) -> Quaternion:
    """Shepperd's method; sign canonicalized by the Quaternion constructor."""
    r = np.asarray(r, dtype=float)
    tr = r[0, 0] + r[1, 1] + r[2, 2]
    if tr > 0:
        s = math.sqrt(tr + 1.0) * 2
        w = 0.25 * s
        x = (r[2, 1] - r[1, 2]) / s
        y = (r[0, 2] - r[2, 0]) / s
        z = (r[1, 0] - r[0, 1]) / s
    elif r[0, 0] > r[1, 1] and r[0, 0] > r[2, 2]:
        s = math.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2
        w = (r[2, 1] - r[1, 2]) / s
        x = 0.25 * s
        y = (r[0, 1] + r[1, 0]) / s
        z = (r[0, 2] + r[2, 0]) / s
    elif r[1, 1] > r[2, 2]:
        s = math.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2
        w = (r[0, 2] - r[2, 0]) / s
        x = (r[0, 1] + r[1, 0]) / s
        y = 0.25 * s
        z = (r[1, 2] + r[2, 1]) / s
    else:
        s = math.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2
        w = (r[1, 0] - r[0, 1]) / s
        x = (r[0, 2] + r[2, 0]) / s
        y = (r[1, 2] + r[2, 1]) / s
        z = 0.25 * s
    return Quaternion(w, x, y, z)


def quaternion_to_matrix(q: Quaternion) -> np.ndarray:
    w, x, y, z = q.w, q.x, q.y, q.z
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def euler_to_quaternion(e: EulerAngles) -> Quaternion:
    return matrix_to_quaternion(euler_to_matrix(e))


def quaternion_to_euler(q: Quaternion) -> EulerAngles:
    return matrix_to_euler(quaternion_to_matrix(q))


def project_point(k: CameraIntrinsics, p_c: np.ndarray) -> np.ndarray:
    """Project a camera-frame point to pixel coordinates (u, v).

    Raises BehindCameraError if the camera-frame depth is <= 1e-12.
    """
    p_c = np.asarray(p_c, dtype=float).reshape(3)
    z = p_c[2]
    if z <= 1e-12:
        raise BehindCameraError(f"point depth {z} is at or behind the camera plane")
    u = k.f * p_c[0] / z + k.c_x
    v = k.f * p_c[1] / z + k.c_y
    return np.array([u, v])


def project_points(k: CameraIntrinsics, p_c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized projection of an (n, 3) camera-frame array.

    Returns (pixels (n, 2), behind mask (n,)); behind points yield NaN pixels.
    """
    p_c = np.asarray(p_c, dtype=float).reshape(-1, 3)
    z = p_c[:, 2]
    behind = z <= 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        uv = k.f * p_c[:, :2] / z[:, None]
    uv += np.array([k.c_x, k.c_y])
    uv[behind] = np.nan
    return uv, behind


def world_to_camera(d: float) -> np.ndarray:
    """4x4 rigid transform from twin-space world frame to virtual-camera frame.

    Camera center at world (0, 0, d); optical axis along -Z_w; the transform
    maps (0, 0, d) to the origin and (0, 0, 0) to depth d.
    """
    if not (d > 0):
        raise ValueError("camera distance d must be positive")
    m = np.eye(4)
    m[:3, :3] = R_WORLD_TO_CAM
    m[:3, 3] = R_WORLD_TO_CAM @ np.array([0.0, 0.0, -d])
    return m


def camera_to_world(d: float) -> np.ndarray:
    """Inverse of world_to_camera."""
    m = world_to_camera(d)
    inv = np.eye(4)
    inv[:3, :3] = m[:3, :3].T
    inv[:3, 3] = -m[:3, :3].T @ m[:3, 3]
    return inv


def paper_world_to_camera_literal() -> np.ndarray:
    """The world-to-camera rotation as the literal printed triple product.

    Kept for audit only: the product has determinant -1 (a reflection), so it
    is not a valid rotation and is not used anywhere in the projection chain.
    """
    m1 = np.array([[1.0, 0, 0], [0, 1, 0], [0, 0, -1]])
    m2 = np.array([[0.0, 1, 0], [-1, 0, 0], [0, 0, 1]])
    m3 = np.array([[0.0, 1, 0], [-1, 0, 0], [0, 0, 1]])
    return m1 @ m2 @ m3


def object_to_camera(pose: RigidPose, d: float) -> np.ndarray:
    """4x4 object-frame to camera-frame transform for a world-frame pose."""
    return world_to_camera(d) @ pose.matrix()


def object_to_image_matrix(k: CameraIntrinsics, pose: RigidPose, d: float) -> np.ndarray:
    """The full 3x4 homogeneous chain K [I|0] T_world_to_cam T_pose."""
    proj = np.hstack([np.eye(3), np.zeros((3, 1))])
    return k.k_matrix() @ proj @ object_to_camera(pose, d)


def object_to_image(
    k: CameraIntrinsics, pose: RigidPose, d: float, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Map object-frame points to pixels through the composed matrix chain.

    ``pose`` is the world-frame pose of the object in the twin space; ``d``
    is the virtual-camera distance. Returns (pixels (n, 2), behind mask).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    m = object_to_image_matrix(k, pose, d)
    homo = m @ np.vstack([pts.T, np.ones(len(pts))])
    z = homo[2]
    behind = z <= 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        uv = (homo[:2] / z).T
    uv[behind] = np.nan
    return uv, behind


def camera_pose_from_world(pose: RigidPose, d: float) -> RigidPose:
    """Express a world-frame pose in the virtual-camera frame."""
    m = object_to_camera(pose, d)
    return RigidPose(m[:3, 3], matrix_to_euler(m[:3, :3]))


def world_pose_from_camera(pose: RigidPose, d: float) -> RigidPose:
    """Inverse of camera_pose_from_world."""
    m = camera_to_world(d) @ pose.matrix()
    return RigidPose(m[:3, 3], matrix_to_euler(m[:3, :3]))
