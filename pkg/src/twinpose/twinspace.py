"""The virtual twin space: camera placement, image plane, model instances.

The scene holds a virtual camera at world ``(0, 0, d)`` with ``d = f / width``
so that a 1-unit-wide image plane at z = 0 exactly fills the camera's
horizontal field of view. The plane is sized ``1 x h/w``; its center is the
world origin when the principal point is centered and is offset by the
principal-point shift otherwise, keeping the fill invariant exact for any
intrinsics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry, mesh as meshmod
from .geometry import CameraIntrinsics, RigidPose


class TwinSceneError(ValueError):
    pass


@dataclass(frozen=True)
class ImagePlane:
    """Placement of the captured image in the X_w O_w Y_w plane (z = 0)."""

    width: float  # always exactly 1
    height: float  # h / w
    center: np.ndarray  # (3,) world coordinates, z = 0


@dataclass
class Instance:
    model_id: str
    scale: np.ndarray  # (3,) per-axis multipliers
    pose: RigidPose  # world-frame pose in the twin space


@dataclass
class TwinScene:
    camera: CameraIntrinsics
    d: float
    image_plane: ImagePlane
    models: dict[str, meshmod.TriMesh] = field(default_factory=dict)
    instances: list[Instance] = field(default_factory=list)


def build_scene(k: CameraIntrinsics) -> TwinScene:
    """Construct the twin space for the given intrinsics (d = f / width)."""
    d = k.f / k.width
    aspect = k.height / k.width
    center = np.array(
        [0.5 - k.c_x / k.width, k.c_y / k.width - 0.5 * aspect, 0.0]
    )
    return TwinScene(camera=k, d=d, image_plane=ImagePlane(1.0, aspect, center))


def plane_corners(scene: TwinScene) -> np.ndarray:
    """World coordinates of the image plane corners for pixels
    (0,0), (w,0), (0,h), (w,h), in that order."""
    k = scene.camera
    return np.array(
        [
            pixel_to_plane(scene, np.array([0.0, 0.0])),
            pixel_to_plane(scene, np.array([float(k.width), 0.0])),
            pixel_to_plane(scene, np.array([0.0, float(k.height)])),
            pixel_to_plane(scene, np.array([float(k.width), float(k.height)])),
        ]
    )


def pixel_to_plane(scene: TwinScene, px: np.ndarray) -> np.ndarray:
    """World point on the z = 0 plane whose projection is the given pixel."""
    u, v = float(px[0]), float(px[1])
    k = scene.camera
    x = (u - k.c_x) / k.width
    y = (k.c_y - v) / k.width
    return np.array([x, y, 0.0])


def register_model(scene: TwinScene, model_id: str, m: meshmod.TriMesh) -> None:
    scene.models[model_id] = m


def place_model(
    scene: TwinScene, model_id: str, scale, pose: RigidPose
) -> Instance:
    """Add a model instance to the scene; the pose is world-frame."""
    if model_id not in scene.models:
        raise TwinSceneError(f"model {model_id!r} is not registered")
    scale = np.asarray(scale, dtype=float).reshape(3)
    if np.any(scale <= 0):
        raise TwinSceneError("scale components must be positive")
    depth = scene.d - pose.translation[2]
    if depth <= 0:
        raise TwinSceneError(
            f"object center at world z={pose.translation[2]:.6g} is behind the "
            f"camera (camera at z={scene.d:.6g})"
        )
    inst = Instance(model_id, scale, pose)
    scene.instances.append(inst)
    return inst


@dataclass(frozen=True)
class Wireframe:
    """Projected model: per-vertex pixels, visible edges, behind-camera flags."""

    vertices_px: np.ndarray  # (n, 2), NaN for behind-camera vertices
    edges: np.ndarray  # (k, 2) vertex index pairs with both endpoints visible
    behind: np.ndarray  # indices of behind-camera vertices


def project_instance(
    k: CameraIntrinsics, d: float, m: meshmod.TriMesh, scale, pose: RigidPose
) -> Wireframe:
    """Project a scaled, posed model through the virtual camera."""
    scale = np.asarray(scale, dtype=float).reshape(3)
    pts = m.vertices * scale
    px, behind_mask = geometry.object_to_image(k, pose, d, pts)
    pairs = meshmod.edges(m).pairs
    keep = ~(behind_mask[pairs[:, 0]] | behind_mask[pairs[:, 1]])
    return Wireframe(px, pairs[keep], np.flatnonzero(behind_mask))


def secondary_project(scene: TwinScene, instance: Instance) -> Wireframe:
    """TOPL secondary projection of one placed instance."""
    m = scene.models[instance.model_id]
    return project_instance(scene.camera, scene.d, m, instance.scale, instance.pose)


def extract_pose(scene: TwinScene, instance: Instance) -> RigidPose:
    """Pose of the instance expressed in the virtual-camera frame."""
    return geometry.camera_pose_from_world(instance.pose, scene.d)


def world_pose(scene: TwinScene, camera_pose: RigidPose) -> RigidPose:
    """Inverse of extract_pose: camera-frame pose back to world frame."""
    return geometry.world_pose_from_camera(camera_pose, scene.d)
