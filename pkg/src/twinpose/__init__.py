"""Twin-space 6DoF pose labeling, losses, metrics, and evaluation toolkit."""

from .geometry import (
    BehindCameraError,
    CameraIntrinsics,
    EulerAngles,
    Quaternion,
    RigidPose,
)
from .mesh import SampledCloud, TriMesh, load_mesh

__all__ = [
    "BehindCameraError",
    "CameraIntrinsics",
    "EulerAngles",
    "Quaternion",
    "RigidPose",
    "SampledCloud",
    "TriMesh",
    "load_mesh",
]

__version__ = "0.1.0"
