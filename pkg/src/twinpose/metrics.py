"""Pose evaluation metrics and dataset summary statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry, mesh as meshmod
from .geometry import EulerAngles, RigidPose
from .mesh import SampledCloud, TriMesh


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class PoseErrorRecord:
    class_name: str
    iota: float  # exp(-translation error), in (0, 1]
    eta_rx: float  # radians, [0, pi]
    eta_ry: float
    eta_rz: float
    translation_error: float  # meters
    add: float  # meters
    add_accepted: bool


@dataclass(frozen=True)
class DatasetStats:
    frames: int
    object_count: int
    max_diameter: float  # meters (O.D.)
    max_camera_distance: float  # meters (C.O.D.)


def labeling_scores(label: RigidPose, gt: RigidPose) -> tuple[float, ...]:
    """Per-axis labeling quality: (iota_x, iota_y, iota_z, a_rx, a_ry, a_rz).

    Translation axes score exp(-|delta|); rotation axes score cos(delta).
    """
    tl, tg = label.translation, gt.translation
    iotas = tuple(math.exp(-abs(tl[i] - tg[i])) for i in range(3))
    el, eg = label.rotation.as_array(), gt.rotation.as_array()
    alphas = tuple(math.cos(eg[i] - el[i]) for i in range(3))
    return iotas + alphas


def gaussian_translation(p_p: np.ndarray, p_g: np.ndarray) -> float:
    """exp(-euclidean distance) between predicted and ground-truth centers."""
    p_p = np.asarray(p_p, dtype=float).reshape(3)
    p_g = np.asarray(p_g, dtype=float).reshape(3)
    return math.exp(-float(np.linalg.norm(p_p - p_g)))


def _wrap_to_pi(a: float) -> float:
    """Minimal absolute angular difference, in [0, pi]."""
    a = math.fmod(abs(a), 2.0 * math.pi)
    return min(a, 2.0 * math.pi - a)


def euler_abs_errors(e_p: EulerAngles, e_g: EulerAngles) -> tuple[float, float, float]:
    """Per-axis absolute angle differences wrapped to [0, pi]."""
    ap, ag = e_p.as_array(), e_g.as_array()
    return tuple(_wrap_to_pi(ag[i] - ap[i]) for i in range(3))


def add(model: TriMesh | SampledCloud | np.ndarray, pose_p: RigidPose, pose_g: RigidPose) -> float:
    """Average distance between model points under the two poses."""
    if isinstance(model, TriMesh):
        pts = model.vertices
    elif isinstance(model, SampledCloud):
        pts = model.points
    else:
        pts = np.asarray(model, dtype=float).reshape(-1, 3)
    if len(pts) == 0:
        raise MetricsError("ADD requires a non-empty point set")
    rp, tp = geometry.euler_to_matrix(pose_p.rotation), pose_p.translation
    rg, tg = geometry.euler_to_matrix(pose_g.rotation), pose_g.translation
    a = pts @ rp.T + tp
    b = pts @ rg.T + tg
    return float(np.mean(np.linalg.norm(a - b, axis=1)))


def add_accept(add_value: float, diameter: float) -> bool:
    """Accept a pose when ADD is below 10% of the object diameter."""
    return add_value < 0.1 * diameter


def evaluate_pose(
    class_name: str,
    model: TriMesh,
    model_diameter: float,
    pose_p: RigidPose,
    pose_g: RigidPose,
) -> PoseErrorRecord:
    """Full per-object record: Gaussian iota, eta angles, ADD and its verdict."""
    terr = float(np.linalg.norm(pose_p.translation - pose_g.translation))
    etas = euler_abs_errors(pose_p.rotation, pose_g.rotation)
    add_val = add(model, pose_p, pose_g)
    return PoseErrorRecord(
        class_name=class_name,
        iota=math.exp(-terr),
        eta_rx=etas[0],
        eta_ry=etas[1],
        eta_rz=etas[2],
        translation_error=terr,
        add=add_val,
        add_accepted=add_accept(add_val, model_diameter),
    )


def _round6(x: float) -> float:
    return float(f"{x:.6f}")


def _row(records: list[PoseErrorRecord], name: str) -> dict:
    return {
        "name": name,
        "iota": _round6(float(np.mean([r.iota for r in records]))),
        "eta_rx": _round6(float(np.mean([r.eta_rx for r in records]))),
        "eta_ry": _round6(float(np.mean([r.eta_ry for r in records]))),
        "eta_rz": _round6(float(np.mean([r.eta_rz for r in records]))),
        "add": _round6(float(np.mean([r.add for r in records]))),
        "add_accuracy": _round6(
            float(np.mean([1.0 if r.add_accepted else 0.0 for r in records]))
        ),
        "count": len(records),
    }


def aggregate_report(records: list[PoseErrorRecord]) -> dict:
    """Per-class means plus an overall micro-averaged Mean row.

    Classes are ordered lexicographically; the overall mean averages over all
    records, not over class means. Numbers are fixed at 6 decimals.
    """
    if not records:
        raise MetricsError("no records to aggregate")
    by_class: dict[str, list[PoseErrorRecord]] = {}
    for r in records:
        by_class.setdefault(r.class_name, []).append(r)
    classes = [_row(by_class[name], name) for name in sorted(by_class)]
    mean = _row(records, "Mean")
    mean.pop("name")
    return {"classes": classes, "mean": mean}


def dataset_stats(annotations, registry) -> DatasetStats:
    """Frame count, object count, max scaled-model diameter, max camera distance.

    ``annotations`` is a list of AnnotationSet; ``registry`` maps model ids to
    ModelRecord entries whose meshes are loadable.
    """
    frames = len(annotations)
    object_count = 0
    max_diam = 0.0
    max_dist = 0.0
    seen_models: dict[str, float] = {}
    for ann in annotations:
        for obj in ann.objects:
            object_count += 1
            max_dist = max(max_dist, float(np.linalg.norm(obj.translation)))
            if obj.model_id not in seen_models:
                rec = registry.get(obj.model_id)
                if rec is None:
                    raise MetricsError(f"unresolved model reference {obj.model_id!r}")
                m = rec.load().scaled(rec.scale)
                seen_models[obj.model_id] = meshmod.diameter(m)
            max_diam = max(max_diam, seen_models[obj.model_id])
    return DatasetStats(frames, object_count, max_diam, max_dist)
