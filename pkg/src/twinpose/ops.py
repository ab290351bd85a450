"""Mid-level operations shared by the CLI and the HTTP service.

Keeping these in one place guarantees the two surfaces never diverge: both
call the same functions and serialize through :mod:`twinpose.wire`.
"""

from __future__ import annotations

from pathlib import Path

from . import annodata, geometry, metrics, mesh as meshmod, twinspace, wire
from .geometry import CameraIntrinsics, RigidPose
from .mesh import TriMesh


def project_object(
    k: CameraIntrinsics, model: TriMesh, scale, camera_pose: RigidPose
) -> twinspace.Wireframe:
    """Secondary-project a model given its camera-frame pose.

    The twin-space camera distance is d = f / width; the stored camera-frame
    pose is converted to the world frame before projection.
    """
    d = k.f / k.width
    world = geometry.world_pose_from_camera(camera_pose, d)
    return twinspace.project_instance(k, d, model, scale, world)


def project_annotation(ann: annodata.AnnotationSet, registry: annodata.Registry) -> dict:
    """Wireframes for every object of a frame, in annotation order."""
    projections = []
    for obj in ann.objects:
        rec = registry.get(obj.model_id)
        if rec is None:
            raise annodata.AnnotationError(f"unknown model id {obj.model_id!r}")
        wf = project_object(ann.camera, rec.load(), rec.scale, obj.pose())
        projections.append(wire.wireframe_payload(wf))
    return {"image": ann.image, "projections": projections}


def evaluate_datasets(gt_root, pred_root) -> tuple[dict, list[str]]:
    """Pair ground-truth and prediction datasets and compute the metric report.

    Objects are matched by position within each frame's object list; a count
    mismatch within a matched frame is a pairing failure. Returns the report
    dict (wire format) and a list of pairing/validation problems.
    """
    registry, gt_frames = annodata.load_dataset(gt_root)
    pred_root = Path(pred_root)
    pred_frames = []
    pred_dir = pred_root / "frames"
    if not pred_dir.is_dir():
        pred_dir = pred_root  # allow a bare directory of frame files
    for path in sorted(pred_dir.glob("*.json")):
        pred_frames.append((path.stem, annodata.read_annotations(path)))

    matched, unmatched = annodata.pair_predictions(gt_frames, pred_frames)
    problems = [f"prediction for unknown image {img!r}" for img in unmatched]
    if not matched:
        problems.append("no prediction frames matched the ground truth")

    records: list[metrics.PoseErrorRecord] = []
    diam_cache: dict[str, float] = {}
    mesh_cache: dict[str, TriMesh] = {}
    for frame_id, gt, pred in matched:
        if len(gt.objects) != len(pred.objects):
            problems.append(
                f"frame {frame_id!r}: object count mismatch "
                f"(gt {len(gt.objects)}, pred {len(pred.objects)})"
            )
            continue
        for i, (g, p) in enumerate(zip(gt.objects, pred.objects)):
            rec = registry.get(g.model_id)
            if rec is None:
                problems.append(f"frame {frame_id!r} object {i}: unknown model {g.model_id!r}")
                continue
            if g.model_id not in mesh_cache:
                mesh_cache[g.model_id] = rec.load().scaled(rec.scale)
                diam_cache[g.model_id] = meshmod.diameter(mesh_cache[g.model_id])
            records.append(
                metrics.evaluate_pose(
                    g.class_name,
                    mesh_cache[g.model_id],
                    diam_cache[g.model_id],
                    p.pose(),
                    g.pose(),
                )
            )
    if not records:
        return {}, problems or ["no evaluable objects"]
    return metrics.aggregate_report(records), problems


def compute_stats(root) -> metrics.DatasetStats:
    registry, frames = annodata.load_dataset(root)
    return metrics.dataset_stats([ann for _, ann in frames], registry)


def stats_payload(stats: metrics.DatasetStats) -> dict:
    return {
        "frames": stats.frames,
        "objects": stats.object_count,
        "max_diameter": wire.round6(stats.max_diameter),
        "max_camera_distance": wire.round6(stats.max_camera_distance),
    }
