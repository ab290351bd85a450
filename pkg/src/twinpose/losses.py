"""Loss stack for model reconstruction and pose supervision.

All losses are forward evaluations over numpy arrays; no gradients. The
weight presets mirror the published hyper-parameters for the KITTI-6DoF and
LineMod training setups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from . import geometry, mesh as meshmod
from .geometry import RigidPose
from .mesh import SampledCloud, TriMesh


class LossError(ValueError):
    pass


@dataclass(frozen=True)
class LossWeights:
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha5: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "gamma1", "gamma2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise LossError(f"weight {name}={v} must be finite and non-negative")


KITTI_WEIGHTS = LossWeights(6.0, 100.0, 100.0, 1.0, 10.0, 0.5, 3.0)
LINEMOD_WEIGHTS = LossWeights(90.0, 50.0, 50.0, 0.5, 5.0, 0.5, 10.0)

PRESETS = {"kitti": KITTI_WEIGHTS, "linemod": LINEMOD_WEIGHTS}

_WEIGHT_KEYS = ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "gamma1", "gamma2")


def parse_weights_config(text: str) -> LossWeights:
    """Parse a key=value weight config; a `preset` line supplies defaults.

    Keys: preset in {kitti, linemod}, alpha1..alpha5, gamma1, gamma2.
    Explicit keys override the preset. Lines starting with # are comments.
    """
    values: dict[str, float] = {}
    preset: LossWeights | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise LossError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key == "preset":
            if val not in PRESETS:
                raise LossError(f"line {lineno}: unknown preset {val!r}")
            preset = PRESETS[val]
        elif key in _WEIGHT_KEYS:
            try:
                values[key] = float(val)
            except ValueError:
                raise LossError(f"line {lineno}: bad number {val!r}") from None
        else:
            raise LossError(f"line {lineno}: unknown key {key!r}")
    if preset is None and len(values) < len(_WEIGHT_KEYS):
        missing = [k for k in _WEIGHT_KEYS if k not in values]
        raise LossError(f"no preset given and weights missing: {missing}")
    base = {k: getattr(preset, k) for k in _WEIGHT_KEYS} if preset else {}
    base.update(values)
    return LossWeights(**base)


def format_weights_config(w: LossWeights) -> str:
    return "".join(f"{k}={getattr(w, k)!r}\n" for k in _WEIGHT_KEYS)


def chamfer(g: SampledCloud | np.ndarray, p: SampledCloud | np.ndarray) -> float:
    """Symmetric squared-distance chamfer between two point clouds."""
    gp = g.points if isinstance(g, SampledCloud) else np.asarray(g, float).reshape(-1, 3)
    pp = p.points if isinstance(p, SampledCloud) else np.asarray(p, float).reshape(-1, 3)
    if len(gp) == 0 or len(pp) == 0:
        raise LossError("chamfer requires non-empty clouds")
    d2 = cdist(gp, pp, "sqeuclidean")
    return float(d2.min(axis=1).mean() + d2.min(axis=0).mean())


def mesh_edge_loss(m: TriMesh) -> float:
    """Mean squared edge length over the unique edge set."""
    es = meshmod.edges(m)
    if len(es) == 0:
        raise LossError("mesh has no edges")
    diff = es.endpoints[:, 0] - es.endpoints[:, 1]
    return float(np.mean(np.sum(diff**2, axis=1)))


def normal_consistency_loss(m: TriMesh) -> float:
    """Mean of 1 - cos(n_i, n_j) over adjacent-face normal pairs."""
    pairs, normals = meshmod.face_pairs(m)
    if len(pairs) == 0:
        raise LossError("mesh has no adjacent face pairs")
    ni = normals[pairs[:, 0]]
    nj = normals[pairs[:, 1]]
    cos = np.sum(ni * nj, axis=1)
    return float(np.mean(1.0 - cos))


def laplacian_smoothing_loss(m: TriMesh) -> float:
    """Sum over vertices of the L2 norm of the uniform Laplacian vector."""
    neighbors = meshmod.adjacency(m)
    total = 0.0
    for i, nbrs in enumerate(neighbors):
        if not nbrs:
            raise LossError(f"vertex {i} has no neighbors")
        idx = np.fromiter(nbrs, dtype=np.int64)
        lap = (m.vertices[idx] - m.vertices[i]).mean(axis=0)
        total += float(np.linalg.norm(lap))
    return total


def psc_loss(pred: list[tuple[np.ndarray, np.ndarray]], gt: list[tuple[np.ndarray, np.ndarray]]) -> float:
    """L1 loss over per-model (scale, center) 6-vectors, averaged over models."""
    if len(pred) != len(gt):
        raise LossError("model count mismatch")
    if not pred:
        raise LossError("no models")
    per_model = []
    for (sp, cp), (sg, cg) in zip(pred, gt):
        a = np.concatenate([np.asarray(sp, float).reshape(3), np.asarray(cp, float).reshape(3)])
        b = np.concatenate([np.asarray(sg, float).reshape(3), np.asarray(cg, float).reshape(3)])
        per_model.append(np.mean(np.abs(a - b)))
    return float(np.mean(per_model))


def model_loss(
    psc: float, cd: float, me: float, mnc: float, mls: float, w: LossWeights
) -> float:
    """Weighted sum of the five model reconstruction components."""
    return (
        w.alpha1 * psc + w.alpha2 * cd + w.alpha3 * me + w.alpha4 * mnc + w.alpha5 * mls
    )


def fps_loss(
    gt_model: TriMesh, pose_p: RigidPose, pose_g: RigidPose, k: int = 8
) -> float:
    """Mean L2 distance between k FPS-selected vertices under the two poses."""
    v = gt_model.vertices
    if k > len(v):
        raise LossError(f"k={k} exceeds vertex count {len(v)}")
    idx = meshmod.farthest_point_sample(v, k)
    pts = v[idx]
    rp, tp = geometry.euler_to_matrix(pose_p.rotation), pose_p.translation
    rg, tg = geometry.euler_to_matrix(pose_g.rotation), pose_g.translation
    a = pts @ rp.T + tp
    b = pts @ rg.T + tg
    return float(np.mean(np.linalg.norm(a - b, axis=1)))


def sixdof_loss(
    gt_model: TriMesh, pose_p: RigidPose, pose_g: RigidPose, k: int = 8
) -> float:
    """FPS term plus L1 center difference plus L1 quaternion difference.

    Quaternions are sign-canonicalized (w >= 0) so the L1 term is continuous.
    """
    fps = fps_loss(gt_model, pose_p, pose_g, k)
    t_term = float(np.sum(np.abs(pose_p.translation - pose_g.translation)))
    qp = pose_p.quaternion().as_array()
    qg = pose_g.quaternion().as_array()
    q_term = float(np.sum(np.abs(qp - qg)))
    return fps + t_term + q_term


def cross_entropy(pred_dist: np.ndarray, label: int) -> float:
    """-log probability of the true class; probabilities clamped at 1e-12."""
    p = np.asarray(pred_dist, dtype=float).ravel()
    if abs(p.sum() - 1.0) > 1e-9 or np.any(p < 0):
        raise LossError("pred_dist must be a probability distribution")
    if not (0 <= label < len(p)):
        raise LossError("label out of range")
    return float(-np.log(max(p[label], 1e-12)))


def pose_loss(cl: float, sixdof: float, w: LossWeights) -> float:
    return w.gamma1 * cl + w.gamma2 * sixdof


def total_loss(l_d: float, l_m: float, l_p: float) -> float:
    """Overall objective: detection + model + pose terms (detection external)."""
    return l_d + l_m + l_p
