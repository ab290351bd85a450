"""Wire-format helpers shared by the HTTP service and the CLI.

All outward-facing numbers are fixed at 6 decimal places so that the CLI and
the service produce byte-identical JSON for identical inputs; internal math
stays at full precision.
"""

from __future__ import annotations

import json

import numpy as np

from . import twinspace
from .geometry import CameraIntrinsics, EulerAngles, RigidPose
from .pose_solver import SolveReport


def round6(x: float) -> float:
    return float(f"{float(x):.6f}")


def vec(values) -> list[float]:
    return [round6(v) for v in np.asarray(values, dtype=float).ravel()]


def dump_json(obj) -> str:
    """Canonical compact JSON used on every outward surface."""
    return json.dumps(obj, separators=(",", ":"), sort_keys=True)


def wireframe_payload(wf: twinspace.Wireframe) -> dict:
    """JSON payload for a projected wireframe; behind vertices carry null pixels."""
    vertices = [
        None if np.isnan(px[0]) else vec(px) for px in wf.vertices_px
    ]
    return {
        "vertices_px": vertices,
        "edges": [[int(i), int(j)] for i, j in wf.edges],
        "behind": [int(i) for i in wf.behind],
    }


def pose_payload(pose: RigidPose) -> dict:
    return {
        "translation": vec(pose.translation),
        "rotation_euler": vec(pose.rotation.as_array()),
    }


def pose_from_payload(data: dict) -> RigidPose:
    return RigidPose(
        np.asarray(data["translation"], dtype=float),
        EulerAngles(*data["rotation_euler"]),
    )


def camera_payload(k: CameraIntrinsics) -> dict:
    return {
        "f": round6(k.f),
        "cx": round6(k.c_x),
        "cy": round6(k.c_y),
        "width": k.width,
        "height": k.height,
    }


def camera_from_payload(data: dict) -> CameraIntrinsics:
    return CameraIntrinsics(
        f=data["f"],
        c_x=data["cx"],
        c_y=data["cy"],
        width=data["width"],
        height=data["height"],
    )


def solve_report_payload(report: SolveReport) -> dict:
    return {
        "pose": pose_payload(report.pose),
        "rmse": round6(report.rmse),
        "iterations": report.iterations,
        "converged": report.converged,
    }
