"""Local HTTP service driving the labeling frontend.

All geometry is computed server-side through :mod:`twinpose.ops`, so the
frontend and the CLI share one implementation. Responses are serialized with
the canonical compact encoder from :mod:`twinpose.wire` to keep CLI/endpoint
parity byte-exact.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse
from pydantic import BaseModel, Field, ValidationError

from . import annodata, ops, pose_solver, wire
from .geometry import BehindCameraError
from .pose_solver import Correspondence

DEFAULT_PORT = 8753


@dataclass(frozen=True)
class ServiceConfig:
    port: int
    dataset_root: Path
    read_only: bool = False

    def __post_init__(self):
        if not (1 <= self.port <= 65535):
            raise ValueError(f"port {self.port} out of range")
        root = Path(self.dataset_root)
        if not root.is_dir():
            raise ValueError(f"dataset root {root} does not exist")
        object.__setattr__(self, "dataset_root", root)


class PoseModel(BaseModel):
    translation: list[float] = Field(min_length=3, max_length=3)
    rotation_euler: list[float] = Field(min_length=3, max_length=3)


class CameraModel(BaseModel):
    f: float
    cx: float
    cy: float
    width: int
    height: int


class ProjectRequest(BaseModel):
    model_id: str
    scale: list[float] = Field(min_length=3, max_length=3)
    pose: PoseModel
    camera: CameraModel


class CorrespondenceModel(BaseModel):
    object_point: list[float] = Field(min_length=3, max_length=3)
    image_point: list[float] = Field(min_length=2, max_length=2)


class SolveRequest(BaseModel):
    model_id: str | None = None
    correspondences: list[CorrespondenceModel]
    init: PoseModel
    camera: CameraModel


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=wire.dump_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, message: str) -> Response:
    return _json_response({"error": message}, status_code)


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="twinpose labeling service")
    root = config.dataset_root
    frames_dir = root / "frames"
    locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def frame_lock(frame_id: str) -> threading.Lock:
        with locks_guard:
            return locks.setdefault(frame_id, threading.Lock())

    def registry() -> annodata.Registry:
        return annodata.read_registry(root / "models" / "registry.json")

    @app.exception_handler(ValidationError)
    async def _validation_handler(request: Request, exc: ValidationError):
        return _error(400, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _request_validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, str(exc.errors()))

    @app.get("/scenes")
    def list_scenes():
        ids = sorted(p.stem for p in frames_dir.glob("*.json")) if frames_dir.is_dir() else []
        return _json_response({"scenes": ids})

    @app.get("/scenes/{frame_id}")
    def get_scene(frame_id: str):
        path = frames_dir / f"{frame_id}.json"
        if not path.is_file():
            return _error(404, f"unknown frame {frame_id!r}")
        ann = annodata.read_annotations(path)
        return _json_response(
            {
                "frame_id": frame_id,
                "annotation": annodata.annotation_to_dict(ann),
                "image_url": f"/images/{Path(ann.image).name}",
            }
        )

    @app.put("/scenes/{frame_id}/annotations")
    async def put_annotations(frame_id: str, request: Request):
        if config.read_only:
            return _error(403, "service is read-only")
        try:
            data = await request.json()
        except Exception:
            return _error(400, "request body is not valid JSON")
        try:
            ann = annodata.annotation_from_dict(data, label=frame_id)
        except annodata.AnnotationError as exc:
            return _error(400, str(exc))
        diags = annodata.validate(ann, registry())
        errors = [d for d in diags if d.severity == "error"]
        if errors:
            return _error(
                400,
                "; ".join(f"object {d.object_index}: {d.message}" for d in errors),
            )
        path = frames_dir / f"{frame_id}.json"
        with frame_lock(frame_id):
            frames_dir.mkdir(parents=True, exist_ok=True)
            annodata.write_annotations(ann, path)
        return _json_response({"frame_id": frame_id, "saved": True})

    @app.get("/models")
    def list_models():
        recs = [
            {
                "id": rec.id,
                "class": rec.class_name,
                "mesh": rec.mesh_path.name,
                "scale": wire.vec(rec.scale),
            }
            for rec in registry()
        ]
        recs.sort(key=lambda r: r["id"])
        return _json_response({"models": recs})

    @app.get("/models/{model_id}/wireframe")
    def model_wireframe(model_id: str):
        rec = registry().get(model_id)
        if rec is None:
            return _error(404, f"unknown model {model_id!r}")
        from . import mesh as meshmod

        m = rec.load()
        return _json_response(
            {
                "vertices": [wire.vec(v) for v in m.vertices],
                "edges": [[int(i), int(j)] for i, j in meshmod.edges(m).pairs],
                "scale": wire.vec(rec.scale),
            }
        )

    @app.get("/images/{name}")
    def get_image(name: str):
        path = root / "images" / name
        if not path.is_file() or ".." in name:
            return _error(404, f"unknown image {name!r}")
        return FileResponse(path)

    @app.post("/project")
    def project(req: ProjectRequest):
        rec = registry().get(req.model_id)
        if rec is None:
            return _error(400, f"unknown model {req.model_id!r}")
        camera = wire.camera_from_payload(req.camera.model_dump())
        pose = wire.pose_from_payload(req.pose.model_dump())
        wf = ops.project_object(camera, rec.load(), np.array(req.scale), pose)
        return _json_response(wire.wireframe_payload(wf))

    @app.post("/solve")
    def solve(req: SolveRequest):
        if len(req.correspondences) < pose_solver.MIN_CORRESPONDENCES:
            return _error(
                400,
                f"need at least {pose_solver.MIN_CORRESPONDENCES} correspondences",
            )
        camera = wire.camera_from_payload(req.camera.model_dump())
        d = camera.f / camera.width
        corrs = [
            Correspondence(c.object_point, c.image_point) for c in req.correspondences
        ]
        init_cam = wire.pose_from_payload(req.init.model_dump())
        from . import geometry

        init_world = geometry.world_pose_from_camera(init_cam, d)
        try:
            report = pose_solver.solve_pose(corrs, camera, d, init_world)
        except BehindCameraError as exc:
            return _error(400, str(exc))
        cam_pose = geometry.camera_pose_from_world(report.pose, d)
        payload = wire.solve_report_payload(
            pose_solver.SolveReport(cam_pose, report.rmse, report.iterations, report.converged)
        )
        return _json_response(payload)

    return app
