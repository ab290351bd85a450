"""Annotation file format, model registry, dataset ingestion and validation.

Dataset layout::

    dataset_root/
      models/registry.json     {"models": [{"id", "class", "mesh", "scale"}]}
      models/*.obj
      frames/*.json            one AnnotationSet per frame
      images/*                 opaque assets referenced by frame files

Object poses are stored in the virtual-camera frame: translation in meters,
rotation as Euler radians. Numbers are serialized at 9 significant digits;
writes are whole-file atomic (temp file + rename).
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from . import mesh as meshmod
from .geometry import CameraIntrinsics, EulerAngles, RigidPose

SUPPORTED_VERSION = 1


class AnnotationError(ValueError):
    pass


class SchemaError(AnnotationError):
    """Annotation JSON failed schema validation; message carries a JSON pointer."""


class UnsupportedVersionError(AnnotationError):
    pass


_NUMBER = {"type": "number"}
_VEC3 = {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3}

FRAME_SCHEMA = {
    "type": "object",
    "required": ["version", "image", "camera", "objects"],
    "properties": {
        "version": {"type": "integer"},
        "image": {"type": "string"},
        "camera": {
            "type": "object",
            "required": ["f", "cx", "cy", "width", "height"],
            "properties": {
                "f": _NUMBER,
                "cx": _NUMBER,
                "cy": _NUMBER,
                "width": {"type": "integer", "minimum": 1},
                "height": {"type": "integer", "minimum": 1},
            },
        },
        "objects": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["model_id", "class", "translation", "rotation_euler"],
                "properties": {
                    "model_id": {"type": "string"},
                    "class": {"type": "string"},
                    "translation": _VEC3,
                    "rotation_euler": _VEC3,
                },
            },
        },
    },
}

REGISTRY_SCHEMA = {
    "type": "object",
    "required": ["models"],
    "properties": {
        "models": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "class", "mesh", "scale"],
                "properties": {
                    "id": {"type": "string"},
                    "class": {"type": "string"},
                    "mesh": {"type": "string"},
                    "scale": _VEC3,
                },
            },
        }
    },
}

_frame_validator = Draft202012Validator(FRAME_SCHEMA)
_registry_validator = Draft202012Validator(REGISTRY_SCHEMA)


@dataclass(frozen=True)
class ObjectAnnotation:
    model_id: str
    class_name: str
    translation: np.ndarray  # camera frame, meters
    rotation_euler: np.ndarray  # radians

    def __post_init__(self):
        object.__setattr__(
            self, "translation", np.asarray(self.translation, dtype=float).reshape(3)
        )
        object.__setattr__(
            self,
            "rotation_euler",
            np.asarray(self.rotation_euler, dtype=float).reshape(3),
        )

    def pose(self) -> RigidPose:
        return RigidPose(self.translation, EulerAngles(*self.rotation_euler))


@dataclass(frozen=True)
class AnnotationSet:
    version: int
    image: str
    camera: CameraIntrinsics
    objects: tuple[ObjectAnnotation, ...]


@dataclass(frozen=True)
class ModelRecord:
    id: str
    class_name: str
    mesh_path: Path
    scale: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.scale, dtype=float).reshape(3)
        if np.any(s <= 0):
            raise AnnotationError(f"model {self.id!r}: scale components must be > 0")
        object.__setattr__(self, "scale", s)
        object.__setattr__(self, "mesh_path", Path(self.mesh_path))

    def load(self) -> meshmod.TriMesh:
        return meshmod.load_mesh(self.mesh_path)


class Registry:
    """Model registry keyed by unique id."""

    def __init__(self, records: list[ModelRecord]):
        self._by_id: dict[str, ModelRecord] = {}
        for rec in records:
            if rec.id in self._by_id:
                raise AnnotationError(f"duplicate model id {rec.id!r}")
            self._by_id[rec.id] = rec

    def get(self, model_id: str) -> ModelRecord | None:
        return self._by_id.get(model_id)

    def __contains__(self, model_id: str) -> bool:
        return model_id in self._by_id

    def __iter__(self):
        return iter(self._by_id.values())

    def __len__(self) -> int:
        return len(self._by_id)


def _sig9(x: float) -> float:
    """Round to 9 significant digits for serialization."""
    return float(f"{float(x):.9g}")


def _schema_check(validator, data, label: str) -> None:
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        parts = [str(p) for p in e.absolute_path]
        # Required-property errors sit at the parent; point at the missing key.
        if e.validator == "required":
            match = re.match(r"'([^']+)' is a required property", e.message)
            if match:
                parts.append(match.group(1))
        pointer = "/" + "/".join(parts)
        raise SchemaError(f"{label}: {pointer}: {e.message}")


def annotation_from_dict(data: dict, label: str = "annotation") -> AnnotationSet:
    _schema_check(_frame_validator, data, label)
    if data["version"] != SUPPORTED_VERSION:
        raise UnsupportedVersionError(
            f"{label}: unsupported version {data['version']} (supported: {SUPPORTED_VERSION})"
        )
    cam = data["camera"]
    camera = CameraIntrinsics(
        f=cam["f"], c_x=cam["cx"], c_y=cam["cy"], width=cam["width"], height=cam["height"]
    )
    objects = tuple(
        ObjectAnnotation(
            model_id=o["model_id"],
            class_name=o["class"],
            translation=o["translation"],
            rotation_euler=o["rotation_euler"],
        )
        for o in data["objects"]
    )
    return AnnotationSet(data["version"], data["image"], camera, objects)


def annotation_to_dict(ann: AnnotationSet) -> dict:
    return {
        "version": ann.version,
        "image": ann.image,
        "camera": {
            "f": _sig9(ann.camera.f),
            "cx": _sig9(ann.camera.c_x),
            "cy": _sig9(ann.camera.c_y),
            "width": ann.camera.width,
            "height": ann.camera.height,
        },
        "objects": [
            {
                "model_id": o.model_id,
                "class": o.class_name,
                "translation": [_sig9(v) for v in o.translation],
                "rotation_euler": [_sig9(v) for v in o.rotation_euler],
            }
            for o in ann.objects
        ],
    }


def read_annotations(path) -> AnnotationSet:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AnnotationError(f"{path}: invalid JSON: {exc}") from None
    return annotation_from_dict(data, label=str(path))


def _atomic_write_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_annotations(ann: AnnotationSet, path) -> None:
    path = Path(path)
    _atomic_write_text(path, json.dumps(annotation_to_dict(ann), indent=2) + "\n")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    object_index: int | None = None


def validate(ann: AnnotationSet, registry: Registry) -> list[Diagnostic]:
    """Invariant checks beyond the JSON schema; returns diagnostics, never raises."""
    diags: list[Diagnostic] = []
    for i, obj in enumerate(ann.objects):
        if obj.model_id not in registry:
            diags.append(
                Diagnostic("error", f"unregistered model id {obj.model_id!r}", i)
            )
        if obj.translation[2] <= 0:
            diags.append(
                Diagnostic(
                    "error",
                    f"object depth {obj.translation[2]:.6g} is not in front of the camera",
                    i,
                )
            )
        rec = registry.get(obj.model_id)
        if rec is not None and rec.class_name != obj.class_name:
            diags.append(
                Diagnostic(
                    "warning",
                    f"class {obj.class_name!r} differs from registry class {rec.class_name!r}",
                    i,
                )
            )
    return diags


def read_registry(path) -> Registry:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AnnotationError(f"{path}: invalid JSON: {exc}") from None
    _schema_check(_registry_validator, data, str(path))
    base = path.parent
    records = [
        ModelRecord(
            id=m["id"],
            class_name=m["class"],
            mesh_path=base / m["mesh"],
            scale=m["scale"],
        )
        for m in data["models"]
    ]
    return Registry(records)


def load_dataset(root) -> tuple[Registry, list[tuple[str, AnnotationSet]]]:
    """Load registry and all frames, ordered lexicographically by frame id.

    Returns (registry, [(frame_id, AnnotationSet), ...]); the frame id is the
    file stem. Duplicate stems and unreadable meshes are errors.
    """
    root = Path(root)
    registry = read_registry(root / "models" / "registry.json")
    for rec in registry:
        rec.load()  # fail fast on unreadable meshes
    frames_dir = root / "frames"
    frames: list[tuple[str, AnnotationSet]] = []
    seen: set[str] = set()
    if frames_dir.is_dir():
        for path in sorted(frames_dir.glob("*.json")):
            if path.stem in seen:
                raise AnnotationError(f"duplicate frame id {path.stem!r}")
            seen.add(path.stem)
            frames.append((path.stem, read_annotations(path)))
    return registry, frames


def pair_predictions(
    gt_frames: list[tuple[str, AnnotationSet]],
    pred_frames: list[tuple[str, AnnotationSet]],
) -> tuple[list[tuple[str, AnnotationSet, AnnotationSet]], list[str]]:
    """Match prediction frames to ground truth by image path.

    Returns (matched [(frame_id, gt, pred)], unmatched prediction image paths).
    """
    gt_by_image = {ann.image: (fid, ann) for fid, ann in gt_frames}
    matched = []
    unmatched = []
    for _, pred in pred_frames:
        hit = gt_by_image.get(pred.image)
        if hit is None:
            unmatched.append(pred.image)
        else:
            fid, gt = hit
            matched.append((fid, gt, pred))
    matched.sort(key=lambda t: t[0])
    return matched, unmatched
