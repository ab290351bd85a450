import json
import math
from pathlib import Path

import numpy as np
import pytest

CUBE_OBJ = """\
# unit cube centered at the origin
v -0.5 -0.5 -0.5
v  0.5 -0.5 -0.5
v  0.5  0.5 -0.5
v -0.5  0.5 -0.5
v -0.5 -0.5  0.5
v  0.5 -0.5  0.5
v  0.5  0.5  0.5
v -0.5  0.5  0.5
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
"""

# Irregular tetrahedron: no nontrivial rigid self-symmetry.
TETRA_OBJ = """\
v 0.0 0.0 0.0
v 1.0 0.0 0.0
v 0.3 0.8 0.0
v 0.2 0.3 1.1
f 1 2 3
f 1 4 2
f 2 4 3
f 1 3 4
"""


def camera_dict():
    return {"f": 721.5, "cx": 609.6, "cy": 172.9, "width": 1242, "height": 375}


def frame_dict(image, objects):
    return {
        "version": 1,
        "image": image,
        "camera": camera_dict(),
        "objects": objects,
    }


def object_dict(model_id, cls, translation, rotation):
    return {
        "model_id": model_id,
        "class": cls,
        "translation": list(translation),
        "rotation_euler": list(rotation),
    }


def build_dataset(root: Path, frames: dict[str, dict] | None = None) -> Path:
    """Write a small dataset: cube + tetra models and the given frame files."""
    (root / "models").mkdir(parents=True)
    (root / "frames").mkdir()
    (root / "images").mkdir()
    (root / "models" / "cube.obj").write_text(CUBE_OBJ)
    (root / "models" / "tetra.obj").write_text(TETRA_OBJ)
    registry = {
        "models": [
            {"id": "cube", "class": "Car", "mesh": "cube.obj", "scale": [2.0, 1.0, 1.5]},
            {"id": "tetra", "class": "Pedestrian", "mesh": "tetra.obj", "scale": [1.0, 1.0, 1.0]},
        ]
    }
    (root / "models" / "registry.json").write_text(json.dumps(registry, indent=2))
    if frames is None:
        frames = {
            "000001": frame_dict(
                "images/000001.png",
                [
                    object_dict("cube", "Car", [0.5, -0.2, 12.0], [0.1, 0.7, -0.2]),
                    object_dict("tetra", "Pedestrian", [-2.0, 0.1, 8.0], [0.0, 0.0, 0.4]),
                ],
            ),
            "000002": frame_dict(
                "images/000002.png",
                [object_dict("cube", "Car", [1.0, 0.3, 30.0], [0.0, -1.2, 0.05])],
            ),
        }
    for fid, data in frames.items():
        (root / "frames" / f"{fid}.json").write_text(json.dumps(data, indent=2))
        (root / "images" / f"{fid}.png").write_bytes(b"\x89PNG\r\n\x1a\nstub")
    return root


@pytest.fixture
def dataset(tmp_path):
    return build_dataset(tmp_path / "dataset")


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
