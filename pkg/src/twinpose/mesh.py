"""Triangle-mesh ingestion, surface sampling, FPS, adjacency, and diameter."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MeshError(ValueError):
    pass


class ObjParseError(MeshError):
    """OBJ file could not be parsed; message carries the offending line number."""


@dataclass(frozen=True)
class TriMesh:
    """Triangle mesh: (n, 3) float vertices and (m, 3) int faces, CCW winding."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        f = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if not np.all(np.isfinite(v)):
            raise MeshError("non-finite vertex coordinates")
        if len(f) and (f.min() < 0 or f.max() >= len(v)):
            raise MeshError("face index out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    def scaled(self, scale) -> "TriMesh":
        """Per-axis scale applied to all vertices (used for registry sizes)."""
        s = np.asarray(scale, dtype=float).reshape(3)
        return TriMesh(self.vertices * s, self.faces)

    def transformed(self, matrix: np.ndarray) -> "TriMesh":
        m = np.asarray(matrix, dtype=float)
        v = self.vertices @ m[:3, :3].T + m[:3, 3]
        return TriMesh(v, self.faces)


@dataclass(frozen=True)
class SampledCloud:
    """Surface samples with one unit normal per point."""

    points: np.ndarray
    normals: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float).reshape(-1, 3)
        n = np.asarray(self.normals, dtype=float).reshape(-1, 3)
        if len(p) != len(n):
            raise MeshError("points/normals count mismatch")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "normals", n)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class EdgeSet:
    """Unique unordered vertex-index pairs (i < j) with endpoint coordinates."""

    pairs: np.ndarray  # (k, 2) int, sorted rows
    endpoints: np.ndarray  # (k, 2, 3) float

    def __len__(self) -> int:
        return len(self.pairs)


def load_mesh(path) -> TriMesh:
    """Parse the OBJ subset: `v x y z`, `f i j k ...` (1-based, /vt/vn ignored).

    Polygon faces are fan-triangulated. Unknown line types and comments are
    skipped. Raises ObjParseError with the line number on malformed input.
    """
    vertices: list[list[float]] = []
    faces: list[list[int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if tokens[0] == "v":
                if len(tokens) < 4:
                    raise ObjParseError(f"line {lineno}: vertex needs 3 coordinates")
                try:
                    vertices.append([float(t) for t in tokens[1:4]])
                except ValueError:
                    raise ObjParseError(f"line {lineno}: bad vertex coordinate") from None
            elif tokens[0] == "f":
                if len(tokens) < 4:
                    raise ObjParseError(f"line {lineno}: face needs at least 3 vertices")
                idx = []
                for tok in tokens[1:]:
                    head = tok.split("/", 1)[0]
                    try:
                        i = int(head)
                    except ValueError:
                        raise ObjParseError(f"line {lineno}: bad face index {tok!r}") from None
                    if i == 0:
                        raise ObjParseError(f"line {lineno}: face index 0 (OBJ is 1-based)")
                    if i < 0:
                        i = len(vertices) + i
                    else:
                        i = i - 1
                    if i < 0 or i >= len(vertices):
                        raise ObjParseError(f"line {lineno}: face index out of range")
                    idx.append(i)
                for a in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[a], idx[a + 1]])
            # vn/vt/usemtl/etc. ignored
    if not vertices or not faces:
        raise ObjParseError(f"{path}: empty mesh (no vertices or no faces)")
    return TriMesh(np.array(vertices), np.array(faces))


def face_areas_normals(m: TriMesh) -> tuple[np.ndarray, np.ndarray]:
    """Per-face areas and unit normals from CCW winding."""
    v = m.vertices
    a, b, c = v[m.faces[:, 0]], v[m.faces[:, 1]], v[m.faces[:, 2]]
    cross = np.cross(b - a, c - a)
    norms = np.linalg.norm(cross, axis=1)
    areas = 0.5 * norms
    with np.errstate(divide="ignore", invalid="ignore"):
        normals = cross / norms[:, None]
    return areas, normals


def sample_uniform(m: TriMesh, n: int, seed: int) -> SampledCloud:
    """Area-weighted uniform surface sampling, deterministic given seed."""
    if n < 1:
        raise MeshError("sample count must be >= 1")
    areas, normals = face_areas_normals(m)
    total = areas.sum()
    if total <= 0:
        raise MeshError("mesh has zero total surface area")
    rng = np.random.default_rng(seed)
    face_idx = rng.choice(len(areas), size=n, p=areas / total)
    # Uniform barycentric coordinates via the square-root trick.
    r1 = np.sqrt(rng.random(n))
    r2 = rng.random(n)
    w0 = 1.0 - r1
    w1 = r1 * (1.0 - r2)
    w2 = r1 * r2
    v = m.vertices
    f = m.faces[face_idx]
    pts = w0[:, None] * v[f[:, 0]] + w1[:, None] * v[f[:, 1]] + w2[:, None] * v[f[:, 2]]
    return SampledCloud(pts, normals[face_idx])


def farthest_point_sample(points: np.ndarray, k: int, start: int = 0) -> list[int]:
    """Greedy max-min selection of k point indices, starting from ``start``.

    Ties are broken by lowest index (np.argmax picks the first maximum).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    n = len(pts)
    if not (1 <= k <= n):
        raise MeshError(f"k={k} out of range for {n} points")
    if not (0 <= start < n):
        raise MeshError(f"start index {start} out of range")
    selected = [start]
    dist = np.linalg.norm(pts - pts[start], axis=1)
    for _ in range(k - 1):
        nxt = int(np.argmax(dist))
        selected.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(pts - pts[nxt], axis=1))
    return selected


def edges(m: TriMesh) -> EdgeSet:
    f = m.faces
    raw = np.vstack([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    raw.sort(axis=1)
    pairs = np.unique(raw, axis=0)
    return EdgeSet(pairs, m.vertices[pairs])


def adjacency(m: TriMesh) -> list[set[int]]:
    """Per-vertex neighbor sets (symmetric by construction)."""
    neighbors: list[set[int]] = [set() for _ in range(len(m.vertices))]
    for i, j in edges(m).pairs:
        neighbors[i].add(int(j))
        neighbors[j].add(int(i))
    return neighbors


def face_pairs(m: TriMesh) -> tuple[np.ndarray, np.ndarray]:
    """Adjacent-face index pairs (sharing an edge) and all face normals."""
    _, normals = face_areas_normals(m)
    edge_to_faces: dict[tuple[int, int], list[int]] = {}
    for fi, (a, b, c) in enumerate(m.faces):
        for e in ((a, b), (b, c), (c, a)):
            key = (int(min(e)), int(max(e)))
            edge_to_faces.setdefault(key, []).append(fi)
    pairs = []
    for flist in edge_to_faces.values():
        for i in range(len(flist)):
            for j in range(i + 1, len(flist)):
                pairs.append((flist[i], flist[j]))
    pairs_arr = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    return pairs_arr, normals


def diameter(m: TriMesh) -> float:
    """Maximum pairwise vertex distance."""
    v = m.vertices
    if len(v) < 2:
        raise MeshError("diameter needs at least 2 vertices")
    # Hull vertices suffice and keep the pairwise pass small for big meshes.
    pts = v
    if len(pts) > 64:
        try:
            from scipy.spatial import ConvexHull

            pts = pts[ConvexHull(pts).vertices]
        except Exception:
            pass
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))
