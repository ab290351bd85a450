"""6DoF pose recovery from 2D-3D correspondences by damped least squares."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .geometry import BehindCameraError, CameraIntrinsics, EulerAngles, RigidPose

MIN_CORRESPONDENCES = 5


class SolverError(ValueError):
    pass


class InsufficientConstraintsError(SolverError):
    pass


@dataclass(frozen=True)
class Correspondence:
    object_point: np.ndarray  # (3,) object frame, meters
    image_point: np.ndarray  # (2,) pixels

    def __post_init__(self):
        object.__setattr__(
            self, "object_point", np.asarray(self.object_point, dtype=float).reshape(3)
        )
        object.__setattr__(
            self, "image_point", np.asarray(self.image_point, dtype=float).reshape(2)
        )


@dataclass(frozen=True)
class SolveReport:
    pose: RigidPose
    rmse: float
    iterations: int
    converged: bool


def _residuals(
    params: np.ndarray,
    obj_pts: np.ndarray,
    img_pts: np.ndarray,
    k: CameraIntrinsics,
    d: float,
) -> np.ndarray | None:
    """Stacked pixel residuals, or None if any point falls behind the camera."""
    pose = RigidPose.from_params(params)
    px, behind = geometry.object_to_image(k, pose, d, obj_pts)
    if behind.any():
        return None
    return (px - img_pts).ravel()


def reprojection_rmse(
    pose: RigidPose, corrs: list[Correspondence], k: CameraIntrinsics, d: float
) -> float:
    """Root-mean-square pixel reprojection error of a pose."""
    if not corrs:
        raise SolverError("need at least one correspondence")
    obj = np.array([c.object_point for c in corrs])
    img = np.array([c.image_point for c in corrs])
    r = _residuals(pose.params(), obj, img, k, d)
    if r is None:
        raise BehindCameraError("a correspondence point lies behind the camera")
    return float(np.sqrt(np.mean(np.sum(r.reshape(-1, 2) ** 2, axis=1))))


def _rmse_of(r: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.sum(r.reshape(-1, 2) ** 2, axis=1))))


def _jacobian(params, obj_pts, img_pts, k, d, h=1e-7):
    """Central-difference Jacobian of the stacked residual vector."""
    cols = []
    for i in range(6):
        dp = np.zeros(6)
        dp[i] = h
        rp = _residuals(params + dp, obj_pts, img_pts, k, d)
        rm = _residuals(params - dp, obj_pts, img_pts, k, d)
        if rp is None or rm is None:
            return None
        cols.append((rp - rm) / (2 * h))
    return np.stack(cols, axis=1)


def _solve_unchecked(
    corrs: list[Correspondence],
    k: CameraIntrinsics,
    d: float,
    init: RigidPose,
    max_iter: int = 200,
) -> SolveReport:
    obj = np.array([c.object_point for c in corrs])
    img = np.array([c.image_point for c in corrs])

    params = init.params().copy()
    # Nudge gimbal-adjacent initializations off the r_y = +-pi/2 singularity.
    if abs(abs(params[4]) - math.pi / 2) < 1e-3:
        params[4] += 2e-3

    r = _residuals(params, obj, img, k, d)
    if r is None:
        raise BehindCameraError("initial pose places points behind the camera")
    cost = 0.5 * float(r @ r)
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        jac = _jacobian(params, obj, img, k, d)
        if jac is None:
            break
        jtj = jac.T @ jac
        jtr = jac.T @ r
        stepped = False
        for _ in range(30):  # inner damping adjustments
            try:
                step = np.linalg.solve(jtj + lam * np.eye(6), -jtr)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            r_new = _residuals(params + step, obj, img, k, d)
            if r_new is not None:
                cost_new = 0.5 * float(r_new @ r_new)
                if cost_new <= cost:
                    params = params + step
                    r, cost = r_new, cost_new
                    lam = max(lam / 10, 1e-12)
                    stepped = True
                    break
            lam *= 10
            if lam > 1e12:
                break
        if not stepped:
            break
        if np.linalg.norm(step) < 1e-12 or _rmse_of(r) < 1e-10:
            converged = True
            break
    return SolveReport(RigidPose.from_params(params), _rmse_of(r), it, converged)


def solve_pose(
    corrs: list[Correspondence],
    k: CameraIntrinsics,
    d: float,
    init: RigidPose,
    max_iter: int = 200,
) -> SolveReport:
    """Levenberg-Marquardt fit of a world-frame pose to pixel correspondences.

    Requires at least 5 correspondences; converged is True when the step norm
    drops below 1e-12 or the reprojection RMSE below 1e-10.
    """
    if len(corrs) < MIN_CORRESPONDENCES:
        raise InsufficientConstraintsError(
            f"need at least {MIN_CORRESPONDENCES} correspondences, got {len(corrs)}"
        )
    return _solve_unchecked(corrs, k, d, init, max_iter)


def pose_difference(a: RigidPose, b: RigidPose) -> tuple[float, float]:
    """(translation distance in meters, geodesic rotation angle in radians)."""
    dt = float(np.linalg.norm(a.translation - b.translation))
    ra = geometry.euler_to_matrix(a.rotation)
    rb = geometry.euler_to_matrix(b.rotation)
    c = (np.trace(ra.T @ rb) - 1.0) / 2.0
    dr = float(np.arccos(np.clip(c, -1.0, 1.0)))
    return dt, dr


def symmetry_permutations(
    points: np.ndarray, tol: float = 1e-6, limit: int = 16
) -> list[list[int]]:
    """Permutations realizable by a proper rigid motion of the point set.

    The identity is always first. Backtracking over distance-compatible
    vertex pairings with a Kabsch fit; practical for small sets (<= 12
    points). Enumeration stops after ``limit`` permutations.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    n = len(pts)
    dmat = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
    found: list[list[int]] = [list(range(n))]

    def extend(perm: list[int], used: set[int]) -> bool:
        i = len(perm)
        if i == n:
            if perm != list(range(n)) and _is_rigid_match(pts, perm, tol):
                found.append(list(perm))
            return len(found) >= limit
        for j in range(n):
            if j in used:
                continue
            if all(abs(dmat[i, a] - dmat[j, perm[a]]) <= 10 * tol for a in range(i)):
                perm.append(j)
                used.add(j)
                if extend(perm, used):
                    return True
                perm.pop()
                used.remove(j)
        return False

    extend([], set())
    return found


def has_nontrivial_symmetry(points: np.ndarray, tol: float = 1e-6) -> bool:
    """True if some non-identity rigid motion maps the point set onto itself."""
    return len(symmetry_permutations(points, tol, limit=2)) > 1


def _is_rigid_match(pts: np.ndarray, perm: list[int], tol: float) -> bool:
    """Check a proper rigid motion maps pts onto pts[perm] within tol."""
    src = pts - pts.mean(axis=0)
    dst = pts[perm] - pts[perm].mean(axis=0)
    h = src.T @ dst
    u, _, vt = np.linalg.svd(h)
    s = np.diag([1.0, 1.0, np.sign(np.linalg.det(vt.T @ u.T))])
    r = vt.T @ s @ u.T
    if np.linalg.det(r) < 0:
        return False
    mapped = src @ r.T
    return bool(np.max(np.linalg.norm(mapped - dst, axis=1)) <= 100 * tol)


@dataclass(frozen=True)
class UniquenessReport:
    unique: bool
    best: SolveReport
    translation_spread: float
    rotation_spread: float
    converged_count: int


def uniqueness_probe(
    object_points: np.ndarray,
    pose: RigidPose,
    k: CameraIntrinsics,
    d: float,
    restarts: int,
    seed: int,
    min_points_check: bool = True,
) -> UniquenessReport:
    """Empirical bijectivity probe: multi-start solving from random inits.

    Projects the points under ``pose`` and re-solves from ``restarts`` random
    in-frustum initializations. Because the projected image is a point set
    without labels, every correspondence assignment induced by a rigid
    symmetry of the object points is solved as well; symmetric objects thus
    surface their alternative poses. Reports whether every converged solution
    clusters within 1e-4 m / 1e-4 rad of the best one.
    """
    obj_pts = np.asarray(object_points, dtype=float).reshape(-1, 3)
    if min_points_check and len(obj_pts) < MIN_CORRESPONDENCES:
        raise InsufficientConstraintsError(
            f"need at least {MIN_CORRESPONDENCES} points, got {len(obj_pts)}"
        )
    px, behind = geometry.object_to_image(k, pose, d, obj_pts)
    if behind.any():
        raise BehindCameraError("pose places probe points behind the camera")

    assignments = symmetry_permutations(obj_pts)
    rng = np.random.default_rng(seed)
    solutions: list[SolveReport] = []
    for _ in range(restarts):
        t = np.array(
            [
                rng.uniform(-0.3, 0.3),
                rng.uniform(-0.3, 0.3),
                rng.uniform(-d, 0.8 * d),  # camera-frame depth in (0.2 d, 2 d)
            ]
        )
        e = EulerAngles(*rng.uniform(-math.pi, math.pi, size=3))
        init = RigidPose(t, e)
        for perm in assignments:
            corrs = [Correspondence(obj_pts[i], px[perm[i]]) for i in range(len(obj_pts))]
            try:
                rep = _solve_unchecked(corrs, k, d, init)
            except BehindCameraError:
                continue
            # Count only solutions that actually explain the projections.
            if rep.converged and rep.rmse < 1e-6:
                solutions.append(rep)
    if not solutions:
        raise SolverError("all restarts diverged")
    best = min(solutions, key=lambda s: s.rmse)
    dts, drs = zip(*(pose_difference(s.pose, best.pose) for s in solutions))
    t_spread, r_spread = max(dts), max(drs)
    unique = t_spread < 1e-4 and r_spread < 1e-4
    return UniquenessReport(unique, best, t_spread, r_spread, len(solutions))
