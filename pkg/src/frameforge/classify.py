"""Recognize the homogeneous surfaces of S^3 and rebuild their geometric data.

The decision tree samples the principal curvatures on a grid:

1. not constant                      -> :class:`NonConstant`
2. constant and umbilic, lam ~ 0     -> :class:`GreatSphere`
3. constant and umbilic, lam != 0    -> :class:`RoundSphere` (center and radius)
4. constant and distinct             -> :class:`FlatTorus` (two orthogonal circles)

Sign convention: ``omega_1^3 = lam1 theta^1`` in the principal frame, hence
``d e3 = -lam dx`` on an umbilic surface and the sphere center is
``x + e3 / lam``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .config import Tolerances
from .curvature import gaussian_extrinsic, gaussian_intrinsic, principal_curvatures, second_fundamental
from .errors import (
    InconsistentConstants,
    NotConstantCenter,
    NotPrincipalChart,
    PlaneDrift,
    UnsupportedSpec,
)
from .forms import GridSpec
from .frames import H_FRAME, FrameField, pullback_check
from .linalg import random_so4, so4_block_rotation
from .patch import FamilySpec, SphereCap, SurfacePatch, TorusAB, Transformed, apply_isometry

SCHEMA = "v1"


@dataclass(frozen=True)
class ConstancyStats:
    mean1: float
    mean2: float
    dev1: float
    dev2: float
    umbilic_gap: float
    spread1: float
    spread2: float

    @property
    def spread(self) -> float:
        return max(self.spread1, self.spread2)


@dataclass(frozen=True)
class CircleData:
    center: np.ndarray
    radius: float
    plane_normals: np.ndarray
    plane_offsets: np.ndarray
    center_dev: float
    radius_dev: float
    plane_drift: float

    def to_dict(self) -> dict:
        return {
            "center": self.center.tolist(),
            "radius": self.radius,
            "plane_constraints": [
                {"normal": n.tolist(), "offset": float(o)} for n, o in zip(self.plane_normals, self.plane_offsets)
            ],
            "center_dev": self.center_dev,
            "radius_dev": self.radius_dev,
            "plane_drift": self.plane_drift,
        }


@dataclass(frozen=True)
class TorusReconstruction:
    """Circle decomposition of a flat torus.

    ``lam_u1`` / ``lam_u2`` are the principal curvatures along the chart
    lines; circle1 is traced by ``u1`` (with ``u2`` frozen) and has radius
    ``a_rec = 1 / k1``.
    """

    lam_u1: float
    lam_u2: float
    k1: float
    k2: float
    circle1: CircleData
    circle2: CircleData
    a_rec: float
    b_rec: float
    plane_orthogonality_defect: float
    f_frame_defect: float
    frame_ode_residual: float
    f_frame: Callable = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "lam_u1": self.lam_u1,
            "lam_u2": self.lam_u2,
            "k1": self.k1,
            "k2": self.k2,
            "circle1": self.circle1.to_dict(),
            "circle2": self.circle2.to_dict(),
            "a_rec": self.a_rec,
            "b_rec": self.b_rec,
            # derived consequence of lam1 lam2 = -1, reported for the family check
            "a2_plus_b2": self.a_rec**2 + self.b_rec**2,
            "plane_orthogonality_defect": self.plane_orthogonality_defect,
            "f_frame_defect": self.f_frame_defect,
            "frame_ode_residual": self.frame_ode_residual,
        }


@dataclass(frozen=True)
class GreatSphere:
    hyperplane_normal: np.ndarray
    normal_dev: float

    variant = "GreatSphere"

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "variant": self.variant,
                "hyperplane_normal": self.hyperplane_normal.tolist(), "normal_dev": self.normal_dev}


@dataclass(frozen=True)
class RoundSphere:
    lam: float
    center: np.ndarray
    radius: float
    center_dev: float
    radius_dev: float

    variant = "RoundSphere"

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "variant": self.variant, "lambda": self.lam, "center": self.center.tolist(),
                "radius": self.radius, "center_dev": self.center_dev, "radius_dev": self.radius_dev}


@dataclass(frozen=True)
class FlatTorus:
    recon: TorusReconstruction
    lam1: float
    lam2: float

    variant = "FlatTorus"

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "variant": self.variant, "lambda1": self.lam1, "lambda2": self.lam2,
                "lambda_product": self.lam1 * self.lam2, **self.recon.to_dict()}


@dataclass(frozen=True)
class NonConstant:
    stats: ConstancyStats

    variant = "NonConstant"

    def to_dict(self) -> dict:
        s = self.stats
        return {"schema": SCHEMA, "variant": self.variant, "mean1": s.mean1, "mean2": s.mean2, "dev1": s.dev1,
                "dev2": s.dev2, "umbilic_gap": s.umbilic_gap, "spread1": s.spread1, "spread2": s.spread2}


Classification = Union[GreatSphere, RoundSphere, FlatTorus, NonConstant]


def _field(patch, field):
    return field if field is not None else FrameField(patch, H_FRAME)


def sample_constancy(patch: SurfacePatch, grid: GridSpec, field: FrameField | None = None,
                     tol_umb: float = 1e-6) -> ConstancyStats:
    pd = principal_curvatures(patch, *grid.points(patch.domain), _field(patch, field), tol_umb)
    m1, m2 = float(pd.lam1.mean()), float(pd.lam2.mean())
    return ConstancyStats(
        m1, m2,
        float(np.max(np.abs(pd.lam1 - m1))), float(np.max(np.abs(pd.lam2 - m2))),
        float(np.max(np.abs(pd.lam1 - pd.lam2))),
        float(np.ptp(pd.lam1)), float(np.ptp(pd.lam2)),
    )


def reconstruct_sphere(patch: SurfacePatch, grid: GridSpec, lam: float, field: FrameField | None = None,
                       tols: Tolerances = Tolerances()):
    """Center and radius of an umbilic patch from ``X = x + e3 / lam``.

    Returns ``(center, radius, center_dev, radius_dev)``.

    Raises:
        NotConstantCenter: if X wanders more than ``tol_family`` over the grid.
    """
    field = _field(patch, field)
    u1, u2 = grid.points(patch.domain)
    x = patch.position(u1, u2)
    e3 = field.frame(u1, u2)[..., 2, :]
    centers = (x + e3 / lam).reshape(-1, 4)
    center = centers.mean(axis=0)
    center_dev = float(np.max(np.linalg.norm(centers - center, axis=-1)))
    radius = 1.0 / abs(lam)
    radius_dev = float(np.max(np.abs(np.linalg.norm(x - center, axis=-1) - radius)))
    if center_dev > tols.tol_family:
        raise NotConstantCenter(f"sphere center drifts by {center_dev:.3e}")
    return center, radius, center_dev, radius_dev


def _circle(points, frames, k, radial, normals_idx, tols, which):
    centers = points + frames[:, radial, :] / k
    center = centers.mean(axis=0)
    center_dev = float(np.max(np.linalg.norm(centers - center, axis=-1)))
    radius_dev = float(np.max(np.abs(np.linalg.norm(points - center, axis=-1) - 1.0 / k)))
    proj = np.stack([np.sum(points * frames[:, i, :], axis=-1) for i in normals_idx])
    offsets = proj.mean(axis=1)
    drift = float(np.max(np.abs(proj - offsets[:, None])))
    if center_dev > tols.tol_family:
        raise NotConstantCenter(f"{which} center drifts by {center_dev:.3e}")
    if drift > tols.tol_family:
        raise PlaneDrift(f"{which} leaves its plane by {drift:.3e}")
    normals = frames[len(frames) // 2][list(normals_idx)]
    return CircleData(center, 1.0 / k, normals, offsets, center_dev, radius_dev, drift)


def reconstruct_torus(patch: SurfacePatch, grid: GridSpec, lam1: float, lam2: float,
                      field: FrameField | None = None, tols: Tolerances = Tolerances(),
                      h_frame: float = H_FRAME) -> TorusReconstruction:
    """Split a patch with constant distinct principal curvatures into two circles.

    The chart lines must be curvature lines.  Along each line, ``x + f / k``
    is constant for the rotated normal ``f`` of that direction; the circles
    lie in the planes spanned by ``(f1, f3)`` and ``(f2, f4)``.
    """
    field = _field(patch, field)
    u1, u2 = grid.points(patch.domain)
    sf = second_fundamental(patch, u1, u2, field)
    off = float(np.max(np.abs(sf.h.h12)))
    if off > tols.tol_family:
        raise NotPrincipalChart(f"chart lines are not curvature lines (|h12| up to {off:.3e})")
    lam_u1, lam_u2 = float(np.mean(sf.h.h11)), float(np.mean(sf.h.h22))
    if abs(max(lam_u1, lam_u2) - lam1) > tols.tol_family or abs(min(lam_u1, lam_u2) - lam2) > tols.tol_family:
        raise InconsistentConstants("chart-line curvatures disagree with the principal curvatures")
    k1, k2 = float(np.hypot(lam_u1, 1.0)), float(np.hypot(lam_u2, 1.0))

    def f_frame(a, b):
        e = field.frame(a, b)
        e1, e2, e3, e4 = (e[..., i, :] for i in range(4))
        return np.stack([e1, e2, (lam_u1 * e3 + e4) / k1, (lam_u2 * e3 + e4) / k2], axis=-2)

    ax1, ax2 = grid.axes(patch.domain)
    l1 = (ax1, np.full_like(ax1, ax2[len(ax2) // 2]))
    l2 = (np.full_like(ax2, ax1[len(ax1) // 2]), ax2)
    f_l1, f_l2 = f_frame(*l1), f_frame(*l2)
    circle1 = _circle(patch.position(*l1), f_l1, k1, 2, (1, 3), tols, "circle1")
    circle2 = _circle(patch.position(*l2), f_l2, k2, 3, (0, 2), tols, "circle2")

    plane1 = f_l1[:, [0, 2], :].reshape(-1, 4)
    plane2 = f_l2[:, [1, 3], :].reshape(-1, 4)
    orth = float(np.max(np.abs(plane1 @ plane2.T)))

    ff = f_frame(u1, u2)
    gram_defect = float(np.max(np.abs(ff @ np.swapaxes(ff, -1, -2) - np.eye(4))))

    # d f1 = k1 theta^1 f3, d f2 = k2 theta^2 f4, d f3 = -k1 theta^1 f1, d f4 = -k2 theta^2 f2
    jet = patch.jet(u1, u2)
    e = field.frame(u1, u2)
    h = h_frame
    dff = [(f_frame(u1 + h, u2) - f_frame(u1 - h, u2)) / (2 * h),
           (f_frame(u1, u2 + h) - f_frame(u1, u2 - h)) / (2 * h)]
    ode_res = 0.0
    for k, xk in enumerate((jet.x_u1, jet.x_u2)):
        th1 = np.sum(xk * e[..., 0, :], -1)[..., None]
        th2 = np.sum(xk * e[..., 1, :], -1)[..., None]
        res = [
            dff[k][..., 0, :] - k1 * th1 * ff[..., 2, :],
            dff[k][..., 1, :] - k2 * th2 * ff[..., 3, :],
            dff[k][..., 2, :] + k1 * th1 * ff[..., 0, :],
            dff[k][..., 3, :] + k2 * th2 * ff[..., 1, :],
        ]
        ode_res = max(ode_res, max(float(np.max(np.linalg.norm(r, axis=-1))) for r in res))

    return TorusReconstruction(lam_u1, lam_u2, k1, k2, circle1, circle2, 1.0 / k1, 1.0 / k2,
                               orth, gram_defect, ode_res, f_frame)


def classify(patch: SurfacePatch, grid: GridSpec = GridSpec(), tols: Tolerances = Tolerances(),
             field: FrameField | None = None) -> Classification:
    field = _field(patch, field)
    stats = sample_constancy(patch, grid, field, tols.tol_umb)
    if max(stats.dev1, stats.dev2) > tols.tol_const:
        return NonConstant(stats)

    if stats.umbilic_gap < tols.tol_umb:
        lam = 0.5 * (stats.mean1 + stats.mean2)
        if abs(lam) < tols.tol_geo:
            e3 = field.frame(*grid.points(patch.domain))[..., 2, :].reshape(-1, 4)
            normal = e3.mean(axis=0)
            normal /= np.linalg.norm(normal)
            return GreatSphere(normal, float(np.max(np.linalg.norm(e3 - normal, axis=-1))))
        center, radius, cdev, rdev = reconstruct_sphere(patch, grid, lam, field, tols)
        return RoundSphere(lam, center, radius, cdev, rdev)

    lam1, lam2 = stats.mean1, stats.mean2
    k_ext = 1.0 + lam1 * lam2
    k_int = float(np.max(np.abs(gaussian_intrinsic(patch, *grid.points(patch.domain), field=field))))
    if abs(k_ext) > tols.tol_family or k_int > tols.tol_family:
        raise InconsistentConstants(
            f"constant distinct curvatures with lam1*lam2 = {lam1 * lam2:.9f} (K_int up to {k_int:.3e})"
        )
    return FlatTorus(reconstruct_torus(patch, grid, lam1, lam2, field, tols), lam1, lam2)


# -- homogeneity --------------------------------------------------------------


def _sphere_chart_rotation(u1: float, u2: float) -> np.ndarray:
    c1, s1, c2, s2 = np.cos(u1), np.sin(u1), np.cos(u2), np.sin(u2)
    rz = np.array([[c1, -s1, 0.0], [s1, c1, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[c2, 0.0, -s2], [0.0, 1.0, 0.0], [s2, 0.0, c2]])
    return rz @ ry


def homogeneity_witness(spec: FamilySpec, p, q) -> np.ndarray:
    """An isometry of S^3 preserving the family's surface and carrying x(p) to x(q)."""
    if isinstance(spec, Transformed):
        w = homogeneity_witness(spec.inner, p, q)
        return spec.g @ w @ spec.g.T
    if isinstance(spec, TorusAB):
        return so4_block_rotation((q[0] - p[0]) / spec.a, (q[1] - p[1]) / spec.b)
    if isinstance(spec, SphereCap):
        g = np.eye(4)
        if tuple(p) != tuple(q):
            g[:3, :3] = _sphere_chart_rotation(*q) @ _sphere_chart_rotation(*p).T
        return g
    raise UnsupportedSpec(f"no transitive isometry group known for {type(spec).__name__}")


def invariance_suite(patch: SurfacePatch, seeds=(), grid: GridSpec = GridSpec(), isometries=(),
                     with_pullback: bool = True) -> list[dict]:
    """Compare curvature data of the patch and of its images under SO(4) elements.

    Each entry reports the grid maxima of ``|K - K_g|`` and ``|lam_i - lam_i,g|``
    at identical chart points, plus the connection pullback difference.
    """
    u1, u2 = grid.points(patch.domain)
    base = principal_curvatures(patch, u1, u2)
    k0 = gaussian_extrinsic(base)
    cases = [(f"seed:{s}", random_so4(s)) for s in seeds] + [(f"matrix:{i}", np.asarray(g)) for i, g in enumerate(isometries)]
    out = []
    for label, g in cases:
        moved = apply_isometry(g, patch)
        pd = principal_curvatures(moved, u1, u2)
        row = {
            "case": label,
            "K_max": float(np.max(np.abs(k0 - gaussian_extrinsic(pd)))),
            "lam1_max": float(np.max(np.abs(base.lam1 - pd.lam1))),
            "lam2_max": float(np.max(np.abs(base.lam2 - pd.lam2))),
        }
        if with_pullback:
            row["pullback_max"] = pullback_check(patch, g, grid)
        out.append(row)
    return out
