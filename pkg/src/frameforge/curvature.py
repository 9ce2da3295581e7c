"""Second fundamental form, principal curvatures, Gauss and Codazzi checks.

The second fundamental form is read off the connection: with
``omega_i^3 = h_i1 theta^1 + h_i2 theta^2`` the matrix ``h`` is symmetric on
any surface, and its eigenvalues are the principal curvatures.  Gaussian
curvature is available two ways, extrinsically as ``1 + lam1 lam2`` and
intrinsically from ``d omega_2^1 = K theta^1 ^ theta^2``; the two must agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularCoframe
from .forms import H_FORM, GridSpec, d1, exact, wedge11
from .frames import H_FRAME, ConnectionMatrix, FrameField, coframe
from .linalg import TOL_RANK, TOL_UMB, SymMat2, eig_sym2, principal_angle
from .patch import SurfacePatch


@dataclass(frozen=True)
class SecondFundamental:
    h: SymMat2
    symmetry_defect: np.ndarray


@dataclass(frozen=True)
class PrincipalData:
    lam1: np.ndarray
    lam2: np.ndarray
    dir1: np.ndarray
    dir2: np.ndarray
    umbilic: np.ndarray


@dataclass(frozen=True)
class CurvatureReport:
    K_ext: np.ndarray
    K_int: np.ndarray
    H: np.ndarray

    @property
    def cross_check(self) -> np.ndarray:
        return np.abs(self.K_ext - self.K_int)


@dataclass(frozen=True)
class CodazziResiduals:
    r1: float
    r2: float


def _field(patch, field):
    return field if field is not None else FrameField(patch, H_FRAME)


def second_fundamental(patch: SurfacePatch, u1, u2, field: FrameField | None = None) -> SecondFundamental:
    field = _field(patch, field)
    jet = patch.jet(u1, u2)
    f, df = field.frame_and_derivatives(u1, u2)
    raw = np.einsum("...kia,...ja->...ijk", df, f)
    om = 0.5 * (raw - np.swapaxes(raw, -3, -2))
    # w[i, k] = omega_i^3(d/du_k), t[j, k] = theta^j(d/du_k); then h = w t^-1
    w = om[..., :2, 2, :]
    t = np.stack([np.stack([np.sum(jet.x_u1 * f[..., j, :], -1), np.sum(jet.x_u2 * f[..., j, :], -1)], -1)
                  for j in range(2)], axis=-2)
    h = np.linalg.solve(np.swapaxes(t, -1, -2), np.swapaxes(w, -1, -2))
    h = np.swapaxes(h, -1, -2)
    defect = np.abs(h[..., 0, 1] - h[..., 1, 0])
    return SecondFundamental(SymMat2(h[..., 0, 0], 0.5 * (h[..., 0, 1] + h[..., 1, 0]), h[..., 1, 1]), defect)


def principal_curvatures(patch: SurfacePatch, u1, u2, field: FrameField | None = None,
                         tol_umb: float = TOL_UMB) -> PrincipalData:
    sf = second_fundamental(patch, u1, u2, field)
    lam1, lam2, dir1, dir2 = eig_sym2(sf.h)
    return PrincipalData(lam1, lam2, dir1, dir2, lam1 - lam2 < tol_umb)


def gaussian_extrinsic(pd: PrincipalData) -> np.ndarray:
    return 1.0 + pd.lam1 * pd.lam2


def mean_curvature(pd: PrincipalData) -> np.ndarray:
    return 0.5 * (pd.lam1 + pd.lam2)


def gaussian_intrinsic(patch: SurfacePatch, u1, u2, h_form: float = H_FORM, field: FrameField | None = None,
                       tol_rank: float = TOL_RANK) -> np.ndarray:
    """K from the Gauss equation: coefficient of d omega_2^1 over that of theta^1 ^ theta^2."""
    field = _field(patch, field)
    conn = ConnectionMatrix(field)
    cf = coframe(patch, field)
    area = wedge11(cf.theta1, cf.theta2)(u1, u2)
    if np.any(np.abs(area) < tol_rank):
        raise SingularCoframe("theta^1 ^ theta^2 vanishes")
    return d1(conn.omega(2, 1), h_form=h_form)(u1, u2) / area


def curvature_report(patch: SurfacePatch, grid: GridSpec, h_form: float = H_FORM,
                     field: FrameField | None = None) -> tuple[PrincipalData, CurvatureReport]:
    field = _field(patch, field)
    u1, u2 = grid.points(patch.domain)
    pd = principal_curvatures(patch, u1, u2, field)
    rep = CurvatureReport(gaussian_extrinsic(pd), gaussian_intrinsic(patch, u1, u2, h_form, field), mean_curvature(pd))
    return pd, rep


def _wrap_half_turn(a):
    return (a + 0.5 * np.pi) % np.pi - 0.5 * np.pi


def codazzi_residuals(patch: SurfacePatch, grid: GridSpec, h_form: float = H_FORM,
                      field: FrameField | None = None, tol_umb: float = TOL_UMB) -> CodazziResiduals:
    """Grid maxima of the two Codazzi 2-forms written in the principal frame.

    The principal frame is the chart frame rotated by the eigen-angle phi, so
    its connection form is ``omega_1^2 + d phi``.  phi is only defined mod pi,
    hence its difference quotient is wrapped.  At umbilic points any frame is
    principal and the chart frame (phi = 0) is used.
    """
    field = _field(patch, field)
    conn = ConnectionMatrix(field)
    cf = coframe(patch, field)
    u1, u2 = grid.points(patch.domain)
    h = h_form

    def lam(i):
        return lambda a, b: (lambda pd: pd.lam1 if i == 1 else pd.lam2)(principal_curvatures(patch, a, b, field, tol_umb))

    def phi(a, b):
        return principal_angle(second_fundamental(patch, a, b, field).h)

    pd = principal_curvatures(patch, u1, u2, field, tol_umb)
    gap = pd.lam1 - pd.lam2
    dlam1 = exact(lam(1), h)(u1, u2)
    dlam2 = exact(lam(2), h)(u1, u2)
    dphi = np.stack([
        _wrap_half_turn(phi(u1 + h, u2) - phi(u1 - h, u2)) / (2 * h),
        _wrap_half_turn(phi(u1, u2 + h) - phi(u1, u2 - h)) / (2 * h),
    ], axis=-1)
    ang = phi(u1, u2)
    ang = np.where(pd.umbilic, 0.0, ang)
    dphi = np.where(pd.umbilic[..., None], 0.0, dphi)

    t1, t2 = cf.theta1(u1, u2), cf.theta2(u1, u2)
    c, s = np.cos(ang)[..., None], np.sin(ang)[..., None]
    pt1 = c * t1 + s * t2
    pt2 = -s * t1 + c * t2
    w12 = conn.at(u1, u2)[..., 0, 1, :] + dphi

    def wedge(a, b):
        return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]

    r1 = wedge(dlam1, pt1) + gap * wedge(w12, pt2)
    r2 = wedge(dlam2, pt2) + gap * wedge(w12, pt1)
    return CodazziResiduals(float(np.max(np.abs(r1))), float(np.max(np.abs(r2))))


def symmetry_defect(patch: SurfacePatch, grid: GridSpec, field: FrameField | None = None) -> float:
    return float(np.max(second_fundamental(patch, *grid.points(patch.domain), field).symmetry_defect))
