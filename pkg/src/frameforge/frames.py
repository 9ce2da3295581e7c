"""Adapted moving frames, coframes and connection forms of a patch in S^3.

Conventions
-----------
* ``e1`` is the normalized ``x_u1``, ``e2`` is ``x_u2`` orthonormalized
  against it, ``e4 = -x`` and ``e3`` completes the frame with
  ``det(e1, e2, e3, e4) = +1``.
* ``omega[i][j]`` is the 1-form ``<d e_i, e_j>``, so that
  ``d e_i = sum_j omega[i][j] e_j``.  Indices in the public helpers run from
  1 to 4 to match the usual notation; arrays are 0-based.
* ``theta^i = <dx, e_i>``; on the surface ``theta^3`` vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import DegenerateInput, NotImmersed, SingularCoframe
from .forms import H_FORM, Form1, Form2, GridSpec, d1, wedge11
from .linalg import TOL_RANK, complete_oriented, gram_schmidt4
from .patch import SurfacePatch, apply_isometry

H_FRAME = 1e-4


def _dot(a, b):
    return np.sum(a * b, axis=-1, keepdims=True)


def frame_from_jet(jet, tol_rank: float = TOL_RANK) -> np.ndarray:
    """Rows ``(e1, e2, e3, e4)`` of the adapted frame, shape ``(..., 4, 4)``."""
    try:
        # orthonormalizing against x first absorbs finite-difference drift off the sphere
        _, e1, e2 = np.moveaxis(gram_schmidt4(np.stack([jet.x, jet.x_u1, jet.x_u2], axis=-2), tol_rank), -2, 0)
    except DegenerateInput as exc:
        raise NotImmersed(str(exc)) from exc
    e4 = -jet.x
    e3 = complete_oriented(e1, e2, e4)
    return np.stack([e1, e2, e3, e4], axis=-2)


def frame_derivatives_from_jet(jet, frame: np.ndarray) -> np.ndarray:
    """Exact partials of the frame from the 2-jet, shape ``(..., 2, 4, 4)``.

    Entry ``[..., k, i, :]`` is the derivative of ``e_{i+1}`` along ``u_{k+1}``.
    """
    e1, e2, e3, e4 = (frame[..., i, :] for i in range(4))
    n1 = np.linalg.norm(jet.x_u1, axis=-1, keepdims=True)
    v = jet.x_u2 - _dot(jet.x_u2, e1) * e1
    nv = np.linalg.norm(v, axis=-1, keepdims=True)
    out = []
    for x1k, x2k, xk in ((jet.x_u1u1, jet.x_u1u2, jet.x_u1), (jet.x_u1u2, jet.x_u2u2, jet.x_u2)):
        de1 = (x1k - _dot(x1k, e1) * e1) / n1
        dv = x2k - (_dot(x2k, e1) + _dot(jet.x_u2, de1)) * e1 - _dot(jet.x_u2, e1) * de1
        de2 = (dv - _dot(dv, e2) * e2) / nv
        de4 = -xk
        de3 = -(_dot(e3, de1) * e1 + _dot(e3, de2) * e2 + _dot(e3, de4) * e4)
        out.append(np.stack([de1, de2, de3, de4], axis=-2))
    return np.stack(out, axis=-3)


@dataclass(frozen=True)
class AdaptedFrame:
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    e4: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.stack([self.e1, self.e2, self.e3, self.e4], axis=-2)


def adapted_frame(patch: SurfacePatch, u1, u2, tol_rank: float = TOL_RANK) -> AdaptedFrame:
    f = frame_from_jet(patch.jet(u1, u2), tol_rank)
    return AdaptedFrame(*(f[..., i, :] for i in range(4)))


class FrameField:
    """The adapted frame as a field over the chart, with its partial derivatives.

    Analytic patches differentiate the frame exactly through the 2-jet.  For
    finite-difference patches (or ``method="finite-difference"``) the frame
    field is differentiated as a whole by central differences of step
    ``h_frame``.
    """

    def __init__(self, patch: SurfacePatch, h_frame: float = H_FRAME, method: str | None = None,
                 tol_rank: float = TOL_RANK):
        self.patch = patch
        self.h_frame = h_frame
        self.method = method or ("analytic" if patch.jet_kind == "analytic" else "finite-difference")
        self.tol_rank = tol_rank

    @property
    def domain(self):
        return self.patch.domain

    def frame(self, u1, u2) -> np.ndarray:
        return frame_from_jet(self.patch.jet(u1, u2), self.tol_rank)

    def frame_and_derivatives(self, u1, u2) -> tuple[np.ndarray, np.ndarray]:
        u1, u2 = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
        if self.method == "analytic":
            jet = self.patch.jet(u1, u2)
            f = frame_from_jet(jet, self.tol_rank)
            return f, frame_derivatives_from_jet(jet, f)
        h = self.h_frame
        d_1 = (self.frame(u1 + h, u2) - self.frame(u1 - h, u2)) / (2 * h)
        d_2 = (self.frame(u1, u2 + h) - self.frame(u1, u2 - h)) / (2 * h)
        return self.frame(u1, u2), np.stack([d_1, d_2], axis=-3)


def frame_field(patch: SurfacePatch, h_frame: float = H_FRAME, method: str | None = None) -> FrameField:
    return FrameField(patch, h_frame, method)


class ConnectionMatrix:
    """Connection 1-forms ``omega[i][j] = <d e_i, e_j>`` of a frame field.

    The measured matrix is antisymmetrized before use; the size of the part
    thrown away is available through :meth:`raw_defect`.
    """

    def __init__(self, field: FrameField):
        self.field = field

    def raw_at(self, u1, u2) -> np.ndarray:
        f, df = self.field.frame_and_derivatives(u1, u2)
        return np.einsum("...kia,...ja->...ijk", df, f)

    def at(self, u1, u2) -> np.ndarray:
        """Antisymmetrized coefficients, shape ``(..., 4, 4, 2)``."""
        raw = self.raw_at(u1, u2)
        return 0.5 * (raw - np.swapaxes(raw, -3, -2))

    def raw_defect(self, grid: GridSpec) -> float:
        raw = self.raw_at(*grid.points(self.field.domain))
        return float(np.max(np.abs(raw + np.swapaxes(raw, -3, -2))))

    def omega(self, i: int, j: int) -> Form1:
        """``omega_i^j`` as a 1-form (1-based indices)."""
        return Form1(lambda u1, u2: self.at(u1, u2)[..., i - 1, j - 1, :], self.field.domain)

    def __getitem__(self, ij) -> Form1:
        return self.omega(*ij)


def connection_forms(patch: SurfacePatch, h_frame: float = H_FRAME, method: str | None = None) -> ConnectionMatrix:
    return ConnectionMatrix(FrameField(patch, h_frame, method))


@dataclass(frozen=True)
class Coframe:
    theta1: Form1
    theta2: Form1
    theta3: Form1

    def theta(self, i: int) -> Form1:
        return (self.theta1, self.theta2, self.theta3)[i - 1]

    def theta3_residual(self, grid: GridSpec) -> float:
        return float(np.max(np.abs(self.theta3(*grid.points(self.theta3.domain)))))


def coframe(patch: SurfacePatch, field: FrameField | None = None) -> Coframe:
    """Coframe restricted to the chart: ``theta^i(d/du_k) = <x_uk, e_i>``.

    Each form carries its exterior derivative, which needs only the frame
    derivatives: the second partials of x cancel by symmetry.
    """
    field = field or FrameField(patch)

    def make(i):
        def coeffs(u1, u2):
            jet = patch.jet(u1, u2)
            e = field.frame(u1, u2)[..., i, :]
            return np.stack([np.sum(jet.x_u1 * e, -1), np.sum(jet.x_u2 * e, -1)], axis=-1)

        def exterior(u1, u2):
            jet = patch.jet(u1, u2)
            _, df = field.frame_and_derivatives(u1, u2)
            return np.sum(jet.x_u2 * df[..., 0, i, :], -1) - np.sum(jet.x_u1 * df[..., 1, i, :], -1)

        return Form1(coeffs, patch.domain, exterior)

    return Coframe(make(0), make(1), make(2))


# -- torsion-free connection from the coframe alone ----------------------------


def cartan_solve(cf: Coframe, dtheta1: Form2, dtheta2: Form2, u1, u2, tol_rank: float = TOL_RANK):
    """Unique antisymmetric solution of the surface's first structural equations.

    Solves ``d theta^1 + omega_2^1 ^ theta^2 = 0`` and
    ``d theta^2 + omega_1^2 ^ theta^1 = 0`` pointwise for
    ``omega_1^2 = A theta^1 + B theta^2``.

    Returns:
        ``(omega12, gamma)`` where ``omega12`` holds the du-basis
        coefficients of omega_1^2 (shape ``(..., 2)``) and ``gamma[..., i, j, k]``
        is the coefficient of omega_{j+1}^{i+1} on theta^{k+1}.
    """
    t1, t2 = cf.theta1(u1, u2), cf.theta2(u1, u2)
    area = t1[..., 0] * t2[..., 1] - t1[..., 1] * t2[..., 0]
    if np.any(np.abs(area) < tol_rank):
        raise SingularCoframe("coframe is degenerate")
    # with omega_1^2 = A t1 + B t2 the two equations decouple: dt1 = A area, dt2 = B area
    big_a = dtheta1(u1, u2) / area
    big_b = dtheta2(u1, u2) / area
    omega12 = big_a[..., None] * t1 + big_b[..., None] * t2
    gamma = np.zeros(np.shape(area) + (2, 2, 2))
    gamma[..., 1, 0, 0], gamma[..., 1, 0, 1] = big_a, big_b
    gamma[..., 0, 1, 0], gamma[..., 0, 1, 1] = -big_a, -big_b
    return omega12, gamma


def antisymmetric_part_formula(gamma: np.ndarray) -> np.ndarray:
    """Recover the antisymmetric connection from any solution's coefficients.

    ``gamma[..., i, j, k]`` are the coefficients on ``theta^k`` of a (not
    necessarily antisymmetric) solution of ``d theta^i = theta^j ^ omega_j^i``.
    The returned array has the same layout and is antisymmetric in ``i, j``.
    """
    g = np.asarray(gamma)
    return 0.5 * (
        g
        + np.einsum("...jki->...ijk", g)
        + np.einsum("...kji->...ijk", g)
        - np.einsum("...ikj->...ijk", g)
        - np.einsum("...jik->...ijk", g)
        - np.einsum("...kij->...ijk", g)
    )


def cartan_connection(patch: SurfacePatch, h_form: float = H_FORM, field: FrameField | None = None) -> Form1:
    """omega_1^2 obtained from the coframe alone, as a 1-form on the chart."""
    cf = coframe(patch, field)
    dt1, dt2 = d1(cf.theta1, h_form=h_form), d1(cf.theta2, h_form=h_form)
    return Form1(lambda u1, u2: cartan_solve(cf, dt1, dt2, u1, u2)[0], patch.domain)


# -- structural residuals ------------------------------------------------------


@dataclass(frozen=True)
class StructureResiduals:
    first_sphere: tuple[float, float, float]
    second_sphere: tuple[float, float, float]
    first_surface: tuple[float, float, float]
    second_surface: tuple[float, float, float]
    extra_condition: float
    omega4_theta: tuple[float, float, float]
    theta3: float
    antisymmetry: float
    raw_antisymmetry: float

    def table(self, grid: GridSpec | None = None) -> list[dict]:
        rows = []
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, tuple):
                rows += [{"name": f"{f.name}[{i + 1}]", "max": v} for i, v in enumerate(val)]
            else:
                rows.append({"name": f.name, "max": val})
        if grid is not None:
            for r in rows:
                r["grid"] = [grid.n1, grid.n2]
        return rows

    def worst(self, include_raw: bool = False) -> float:
        return max(r["max"] for r in self.table() if include_raw or r["name"] != "raw_antisymmetry")


def structural_residuals(patch: SurfacePatch, grid: GridSpec, h_frame: float = H_FRAME,
                         h_form: float = H_FORM, method: str | None = None) -> StructureResiduals:
    """Grid maxima of every structural identity of the frame along the patch."""
    field = FrameField(patch, h_frame, method)
    conn = ConnectionMatrix(field)
    cf = coframe(patch, field)
    w = conn.omega
    t1, t2, t3 = cf.theta1, cf.theta2, cf.theta3
    u1, u2 = grid.points(patch.domain)

    def d(alpha):
        return d1(alpha, "finite-difference", h_form)

    def gmax(form2):
        return float(np.max(np.abs(form2(u1, u2))))

    first_sphere = (
        gmax(d(t1) + wedge11(w(2, 1), t2) + wedge11(w(3, 1), t3)),
        gmax(d(t2) + wedge11(w(1, 2), t1) + wedge11(w(3, 2), t3)),
        gmax(d(t3) + wedge11(w(1, 3), t1) + wedge11(w(2, 3), t2)),
    )
    first_surface = (
        gmax(d(t1) + wedge11(w(2, 1), t2)),
        gmax(d(t2) + wedge11(w(1, 2), t1)),
        gmax(wedge11(w(1, 3), t1) + wedge11(w(2, 3), t2)),
    )
    second_sphere = (
        gmax(d(w(2, 1)) + wedge11(w(3, 1), w(2, 3)) - wedge11(t1, t2)),
        gmax(d(w(3, 2)) + wedge11(w(1, 2), w(3, 1)) - wedge11(t2, t3)),
        gmax(d(w(1, 3)) + wedge11(w(2, 3), w(1, 2)) - wedge11(t3, t1)),
    )
    second_surface = (
        second_sphere[0],
        gmax(d(w(3, 2)) + wedge11(w(1, 2), w(3, 1))),
        gmax(d(w(1, 3)) + wedge11(w(2, 3), w(1, 2))),
    )
    extra = gmax(wedge11(w(1, 4), t1) + wedge11(w(2, 4), t2) + wedge11(w(3, 4), t3))

    om = conn.at(u1, u2)
    thetas = [cf.theta(i)(u1, u2) for i in (1, 2, 3)]
    omega4 = tuple(float(np.max(np.abs(om[..., 3, i, :] + thetas[i]))) for i in range(3))
    antisym = float(np.max(np.abs(om + np.swapaxes(om, -3, -2))))
    return StructureResiduals(
        first_sphere, second_sphere, first_surface, second_surface, extra, omega4,
        float(np.max(np.abs(thetas[2]))), antisym, conn.raw_defect(grid),
    )


def pullback_check(patch: SurfacePatch, g, grid: GridSpec, h_frame: float = H_FRAME) -> float:
    """Largest difference of connection coefficients between a patch and its image under ``g``."""
    u1, u2 = grid.points(patch.domain)
    a = connection_forms(patch, h_frame).at(u1, u2)
    b = connection_forms(apply_isometry(g, patch), h_frame).at(u1, u2)
    return float(np.max(np.abs(a - b)))
