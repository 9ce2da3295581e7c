"""Small dense linear algebra in R^4 and on 2x2 symmetric matrices.

Everything here works on plain numpy arrays.  Functions accept leading batch
dimensions wherever that is cheap, so grid computations stay vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadParameter, DegenerateInput

TOL_ORTHO = 1e-10
TOL_RANK = 1e-8
TOL_EIG = 1e-9
TOL_UMB = 1e-6


def gram_schmidt4(vs, tol_rank: float = TOL_RANK) -> np.ndarray:
    """Orthonormalize an ordered family of 1 to 4 vectors of R^4.

    ``vs`` has shape ``(..., m, 4)``.  The first output vector is parallel to
    the first input, and each prefix of the output spans the same subspace as
    the matching prefix of the input.

    Raises:
        DegenerateInput: if the smallest singular value of the family falls
            below ``tol_rank``.
    """
    vs = np.asarray(vs, dtype=float)
    if vs.ndim < 2 or vs.shape[-1] != 4 or not 1 <= vs.shape[-2] <= 4:
        raise BadParameter(f"expected (..., m, 4) with 1 <= m <= 4, got {vs.shape}")
    sv = np.linalg.svd(vs, compute_uv=False)
    if np.any(sv[..., -1] < tol_rank):
        raise DegenerateInput(f"near-dependent vectors (min singular value {sv[..., -1].min():.3e})")

    out = np.empty_like(vs)
    m = vs.shape[-2]
    for i in range(m):
        v = vs[..., i, :].copy()
        # two passes keep the result orthogonal to roundoff even for ill-conditioned input
        for _ in range(2):
            for j in range(i):
                v -= np.sum(v * out[..., j, :], axis=-1, keepdims=True) * out[..., j, :]
        out[..., i, :] = v / np.linalg.norm(v, axis=-1, keepdims=True)
    return out


def det4(m) -> np.ndarray:
    return np.linalg.det(np.asarray(m, dtype=float))


def complete_oriented(e1, e2, e4) -> np.ndarray:
    """Unit vector n orthogonal to e1, e2, e4 with det(e1, e2, n, e4) = +1.

    This is the Hodge dual of e1 ^ e2 ^ e4: the components are
    ``n_i = det(e1, e2, delta_i, e4)``.  When the inputs are orthonormal the
    result is automatically unit length.
    """
    e1, e2, e4 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (e1, e2, e4)))
    n = np.empty(e1.shape)
    basis = np.eye(4)
    for i in range(4):
        rows = np.stack([e1, e2, np.broadcast_to(basis[i], e1.shape), e4], axis=-2)
        n[..., i] = np.linalg.det(rows)
    return n


@dataclass(frozen=True)
class SymMat2:
    """Symmetric 2x2 matrix stored by its three independent entries.

    The entries may be scalars or equally shaped arrays (a field of matrices).
    """

    h11: np.ndarray
    h12: np.ndarray
    h22: np.ndarray

    def matrix(self) -> np.ndarray:
        h11, h12, h22 = np.broadcast_arrays(self.h11, self.h12, self.h22)
        return np.stack([np.stack([h11, h12], -1), np.stack([h12, h22], -1)], -2)


def eig_sym2(h: SymMat2, tol_tie: float = TOL_EIG):
    """Closed-form eigen-decomposition of a symmetric 2x2 matrix.

    Returns ``(lam1, lam2, dir1, dir2)`` with ``lam1 >= lam2`` and unit
    eigenvectors.  Where the eigenvalues are closer than ``tol_tie`` the
    chart axes are returned; the reconstruction error this introduces is at
    most the gap itself.
    """
    h11, h12, h22 = (np.asarray(a, dtype=float) for a in np.broadcast_arrays(h.h11, h.h12, h.h22))
    mean = 0.5 * (h11 + h22)
    half = 0.5 * (h11 - h22)
    rad = np.hypot(half, h12)
    lam1 = mean + rad
    lam2 = mean - rad
    phi = 0.5 * np.arctan2(h12, half)
    phi = np.where(lam1 - lam2 < tol_tie, 0.0, phi)
    c, s = np.cos(phi), np.sin(phi)
    dir1 = np.stack([c, s], axis=-1)
    dir2 = np.stack([-s, c], axis=-1)
    return lam1, lam2, dir1, dir2


def principal_angle(h: SymMat2) -> np.ndarray:
    """Angle (mod pi) of the eigenvector for the larger eigenvalue."""
    return 0.5 * np.arctan2(2.0 * np.asarray(h.h12), np.asarray(h.h11) - np.asarray(h.h22))


def rot2(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def so4_block_rotation(alpha: float, beta: float) -> np.ndarray:
    """Rotation by ``alpha`` in the (x1, x2) plane and ``beta`` in the (x3, x4) plane."""
    g = np.zeros((4, 4))
    g[:2, :2] = rot2(alpha)
    g[2:, 2:] = rot2(beta)
    return g


def random_so4(seed: int) -> np.ndarray:
    """Deterministic pseudo-random element of SO(4).

    QR of a seeded Gaussian matrix with the usual sign fix (positive diagonal
    of R), then one column flipped if needed to land in det = +1.
    """
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((4, 4)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def check_isometry(m, tol: float = TOL_ORTHO) -> np.ndarray:
    """Validate an orientation-preserving orthogonal 4x4 matrix and return it as an array."""
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4) or not np.all(np.isfinite(m)):
        raise BadParameter(f"isometry must be a finite 4x4 matrix, got shape {m.shape}")
    if np.max(np.abs(m.T @ m - np.eye(4))) > tol:
        raise BadParameter("isometry is not orthogonal")
    if abs(np.linalg.det(m) - 1.0) > tol:
        raise BadParameter("isometry must have det = +1 (reflections are not allowed)")
    return m
