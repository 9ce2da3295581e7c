"""File outputs: sampled grids (CSV), curvature tables (CSV), meshes (OBJ), reports (JSON)."""

from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path

import numpy as np

from .errors import PoleCollisionWarning
from .forms import GridSpec
from .patch import SurfacePatch

POLE = np.array([0.0, 0.0, 0.0, -1.0])
POLE_RADIUS = 1e-3


def stereographic(x) -> np.ndarray:
    """Project S^3 minus (0, 0, 0, -1) to R^3.

    Points closer than ``POLE_RADIUS`` to the pole are clamped (their
    denominator is floored) and a :class:`PoleCollisionWarning` is issued.
    """
    x = np.asarray(x, dtype=float)
    near = np.linalg.norm(x - POLE, axis=-1) < POLE_RADIUS
    if np.any(near):
        warnings.warn(f"{int(near.sum())} sample(s) within {POLE_RADIUS} of the projection pole; clamped",
                      PoleCollisionWarning, stacklevel=2)
    denom = np.maximum(1.0 + x[..., 3], 0.5 * POLE_RADIUS**2)
    return x[..., :3] / denom[..., None]


def write_grid_csv(path, patch: SurfacePatch, grid: GridSpec) -> int:
    u1, u2 = grid.points(patch.domain)
    x = patch.position(u1, u2)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u1", "u2", "x1", "x2", "x3", "x4"])
        for a, b, p in zip(u1.ravel(), u2.ravel(), x.reshape(-1, 4)):
            w.writerow([repr(float(a)), repr(float(b)), *(repr(float(c)) for c in p)])
    return u1.size


def mesh_faces(n1: int, n2: int, periodic: tuple[bool, bool]) -> list[tuple[int, int, int, int]]:
    """Quad faces (0-based vertex ids, row-major in (i1, i2)) with wraparound on periodic axes."""
    faces = []
    for i in range(n1 if periodic[0] else n1 - 1):
        for j in range(n2 if periodic[1] else n2 - 1):
            i2, j2 = (i + 1) % n1, (j + 1) % n2
            faces.append((i * n2 + j, i2 * n2 + j, i2 * n2 + j2, i * n2 + j2))
    return faces


def write_obj(path, patch: SurfacePatch, grid: GridSpec) -> tuple[int, int]:
    u1, u2 = grid.points(patch.domain)
    verts = stereographic(patch.position(u1, u2)).reshape(-1, 3)
    faces = mesh_faces(grid.n1, grid.n2, patch.domain.periodic)
    with open(path, "w") as fh:
        fh.write(f"# frameforge mesh {grid.n1}x{grid.n2}, stereographic from (0,0,0,-1)\n")
        for v in verts:
            fh.write("v {!r} {!r} {!r}\n".format(*map(float, v)))
        for f in faces:
            fh.write("f {} {} {} {}\n".format(*(k + 1 for k in f)))
    return len(verts), len(faces)


def write_curvature_csv(path, u1, u2, lam1, lam2, k_ext, k_int, h) -> None:
    cols = [np.ravel(c) for c in (u1, u2, lam1, lam2, k_ext, k_int, h)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u1", "u2", "lambda1", "lambda2", "K_ext", "K_int", "H"])
        for row in zip(*cols):
            w.writerow([repr(float(v)) for v in row])


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, default=_default)


def write_json(path, report: dict) -> None:
    Path(path).write_text(dumps(report) + "\n")
