"""Run configuration and tolerance defaults."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadParameter
from .forms import GridSpec
from .linalg import check_isometry
from .patch import FamilySpec, spec_from_dict, spec_to_dict


@dataclass(frozen=True)
class Tolerances:
    # numerics / linear algebra
    tol_ortho: float = 1e-10
    tol_rank: float = 1e-8
    tol_eig: float = 1e-9
    # classification thresholds
    tol_umb: float = 1e-6
    tol_const: float = 1e-5
    tol_geo: float = 1e-6
    tol_family: float = 1e-5
    # residual gates used by the CLI exit codes
    tol_struct: float = 1e-6
    tol_struct_fd: float = 1e-4
    tol_gauss: float = 1e-5
    tol_cartan: float = 1e-7
    tol_codazzi: float = 1e-4
    tol_invariance: float = 1e-8
    tol_pullback: float = 1e-9

    def override(self, **kw) -> "Tolerances":
        names = {f.name for f in dataclasses.fields(self)}
        for k, v in kw.items():
            if k not in names:
                raise BadParameter(f"unknown tolerance {k!r}")
            if not float(v) > 0:
                raise BadParameter(f"tolerance {k} must be positive")
        return dataclasses.replace(self, **{k: float(v) for k, v in kw.items()})


@dataclass(frozen=True)
class Steps:
    h_fd: float = 1e-4
    h_frame: float = 1e-4
    h_form: float = 1e-4


@dataclass(frozen=True)
class RunConfig:
    family: FamilySpec
    grid: GridSpec = GridSpec()
    tolerances: Tolerances = Tolerances()
    steps: Steps = Steps()
    jets: str = "analytic"
    seeds: tuple[int, ...] = tuple(range(10))
    isometries: tuple = ()
    out: str = "frameforge-out"
    export_csv: bool = True
    export_obj: bool = True
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "family": spec_to_dict(self.family),
            "grid": {"n1": self.grid.n1, "n2": self.grid.n2, "margin": self.grid.margin},
            "tolerances": dataclasses.asdict(self.tolerances),
            "steps": dataclasses.asdict(self.steps),
            "jets": self.jets,
            "seeds": list(self.seeds),
            "isometries": [np.asarray(g).tolist() for g in self.isometries],
            "out": self.out,
            "export": {"csv": self.export_csv, "obj": self.export_obj},
        }


def parse_grid(text: str) -> tuple[int, int]:
    try:
        n1, n2 = (int(t) for t in text.lower().split("x"))
    except ValueError as exc:
        raise BadParameter(f"grid must look like N1xN2, got {text!r}") from exc
    return n1, n2


def config_from_dict(d: dict) -> RunConfig:
    """Build and validate a RunConfig; every problem surfaces as BadParameter."""
    if "family" not in d:
        raise BadParameter("config needs a 'family' entry")
    family = spec_from_dict(d["family"])

    g = d.get("grid", {})
    if isinstance(g, str):
        g = dict(zip(("n1", "n2"), parse_grid(g)))
    elif isinstance(g, (list, tuple)):
        g = {"n1": g[0], "n2": g[1]}
    try:
        grid = GridSpec(int(g.get("n1", 32)), int(g.get("n2", 32)), float(g.get("margin", 0.01)))
    except ValueError as exc:
        raise BadParameter(str(exc)) from exc

    tols = Tolerances().override(**d.get("tolerances", {}))
    steps_d = d.get("steps", {})
    unknown = set(steps_d) - {"h_fd", "h_frame", "h_form"}
    if unknown:
        raise BadParameter(f"unknown step names {sorted(unknown)}")
    steps = Steps(**{k: float(v) for k, v in steps_d.items()})
    if min(dataclasses.astuple(steps)) <= 0:
        raise BadParameter("steps must be positive")

    jets = d.get("jets", "analytic")
    if jets not in ("analytic", "finite-difference"):
        raise BadParameter(f"jets must be 'analytic' or 'finite-difference', got {jets!r}")
    isometries = tuple(check_isometry(m, tols.tol_ortho) for m in d.get("isometries", []))
    export = d.get("export", {})
    return RunConfig(
        family=family,
        grid=grid,
        tolerances=tols,
        steps=steps,
        jets=jets,
        seeds=tuple(int(s) for s in d.get("seeds", range(10))),
        isometries=isometries,
        out=str(d.get("out", "frameforge-out")),
        export_csv=bool(export.get("csv", True)),
        export_obj=bool(export.get("obj", True)),
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BadParameter(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data)
