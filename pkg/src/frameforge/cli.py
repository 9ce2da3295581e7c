"""``frameforge`` command line.

Exit codes: 0 success (or a homogeneous classification), 1 classified as
non-homogeneous, 2 a residual or invariance check failed, 3 invalid input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path


from . import report as rpt
from .classify import NonConstant, classify, invariance_suite
from .config import RunConfig, load_config, parse_grid
from .curvature import codazzi_residuals, curvature_report, symmetry_defect
from .errors import BadParameter, ClassificationError, FrameForgeError
from .forms import GridSpec
from .frames import FrameField, structural_residuals
from .patch import finite_difference_patch, make_patch, spec_to_dict

log = logging.getLogger("frameforge")

EXIT_OK, EXIT_NONHOMOGENEOUS, EXIT_RESIDUAL, EXIT_INVALID = 0, 1, 2, 3
SKIPPED = {"skipped": True}


def build_patch(cfg: RunConfig):
    patch = make_patch(cfg.family)
    if cfg.jets == "finite-difference":
        patch = finite_difference_patch(patch, cfg.steps.h_fd)
    return patch


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("FRAMEFORGE_THREADS", "1")))
    except ValueError:
        return 1


def _skeleton(command: str, cfg: RunConfig) -> dict:
    return {
        "schema": "v1",
        "command": command,
        "config": cfg.to_dict(),
        "structural_residuals": SKIPPED,
        "curvature": SKIPPED,
        "codazzi": SKIPPED,
        "classification": SKIPPED,
        "invariance": SKIPPED,
        "status": {},
        "timing": {},
    }


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(cfg: RunConfig) -> tuple[dict, int]:
    rep = _skeleton("generate", cfg)
    patch = build_patch(cfg)
    out = _out_dir(cfg)
    files = {}
    n = rpt.write_grid_csv(out / "grid.csv", patch, cfg.grid)
    files["grid_csv"] = {"path": str(out / "grid.csv"), "rows": n}
    if cfg.export_obj:
        nv, nf = rpt.write_obj(out / "mesh.obj", patch, cfg.grid)
        files["obj"] = {"path": str(out / "mesh.obj"), "vertices": nv, "faces": nf}
    rep["files"] = files
    rep["status"] = {"ok": True}
    return rep, EXIT_OK


def cmd_analyze(cfg: RunConfig) -> tuple[dict, int]:
    rep = _skeleton("analyze", cfg)
    tols, steps, grid = cfg.tolerances, cfg.steps, cfg.grid
    patch = build_patch(cfg)
    field = FrameField(patch, steps.h_frame)

    sr = structural_residuals(patch, grid, steps.h_frame, steps.h_form)
    rep["structural_residuals"] = sr.table(grid)

    pd, cr = curvature_report(patch, grid, steps.h_form, field)
    sym = symmetry_defect(patch, grid, field)
    rep["curvature"] = {
        "lambda1": {"min": pd.lam1.min(), "max": pd.lam1.max(), "mean": pd.lam1.mean()},
        "lambda2": {"min": pd.lam2.min(), "max": pd.lam2.max(), "mean": pd.lam2.mean()},
        "K_ext": {"min": cr.K_ext.min(), "max": cr.K_ext.max()},
        "K_int": {"min": cr.K_int.min(), "max": cr.K_int.max()},
        "H": {"min": cr.H.min(), "max": cr.H.max()},
        "gauss_cross_check_max": cr.cross_check.max(),
        "symmetry_defect_max": sym,
    }
    cz = codazzi_residuals(patch, grid, steps.h_form, field, tols.tol_umb)
    rep["codazzi"] = {"r1": cz.r1, "r2": cz.r2}

    if cfg.export_csv:
        out = _out_dir(cfg)
        u1, u2 = grid.points(patch.domain)
        rpt.write_curvature_csv(out / "curvature.csv", u1, u2, pd.lam1, pd.lam2, cr.K_ext, cr.K_int, cr.H)
        rep["files"] = {"curvature_csv": str(out / "curvature.csv")}

    tol_struct = tols.tol_struct if patch.jet_kind == "analytic" else tols.tol_struct_fd
    checks = {
        "structural": sr.worst() < tol_struct,
        "gauss": float(cr.cross_check.max()) < tols.tol_gauss,
        "codazzi": max(cz.r1, cz.r2) < tols.tol_codazzi,
    }
    if patch.jet_kind == "analytic":
        checks["cartan_symmetry"] = sym < tols.tol_cartan
    rep["status"] = {"checks": checks, "ok": all(checks.values())}
    return rep, EXIT_OK if all(checks.values()) else EXIT_RESIDUAL


def cmd_classify(cfg: RunConfig) -> tuple[dict, int]:
    rep = _skeleton("classify", cfg)
    patch = build_patch(cfg)
    field = FrameField(patch, cfg.steps.h_frame)
    try:
        result = classify(patch, cfg.grid, cfg.tolerances, field)
    except ClassificationError as exc:
        rep["classification"] = {"schema": "v1", "variant": "Error", "error": type(exc).__name__, "detail": str(exc)}
        rep["status"] = {"ok": False}
        return rep, EXIT_RESIDUAL
    rep["classification"] = result.to_dict()
    homogeneous = not isinstance(result, NonConstant)
    rep["status"] = {"ok": True, "homogeneous": homogeneous}
    return rep, EXIT_OK if homogeneous else EXIT_NONHOMOGENEOUS


def cmd_verify_isometry(cfg: RunConfig) -> tuple[dict, int]:
    rep = _skeleton("verify-isometry", cfg)
    if not cfg.seeds and not cfg.isometries:
        raise BadParameter("verify-isometry needs at least one seed or isometry")
    patch = build_patch(cfg)
    jobs = [((s,), ()) for s in cfg.seeds] + [((), (g,)) for g in cfg.isometries]

    def run(job):
        rows = invariance_suite(patch, job[0], cfg.grid, job[1])
        return rows[0]

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(run, jobs))
    for i, row in enumerate(rows):
        if row["case"].startswith("matrix:"):
            row["case"] = f"matrix:{i - len(cfg.seeds)}"
    tols = cfg.tolerances
    ok = all(
        max(r["K_max"], r["lam1_max"], r["lam2_max"]) < tols.tol_invariance and r["pullback_max"] < tols.tol_pullback
        for r in rows
    )
    rep["invariance"] = rows
    rep["status"] = {"ok": ok}
    return rep, EXIT_OK if ok else EXIT_RESIDUAL


COMMANDS = {
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "verify-isometry": cmd_verify_isometry,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="frameforge", description="Moving-frame analysis of surfaces in S^3.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--grid", help="sampling grid as N1xN2")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="tolerance override")
    p.add_argument("--seed", type=int, nargs="+", help="isometry seeds for verify-isometry")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.out:
        cfg = replace(cfg, out=args.out)
    if args.grid:
        n1, n2 = parse_grid(args.grid)
        try:
            cfg = replace(cfg, grid=GridSpec(n1, n2, cfg.grid.margin))
        except ValueError as exc:
            raise BadParameter(str(exc)) from exc
    if args.tol:
        kw = {}
        for item in args.tol:
            name, sep, value = item.partition("=")
            if not sep:
                raise BadParameter(f"--tol expects NAME=VALUE, got {item!r}")
            try:
                kw[name.strip()] = float(value)
            except ValueError as exc:
                raise BadParameter(f"bad tolerance value {value!r}") from exc
        cfg = replace(cfg, tolerances=cfg.tolerances.override(**kw))
    if args.seed:
        cfg = replace(cfg, seeds=tuple(args.seed))
    return cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except BadParameter as exc:
        print(f"frameforge: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID

    t0 = time.perf_counter()
    try:
        rep, code = COMMANDS[args.command](cfg)
    except BadParameter as exc:
        print(f"frameforge: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FrameForgeError as exc:
        print(f"frameforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RESIDUAL
    rep["timing"] = {"seconds": time.perf_counter() - t0}
    rep["status"]["exit_code"] = code

    out = _out_dir(cfg)
    path = out / f"{args.command}.json"
    rpt.write_json(path, rep)
    log.info("family %s -> %s (exit %d)", spec_to_dict(cfg.family)["type"], path, code)
    print(path)
    return code


if __name__ == "__main__":
    sys.exit(main())
