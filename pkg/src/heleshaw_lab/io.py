"""Bit-exact CSV/JSON serialization of snapshots, trajectories and
diagnostics.

All floating-point values are written with 17 significant digits, which
round-trips IEEE doubles exactly; identical runs therefore produce
byte-identical files.
"""

import json
import os

import numpy as np

from .errors import ConfigError
from .meshes import Field, Mesh
from .solver import SimConfig, SimState, SnapshotSeries


def fmt(x):
    return f"{x:.17g}"


def _opt(x):
    return "" if x is None else (fmt(x) if isinstance(x, float) else str(x))


def write_snapshots(series: SnapshotSeries, records, outdir):
    """Write snapshots.csv, diagnostics.csv and run.json into outdir."""
    os.makedirs(outdir, exist_ok=True)
    cfg = series.config
    has_c = any(s.c is not None for s in series.snapshots)
    x = cfg.mesh.centers
    lines = ["t,x,rho,p" + (",c" if has_c else "")]
    for s in series.snapshots:
        for i in range(cfg.mesh.n_cells):
            row = [fmt(s.t), fmt(x[i]), fmt(s.rho.values[i]), fmt(s.p.values[i])]
            if has_c:
                row.append(fmt(s.c.values[i]))
            lines.append(",".join(row))
    _write(os.path.join(outdir, "snapshots.csv"), lines)

    dlines = [
        "t,mass,sup_p,complementarity_residual,graph_residual,semiconvexity_slack,"
        "mass_bound_margin,support_radius_rho,support_radius_p,barrier_radius,"
        "front_speed_estimate,pressure_jump,nutrient_deficit_l1"
    ]
    for r in records:
        dlines.append(
            ",".join(
                [
                    fmt(r.t),
                    fmt(r.mass),
                    fmt(r.sup_p),
                    fmt(r.complementarity_residual),
                    fmt(r.graph_residual),
                    _opt(r.semiconvexity_slack),
                    fmt(r.mass_bound_margin),
                    _opt(r.support_radius_rho),
                    _opt(r.support_radius_p),
                    _opt(r.barrier_radius),
                    _opt(r.front_speed_estimate),
                    "1" if r.pressure_jump else "0",
                    _opt(r.nutrient_deficit_l1),
                ]
            )
        )
    _write(os.path.join(outdir, "diagnostics.csv"), dlines)
    write_run_json(cfg, outdir, warnings=series.warnings, n_steps=len(series.dt_history))


def write_run_json(cfg: SimConfig, outdir, warnings=(), n_steps=None, extra=None):
    os.makedirs(outdir, exist_ok=True)
    mesh = cfg.mesh
    doc = {
        "m": cfg.m,
        "scheme": cfg.scheme,
        "cfl_theta": cfg.cfl_theta,
        "T": cfg.T,
        "mesh": {"geometry": mesh.geometry, "n_cells": mesh.n_cells, "L": mesh.L, "N": mesh.dim},
        "growth": _law_doc(cfg),
        "initial": {k: (v if not isinstance(v, np.ndarray) else v.tolist()) for k, v in cfg.initial.items()},
        "snapshot_times": list(cfg.snapshot_times),
        "eps_p": cfg.eps_p,
        "eps_rho": cfg.eps_rho,
        "jump_delta": cfg.jump_delta,
        "warnings": list(warnings),
    }
    if n_steps is not None:
        doc["n_steps"] = n_steps
    if extra:
        doc.update(extra)
    with open(os.path.join(outdir, "run.json"), "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def _law_doc(cfg: SimConfig):
    if cfg.nutrients is not None:
        nt = cfg.nutrients
        base = nt.base
        return {
            "kind": "nutrients",
            "base": {"kind": base.kind, "a": base.a, "p_M": base.p_M},
            "c1": nt.c1,
            "c2": nt.c2,
            "c_B": nt.c_B,
            "p_M_effective": nt.p_M,
        }
    if cfg.growth is None:
        return {"kind": "none"}
    g = cfg.growth
    if g.kind == "linear":
        return {"kind": "linear", "a": g.a, "p_M": g.p_M}
    return {"kind": "tabulated", "knots": g._knots.tolist(), "p_M": g.p_M}


def write_series(rows, outdir, with_q=False, name="series.csv"):
    """Trajectory CSV: t,R[,q],speed. Rows are (t, R, speed) or (t, R, q)."""
    os.makedirs(outdir, exist_ok=True)
    header = "t,R,q,speed" if with_q else "t,R,speed"
    lines = [header]
    if with_q:
        # speed by forward differences of R (events make the analytic speed
        # discontinuous); the last row repeats the previous slope
        for i, (t, R, q) in enumerate(rows):
            if i + 1 < len(rows):
                t1, R1, _ = rows[i + 1]
                sp = (R1 - R) / (t1 - t) if t1 > t else 0.0
            lines.append(",".join([fmt(t), fmt(R), fmt(q), fmt(sp)]))
    else:
        for t, R, sp in rows:
            lines.append(",".join([fmt(t), fmt(R), fmt(sp)]))
    _write(os.path.join(outdir, name), lines)


def write_profile(ss, ps, outdir, name="profile.csv"):
    os.makedirs(outdir, exist_ok=True)
    lines = ["s,p"]
    lines.extend(",".join([fmt(s), fmt(p)]) for s, p in zip(ss, ps))
    _write(os.path.join(outdir, name), lines)


def write_msweep_report(report, outdir):
    os.makedirs(outdir, exist_ok=True)
    lines = ["m,l1_rho_vs_ref,l1_p_vs_ref,graph_residual,compl_residual,l1_rho_vs_prev"]
    for r in report.rows:
        lines.append(
            ",".join(
                [
                    fmt(float(r["m"])),
                    fmt(r["l1_rho_vs_ref"]),
                    fmt(r["l1_p_vs_ref"]),
                    fmt(r["graph_residual"]),
                    fmt(r["compl_residual"]),
                    _opt(r["l1_rho_vs_prev"]),
                ]
            )
        )
    _write(os.path.join(outdir, "msweep_report.csv"), lines)


def _write(path, lines):
    try:
        with open(path, "w", newline="") as f:
            f.write("\n".join(lines))
            f.write("\n")
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e}") from e


def read_snapshots(outdir):
    """Re-parse snapshots.csv using the mesh recorded in run.json.

    Returns (list of SimState, mesh)."""
    with open(os.path.join(outdir, "run.json")) as f:
        doc = json.load(f)
    md = doc["mesh"]
    mesh = Mesh(geometry=md["geometry"], n_cells=md["n_cells"], L=md["L"], dim=md["N"])
    path = os.path.join(outdir, "snapshots.csv")
    with open(path) as f:
        header = f.readline().strip().split(",")
        data = np.loadtxt(f, delimiter=",", ndmin=2)
    if header[:4] != ["t", "x", "rho", "p"]:
        raise ConfigError(f"{path}: unexpected header {header}")
    has_c = len(header) == 5
    states = []
    n = mesh.n_cells
    if data.shape[0] % n != 0:
        raise ConfigError(f"{path}: row count is not a multiple of the cell count")
    for k in range(data.shape[0] // n):
        block = data[k * n : (k + 1) * n]
        states.append(
            SimState(
                t=float(block[0, 0]),
                rho=Field(mesh, block[:, 2].copy()),
                p=Field(mesh, block[:, 3].copy()),
                c=Field(mesh, block[:, 4].copy()) if has_c else None,
            )
        )
    return states, mesh
