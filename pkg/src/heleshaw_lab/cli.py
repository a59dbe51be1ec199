"""Command-line driver: `heleshaw-lab <command> --config <path> --out <dir>`.

Commands: simulate, spheroid, twophase, travelingwave, msweep, diagnose.
Exit codes: 0 success, 1 validation error, 2 numerical failure (blow-up),
3 --check failure.
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import io as hio
from .config import ExperimentConfig, parse_config
from .diagnostics import front_speed_estimate, msweep_convergence, records_for_series
from .errors import BlowUpError, CheckFailure, ConfigError, HeleShawError
from .laws import asymptotic_speed, max_density
from .meshes import Field, l1_distance, norm
from .sharp import (
    FrontState,
    geometric_reference,
    spheroid_evolve,
    traveling_wave_profile,
    two_phase_evolve,
)
from .solver import SimConfig, barenblatt_profile, run


@dataclass
class ExperimentSpec:
    command: str
    config_path: str
    out_dir: str
    jobs: int = 1
    check: bool = False

    def __post_init__(self):
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")


def _load(spec: ExperimentSpec) -> ExperimentConfig:
    try:
        with open(spec.config_path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {spec.config_path}: {e}") from e
    return parse_config(text)


def _cmd_simulate(spec, exp: ExperimentConfig):
    if exp.sim is None:
        raise ConfigError("simulate needs [model]/[mesh]/[time]/[initial] sections")
    series = run(exp.sim)
    hio.write_snapshots(series, records_for_series(series), spec.out_dir)
    if spec.check:
        _run_sim_check(exp, series)


def _run_sim_check(exp: ExperimentConfig, series):
    check = exp.check
    if not check:
        raise ConfigError("--check requested but config has no [check] section")
    kind = check.get("kind")
    cfg = exp.sim
    if kind == "barenblatt":
        tol = float(check.get("tol", 2e-2))
        init = cfg.initial
        C, t0 = float(init["C"]), float(init.get("t0", 1.0))
        last = series.snapshots[-1]
        exact = Field(cfg.mesh, barenblatt_profile(cfg.mesh.centers, t0 + last.t, C, cfg.m))
        err = l1_distance(last.rho, exact) / norm(exact, "l1")
        if err > tol:
            raise CheckFailure(f"self-similar validation failed: relative L1 error {err:.3e} > {tol}")
    elif kind == "front_speed":
        rtol = float(check.get("rtol", 0.1))
        window = float(check.get("window", 0.6))
        v = front_speed_estimate(series, window=window)
        v_ref = asymptotic_speed(cfg.growth)
        if abs(v - v_ref) > rtol * v_ref:
            raise CheckFailure(f"front speed {v:.5g} deviates from {v_ref:.5g} by more than {rtol:.1%}")
    else:
        raise ConfigError(f"check.kind: unknown simulate check {kind!r}")


def _growth_from_exp(exp: ExperimentConfig):
    if exp.sim is not None and exp.sim.growth is not None:
        return exp.sim.growth
    raise ConfigError("sharp-interface commands need a growth law in [model]")


def _cmd_spheroid(spec, exp: ExperimentConfig):
    law = _growth_from_exp(exp)
    sh = exp.sharp
    traj = spheroid_evolve(
        R0=float(sh.get("R0", 1.0)),
        law=law,
        N=int(sh.get("N", 1)),
        T=float(sh.get("T", 1.0)),
        dt=float(sh.get("dt", 0.05)),
    )
    os.makedirs(spec.out_dir, exist_ok=True)
    hio.write_series(traj, spec.out_dir)
    if spec.check:
        rtol = float(exp.check.get("rtol", 0.005))
        v_ref = asymptotic_speed(law)
        v = traj[-1][2]
        if abs(v - v_ref) > rtol * v_ref:
            raise CheckFailure(f"terminal speed {v:.6g} deviates from {v_ref:.6g} by more than {rtol:.2%}")


def _cmd_twophase(spec, exp: ExperimentConfig):
    law = _growth_from_exp(exp)
    sh = exp.sharp
    init = FrontState(
        t=0.0,
        R1=float(sh.get("R1", 1.0)),
        q=float(sh.get("q0", 0.0)),
        R2=float(sh.get("R2", 2.0)),
        dim=int(sh.get("N", 1)),
    )
    traj = two_phase_evolve(init, law, T=float(sh.get("T", 1.0)), dt=float(sh.get("dt", 0.05)))
    hio.write_series(traj, spec.out_dir, with_q=True)


def _cmd_travelingwave(spec, exp: ExperimentConfig):
    law = _growth_from_exp(exp)
    sh = exp.sharp
    ss, ps = traveling_wave_profile(law, s_min=float(sh.get("s_min", -5.0)), n=int(sh.get("n", 5000)))
    hio.write_profile(ss, ps, spec.out_dir)
    if spec.check:
        tol = float(exp.check.get("tol", 1e-8))
        if law.kind != "linear":
            raise ConfigError("traveling-wave check needs the linear law (closed form)")
        lam = np.sqrt(law.a)
        exact = law.p_M * (1.0 - np.exp(lam * ss))
        err = float(np.max(np.abs(ps - exact)))
        if err > tol:
            raise CheckFailure(f"traveling-wave profile error {err:.3e} > {tol}")


def _msweep_worker(args):
    cfg, m = args
    sub = _config_for_m(cfg, m)
    return m, run(sub)


def _config_for_m(cfg: SimConfig, m):
    initial = dict(cfg.initial)
    if initial.get("kind") == "indicator" and cfg.p_M is not None:
        # saturated indicator levels track the admissible maximum per m
        if abs(initial.get("level", 0.0) - max_density(cfg.m, cfg.p_M)) < 1e-12:
            initial["level"] = max_density(m, cfg.p_M)
    return replace(cfg, m=m, initial=initial)


def _cmd_msweep(spec, exp: ExperimentConfig):
    if exp.sim is None or not exp.m_list:
        raise ConfigError("msweep needs simulation sections plus [msweep].m_list")
    cfg = exp.sim
    if cfg.initial.get("kind") != "indicator":
        raise ConfigError("msweep compares against the sharp-interface reference; use indicator initial data")
    jobs = min(spec.jobs, len(exp.m_list))
    tasks = [(cfg, m) for m in exp.m_list]
    if jobs == 1:
        results = [_msweep_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_msweep_worker, tasks))
    results.sort(key=lambda r: r[0])
    runs = {m: series for m, series in results}

    # geometric reference from the spheroid trajectory of the same law
    law = cfg.growth
    if law is None:
        raise ConfigError("msweep needs a growth law")
    R0 = float(cfg.initial["R"])
    dim = cfg.mesh.dim if cfg.mesh.geometry == "radial" else 1
    traj = spheroid_evolve(R0, law, N=dim, T=cfg.T, dt=min(0.01, cfg.T / 50.0))
    ts = np.array([r[0] for r in traj])
    Rs = np.array([r[1] for r in traj])
    ref_rows = [(t, float(np.interp(t, ts, Rs))) for t in cfg.snapshot_times]
    reference = geometric_reference(ref_rows, cfg.mesh, law, dim=dim)

    report = msweep_convergence(runs, reference)
    for m, series in sorted(runs.items()):
        sub = os.path.join(spec.out_dir, f"m_{m:g}")
        hio.write_snapshots(series, records_for_series(series), sub)
    hio.write_msweep_report(report, spec.out_dir)
    if spec.check and report.non_monotone:
        raise CheckFailure(f"msweep distances not monotone in m: {report.non_monotone}")


def _cmd_diagnose(spec, exp: ExperimentConfig):
    if exp.sim is None:
        raise ConfigError("diagnose needs the originating simulation config")
    from .solver import SnapshotSeries

    states, mesh = hio.read_snapshots(spec.out_dir)
    if mesh != exp.sim.mesh:
        raise ConfigError("snapshots were produced on a different mesh than the config describes")
    series = SnapshotSeries(exp.sim, states, [])
    recs = records_for_series(series)
    hio.write_snapshots(series, recs, spec.out_dir)


_COMMANDS = {
    "simulate": _cmd_simulate,
    "spheroid": _cmd_spheroid,
    "twophase": _cmd_twophase,
    "travelingwave": _cmd_travelingwave,
    "msweep": _cmd_msweep,
    "diagnose": _cmd_diagnose,
}


def run_experiment(spec: ExperimentSpec) -> int:
    try:
        exp = _load(spec)
        _COMMANDS[spec.command](spec, exp)
        return 0
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except BlowUpError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 2
    except CheckFailure as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 3
    except HeleShawError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main(argv=None):
    ap = argparse.ArgumentParser(prog="heleshaw-lab", description=__doc__)
    ap.add_argument("command", choices=sorted(_COMMANDS))
    ap.add_argument("--config", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args(argv)
    spec = ExperimentSpec(
        command=args.command, config_path=args.config, out_dir=args.out, jobs=args.jobs, check=args.check
    )
    sys.exit(run_experiment(spec))


if __name__ == "__main__":
    main()
