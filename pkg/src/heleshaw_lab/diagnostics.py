"""Residuals, bound margins and limit diagnostics evaluated on snapshots."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MeshError
from .laws import GrowthLaw, stiffness_constant
from .meshes import Field, gradient_sq, l1_distance, laplacian, norm, support_radius
from .solver import SimConfig, SnapshotSeries


@dataclass
class DiagnosticsRecord:
    t: float
    mass: float
    sup_p: float
    complementarity_residual: float
    graph_residual: float
    semiconvexity_slack: Optional[float]  # undefined at t = 0
    mass_bound_margin: float
    support_radius_rho: Optional[float]
    support_radius_p: Optional[float]
    barrier_radius: Optional[float]
    front_speed_estimate: Optional[float]
    pressure_jump: bool
    nutrient_deficit_l1: Optional[float] = None


def _gradient_sq_integral(p: Field):
    """Integral of |grad p|^2 by face differences weighted with dual-cell
    volumes (the quadrature that is summation-by-parts compatible with the
    finite-volume Laplacian, so the residual is O(h^2) on profiles whose
    support edge lies on the grid; cell-centered squares lose an order at
    the front corner)."""
    mesh = p.mesh
    d = np.diff(p.values) / mesh.h
    c = mesh.centers
    if mesh.geometry == "cartesian1d":
        w = np.full(d.size, mesh.h)
    else:
        from .meshes import unit_ball_volume

        w = unit_ball_volume(mesh.dim) * (c[1:] ** mesh.dim - c[:-1] ** mesh.dim)
    return float(np.sum(d * d * w))


def complementarity_residual(p: Field, law: Optional[GrowthLaw]):
    """Signed discrete integral of (-|grad p|^2 + p*Phi(p)); vanishes in the
    stiff limit."""
    react = 0.0
    if law is not None:
        react = float(np.sum(p.values * law.phi(np.clip(p.values, 0.0, law.p_M)) * p.mesh.volumes))
    return react - _gradient_sq_integral(p)


def graph_residual(rho: Field, p: Field):
    """Max over cells of (1 - rho)_+ * p; zero exactly on the limit graph."""
    if rho.mesh != p.mesh:
        raise MeshError("fields live on different meshes")
    return float(np.max(np.clip(1.0 - rho.values, 0.0, None) * p.values))


def semiconvexity_lower_bound(t, m, law: GrowthLaw):
    """The time-dependent lower bound on Lap(p) + Phi(p) at finite stiffness."""
    if not t > 0:
        raise ValueError("the semiconvexity bound degenerates at t = 0")
    r = stiffness_constant(law)
    x = (m - 1.0) * r * t
    if x > 700.0:
        return 0.0
    e = math.exp(-x)
    return -r * e / (1.0 - e)


def semiconvexity_slack(p: Field, t, m, law: GrowthLaw, eps_p=None):
    """min over interior cells of [Lap(p) + Phi(p)] - W(t).

    Interior excludes 3 cells at the domain boundary and a 3-cell collar
    around the pressure front, where the limit pressure has corners.
    """
    W = semiconvexity_lower_bound(t, m, law)
    lap = laplacian(p).values
    vals = lap + law.phi(np.clip(p.values, 0.0, law.p_M))
    mesh = p.mesh
    keep = np.ones(mesh.n_cells, dtype=bool)
    keep[:3] = False
    keep[-3:] = False
    if eps_p is None:
        eps_p = 1e-3 * law.p_M
    sr = support_radius(p, eps_p)
    if sr is not None:
        keep &= np.abs(np.abs(mesh.centers) - sr) > 3.0 * mesh.h
    if not np.any(keep):
        keep = np.ones(mesh.n_cells, dtype=bool)
    return float(np.min(vals[keep]) - W)


def mass_bound_margin(series: SnapshotSeries):
    """max over snapshots of ||rho(t)||_1 / (e^(Phi(0) t) ||rho0||_1) - 1."""
    if not series.snapshots:
        raise ValueError("empty snapshot series")
    phi0 = series.config.phi0
    m0 = norm(series.snapshots[0].rho, "l1")
    if m0 == 0.0:
        return 0.0
    return max(
        norm(s.rho, "l1") / (math.exp(phi0 * s.t) * m0) - 1.0 for s in series.snapshots
    )


def front_speed_estimate(series: SnapshotSeries, window=0.6, threshold=None):
    """Least-squares slope of the pressure support radius over t in
    [window*T, T]."""
    cfg = series.config
    if threshold is None:
        threshold = cfg.eps_p
    t0 = window * cfg.T
    pts = []
    n_window = 0
    for s in series.snapshots:
        if s.t >= t0 - 1e-12:
            n_window += 1
            r = support_radius(s.p, threshold)
            if r is not None:
                pts.append((s.t, r))
    if n_window < 5:
        raise ValueError(f"need at least 5 snapshots in the fit window, got {n_window}")
    if len(pts) < 2:
        raise ValueError("front not detected in at least 2 snapshots")
    ts = np.array([p[0] for p in pts])
    rs = np.array([p[1] for p in pts])
    slope, _ = np.polyfit(ts, rs, 1)
    return float(slope)


def detect_pressure_jump(series: SnapshotSeries, delta=None):
    """Earliest consecutive snapshot pair with sup|p(t+) - p(t-)| > delta;
    returns (midpoint time, jump size) or None."""
    if delta is None:
        delta = series.config.jump_delta
    if not delta > 0:
        raise ValueError(f"jump threshold must be positive, got {delta}")
    snaps = series.snapshots
    for a, b in zip(snaps, snaps[1:]):
        jump = float(np.max(np.abs(b.p.values - a.p.values)))
        if jump > delta:
            return 0.5 * (a.t + b.t), jump
    return None


def barrier_radius(t, config: SimConfig, rho0: Field, p0_sup=None):
    """Finite-propagation barrier: parabola-in-space supersolutions iterated
    over intervals of length tau = N/(4*Phi(0))."""
    phi0 = config.phi0
    if phi0 <= 0:
        return None
    R0 = support_radius(rho0, config.eps_rho)
    if R0 is None:
        return None
    N = 1.0 if config.mesh.geometry == "cartesian1d" else float(config.mesh.dim)
    tau = N / (4.0 * phi0)
    if p0_sup is None:
        p0_sup = float(np.max(pressure_of_density_values(rho0.values, config)))
    sup_p = p0_sup
    Rk = R0
    tk = 0.0
    while True:
        Ck = sup_p + Rk * Rk / (4.0 * tau)
        if t <= tk + tau + 1e-15:
            return math.sqrt(4.0 * Ck * (tau + (t - tk)))
        Rk = math.sqrt(8.0 * Ck * tau)
        tk += tau
        sup_p = config.p_M if config.p_M is not None else sup_p


def pressure_of_density_values(rho_values, config: SimConfig):
    from .laws import pressure_of_density

    return pressure_of_density(rho_values, config.pressure_law)


def records_for_series(series: SnapshotSeries) -> list:
    """One DiagnosticsRecord per snapshot."""
    cfg = series.config
    snaps = series.snapshots
    if not snaps:
        return []
    rho0 = snaps[0].rho
    p0_sup = float(np.max(snaps[0].p.values))
    m0 = norm(rho0, "l1")
    phi0 = cfg.phi0
    law = cfg.growth
    try:
        speed = front_speed_estimate(series)
    except ValueError:
        speed = None
    out = []
    prev = None
    for s in snaps:
        margin = norm(s.rho, "l1") / (math.exp(phi0 * s.t) * m0) - 1.0 if m0 > 0 else 0.0
        jump = prev is not None and float(np.max(np.abs(s.p.values - prev.p.values))) > cfg.jump_delta
        semi = None
        if law is not None and s.t > 0:
            semi = semiconvexity_slack(s.p, s.t, cfg.m, law, cfg.eps_p)
        if cfg.nutrients is not None:
            # system variant: reported only, no decay is asserted for it
            react = s.p.values * cfg.nutrients.phi(np.clip(s.p.values, 0.0, cfg.p_M), s.c.values)
            compl = float(np.sum(react * s.p.mesh.volumes)) - _gradient_sq_integral(s.p)
        else:
            compl = complementarity_residual(s.p, law)
        out.append(
            DiagnosticsRecord(
                t=s.t,
                mass=norm(s.rho, "l1"),
                sup_p=float(np.max(s.p.values)),
                complementarity_residual=compl,
                graph_residual=graph_residual(s.rho, s.p),
                semiconvexity_slack=semi,
                mass_bound_margin=margin,
                support_radius_rho=support_radius(s.rho, cfg.eps_rho),
                support_radius_p=support_radius(s.p, cfg.eps_p),
                barrier_radius=barrier_radius(s.t, cfg, rho0, p0_sup),
                front_speed_estimate=speed if s is snaps[-1] else None,
                pressure_jump=jump,
                nutrient_deficit_l1=None
                if s.c is None
                else norm(Field(s.c.mesh, cfg.nutrients.c_B - s.c.values), "l1"),
            )
        )
        prev = s
    return out


@dataclass
class MsweepReport:
    rows: list  # dicts: m, l1_rho_vs_ref, l1_p_vs_ref, graph_residual, compl_residual, l1_rho_vs_prev
    non_monotone: list  # column names whose values fail to decrease with m


def msweep_convergence(runs: dict, reference) -> MsweepReport:
    """Distances of each finite-stiffness run to the geometric reference.

    runs maps m -> SnapshotSeries; reference is a list of (t, rho, p) field
    triples on the same mesh and (uniformly spaced) snapshot times.
    """
    ms = sorted(runs)
    ref_times = [r[0] for r in reference]
    mesh = reference[0][1].mesh
    for m in ms:
        s = runs[m]
        if s.config.mesh != mesh:
            raise MeshError("msweep runs must share the reference mesh")
        if len(s.snapshots) != len(ref_times) or any(
            abs(a - b) > 1e-9 * max(1.0, abs(b)) for a, b in zip(s.times, ref_times)
        ):
            raise MeshError("msweep runs must share the reference snapshot times")
    if len(ref_times) < 2:
        raise MeshError("msweep needs at least 2 snapshots")
    gaps = np.diff(ref_times)
    if np.max(np.abs(gaps - gaps[0])) > 1e-9 * gaps[0]:
        raise MeshError("msweep snapshot times must be uniformly spaced")
    dt_snap = float(gaps[0])

    rows = []
    prev_last_rho = None
    for m in ms:
        s = runs[m]
        d_rho = sum(l1_distance(snap.rho, ref[1]) for snap, ref in zip(s.snapshots, reference))
        d_p = sum(l1_distance(snap.p, ref[2]) for snap, ref in zip(s.snapshots, reference))
        last = s.snapshots[-1]
        row = {
            "m": m,
            "l1_rho_vs_ref": d_rho * dt_snap,
            "l1_p_vs_ref": d_p * dt_snap,
            "graph_residual": graph_residual(last.rho, last.p),
            "compl_residual": abs(complementarity_residual(last.p, s.config.growth)),
            "l1_rho_vs_prev": None if prev_last_rho is None else l1_distance(last.rho, prev_last_rho),
        }
        prev_last_rho = last.rho
        rows.append(row)
    non_monotone = []
    for col in ("l1_rho_vs_ref", "l1_p_vs_ref", "graph_residual", "compl_residual"):
        vals = [r[col] for r in rows]
        if any(b > a * 1.05 for a, b in zip(vals, vals[1:])):
            non_monotone.append(col)
    return MsweepReport(rows, non_monotone)
