"""Explicit (monotone) and semi-implicit time integration of the density
equation d(rho)/dt = Lap(rho^m) + rho*Phi(p), optionally coupled to a
diffusing nutrient with far-field Dirichlet data."""

import bisect
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from .errors import BlowUpError, ConfigError
from .laws import (
    GrowthLaw,
    NutrientLaw,
    PressureLaw,
    max_density,
    pressure_of_density,
)
from .meshes import Field, Mesh, laplacian_values, support_radius

EXPLICIT = "explicit"
SEMI_IMPLICIT = "semi_implicit"


@dataclass
class SimConfig:
    m: float
    mesh: Mesh
    T: float
    growth: Optional[GrowthLaw] = None  # None disables the reaction entirely
    nutrients: Optional[NutrientLaw] = None
    c0_value: Optional[float] = None  # uniform initial nutrient level, defaults to c_B
    cfl_theta: float = 0.4
    scheme: str = EXPLICIT
    snapshot_times: tuple = ()
    initial: dict = dc_field(default_factory=dict)
    eps_p: Optional[float] = None  # front threshold for p, default 1e-3*p_M
    eps_rho: float = 1e-3
    jump_delta: Optional[float] = None  # default 0.25*p_M

    def __post_init__(self):
        if not self.m > 1:
            raise ConfigError(f"m must exceed 1, got {self.m}")
        if not self.T > 0:
            raise ConfigError(f"T must be positive, got {self.T}")
        if not 0 < self.cfl_theta < 1:
            raise ConfigError(f"cfl_theta must lie in (0,1), got {self.cfl_theta}")
        if self.scheme not in (EXPLICIT, SEMI_IMPLICIT):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        ts = tuple(float(t) for t in self.snapshot_times)
        if any(t < 0 or t > self.T + 1e-12 for t in ts):
            raise ConfigError("snapshot times must lie in [0, T]")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ConfigError("snapshot times must be strictly increasing")
        self.snapshot_times = ts
        if self.nutrients is not None and self.growth is not None:
            raise ConfigError("give either a growth law or a nutrient law, not both")
        if self.eps_p is None:
            self.eps_p = 1e-3 * self.p_M if self.p_M is not None else 1e-3
        if self.jump_delta is None:
            self.jump_delta = 0.25 * self.p_M if self.p_M is not None else 0.25

    @property
    def p_M(self):
        if self.nutrients is not None:
            return self.nutrients.p_M
        if self.growth is not None:
            return self.growth.p_M
        return None

    @property
    def phi0(self):
        """Largest growth rate, attained at zero pressure (and full nutrients)."""
        if self.nutrients is not None:
            return float(self.nutrients.phi(0.0, self.nutrients.c_B))
        if self.growth is not None:
            return float(self.growth.phi(0.0))
        return 0.0

    @property
    def pressure_law(self):
        return PressureLaw(self.m)

    @property
    def rho_max(self):
        if self.p_M is None:
            return None
        return max_density(self.m, self.p_M)

    def growth_rate(self, p, c=None):
        if self.nutrients is not None:
            return self.nutrients.phi(p, c)
        if self.growth is not None:
            return self.growth.phi(p)
        return np.zeros_like(np.asarray(p, dtype=float))


@dataclass
class SimState:
    t: float
    rho: Field
    p: Field
    c: Optional[Field] = None

    def copy(self):
        return SimState(self.t, self.rho.copy(), self.p.copy(), None if self.c is None else self.c.copy())


@dataclass
class SnapshotSeries:
    config: SimConfig
    snapshots: list  # of SimState copies, times strictly increasing
    dt_history: list
    warnings: list = dc_field(default_factory=list)

    @property
    def times(self):
        return [s.t for s in self.snapshots]


def state_from_density(rho: Field, config: SimConfig, t=0.0, c: Optional[Field] = None) -> SimState:
    p = Field(rho.mesh, pressure_of_density(rho.values, config.pressure_law))
    return SimState(t, rho, p, c)


def stable_dt(state: SimState, config: SimConfig):
    """Explicit stability bound, capped at the gap to the next snapshot time.

    dt = theta*h^2 / (2*d*(m-1)*max(p) + h^2*Phi(0)), d = 1 (Cartesian) or
    the dimension (radial). With nutrients on, additionally capped by the
    unit-diffusivity bound theta*h^2/(2d) for the nutrient step.
    """
    pmax = float(np.max(state.p.values)) if state.p.values.size else 0.0
    return _stable_dt_values(pmax, state.t, config)


def _stable_dt_values(pmax, t, config: SimConfig):
    mesh = config.mesh
    h = mesh.h
    d = 1.0 if mesh.geometry == "cartesian1d" else float(mesh.dim)
    denom = 2.0 * d * (config.m - 1.0) * pmax + h * h * config.phi0
    dt = config.cfl_theta * h * h / denom if denom > 0 else config.T
    if config.nutrients is not None:
        dt = min(dt, config.cfl_theta * h * h / (2.0 * d))
    i = bisect.bisect_right(config.snapshot_times, t + 1e-15)
    if i < len(config.snapshot_times):
        dt = min(dt, config.snapshot_times[i] - t)
    return min(dt, config.T - t) if config.T > t else dt


def _check_finite(values, name, t):
    if not np.all(np.isfinite(values)):
        raise BlowUpError(name, t)


def _step_arrays(rho, p, c, dt, config: SimConfig):
    """One time step on raw value arrays; returns (rho', p', c').

    Overflow is deliberately allowed to propagate as inf: callers detect
    blow-up through the finiteness checks."""
    mesh = config.mesh
    if config.scheme == EXPLICIT:
        # rho^m = (m-1)/m * p * rho avoids a second power evaluation
        diff = laplacian_values((config.m - 1.0) / config.m * p * rho, mesh)
        rho_new = rho + dt * diff
        if config.growth is not None or config.nutrients is not None:
            rho_new += dt * rho * config.growth_rate(p, c)
    else:
        rho_new = _semi_implicit_density(rho, p, c, dt, config)
    np.maximum(rho_new, 0.0, out=rho_new)
    c_new = None
    if c is not None:
        lap_c = laplacian_values(c, mesh, "dirichlet", config.nutrients.c_B)
        c_new = c + dt * (lap_c - rho * config.nutrients.psi(p, c))
    p_new = pressure_of_density(rho_new, config.pressure_law)
    return rho_new, p_new, c_new


def advance(state: SimState, dt, config: SimConfig) -> SimState:
    """One time step; explicit scheme is monotone under the CFL bound."""
    rho_new, p_new, c_new = _step_arrays(
        state.rho.values, state.p.values, None if state.c is None else state.c.values, dt, config
    )
    t1 = state.t + dt
    _check_finite(rho_new, "rho", t1)
    _check_finite(p_new, "p", t1)
    if c_new is not None:
        _check_finite(c_new, "c", t1)
    mesh = config.mesh
    return SimState(t1, Field(mesh, rho_new), Field(mesh, p_new), None if c_new is None else Field(mesh, c_new))


def _semi_implicit_density(rho, p, c, dt, config: SimConfig):
    """Backward-Euler diffusion with the mobility m*rho^(m-1) frozen at the
    start of the step; reaction explicit. Cartesian and radial tridiagonals."""
    mesh = config.mesh
    n, h = mesh.n_cells, mesh.h
    m = config.m
    mob = m * rho ** (m - 1.0)
    mob_face = 0.5 * (mob[1:] + mob[:-1])  # interior faces
    if mesh.geometry == "cartesian1d":
        wl = np.concatenate(([0.0], mob_face)) / (h * h)
        wr = np.concatenate((mob_face, [0.0])) / (h * h)
    else:
        N = mesh.dim
        r = mesh.faces
        w = r ** (N - 1)
        shell = (r[1:] ** N - r[:-1] ** N) / (N * h)
        wl = np.concatenate(([0.0], mob_face * w[1:-1])) / (h * h * shell)
        wr = np.concatenate((mob_face * w[1:-1], [0.0])) / (h * h * shell)
    ab = np.zeros((3, n))
    ab[0, 1:] = -dt * wr[:-1]
    ab[1, :] = 1.0 + dt * (wl + wr)
    ab[2, :-1] = -dt * wl[1:]
    rhs = rho.copy()
    if config.growth is not None or config.nutrients is not None:
        rhs = rhs + dt * rho * config.growth_rate(p, c)
    return solve_banded((1, 1), ab, rhs)


_INITIAL_KINDS = ("indicator", "two_ring", "ball_constant", "table", "barenblatt")


def _indicator_fraction(mesh: Mesh, R):
    """Per-cell volume fraction of the ball/interval of radius R."""
    f = mesh.faces
    if mesh.geometry == "cartesian1d":
        lo, hi = np.maximum(f[:-1], -R), np.minimum(f[1:], R)
        return np.clip(hi - lo, 0.0, None) / mesh.h
    N = mesh.dim
    lo, hi = np.minimum(f[:-1], R), np.minimum(f[1:], R)
    return np.clip(hi ** N - lo ** N, 0.0, None) / (f[1:] ** N - f[:-1] ** N)


def barenblatt_profile(x, t, C, m):
    """Self-similar source solution of the pure porous medium equation in 1D."""
    alpha = 1.0 / (m + 1.0)
    k = alpha * (m - 1.0) / (2.0 * m)
    inner = C - k * x * x * t ** (-2.0 * alpha)
    return t ** (-alpha) * np.maximum(inner, 0.0) ** (1.0 / (m - 1.0))


def make_initial_data(spec: dict, mesh: Mesh, config: SimConfig):
    """Build (rho0, c0) from a generator spec; inadmissible levels are rejected."""
    kind = spec.get("kind")
    if kind not in _INITIAL_KINDS:
        raise ConfigError(f"unknown initial-data kind {kind!r}")
    rho_cap = config.rho_max

    def check_level(level):
        if rho_cap is not None and level > rho_cap * (1.0 + 1e-12):
            raise ConfigError(
                f"initial level {level} exceeds the admissible density "
                f"{rho_cap:.12g} (initial pressure must not exceed p_M)"
            )

    if kind == "indicator":
        R, level = float(spec["R"]), float(spec["level"])
        check_level(level)
        vals = level * _indicator_fraction(mesh, R)
    elif kind == "ball_constant":
        R, c0 = float(spec["R"]), float(spec["c0"])
        check_level(c0)
        vals = c0 * _indicator_fraction(mesh, R)
    elif kind == "two_ring":
        R1, R2, q = float(spec["R1"]), float(spec["R2"]), float(spec["q"])
        if not 0 <= q < 1:
            raise ConfigError(f"mushy level q must lie in [0,1), got {q}")
        if not 0 < R1 <= R2:
            raise ConfigError("two_ring requires 0 < R1 <= R2")
        inner = rho_cap if rho_cap is not None else 1.0  # saturated core
        vals = inner * _indicator_fraction(mesh, R1) + q * np.clip(
            _indicator_fraction(mesh, R2) - _indicator_fraction(mesh, R1), 0.0, None
        )
    elif kind == "table":
        pts = np.asarray(spec["points"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ConfigError("table initial data needs (coordinate, value) pairs")
        vals = np.interp(mesh.centers, pts[:, 0], pts[:, 1], left=0.0, right=0.0)
        check_level(float(np.max(vals)) if vals.size else 0.0)
    else:  # barenblatt
        C, t0 = float(spec["C"]), float(spec.get("t0", 1.0))
        if mesh.geometry != "cartesian1d":
            raise ConfigError("barenblatt initial data is Cartesian-only")
        vals = barenblatt_profile(mesh.centers, t0, C, config.m)
        check_level(float(np.max(vals)))

    rho0 = Field(mesh, vals)
    c_field = None
    if config.nutrients is not None:
        c0v = config.c0_value if config.c0_value is not None else config.nutrients.c_B
        if not 0 <= c0v <= config.nutrients.c_B:
            raise ConfigError(f"initial nutrient level must lie in [0, c_B], got {c0v}")
        c_field = Field(mesh, np.full(mesh.n_cells, float(c0v)))
    return rho0, c_field


def run(config: SimConfig) -> SnapshotSeries:
    """Integrate to T, capturing snapshots at the requested times.

    The hot loop works on raw arrays; Field/SimState objects (with their
    validation passes) are only built when a snapshot is captured."""
    mesh = config.mesh
    rho0, c0 = make_initial_data(config.initial, mesh, config)
    rho = rho0.values
    p = pressure_of_density(rho, config.pressure_law)
    c = None if c0 is None else c0.values
    t = 0.0
    snaps = []
    dts = []
    warns = []
    times = list(config.snapshot_times)
    boundary_limit = _outer_limit(mesh)

    def snapshot_state(at):
        return SimState(
            at,
            Field(mesh, rho.copy()),
            Field(mesh, p.copy()),
            None if c is None else Field(mesh, c.copy()),
        )

    def check_support():
        sr = support_radius(Field(mesh, rho), config.eps_rho)
        if sr is not None and sr > boundary_limit and not warns:
            warns.append(f"domain too small: support radius {sr:.4g} within 3 cells of the boundary")
            warnings.warn(warns[-1])

    while times and t >= times[0] - 1e-12:
        snaps.append(snapshot_state(times.pop(0)))
    n_guard = 0
    while t < config.T - 1e-12:
        dt = _stable_dt_values(float(np.max(p)) if p.size else 0.0, t, config)
        rho, p, c = _step_arrays(rho, p, c, dt, config)
        t += dt
        # finiteness of p implies finiteness of rho; c checked separately
        _check_finite(p, "p", t)
        if c is not None:
            _check_finite(c, "c", t)
        dts.append(dt)
        while times and t >= times[0] - 1e-12:
            snaps.append(snapshot_state(times.pop(0)))
        n_guard += 1
        if n_guard % 2000 == 0:
            check_support()
    check_support()
    return SnapshotSeries(config, snaps, dts, warns)


def _outer_limit(mesh: Mesh):
    return mesh.L - 3.0 * mesh.h
