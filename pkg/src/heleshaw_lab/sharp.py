"""Direct solvers for the stiff-limit objects: the radial elliptic pressure
problem, spheroid radius dynamics, the two-phase (saturated + mushy)
dynamics, and the one-dimensional traveling-wave profile."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import MeshError, SolverError
from .laws import GrowthLaw, asymptotic_speed
from .meshes import Field, Mesh

_ODE_STEPS = 10_000


@dataclass
class FrontState:
    t: float
    R1: float
    q: float
    R2: float
    dim: int = 1

    def __post_init__(self):
        if not 0 < self.R1 <= self.R2:
            raise SolverError(f"need 0 < R1 <= R2, got R1={self.R1}, R2={self.R2}")
        if not 0 <= self.q < 1:
            raise SolverError(f"mushy level must lie in [0,1), got q={self.q}")


@dataclass
class RadialPressureSolution:
    R: float
    dim: int
    r: np.ndarray
    profile: np.ndarray
    center_value: float
    boundary_gradient: float


_PHI_GRID = 16_384


def _phi_extended(law: GrowthLaw, p):
    """Growth rate with a linear extension outside [0, p_M] (shooting iterates
    may overshoot slightly)."""
    if law.kind == "linear":
        return law.phi(p)
    if p < 0.0:
        return law.phi(0.0) + law.dphi(0.0) * p
    if p > law.p_M:
        return law.dphi(law.p_M) * (p - law.p_M)
    return law.phi(p)


# The ODE is integrated in the deviation variable u = p_M - p:
#     u'' = Phi(p_M - u) - (N-1)/r u',   u(0) = u0 > 0, u'(0) = 0,
# shooting on u0 until u(R) = p_M (i.e. p(R) = 0). For large domains the
# correct u0 is exponentially small (far below the float spacing around p_M),
# so working in u and bisecting u0 geometrically keeps the problem perfectly
# conditioned where shooting on p(0) itself cannot be.

_U_LINEAR = 1e-8  # below this deviation use the tangent at the homeostatic point


def _phi_of_u_table(law: GrowthLaw):
    """Table of Phi(p_M - u) on an increasing u grid, plus the tangent slopes
    at both ends used for tiny-u evaluation and the extension past u > p_M."""
    ug = np.linspace(0.0, law.p_M, _PHI_GRID)
    fgu = np.asarray(law.phi(law.p_M - ug), dtype=float)
    slope_hom = -float(law.dphi(law.p_M))  # d/du Phi(p_M - u) at u = 0
    slope_zero = -float(law.dphi(0.0))  # extension slope past u = p_M
    return ug, fgu, slope_hom, slope_zero


def _phi_of_u_scalar(u, ug, fgu, slope_hom, slope_zero, u_lin):
    if u < u_lin:
        return slope_hom * u
    if u > ug[-1]:
        return fgu[-1] + slope_zero * (u - ug[-1])
    return float(np.interp(u, ug, fgu))


try:
    from numba import njit

    @njit(cache=True, inline="always")
    def _phi_u(u, ug, fgu, slope_hom, slope_zero, u_lin):
        if u < u_lin:
            return slope_hom * u
        if u > ug[-1]:
            return fgu[-1] + slope_zero * (u - ug[-1])
        # ug is uniform: O(1) lookup
        step = ug[1] - ug[0]
        i = int(u / step)
        if i >= ug.shape[0] - 1:
            i = ug.shape[0] - 2
        w = (u - ug[i]) / step
        return fgu[i] * (1.0 - w) + fgu[i + 1] * w

    @njit(cache=True, inline="always")
    def _acc(r, u, du, N, ug, fgu, slope_hom, slope_zero, u_lin):
        phi = _phi_u(u, ug, fgu, slope_hom, slope_zero, u_lin)
        if r == 0.0:
            return phi / N
        return phi - (N - 1.0) / r * du

    @njit(cache=True)
    def _shoot_kernel(u0, R, N, n_steps, ug, fgu, slope_hom, slope_zero, u_lin, profile, u_stop):
        h = R / n_steps
        u = u0
        du = 0.0
        profile[0] = u0
        for i in range(n_steps):
            r = i * h
            k1u = du
            k1d = _acc(r, u, du, N, ug, fgu, slope_hom, slope_zero, u_lin)
            k2u = du + 0.5 * h * k1d
            k2d = _acc(r + 0.5 * h, u + 0.5 * h * k1u, k2u, N, ug, fgu, slope_hom, slope_zero, u_lin)
            k3u = du + 0.5 * h * k2d
            k3d = _acc(r + 0.5 * h, u + 0.5 * h * k2u, k3u, N, ug, fgu, slope_hom, slope_zero, u_lin)
            k4u = du + h * k3d
            k4d = _acc(r + h, u + h * k3u, k4u, N, ug, fgu, slope_hom, slope_zero, u_lin)
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
            profile[i + 1] = u
            if u > u_stop:
                # gross overshoot: u only keeps growing, stop early
                for j in range(i + 2, n_steps + 1):
                    profile[j] = u
                return u, du
        return u, du

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional speedup
    _HAVE_NUMBA = False


def _shoot_u(u0, R, law: GrowthLaw, N, n_steps, table):
    """Integrate the deviation outward; returns (u values, u'(R))."""
    ug, fgu, slope_hom, slope_zero = table
    us = np.empty(n_steps + 1)
    u_stop = 10.0 * law.p_M
    if _HAVE_NUMBA:
        _, du = _shoot_kernel(
            float(u0), float(R), float(N), n_steps, ug, fgu, slope_hom, slope_zero,
            _U_LINEAR * law.p_M, us, u_stop,
        )
        return us, du
    h = R / n_steps
    u, du = float(u0), 0.0
    us[0] = u
    u_lin = _U_LINEAR * law.p_M

    def acc(r, u, du):
        phi = _phi_of_u_scalar(u, ug, fgu, slope_hom, slope_zero, u_lin)
        if r == 0.0:
            return phi / N  # symmetric expansion: u''(0) = Phi(p(0))/N
        return phi - (N - 1) / r * du

    for i in range(n_steps):
        r = i * h
        k1u, k1d = du, acc(r, u, du)
        k2u = du + 0.5 * h * k1d
        k2d = acc(r + 0.5 * h, u + 0.5 * h * k1u, k2u)
        k3u = du + 0.5 * h * k2d
        k3d = acc(r + 0.5 * h, u + 0.5 * h * k2u, k3u)
        k4u = du + h * k3d
        k4d = acc(r + h, u + h * k3u, k4u)
        u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        du += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)
        us[i + 1] = u
        if u > u_stop:
            us[i + 2 :] = u
            break
    return us, du


def radial_pressure_solve(R, law: GrowthLaw, N=1, tol=1e-10, n_steps=_ODE_STEPS):
    """Solve -p'' - (N-1)/r p' = Phi(p) on (0, R) with p'(0) = 0, p(R) = 0 by
    shooting on the center value; the boundary value is monotone in the shot."""
    if not R > 0:
        raise SolverError(f"radius must be positive, got R={R}")
    if not tol > 0:
        raise SolverError(f"tolerance must be positive, got {tol}")
    p_M = law.p_M
    table = _phi_of_u_table(law)
    # geometric bisection on the center deviation u0 = p_M - p(0):
    # u(R; u0) is increasing in u0; u0 -> p_M overshoots (u(R) > p_M),
    # u0 -> 0+ undershoots.
    lo, hi = 1e-300, p_M
    end_hi = _shoot_u(hi, R, law, N, n_steps, table)[0][-1] - p_M
    if end_hi < 0:
        raise SolverError("shooting failed to bracket: center value 0 still undershoots")
    prev_u0, prev_end = None, None
    best = None
    converged = False
    for _ in range(2000):
        u0 = math.sqrt(lo * hi)
        us, du_end = _shoot_u(u0, R, law, N, n_steps, table)
        end = us[-1] - p_M
        # assert monotonicity in the shot value, except between samples that
        # hit the gross-overshoot guard (their endpoint is truncated)
        guarded = us[-1] >= 10.0 * p_M
        if (
            prev_u0 is not None
            and not guarded
            and not prev_guarded
            and (u0 - prev_u0) * (end - prev_end) < 0
        ):
            raise SolverError("shooting map lost monotonicity in the shot value")
        prev_u0, prev_end, prev_guarded = u0, end, guarded
        best = (u0, us, du_end)
        if abs(end) <= tol * p_M:
            converged = True
            break
        if end > 0:
            hi = u0
        else:
            lo = u0
    if not converged:
        raise SolverError(f"shooting bisection did not converge for R={R}")
    u0, us, du_end = best
    rs = np.linspace(0.0, R, n_steps + 1)
    ps = (p_M - us) - (p_M - us[-1])  # pin the boundary value exactly to zero
    return RadialPressureSolution(
        R=R, dim=N, r=rs, profile=ps, center_value=float(ps[0]), boundary_gradient=abs(float(du_end))
    )


class _GradientCache:
    """Memoizes boundary gradients per (R rounded to 1e-8, law, N)."""

    def __init__(self, law, N, tol=1e-10, n_steps=_ODE_STEPS):
        self.law, self.N, self.tol, self.n_steps = law, N, tol, n_steps
        self._cache = {}

    def g(self, R):
        key = round(R, 8)
        if key not in self._cache:
            sol = radial_pressure_solve(R, self.law, self.N, self.tol, self.n_steps)
            self._cache[key] = sol.boundary_gradient
        return self._cache[key]


def spheroid_evolve(R0, law: GrowthLaw, N=1, T=1.0, dt=1e-2, ode_steps=_ODE_STEPS):
    """RK4 on R'(t) = |p'(R)| with the gradient from the elliptic solve.

    Returns a list of (t, R, R') triples including both endpoints.
    """
    if not R0 > 0:
        raise SolverError(f"initial radius must be positive, got {R0}")
    cache = _GradientCache(law, N, n_steps=ode_steps)
    out = [(0.0, R0, cache.g(R0))]
    t, R = 0.0, R0
    n = max(1, int(round(T / dt)))
    dt = T / n
    for _ in range(n):
        k1 = cache.g(R)
        k2 = cache.g(R + 0.5 * dt * k1)
        k3 = cache.g(R + 0.5 * dt * k2)
        k4 = cache.g(R + dt * k3)
        R += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
        out.append((t, R, cache.g(R)))
    return out


def two_phase_evolve(init: FrontState, law: GrowthLaw, T=1.0, dt=1e-2, ode_steps=_ODE_STEPS):
    """Coupled front/mushy dynamics: R1' = |p'(R1)|/(1-q), q' = q*Phi(0).

    When q reaches 1 the annulus saturates all at once and R1 jumps to R2;
    when R1 reaches R2 the annulus is absorbed. Either way the trajectory
    continues as a pure spheroid. Events are located to within dt*1e-3.
    Returns a list of (t, R1, q) triples.
    """
    cache = _GradientCache(law, init.dim, n_steps=ode_steps)
    phi0 = law.phi(0.0)
    R2 = init.R2

    def step(t, R1, q, h):
        def f(R1v, qv):
            qv = min(qv, 1.0 - 1e-15)
            return cache.g(min(R1v, R2)) / (1.0 - qv), qv * phi0

        k1R, k1q = f(R1, q)
        k2R, k2q = f(R1 + 0.5 * h * k1R, q + 0.5 * h * k1q)
        k3R, k3q = f(R1 + 0.5 * h * k2R, q + 0.5 * h * k2q)
        k4R, k4q = f(R1 + h * k3R, q + h * k3q)
        return R1 + h / 6.0 * (k1R + 2 * k2R + 2 * k3R + k4R), q + h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)

    out = [(0.0, init.R1, init.q)]
    t, R1, q = 0.0, init.R1, init.q
    mushy = q > 0 and R1 < R2
    n = max(1, int(round(T / dt)))
    dt = T / n
    remaining = n
    while remaining > 0 and mushy:
        R1n, qn = step(t, R1, q, dt)
        if qn >= 1.0 - 1e-9 or R1n >= R2:
            # bisect the step size to locate the event
            lo, hi = 0.0, dt
            while hi - lo > dt * 1e-3:
                mid = 0.5 * (lo + hi)
                Rm, qm = step(t, R1, q, mid)
                if qm >= 1.0 - 1e-9 or Rm >= R2:
                    hi = mid
                else:
                    lo = mid
            t += hi
            # either the annulus saturated (q -> 1, instantaneous jump of the
            # front to R2) or the front swallowed it; both leave a pure tumor
            R1, q = R2, 0.0
            out.append((t, R1, q))
            mushy = False
            break
        t += dt
        R1, q = R1n, qn
        out.append((t, R1, q))
        remaining -= 1
    if t < T - 1e-12:
        # pure spheroid continuation
        tail = spheroid_evolve(min(R1, R2), law, init.dim, T - t, dt, ode_steps)
        out.extend((t + tt, R, 0.0) for tt, R, _ in tail[1:])
    return out


def traveling_wave_profile(law: GrowthLaw, s_min=-5.0, n=5000):
    """Backward RK4 for the planar front profile: p'' + Phi(p) = 0 with
    p(0) = 0 and p'(0) = -sqrt(2 Q(p_M)). Returns (s, p) with s in [s_min, 0]."""
    if not s_min < 0:
        raise SolverError(f"s_min must be negative, got {s_min}")
    h = -s_min / n
    p, dp = 0.0, -asymptotic_speed(law)
    ss = np.empty(n + 1)
    ps = np.empty(n + 1)
    ss[-1], ps[-1] = 0.0, 0.0
    s = 0.0
    for i in range(n):
        # integrate toward negative s with step -h
        def f(pv, dv):
            return dv, -_phi_extended(law, pv)

        k1p, k1d = f(p, dp)
        k2p, k2d = f(p - 0.5 * h * k1p, dp - 0.5 * h * k1d)
        k3p, k3d = f(p - 0.5 * h * k2p, dp - 0.5 * h * k2d)
        k4p, k4d = f(p - h * k3p, dp - h * k3d)
        p -= h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        dp -= h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)
        s -= h
        ss[n - 1 - i], ps[n - 1 - i] = s, p
    return ss, ps


def jump_time(c0, law: GrowthLaw):
    """Time for a uniform sub-threshold level c0 to saturate: -ln(c0)/Phi(0)."""
    if not 0 < c0 <= 1:
        raise SolverError(f"initial level must lie in (0, 1], got {c0}")
    return -math.log(c0) / law.phi(0.0)


def geometric_reference(traj, mesh: Mesh, law: GrowthLaw, dim=None, ode_steps=_ODE_STEPS):
    """Sample the sharp-interface trajectory onto a mesh as (t, rho, p) fields.

    traj rows are (t, R, speed) from spheroid_evolve or (t, R1, q) from
    two_phase_evolve with an R2 implied by the two-phase initial state; for
    the two-phase case pass rows (t, R1, q, R2).
    """
    from .solver import _indicator_fraction

    if dim is None:
        dim = mesh.dim if mesh.geometry == "radial" else 1
    out = []
    for row in traj:
        if len(row) == 4:
            t, R1, q, R2 = row
        else:
            t, R1 = row[0], row[1]
            q, R2 = 0.0, row[1]
        if max(R1, R2) > mesh.L:
            raise MeshError(f"mesh extent {mesh.L} smaller than front radius at t={t:.4g}")
        frac1 = _indicator_fraction(mesh, R1)
        rho = frac1 + q * np.clip(_indicator_fraction(mesh, R2) - frac1, 0.0, None)
        sol = radial_pressure_solve(R1, law, dim, n_steps=ode_steps)
        rr = np.abs(mesh.centers)
        p = np.where(rr < R1, np.interp(rr, sol.r, sol.profile), 0.0)
        out.append((t, Field(mesh, rho), Field(mesh, p)))
    return out
