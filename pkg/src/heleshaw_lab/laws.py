"""Constitutive laws: power-law pressure, pressure-limited growth, nutrient coupling.

All densities are expressed in units of the packing density, so the packing
level is 1 throughout.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import InvalidLawError

_N_SAMPLE = 10_000  # grid size for sampled law validation / minimization


@dataclass(frozen=True)
class PressureLaw:
    """Power pressure law p = m/(m-1) * rho^(m-1), m > 1."""

    m: float

    def __post_init__(self):
        if not self.m > 1:
            raise InvalidLawError(f"pressure-law exponent must exceed 1, got m={self.m}")


def pressure_of_density(rho, law: PressureLaw):
    """p = m/(m-1) * rho^(m-1); accepts scalars or arrays, maps 0 to 0."""
    m = law.m
    rho = np.asarray(rho, dtype=float)
    p = m / (m - 1.0) * rho ** (m - 1.0)
    return p if p.ndim else float(p)


def density_of_pressure(p, law: PressureLaw):
    """Exact inverse of pressure_of_density."""
    m = law.m
    p = np.asarray(p, dtype=float)
    rho = ((m - 1.0) * p / m) ** (1.0 / (m - 1.0))
    return rho if rho.ndim else float(rho)


def max_density(m, p_M):
    """Largest density compatible with the pressure bound p <= p_M."""
    if not m > 1:
        raise InvalidLawError(f"exponent must exceed 1, got m={m}")
    return ((m - 1.0) * p_M / m) ** (1.0 / (m - 1.0))


class GrowthLaw:
    """Growth rate Phi(p): strictly decreasing, with Phi(p_M) = 0 and Phi(0) > 0.

    Either linear, Phi(p) = a*(p_M - p), or tabulated on (pressure, rate)
    knots interpolated with a monotone cubic. Construction validates the
    structural hypotheses and raises InvalidLawError on violation.
    """

    def __init__(self, *, a=None, p_M=None, knots=None):
        if knots is not None:
            if a is not None or p_M is not None:
                raise InvalidLawError("give either (a, p_M) or knots, not both")
            self._init_tabulated(np.asarray(knots, dtype=float))
        else:
            if a is None or p_M is None:
                raise InvalidLawError("linear law requires a and p_M")
            if not (a > 0 and p_M > 0):
                raise InvalidLawError(f"linear law requires a > 0 and p_M > 0, got a={a}, p_M={p_M}")
            self.kind = "linear"
            self.a = float(a)
            self.p_M = float(p_M)
            self._interp = None
        self._validate()

    def _init_tabulated(self, knots):
        if knots.ndim != 2 or knots.shape[1] != 2 or knots.shape[0] < 2:
            raise InvalidLawError("knots must be an (n>=2, 2) array of (pressure, rate) pairs")
        ps, rates = knots[:, 0], knots[:, 1]
        if not np.all(np.diff(ps) > 0):
            raise InvalidLawError("knot pressures must be strictly increasing")
        if ps[0] != 0.0:
            raise InvalidLawError("tabulated law must start at p = 0")
        if abs(rates[-1]) > 1e-12:
            raise InvalidLawError("tabulated law must vanish at its last knot (homeostatic pressure)")
        self.kind = "tabulated"
        self.a = None
        self.p_M = float(ps[-1])
        self._knots = knots
        self._interp = PchipInterpolator(ps, rates)
        self._dinterp = self._interp.derivative()

    def _validate(self):
        ps = np.linspace(0.0, self.p_M, _N_SAMPLE)
        vals = self.phi(ps)
        if not np.all(np.diff(vals) < 0):
            raise InvalidLawError("growth rate must be strictly decreasing on [0, p_M]")
        if abs(self.phi(self.p_M)) > 1e-12:
            raise InvalidLawError("growth rate must vanish at the homeostatic pressure")
        if not self.phi(0.0) > 0:
            raise InvalidLawError("growth rate at zero pressure must be positive")
        if stiffness_constant(self) <= 0:
            raise InvalidLawError("min(Phi - p*Phi') must be positive")

    def phi(self, p):
        """Evaluate the growth rate at pressure p."""
        if self.kind == "linear":
            p = np.asarray(p, dtype=float)
            out = self.a * (self.p_M - p)
            return out if out.ndim else float(out)
        p = np.asarray(p, dtype=float)
        if np.any(p < 0) or np.any(p > self.p_M):
            raise InvalidLawError(f"tabulated law evaluated outside [0, {self.p_M}]")
        out = self._interp(p)
        return out if out.ndim else float(out)

    def dphi(self, p):
        """Derivative of the growth rate."""
        if self.kind == "linear":
            p = np.asarray(p, dtype=float)
            out = np.full_like(p, -self.a)
            return out if out.ndim else float(out)
        p = np.asarray(p, dtype=float)
        if np.any(p < 0) or np.any(p > self.p_M):
            raise InvalidLawError(f"tabulated law evaluated outside [0, {self.p_M}]")
        out = self._dinterp(p)
        return out if out.ndim else float(out)

    def __eq__(self, other):
        if not isinstance(other, GrowthLaw) or self.kind != other.kind:
            return NotImplemented
        if self.kind == "linear":
            return self.a == other.a and self.p_M == other.p_M
        return np.array_equal(self._knots, other._knots)

    def __hash__(self):
        if self.kind == "linear":
            return hash(("linear", self.a, self.p_M))
        return hash(("tabulated", self._knots.tobytes()))

    def __repr__(self):
        if self.kind == "linear":
            return f"GrowthLaw(a={self.a}, p_M={self.p_M})"
        return f"GrowthLaw(knots=<{len(self._knots)}>, p_M={self.p_M})"


def eval_growth(p, law: GrowthLaw):
    """Growth rate Phi(p)."""
    return law.phi(p)


def growth_potential(p, law: GrowthLaw):
    """Antiderivative Q(p) = integral of Phi from 0 to p."""
    if law.kind == "linear":
        return law.a * (p * law.p_M - 0.5 * p * p)
    val, _ = quad(law.phi, 0.0, p, epsabs=1e-10, limit=200)
    return val


def stiffness_constant(law: GrowthLaw):
    """min over [0, p_M] of Phi(p) - p*Phi'(p); a*p_M exactly for the linear law."""
    if law.kind == "linear":
        return law.a * law.p_M
    ps = np.linspace(0.0, law.p_M, _N_SAMPLE)
    return float(np.min(law.phi(ps) - ps * law.dphi(ps)))


def asymptotic_speed(law: GrowthLaw):
    """Terminal spreading speed sqrt(2 Q(p_M))."""
    return float(np.sqrt(2.0 * growth_potential(law.p_M, law)))


class NutrientLaw:
    """Nutrient-coupled rates Phi(p, c) = base(p)*(c + c1) - c2 and Psi(p, c) = c.

    c_B is the far-field nutrient level. The effective homeostatic pressure
    p_M is the root of Phi(p, c_B) = 0, which lies strictly inside
    (0, base.p_M) since c2 > 0.
    """

    def __init__(self, base: GrowthLaw, c1, c2, c_B):
        if not (c1 > 0 and c2 > 0 and c_B > 0):
            raise InvalidLawError("nutrient constants c1, c2 and c_B must be positive")
        self.base = base
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.c_B = float(c_B)
        # Phi(p, c_B) = 0  <=>  base(p) = c2/(c_B + c1)
        target = self.c2 / (self.c_B + self.c1)
        if base.phi(0.0) <= target:
            raise InvalidLawError("growth at zero pressure is not positive at the far-field nutrient level")
        from scipy.optimize import brentq

        self.p_M = float(brentq(lambda p: base.phi(p) - target, 0.0, base.p_M, xtol=1e-14))
        self._validate()

    def phi(self, p, c):
        return self.base.phi(p) * (np.asarray(c, dtype=float) + self.c1) - self.c2

    def psi(self, p, c):
        return np.asarray(c, dtype=float) + 0.0 * np.asarray(p, dtype=float)

    def _validate(self):
        ps = np.linspace(0.0, self.p_M, 200)
        cs = np.linspace(0.0, self.c_B, 200)
        P, C = np.meshgrid(ps, cs, indexing="ij")
        dp = 1e-7 * max(self.p_M, 1.0)
        dc = 1e-7 * max(self.c_B, 1.0)
        dphi_dp = (self.phi(P + dp, C) - self.phi(P, C)) / dp
        dphi_dc = (self.phi(P, C + dc) - self.phi(P, C)) / dc
        if not np.all(dphi_dp < 0):
            raise InvalidLawError("nutrient growth rate must decrease in pressure")
        if not np.all(dphi_dc >= 0):
            raise InvalidLawError("nutrient growth rate must be nondecreasing in nutrient")
        if abs(self.phi(self.p_M, self.c_B)) > 1e-10:
            raise InvalidLawError("Phi(p_M, c_B) must vanish")
        dpsi_dp = (self.psi(P + dp, C) - self.psi(P, C)) / dp
        dpsi_dc = (self.psi(P, C + dc) - self.psi(P, C)) / dc
        if not np.all(dpsi_dp <= 0):
            raise InvalidLawError("consumption must be nonincreasing in pressure")
        if not np.all(dpsi_dc >= 0):
            raise InvalidLawError("consumption must be nondecreasing in nutrient")
        if np.any(np.abs(self.psi(ps, np.zeros_like(ps))) > 0):
            raise InvalidLawError("consumption must vanish without nutrients")
