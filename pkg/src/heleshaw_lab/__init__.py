"""Numerical laboratory for pressure-limited growth and its stiff
incompressible (free-boundary) limit."""

from .laws import (
    GrowthLaw,
    NutrientLaw,
    PressureLaw,
    asymptotic_speed,
    density_of_pressure,
    eval_growth,
    growth_potential,
    max_density,
    pressure_of_density,
    stiffness_constant,
)
from .meshes import Field, Mesh, gradient_sq, l1_distance, laplacian, norm, resample, support_radius
from .sharp import (
    FrontState,
    RadialPressureSolution,
    geometric_reference,
    jump_time,
    radial_pressure_solve,
    spheroid_evolve,
    traveling_wave_profile,
    two_phase_evolve,
)
from .solver import SimConfig, SimState, SnapshotSeries, advance, make_initial_data, run, stable_dt

__all__ = [
    "GrowthLaw",
    "NutrientLaw",
    "PressureLaw",
    "Field",
    "Mesh",
    "FrontState",
    "RadialPressureSolution",
    "SimConfig",
    "SimState",
    "SnapshotSeries",
    "advance",
    "asymptotic_speed",
    "density_of_pressure",
    "eval_growth",
    "geometric_reference",
    "gradient_sq",
    "growth_potential",
    "jump_time",
    "l1_distance",
    "laplacian",
    "make_initial_data",
    "max_density",
    "norm",
    "pressure_of_density",
    "radial_pressure_solve",
    "resample",
    "run",
    "spheroid_evolve",
    "stable_dt",
    "stiffness_constant",
    "support_radius",
    "traveling_wave_profile",
    "two_phase_evolve",
]
