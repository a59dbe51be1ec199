"""Shared fixtures. The expensive scenario runs are session-scoped so the
acceptance criteria and the property suites evaluate the same data."""

import numpy as np
import pytest

from heleshaw_lab import (
    GrowthLaw,
    Mesh,
    NutrientLaw,
    SimConfig,
    max_density,
    run,
)
from heleshaw_lab.cli import ExperimentSpec, run_experiment


@pytest.fixture(scope="session")
def linear_law():
    return GrowthLaw(a=5.0, p_M=1.0)


@pytest.fixture(scope="session")
def barenblatt_series():
    """Growth-free m=2 run started from the exact self-similar profile."""
    mesh = Mesh(geometry="cartesian1d", n_cells=800, L=4.0)
    cfg = SimConfig(
        m=2.0,
        mesh=mesh,
        T=1.0,
        snapshot_times=(0.0, 0.5, 1.0),
        initial={"kind": "barenblatt", "C": 0.1, "t0": 1.0},
    )
    return run(cfg)


@pytest.fixture(scope="session")
def barenblatt_series_fine():
    """Same scenario at doubled resolution, for the error-decrease check."""
    mesh = Mesh(geometry="cartesian1d", n_cells=1600, L=4.0)
    cfg = SimConfig(
        m=2.0,
        mesh=mesh,
        T=1.0,
        snapshot_times=(0.0, 1.0),
        initial={"kind": "barenblatt", "C": 0.1, "t0": 1.0},
    )
    return run(cfg)


@pytest.fixture(scope="session")
def mushy_series(linear_law):
    """Uniform half-density ball: exponential growth, then a pressure jump.

    cfl_theta is small so the reaction-dominated phase is resolved well
    enough for the 1% mass tolerance."""
    mesh = Mesh(geometry="cartesian1d", n_cells=200, L=2.0)
    cfg = SimConfig(
        m=40.0,
        mesh=mesh,
        T=0.2,
        growth=linear_law,
        cfl_theta=0.01,
        snapshot_times=tuple(np.round(np.linspace(0.0, 0.2, 21), 10)),
        initial={"kind": "ball_constant", "R": 1.0, "c0": 0.5},
    )
    return run(cfg)


@pytest.fixture(scope="session")
def traveling_series(linear_law):
    """Long stiff run whose front settles to the asymptotic speed."""
    mesh = Mesh(geometry="cartesian1d", n_cells=2000, L=20.0)
    cfg = SimConfig(
        m=40.0,
        mesh=mesh,
        T=6.5,
        growth=linear_law,
        snapshot_times=tuple(np.round(np.linspace(0.0, 6.5, 27), 10)),
        initial={"kind": "indicator", "R": 1.0, "level": max_density(40.0, 1.0)},
    )
    return run(cfg)


@pytest.fixture(scope="session")
def nutrient_series():
    """Nutrient-coupled radial run (3D ball, far-field supply)."""
    base = GrowthLaw(a=1.0, p_M=1.0)
    nut = NutrientLaw(base, c1=1.0, c2=0.5, c_B=1.0)
    mesh = Mesh(geometry="radial", n_cells=200, L=3.0, dim=3)
    cfg = SimConfig(
        m=10.0,
        mesh=mesh,
        T=0.5,
        nutrients=nut,
        snapshot_times=tuple(np.linspace(0.0, 0.5, 6)),
        initial={"kind": "ball_constant", "R": 1.0, "c0": 0.4},
    )
    return run(cfg)


MSWEEP_CONFIG = """\
[model]
m = 5.0
law = "linear"
a = 5.0
p_M = 1.0

[mesh]
geometry = "cartesian1d"
L = 4.0
n_cells = 400

[time]
T = 0.5
snapshot_count = 6

[initial]
kind = "indicator"
R = 1.0
level = "max"

[msweep]
m_list = [5.0, 10.0, 20.0, 40.0, 80.0]
"""


@pytest.fixture(scope="session")
def msweep_outdir(tmp_path_factory):
    """Full m-sweep through the CLI with 4 workers; returns the output dir."""
    root = tmp_path_factory.mktemp("msweep")
    cfg_path = root / "sweep.toml"
    cfg_path.write_text(MSWEEP_CONFIG)
    out = root / "out"
    rc = run_experiment(
        ExperimentSpec(command="msweep", config_path=str(cfg_path), out_dir=str(out), jobs=4)
    )
    assert rc == 0
    return out


@pytest.fixture(scope="session")
def growth_run_series(barenblatt_series, mushy_series, traveling_series, nutrient_series):
    """Named scenario runs shared by the bound/barrier property suites."""
    return {
        "barenblatt": barenblatt_series,
        "mushy": mushy_series,
        "traveling": traveling_series,
        "nutrient": nutrient_series,
    }
