"""Session fixtures: small heleshaw-lab runs whose CSV output the figure
renderers consume."""

import pytest

from heleshaw_lab.cli import ExperimentSpec, run_experiment

SIM = """\
[model]
m = 5.0
law = "linear"
a = 5.0
p_M = 1.0

[mesh]
geometry = "cartesian1d"
L = 4.0
n_cells = 100

[time]
T = 0.05
snapshot_count = 4

[initial]
kind = "indicator"
R = 1.0
level = "max"
"""

SPHEROID = SIM + """
[sharp]
R0 = 1.0
N = 1
T = 1.0
dt = 0.05
"""

WAVE = SIM + """
[sharp]
s_min = -5.0
n = 2000
"""

MSWEEP_REPORT = """\
m,l1_rho_vs_ref,l1_p_vs_ref,graph_residual,compl_residual,l1_rho_vs_prev
5,0.2,0.3,0.1,0.5,
10,0.1,0.15,0.05,0.25,0.12
20,0.05,0.08,0.02,0.12,0.06
"""


@pytest.fixture(scope="session")
def data_dirs(tmp_path_factory):
    root = tmp_path_factory.mktemp("figdata")

    def experiment(command, text, name):
        cfg = root / f"{name}.toml"
        cfg.write_text(text)
        out = root / name
        rc = run_experiment(ExperimentSpec(command=command, config_path=str(cfg), out_dir=str(out)))
        assert rc == 0
        return out

    msweep = root / "msweep"
    msweep.mkdir()
    (msweep / "msweep_report.csv").write_text(MSWEEP_REPORT)
    return {
        "sim": experiment("simulate", SIM, "sim"),
        "spheroid": experiment("spheroid", SPHEROID, "spheroid"),
        "wave": experiment("travelingwave", WAVE, "wave"),
        "msweep": msweep,
    }
