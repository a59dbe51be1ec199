"""Plot-spec files: TOML descriptions of which CSVs to draw and how."""

import json
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


KINDS = ("profile_pair", "time_sequence", "traveling_wave", "msweep_table", "series")


class FigsError(Exception):
    pass


@dataclass
class PlotSpec:
    kind: str
    inputs: list  # of dicts: path (dir or file), optional label
    output: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigsError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise FigsError("plot spec lists no inputs")
        for inp in self.inputs:
            if "path" not in inp:
                raise FigsError("every [[input]] needs a path")
            if not os.path.exists(inp["path"]):
                raise FigsError(f"input path does not exist: {inp['path']}")
        if not self.output:
            raise FigsError("plot spec needs an output path")


def load_plot_spec(path) -> PlotSpec:
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except OSError as e:
        raise FigsError(f"cannot read plot spec {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise FigsError(f"{path}: TOML syntax error: {e}") from e
    known = {"kind", "output", "input", "options"}
    for k in raw:
        if k not in known:
            raise FigsError(f"{path}: unknown key {k!r}")
    return PlotSpec(
        kind=raw.get("kind", ""),
        inputs=list(raw.get("input", [])),
        output=raw.get("output", ""),
        options=dict(raw.get("options", {})),
    )


def read_snapshot_csv(dirpath):
    """Parse snapshots.csv into (times, x, rho blocks, p blocks, caption).

    The caption carries the resolved configuration from run.json when
    present, for provenance."""
    path = os.path.join(dirpath, "snapshots.csv")
    if not os.path.exists(path):
        raise FigsError(f"{dirpath}: snapshots.csv not found")
    with open(path) as f:
        header = f.readline().strip().split(",")
        if header[:4] != ["t", "x", "rho", "p"]:
            raise FigsError(f"{path}: expected header t,x,rho,p[,c], got {','.join(header)}")
        data = np.loadtxt(f, delimiter=",", ndmin=2)
    ts = np.unique(data[:, 0])
    blocks = {}
    for t in ts:
        rows = data[data[:, 0] == t]
        blocks[float(t)] = (rows[:, 1], rows[:, 2], rows[:, 3])
    caption = ""
    run_json = os.path.join(dirpath, "run.json")
    if os.path.exists(run_json):
        with open(run_json) as f:
            doc = json.load(f)
        caption = (
            f"m={doc.get('m')}, {doc.get('scheme')}, "
            f"n={doc.get('mesh', {}).get('n_cells')}, "
            f"law={doc.get('growth', {}).get('kind')}"
        )
    return sorted(blocks), blocks, caption


def read_simple_csv(path, expected_header):
    if os.path.isdir(path):
        for name in ("series.csv", "profile.csv", "msweep_report.csv"):
            cand = os.path.join(path, name)
            if os.path.exists(cand):
                path = cand
                break
    if not os.path.exists(path):
        raise FigsError(f"input CSV not found: {path}")
    with open(path) as f:
        header = f.readline().strip().split(",")
        if header != expected_header:
            raise FigsError(f"{path}: expected header {','.join(expected_header)}, got {','.join(header)}")
        # genfromtxt: trailing fields may be empty (e.g. the first row of a
        # sweep report has no predecessor distance) and become nan.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            data = np.genfromtxt(f, delimiter=",", ndmin=2)
    if data.size == 0 or np.all(np.isnan(data)):
        raise FigsError(f"{path}: no data rows")
    return data
