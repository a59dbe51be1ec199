"""Deterministic matplotlib rendering of the CSV schemas.

SVG output is byte-stable: the hash salt is pinned and the date metadata is
stripped, so identical inputs re-render to identical files."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .plotspec import FigsError, PlotSpec, read_simple_csv, read_snapshot_csv

plt.rcParams["svg.hashsalt"] = "heleshaw-figs"

RHO_STYLE = {"color": "#1f77b4", "lw": 1.8}
P_STYLE = {"color": "#d62728", "lw": 1.3, "ls": "--"}
_SAVE_KW = {"metadata": {"Date": None}}


def _save(fig, output):
    out_dir = os.path.dirname(os.path.abspath(output))
    os.makedirs(out_dir, exist_ok=True)
    kw = dict(_SAVE_KW) if output.endswith(".svg") else {}
    fig.savefig(output, **kw)
    plt.close(fig)
    return output


def _peek_header(path):
    if os.path.isdir(path):
        for name in ("series.csv", "profile.csv", "msweep_report.csv"):
            cand = os.path.join(path, name)
            if os.path.exists(cand):
                path = cand
                break
    if not os.path.exists(path):
        return []
    with open(path) as f:
        return f.readline().strip().split(",")


def _panel(ax, x, rho, p, title, caption):
    ax.plot(x, rho, label=r"$\varrho$", **RHO_STYLE)
    ax.plot(x, p, label=r"$p$", **P_STYLE)
    ax.set_title(title, fontsize=10)
    ax.set_xlabel(caption if caption else "x", fontsize=7)
    ax.set_ylim(bottom=0.0)


def render_profiles(spec: PlotSpec):
    """Density/pressure profile panels.

    profile_pair: one panel per input run (final snapshot of each), for
    side-by-side stiffness comparisons. time_sequence: four panels at four
    snapshot times of a single run."""
    if spec.kind == "profile_pair":
        panels = []
        for inp in spec.inputs:
            ts, blocks, caption = read_snapshot_csv(inp["path"])
            t = ts[-1]
            x, rho, p = blocks[t]
            panels.append((inp.get("label", f"t = {t:g}"), x, rho, p, caption))
        fig, axes = plt.subplots(1, len(panels), figsize=(4.2 * len(panels), 3.4), squeeze=False)
        for ax, (title, x, rho, p, caption) in zip(axes[0], panels):
            _panel(ax, x, rho, p, title, caption)
        axes[0][0].legend(loc="upper right", fontsize=8)
    elif spec.kind == "time_sequence":
        ts, blocks, caption = read_snapshot_csv(spec.inputs[0]["path"])
        want = spec.options.get("times")
        if want is None:
            idx = np.linspace(0, len(ts) - 1, 4).round().astype(int)
            want = [ts[i] for i in sorted(set(idx))]
        sel = []
        for tw in want:
            t = min(ts, key=lambda t: abs(t - float(tw)))
            if t not in sel:
                sel.append(t)
        if not sel:
            raise FigsError("empty snapshot selection")
        fig, axes = plt.subplots(1, len(sel), figsize=(3.2 * len(sel), 3.0), squeeze=False)
        for ax, t in zip(axes[0], sel):
            x, rho, p = blocks[t]
            _panel(ax, x, rho, p, f"t = {t:g}", caption)
        axes[0][0].legend(loc="upper right", fontsize=8)
    else:
        raise FigsError(f"render_profiles cannot draw kind {spec.kind!r}")
    fig.tight_layout()
    return _save(fig, spec.output)


def render_series(spec: PlotSpec):
    """Trajectory / report plots.

    series: R(t) and speed(t) with the asymptotic-speed line.
    traveling_wave: pressure profile p(s) with the homeostatic plateau.
    msweep_table: log-scale distances to the stiff-limit reference vs m."""
    if spec.kind == "series":
        path = spec.inputs[0]["path"]
        # Two trajectory schemas share this kind: a single front (t,R,speed)
        # and a two-front state with the intermediate level q.
        if _peek_header(path) == ["t", "R", "q", "speed"]:
            data = read_simple_csv(path, ["t", "R", "q", "speed"])
            t, R, v = data[:, 0], data[:, 1], data[:, 3]
        else:
            data = read_simple_csv(path, ["t", "R", "speed"])
            t, R, v = data[:, 0], data[:, 1], data[:, 2]
        if data.shape[0] < 2:
            raise FigsError("need >= 2 points to draw a trajectory")
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.2))
        ax1.plot(t, R, **RHO_STYLE)
        ax1.set_xlabel("t")
        ax1.set_ylabel("R(t)")
        ax2.plot(t, v, **P_STYLE)
        asym = spec.options.get("asymptote")
        if asym is not None:
            ax2.axhline(float(asym), color="#555555", lw=0.8)
        ax2.set_xlabel("t")
        ax2.set_ylabel("speed")
    elif spec.kind == "traveling_wave":
        data = read_simple_csv(spec.inputs[0]["path"], ["s", "p"])
        if data.shape[0] < 2:
            raise FigsError("need >= 2 points to draw a profile")
        fig, ax = plt.subplots(figsize=(4.6, 3.2))
        ax.plot(data[:, 0], data[:, 1], **P_STYLE)
        plateau = spec.options.get("plateau")
        if plateau is not None:
            ax.axhline(float(plateau), color="#555555", lw=0.8)
        ax.set_xlabel("s")
        ax.set_ylabel("p")
        ax.set_title("wave frame pressure profile", fontsize=10)
    elif spec.kind == "msweep_table":
        data = read_simple_csv(
            spec.inputs[0]["path"],
            ["m", "l1_rho_vs_ref", "l1_p_vs_ref", "graph_residual", "compl_residual", "l1_rho_vs_prev"],
        )
        if data.shape[0] < 2:
            raise FigsError("need >= 2 points to draw convergence")
        fig, ax = plt.subplots(figsize=(4.6, 3.4))
        m = data[:, 0]
        for j, (label, style) in enumerate(
            [(r"$\|\varrho_m-\varrho_\infty\|_{L^1}$", RHO_STYLE),
             (r"$\|p_m-p_\infty\|_{L^1}$", P_STYLE)]
        ):
            ax.plot(m, data[:, 1 + j], marker="o", ms=3, **style, label=label)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("m")
        ax.legend(fontsize=8)
    else:
        raise FigsError(f"render_series cannot draw kind {spec.kind!r}")
    fig.tight_layout()
    return _save(fig, spec.output)
