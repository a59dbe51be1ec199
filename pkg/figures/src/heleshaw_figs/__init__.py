"""Figure scripts: turn heleshaw-lab CSV outputs into publication-style
plots. Read-only consumers; rendering is byte-stable for fixed inputs."""

from .plotspec import FigsError, PlotSpec, load_plot_spec
from .render import render_profiles, render_series

__all__ = ["FigsError", "PlotSpec", "load_plot_spec", "render_profiles", "render_series"]
