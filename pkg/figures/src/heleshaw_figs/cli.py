"""Command-line entry point: render figures from plot-spec TOML files.

Exit codes: 0 success, 1 bad spec or input data.
"""

import argparse
import sys

from .plotspec import FigsError, load_plot_spec
from .render import render_profiles, render_series

PROFILE_KINDS = ("profile_pair", "time_sequence")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="heleshaw-figs",
        description="Render figures from simulation CSV output, driven by plot-spec TOML files.",
    )
    parser.add_argument("specs", nargs="+", metavar="SPEC.toml", help="plot-spec file(s) to render")
    args = parser.parse_args(argv)

    status = 0
    for spec_path in args.specs:
        try:
            spec = load_plot_spec(spec_path)
            renderer = render_profiles if spec.kind in PROFILE_KINDS else render_series
            out = renderer(spec)
            print(f"{spec_path}: wrote {out}")
        except FigsError as e:
            print(f"{spec_path}: error: {e}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
