"""Console entries: plot-trajectory, plot-polarization, plot-cobweb."""

from __future__ import annotations

import argparse
import sys

from .render import RenderError, render_cobweb, render_polarization, \
    render_trajectory


def _run(fn, **kwargs) -> int:
    try:
        out = fn(**kwargs)
    except (RenderError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


def main_trajectory(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description="Consensus trajectory per group from a run CSV.")
    ap.add_argument("--in", dest="csv_path", required=True)
    ap.add_argument("--out", dest="out_path", required=True)
    args = ap.parse_args(argv)
    return _run(render_trajectory, csv_path=args.csv_path,
                out_path=args.out_path)


def main_polarization(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description="Stacked decision-fraction areas from a run CSV.")
    ap.add_argument("--in", dest="csv_path", required=True)
    ap.add_argument("--out", dest="out_path", required=True)
    ap.add_argument("--group", default=None)
    args = ap.parse_args(argv)
    return _run(render_polarization, csv_path=args.csv_path,
                out_path=args.out_path, group_id=args.group)


def main_cobweb(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description="Cobweb diagram of a piecewise-linear consensus map.")
    ap.add_argument("--in", dest="map_path", required=True)
    ap.add_argument("--out", dest="out_path", required=True)
    ap.add_argument("--c0", type=float, default=0.0)
    ap.add_argument("--steps", type=int, default=50)
    args = ap.parse_args(argv)
    return _run(render_cobweb, map_json_path=args.map_path,
                out_path=args.out_path, c0=args.c0, steps=args.steps)


if __name__ == "__main__":
    sys.exit(main_trajectory())
