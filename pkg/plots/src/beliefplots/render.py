"""File-to-file renderers for run artifacts.

Inputs are the simulator's trajectory CSV (period, group_id, consensus,
frac_policymaker, frac_stick, frac_leader) and map JSON (pieces,
breakpoints, fixed_points).  Output is SVG by default (PNG when the path
says so), rendered deterministically: same inputs, same bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "beliefplots"

TRAJECTORY_COLUMNS = ["period", "group_id", "consensus",
                      "frac_policymaker", "frac_stick", "frac_leader"]
FRACTION_SUM_TOL = 1e-6


class RenderError(ValueError):
    pass


def read_trajectory(csv_path) -> list:
    path = Path(csv_path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in TRAJECTORY_COLUMNS if c not in header]
        if missing:
            raise RenderError(f"{path.name}: missing column(s) "
                              + ", ".join(missing))
        rows = []
        for row in reader:
            rows.append({
                "period": int(row["period"]),
                "group_id": row["group_id"],
                "consensus": float(row["consensus"]),
                "fractions": (float(row["frac_policymaker"]),
                              float(row["frac_stick"]),
                              float(row["frac_leader"])),
            })
    if not rows:
        raise RenderError(f"{path.name}: no data rows")
    return rows


def _sibling_manifest_x(csv_path):
    manifest = Path(csv_path).parent / "manifest.json"
    if manifest.exists():
        try:
            x = json.loads(manifest.read_text(encoding="utf-8")).get("x")
            return float(x) if x is not None else None
        except (json.JSONDecodeError, TypeError, ValueError):
            return None
    return None


def _save(fig, out_path):
    out = Path(out_path)
    fig.savefig(out, metadata=None if out.suffix == ".png"
                else {"Date": None})
    plt.close(fig)
    return out


def render_trajectory(csv_path, out_path, width=7.0, height=4.0):
    """One consensus line per group over periods, with a horizontal guide
    at 1 - X when the sibling manifest records X."""
    rows = read_trajectory(csv_path)
    by_group = {}
    for row in rows:
        by_group.setdefault(row["group_id"], []).append(
            (row["period"], row["consensus"]))

    fig, ax = plt.subplots(figsize=(width, height))
    for gid, points in sorted(by_group.items()):
        points.sort()
        ax.plot([p for p, _ in points], [c for _, c in points],
                label=f"group {gid}", gid=f"trajectory-{gid}")
    x = _sibling_manifest_x(csv_path)
    if x is not None:
        ax.axhline(1.0 - x, linestyle="--", linewidth=0.8, color="gray",
                   gid="guide-limit", label=f"1 - X = {1 - x:g}")
    ax.set_xlabel("period")
    ax.set_ylabel("consensus")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path)


def render_polarization(csv_path, out_path, group_id=None,
                        width=7.0, height=4.0):
    """Stacked area of the decision fractions over periods for one group
    (the first group in the file unless group_id is given)."""
    rows = read_trajectory(csv_path)
    if group_id is None:
        group_id = rows[0]["group_id"]
    series = [(r["period"], r["fractions"]) for r in rows
              if r["group_id"] == str(group_id)]
    if not series:
        raise RenderError(f"no rows for group {group_id}")
    series.sort()
    for period, fracs in series:
        total = sum(fracs)
        if abs(total - 1.0) > FRACTION_SUM_TOL:
            raise RenderError(
                f"period {period}: fractions sum to {total!r}, not 1")

    periods = [p for p, _ in series]
    stacks = list(zip(*[f for _, f in series]))
    fig, ax = plt.subplots(figsize=(width, height))
    ax.stackplot(periods, *stacks,
                 labels=["policymaker", "stick", "leader"],
                 colors=["#4477aa", "#dddddd", "#cc4444"])
    ax.set_xlabel("period")
    ax.set_ylabel("population share")
    ax.set_ylim(0, 1)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path)


def render_cobweb(map_json_path, out_path, c0=0.0, steps=50,
                  width=5.5, height=5.5):
    """The piecewise map, the diagonal, every reported fixed point, and the
    cobweb path of the first `steps` iterations from c0."""
    if not (0.0 <= c0 <= 1.0):
        raise RenderError(f"c0={c0} outside [0, 1]")
    payload = json.loads(Path(map_json_path).read_text(encoding="utf-8"))
    pieces = payload["pieces"]

    def evaluate(c):
        for piece in pieces:
            if (c <= piece["hi"] and (c > piece["lo"] or piece["lo"] == 0.0)):
                return piece["slope"] * c + piece["intercept"]
        return pieces[-1]["slope"] * c + pieces[-1]["intercept"]

    fig, ax = plt.subplots(figsize=(width, height))
    ax.plot([0, 1], [0, 1], color="black", linewidth=0.8, gid="diagonal")
    for i, piece in enumerate(pieces):
        lo, hi = piece["lo"], piece["hi"]
        ax.plot([lo, hi],
                [piece["slope"] * lo + piece["intercept"],
                 piece["slope"] * hi + piece["intercept"]],
                color="#2255aa", linewidth=1.6, gid=f"piece-{i}")
    for i, fp in enumerate(payload.get("fixed_points", [])):
        if fp.get("c") is None:
            continue  # whole-piece (identity) entries have no single marker
        ax.plot([fp["c"]], [fp["c"]], marker="o", markersize=7,
                markerfacecolor="none", markeredgecolor="#cc4444",
                gid=f"fixed-point-{i}")
    if steps > 0:
        xs, ys = [c0], [0.0]
        c = c0
        for _ in range(steps):
            nxt = evaluate(c)
            xs.extend([c, nxt])
            ys.extend([nxt, nxt])
            c = nxt
        ax.plot(xs, ys, color="#444444", linewidth=0.7, gid="cobweb-path")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("consensus this period")
    ax.set_ylabel("consensus next period")
    fig.tight_layout()
    return _save(fig, out_path)
