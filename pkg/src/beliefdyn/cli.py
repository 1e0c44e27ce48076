"""Batch front door: JSON scenario configs, subcommands, seeded sweeps,
deterministic artifact emission.

Exit codes: 0 success, 2 config parse/schema failure, 3 validation failure,
4 numerical failure or unwritable output.  Reruns with identical inputs
produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import (DICTATOR, DIVERSE, DistributionSpec, ModelParams,
                   Population, Scenario, build_credibility_matrix,
                   generate_population, validate_scenario, Agent, SocialGroup,
                   CredibilityMatrix)
from .consensus import NumericalFailure, stationary_weights
from .analysis import (MeanFieldDiverged, iterate_meanfield, max_entropy,
                       sampling_probabilities, shannon_entropy)
from .leader import (GroupProfile, equal_size_rule_reference,
                     optimal_target_set, verify_local_optimality)
from .pwlmap import analyze_dynamics, build_map, find_fixed_points, map_to_dict
from .simulate import run

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

COMMANDS = ("validate", "simulate", "meanfield", "entropy", "leader-opt",
            "map-analyze", "sweep")


class ConfigError(Exception):
    """Schema violation; maps to exit code 2."""


class ValidationFailure(Exception):
    """Domain validation violation; maps to exit code 3."""


_SCHEMA = {
    "command": str,
    "x": (int, float),
    "comm_cost": (int, float),
    "regime": str,
    "horizon": int,
    "seed": int,
    "comm_tolerance": (int, float),
    "conv_tolerance": (int, float),
    "record_decisions": bool,
    "c": (int, float),
    "c0": (int, float),
    "max_iter": int,
    "tol": (int, float),
    "population": dict,
    "matrix": dict,
    "profiles": list,
    "profiles_csv": str,
    "k_total": int,
    "method": str,
    "sweep": dict,
}
_POPULATION_SCHEMA = {
    "n": int,
    "k_groups": int,
    "sigma": dict,
    "phi": dict,
    "agents": list,
    "group_sizes": list,
    "scapegoat_size": int,
}
_SPEC_SCHEMA = {"kind": str, "value": (int, float), "values": list}
_MATRIX_SCHEMA = {"generator": str, "explicit": list, "self_weight_floor": (int, float)}
_SWEEP_SCHEMA = {"command": str, "x": list, "n": list, "repeats": int}


def _check_fields(obj: dict, schema: dict, path: str):
    for key, value in obj.items():
        if key not in schema:
            raise ConfigError(f"unknown field {path}{key!r}")
        expected = schema[key]
        wrong_type = not isinstance(value, expected)
        bool_where_number = isinstance(value, bool) and expected is not bool
        if wrong_type or bool_where_number:
            names = (expected.__name__ if isinstance(expected, type)
                     else "/".join(t.__name__ for t in expected))
            raise ConfigError(f"field {path}{key!r}: expected {names}, "
                              f"got {type(value).__name__}")


def validate_config(cfg: dict):
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be a JSON object")
    _check_fields(cfg, _SCHEMA, "")
    if "command" in cfg and cfg["command"] not in COMMANDS:
        raise ConfigError(f"unknown command {cfg['command']!r}")
    if "population" in cfg:
        _check_fields(cfg["population"], _POPULATION_SCHEMA, "population.")
        for spec_key in ("sigma", "phi"):
            if spec_key in cfg["population"]:
                _check_fields(cfg["population"][spec_key], _SPEC_SCHEMA,
                              f"population.{spec_key}.")
    if "matrix" in cfg:
        _check_fields(cfg["matrix"], _MATRIX_SCHEMA, "matrix.")
    if "sweep" in cfg:
        _check_fields(cfg["sweep"], _SWEEP_SCHEMA, "sweep.")


def _dist_spec(node: dict) -> DistributionSpec:
    kind = node.get("kind", "iid-uniform-open-unit")
    if kind in ("iid-uniform-open-unit", "uniform"):
        return DistributionSpec.uniform()
    if kind == "constant":
        return DistributionSpec.constant(node["value"])
    if kind in ("explicit-list", "explicit"):
        return DistributionSpec.explicit(node["values"])
    raise ConfigError(f"unknown distribution kind {kind!r}")


def build_population(cfg: dict) -> Population:
    pop_cfg = cfg.get("population")
    if pop_cfg is None:
        raise ConfigError("missing 'population'")
    if "agents" in pop_cfg:
        pairs = pop_cfg["agents"]
        sizes = pop_cfg.get("group_sizes", [len(pairs)])
        if sum(sizes) != len(pairs):
            raise ConfigError("population.group_sizes must sum to len(agents)")
        agents, groups, start = [], [], 0
        for gi, size in enumerate(sizes):
            members = tuple(range(start, start + size))
            groups.append(SocialGroup(id=gi, members=members))
            for aid in members:
                s, p = pairs[aid]
                agents.append(Agent(id=aid, group=gi, sigma=float(s),
                                    phi_leader=float(p)))
            start += size
        return Population(agents=tuple(agents), groups=tuple(groups))
    return generate_population(
        n=pop_cfg["n"], k_groups=pop_cfg.get("k_groups", 1),
        sigma_spec=_dist_spec(pop_cfg.get("sigma", {})),
        phi_spec=_dist_spec(pop_cfg.get("phi", {})),
        seed=cfg.get("seed", 0),
        group_sizes=pop_cfg.get("group_sizes"),
        scapegoat_size=pop_cfg.get("scapegoat_size", 0))


def build_scenario(cfg: dict) -> Scenario:
    population = build_population(cfg)
    mat_cfg = cfg.get("matrix", {"generator": "equal-weights"})
    if "explicit" in mat_cfg:
        matrix = build_credibility_matrix(
            population.groups, "explicit",
            explicit=np.array(mat_cfg["explicit"], dtype=float))
    else:
        matrix = build_credibility_matrix(
            population.groups, mat_cfg.get("generator", "equal-weights"),
            seed=cfg.get("seed", 0) + 1,
            self_weight_floor=mat_cfg.get("self_weight_floor", 0.05))
    regime = cfg.get("regime", DIVERSE)
    if regime not in (DICTATOR, DIVERSE):
        raise ConfigError(f"unknown regime {regime!r}")
    return Scenario(
        population=population,
        params=ModelParams(chi=float(cfg["x"]),
                           comm_cost=float(cfg.get("comm_cost", 0.0))),
        matrix=matrix,
        regime=regime,
        horizon=cfg.get("horizon", 200),
        comm_tolerance=float(cfg.get("comm_tolerance", 1e-9)),
        seed=cfg.get("seed", 0))


def scenario_to_config(scenario: Scenario, command: str = "simulate") -> dict:
    """Serialise a Scenario back into the config schema (round-trips
    through build_scenario up to the regeneratable parts)."""
    pop = scenario.population
    cfg = {
        "command": command,
        "x": scenario.params.chi,
        "comm_cost": scenario.params.comm_cost,
        "regime": scenario.regime,
        "horizon": scenario.horizon,
        "comm_tolerance": scenario.comm_tolerance,
        "seed": scenario.seed,
        "population": {
            "agents": [[a.sigma, a.phi_leader] for a in pop.agents],
            "group_sizes": [g.size for g in pop.groups],
        },
    }
    if scenario.matrix.is_uniform:
        cfg["matrix"] = {"generator": "equal-weights"}
    else:
        cfg["matrix"] = {"explicit": scenario.matrix.dense.tolist()}
    return cfg


def format_sig(value: float) -> str:
    return f"{value:.12g}"


def write_trajectory_csv(rows, path: Path):
    """rows: iterables of (period, group_id, consensus, fP, fS, fL)."""
    lines = ["period,group_id,consensus,frac_policymaker,frac_stick,frac_leader"]
    for period, gid, consensus, f_pol, f_stick, f_lead in rows:
        lines.append(",".join([
            str(period), str(gid), format_sig(consensus),
            format_sig(f_pol), format_sig(f_stick), format_sig(f_lead)]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_json(payload: dict, path: Path):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8", newline="\n")


def write_manifest(out_dir: Path, command: str, cfg: dict, files: list,
                   argv=None):
    digest = hashlib.sha256(
        json.dumps(cfg, sort_keys=True).encode("utf-8")).hexdigest()
    manifest = {
        "command": command,
        "config_sha256": digest,
        "seed": cfg.get("seed", 0),
        "x": cfg.get("x"),
        "package_version": __version__,
        "argv": list(argv) if argv else [],
        "files": sorted(files),
    }
    write_json(manifest, out_dir / "manifest.json")


def _meanfield_fractions(c_prev: float, x: float):
    """Closed-form decision fractions under iid uniform preferences."""
    if c_prev <= 0.5:
        f_pol = min(max(2 * x * c_prev, 0.0), 1.0)
        f_lead = min(max(1.0 - 2 * x * (1.0 - c_prev), 0.0), 1.0)
        return f_pol, 1.0 - f_pol - f_lead, f_lead
    f_pol = min(max(x, 0.0), 1.0)
    return f_pol, 0.0, 1.0 - f_pol


def cmd_validate(cfg, out_dir, argv):
    scenario = build_scenario(cfg)
    report = validate_scenario(scenario)
    if not report.ok:
        raise ValidationFailure("; ".join(report.violations))
    print("ok")
    return []


def cmd_simulate(cfg, out_dir, argv):
    scenario = build_scenario(cfg)
    report = validate_scenario(scenario)
    if not report.ok:
        raise ValidationFailure("; ".join(report.violations))
    traj = run(scenario,
               conv_tol=float(cfg.get("conv_tolerance", 1e-9)),
               record_decisions=bool(cfg.get("record_decisions", False)))
    rows = []
    for rec in traj.records:
        for gi, group in enumerate(scenario.population.groups):
            f_pol, f_stick, f_lead = rec.fractions[gi]
            rows.append((rec.period, group.id, rec.group_consensus[gi],
                         f_pol, f_stick, f_lead))
    write_trajectory_csv(rows, out_dir / "trajectory.csv")
    return ["trajectory.csv"]


def cmd_meanfield(cfg, out_dir, argv):
    x = float(cfg["x"])
    try:
        limit, traj = iterate_meanfield(
            c0=float(cfg.get("c0", 0.0)), x=x,
            tol=float(cfg.get("tol", 1e-12)),
            max_iter=cfg.get("max_iter", 500))
    except MeanFieldDiverged as exc:
        raise NumericalFailure(str(exc)) from exc
    rows = []
    prev = traj[0]
    for period, c in enumerate(traj[1:]):
        f_pol, f_stick, f_lead = _meanfield_fractions(prev, x)
        rows.append((period, "meanfield", c, f_pol, f_stick, f_lead))
        prev = c
    write_trajectory_csv(rows, out_dir / "trajectory.csv")
    write_json({"limit": limit, "iterations": len(traj) - 1, "x": x},
               out_dir / "report.json")
    return ["trajectory.csv", "report.json"]


def cmd_entropy(cfg, out_dir, argv):
    population = build_population(cfg)
    c = float(cfg.get("c", 0.0))
    x = float(cfg["x"])
    p = sampling_probabilities(list(population.agents), c, x)
    payload = {
        "n": population.n, "c": c, "x": x,
        "entropy": shannon_entropy(p) if p.sum() > 0 else None,
        "max_entropy": max_entropy(population.n),
        "probabilities": [float(v) for v in p],
    }
    write_json(payload, out_dir / "report.json")
    return ["report.json"]


def load_profiles_csv(path) -> list:
    """Group profiles from a CSV with columns id, size, phi_max."""
    import csv as _csv
    with open(path, encoding="utf-8", newline="") as fh:
        reader = _csv.DictReader(fh)
        missing = [c for c in ("id", "size", "phi_max")
                   if c not in (reader.fieldnames or [])]
        if missing:
            raise ValidationFailure(
                f"profiles CSV missing column(s) {', '.join(missing)}")
        return [GroupProfile(id=int(r["id"]), size=int(r["size"]),
                             phi_max=float(r["phi_max"])) for r in reader]


def cmd_leader_opt(cfg, out_dir, argv):
    if "profiles_csv" in cfg:
        profiles = load_profiles_csv(cfg["profiles_csv"])
    elif "profiles" in cfg:
        profiles = []
        for row in cfg["profiles"]:
            if not isinstance(row, dict) or set(row) - {"id", "size", "phi_max"}:
                raise ConfigError(f"bad profile entry {row!r}")
            profiles.append(GroupProfile(id=int(row["id"]),
                                         size=int(row["size"]),
                                         phi_max=float(row["phi_max"])))
    else:
        raise ConfigError("leader-opt needs 'profiles' or 'profiles_csv'")
    params = ModelParams(chi=float(cfg.get("x", 0.4)),
                         comm_cost=float(cfg.get("comm_cost", 0.0)))
    k_total = cfg.get("k_total")
    best, value, alternates = optimal_target_set(
        profiles, params, cfg.get("method", "brute-force"), k_total)
    opt_report = verify_local_optimality(best, profiles, k_total)
    diag = equal_size_rule_reference(profiles, params, k_total)
    write_json({
        "best": list(best.groups),
        "best_total_size": best.total_size(profiles),
        "return": value,
        "alternates": [list(t.groups) for t in alternates],
        "local_optimality_ok": opt_report.ok,
        "local_optimality_violations": opt_report.violations,
        "equal_size_rule": {
            "set": list(diag["heuristic_set"].groups),
            "return": diag["heuristic_return"],
            "agrees_with_optimum": diag["agrees_with_optimum"],
        },
    }, out_dir / "report.json")
    return ["report.json"]


def cmd_map_analyze(cfg, out_dir, argv):
    scenario = build_scenario(cfg)
    report = validate_scenario(scenario)
    if not report.ok:
        raise ValidationFailure("; ".join(report.violations))
    majority = [g for g in scenario.population.groups if not g.is_scapegoat]
    if len(majority) != 1:
        raise ValidationFailure("map-analyze needs a single majority group")
    weights = stationary_weights(scenario.matrix)
    agents = [scenario.population.agents[i] for i in majority[0].members]
    w = weights.values[list(majority[0].members)]
    pwl = build_map(agents, w, scenario.params.chi)
    fps = find_fixed_points(pwl)
    dyn = analyze_dynamics(pwl, c0=float(cfg.get("c0", 0.0)),
                           max_iter=cfg.get("max_iter", 10_000),
                           tol=float(cfg.get("tol", 1e-9)))
    payload = map_to_dict(pwl, fps)
    payload["dynamics"] = {
        "outcome": dyn.outcome,
        "fixed_point": dyn.fixed_point,
        "piece_index": dyn.piece_index,
        "orbit": None if dyn.orbit is None else [float(v) for v in dyn.orbit],
        "period_length": dyn.period_length,
        "labels": None if dyn.labels is None else list(dyn.labels),
        "iterations": dyn.iterations,
    }
    write_json(payload, out_dir / "map.json")
    return ["map.json"]


def cmd_sweep(cfg, out_dir, argv):
    sweep = cfg.get("sweep")
    if not sweep:
        raise ConfigError("sweep command needs a 'sweep' object")
    inner_command = sweep.get("command", "simulate")
    if inner_command not in ("simulate", "meanfield"):
        raise ConfigError(f"sweep cannot dispatch to {inner_command!r}")
    xs = sweep.get("x", [cfg.get("x")])
    ns = sweep.get("n", [None])
    repeats = sweep.get("repeats", 1)
    master_seed = cfg.get("seed", 0)
    files = []
    cell = 0
    for x in xs:
        for n in ns:
            for _ in range(repeats):
                cell_cfg = copy.deepcopy(cfg)
                cell_cfg.pop("sweep", None)
                cell_cfg["command"] = inner_command
                cell_cfg["x"] = x
                if n is not None:
                    cell_cfg.setdefault("population", {})["n"] = n
                # derived, not drawn: cells stay independent and reproducible
                cell_cfg["seed"] = master_seed + cell
                cell_dir = out_dir / f"cell_{cell:03d}"
                cell_dir.mkdir(parents=True, exist_ok=True)
                handler = _HANDLERS[inner_command]
                produced = handler(cell_cfg, cell_dir, argv)
                write_manifest(cell_dir, inner_command, cell_cfg, produced, argv)
                files.append(f"cell_{cell:03d}/manifest.json")
                cell += 1
    return files


_HANDLERS = {
    "validate": cmd_validate,
    "simulate": cmd_simulate,
    "meanfield": cmd_meanfield,
    "entropy": cmd_entropy,
    "leader-opt": cmd_leader_opt,
    "map-analyze": cmd_map_analyze,
    "sweep": cmd_sweep,
}


def apply_override(cfg: dict, assignment: str):
    if "=" not in assignment:
        raise ConfigError(f"--set needs key=value, got {assignment!r}")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set path {key!r} crosses a non-object")
    node[parts[-1]] = value


def run_config(config_path, out_dir, overrides=(), seed=None, command=None,
               argv=None) -> int:
    """Load, validate, dispatch; returns the process exit code."""
    try:
        text = Path(config_path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"error: config parse failure at line {exc.lineno} column "
              f"{exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_PARSE
    try:
        for assignment in overrides:
            apply_override(cfg, assignment)
        if seed is not None:
            cfg["seed"] = seed
        validate_config(cfg)
        effective = command or cfg.get("command")
        if effective is None:
            raise ConfigError("no command: pass a subcommand or set 'command'")
        if (command and command != "validate" and "command" in cfg
                and cfg["command"] != command):
            raise ConfigError(
                f"subcommand {command!r} conflicts with config command "
                f"{cfg['command']!r}")
        out = Path(out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            print(f"error: cannot create output dir: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        files = _HANDLERS[effective](cfg, out, argv)
        if effective != "sweep":
            write_manifest(out, effective, cfg, files, argv)
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationFailure, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalFailure, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="beliefdyn",
        description="Simulate and analyse utilitarian-belief dynamics on "
                    "group-structured networks.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="dotted-path config override")
    args = parser.parse_args(argv)
    return run_config(args.config, args.out, overrides=args.overrides,
                      seed=args.seed, command=args.command,
                      argv=argv if argv is not None else sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
