"""Batch command-line front-end.

Usage: noslip SUBCOMMAND CONFIG.json [--set KEY=VALUE ...]

The config is a single JSON file; ``--set`` overrides scalar keys using
dotted paths (e.g. ``--set table.radius=0.3``).  Given identical config and
seed, all artifacts are byte-identical.  The environment variable
NOSLIP_WORKERS sets the worker-pool size for portrait orbits and sweeps
(default 1; results are independent of the worker count).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import stability, tables, verification, wedge
from .collision import mass_params
from .dynamics import (billiard_map, detect_period, period2_state,
                       random_state, state_from_coords, trajectory,
                       velocity_coords)
from .geometry import frame_at
from .svg import Figure

__all__ = ["main"]


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


class ConfigError(Exception):
    pass


def _load_config(path: str, overrides: list[str]) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}")
    except json.JSONDecodeError as err:
        raise ConfigError(
            f"config parse error at line {err.lineno} column {err.colno}: "
            f"{err.msg}")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not KEY=VALUE")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path '{key}' crosses a scalar")
        node[parts[-1]] = value
    return cfg


def _require(cfg: dict, field: str, section: str):
    if field not in cfg:
        raise ConfigError(f"missing field '{field}' in section '{section}'")
    return cfg[field]


def build_table(spec: dict):
    kind = _require(spec, "kind", "table")
    extra = {k: v for k, v in spec.items() if k != "kind"}
    try:
        if kind == "strip":
            return tables.strip(**extra)
        if kind == "wedge":
            return tables.wedge(**extra)
        if kind == "polygon":
            return tables.polygon([tuple(v) for v in extra.pop("vertices")])
        if kind == "regular_polygon":
            return tables.regular_polygon(**extra)
        if kind == "sinai":
            if "periods" in extra:
                extra["periods"] = tuple(extra["periods"])
            return tables.sinai(**extra)
        if kind == "two_arc_lens":
            return tables.two_arc_lens(**extra)
    except TypeError as err:
        raise ConfigError(f"table '{kind}': {err}")
    except ValueError as err:
        raise ConfigError(f"table '{kind}': {err}")
    raise ConfigError(f"unknown table kind '{kind}'")


def build_mass(spec: dict):
    try:
        return mass_params(**spec)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"mass spec: {err}")


def _initial_states(table, cfg: dict, seed: int, count: int):
    initial = cfg.get("initial")
    if initial is not None:
        return [state_from_coords(table, int(r["piece_index"]), float(r["s"]),
                                  float(r["u1"]), float(r["u2"]))
                for r in initial]
    rng = np.random.default_rng(seed)
    return [random_state(table, rng) for _ in range(count)]


def _write_csv(path: str, header: list[str], rows: list[list]):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                x if isinstance(x, str) else
                str(x) if isinstance(x, (int, np.integer)) else _fmt(x)
                for x in row) + "\n")


def _write_json(path: str, data):
    with open(path, "w", newline="\n") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("NOSLIP_WORKERS", "1")))
    except ValueError:
        return 1


_POOL_CTX: dict = {}


def _pool_init(cfg):
    _POOL_CTX["table"] = build_table(cfg["table"])
    _POOL_CTX["mass"] = build_mass(cfg["mass"])
    _POOL_CTX["cfg"] = cfg


def _portrait_orbit(args):
    orbit_id, seed, collisions = args
    table = _POOL_CTX["table"]
    mass = _POOL_CTX["mass"]
    rng = np.random.default_rng(seed)
    xi = random_state(table, rng)
    rec = trajectory(table, mass, xi, collisions)
    return [(orbit_id, *velocity_coords(st)) for st in rec.states]


def _map_jobs(cfg, func, jobs):
    if _workers() > 1:
        with ProcessPoolExecutor(max_workers=_workers(),
                                 initializer=_pool_init,
                                 initargs=(cfg,)) as ex:
            return list(ex.map(func, jobs))
    _pool_init(cfg)
    return [func(j) for j in jobs]


def cmd_simulate(cfg: dict) -> int:
    table = build_table(_require(cfg, "table", "config"))
    mass = build_mass(_require(cfg, "mass", "config"))
    sub = _require(cfg, "simulate", "config")
    collisions = int(_require(sub, "collisions", "simulate"))
    seed = int(cfg.get("seed", 0))
    states = _initial_states(table, sub, seed, int(sub.get("count", 1)))
    rows = []
    periods = []
    for xi in states:
        rec = trajectory(table, mass, xi, collisions)
        for k, st in enumerate(rec.states):
            term = rec.termination if k == len(rec.states) - 1 else ""
            ft = rec.flight_times[k - 1] if k > 0 else 0.0
            u1, u2 = velocity_coords(st)
            rows.append([k, st.loc.piece_index, st.loc.s,
                         st.loc.position[0], st.loc.position[1],
                         u1, u2, st.v[0], st.v[1], st.v[2], ft, term])
        if sub.get("report_period") and rec.termination == "completed":
            periods.append(detect_period(table, rec,
                                         tol=float(sub.get("period_tol", 1e-6))))
    _write_csv(sub.get("output", "trajectory.csv"),
               ["step", "piece_index", "s", "pos_x", "pos_y",
                "u1", "u2", "v_x", "v_y", "v_spin", "flight_time",
                "termination"], rows)
    if sub.get("report_period"):
        _write_json(sub.get("period_output", "periods.json"),
                    {"periods": periods})
    return 0


def cmd_portrait(cfg: dict) -> int:
    sub = _require(cfg, "portrait", "config")
    orbits = int(sub.get("orbits", 50))
    collisions = int(_require(sub, "collisions", "portrait"))
    seed = int(cfg.get("seed", 0))
    jobs = [(i, seed + i, collisions) for i in range(orbits)]
    chunks = _map_jobs(cfg, _portrait_orbit, jobs)
    rows = [[u1, u2, oid] for chunk in chunks for (oid, u1, u2) in chunk]
    _write_csv(sub.get("csv", "portrait.csv"), ["u1", "u2", "orbit_id"], rows)
    fig = Figure(xlim=(-1.05, 1.05), ylim=(-1.05, 1.05))
    fig.circle_outline((0.0, 0.0), 1.0)
    fig.scatter([(r[0], r[1]) for r in rows], radius=0.8)
    fig.write(sub.get("svg", "portrait.svg"))
    return 0


def cmd_stability(cfg: dict) -> int:
    mass = build_mass(_require(cfg, "mass", "config"))
    sub = _require(cfg, "stability", "config")
    phi = float(sub.get("phi", 0.0))
    if "radius" in sub:
        radius = float(sub["radius"])
        d_bar = 1.0 - 2.0 * radius * math.cos(phi)
        kq = kqt = 1.0 / radius
    else:
        d_bar = float(_require(sub, "d_bar", "stability"))
        kq = float(sub.get("kappa_q", 0.0))
        kqt = float(sub.get("kappa_qt", kq))
    report = stability.period2_report(mass, phi, d_bar, kq, kqt)
    _write_json(sub.get("output", "stability.json"), report.to_json_dict())
    return 0


def cmd_wedge(cfg: dict) -> int:
    mass = build_mass(_require(cfg, "mass", "config"))
    sub = _require(cfg, "wedge", "config")
    rows = []
    for entry in _require(sub, "pairs", "wedge"):
        p, q, branch = int(entry[0]), int(entry[1]), str(entry[2])
        try:
            phi = wedge.phi_for_period(mass, p, q, branch)
        except Exception:
            continue
        wp = wedge.WedgeParams(phi=phi, mass=mass)
        rows.append([p, q, branch, phi, wedge.rotation_angle(wp), 2 * q])
    _write_csv(sub.get("output", "wedge_catalog.csv"),
               ["p", "q", "branch", "phi", "theta", "period"], rows)
    return 0


def cmd_sweep(cfg: dict) -> int:
    mass = build_mass(_require(cfg, "mass", "config"))
    sub = _require(cfg, "sweep", "config")
    phi = float(sub.get("phi", 0.0))
    radii = [float(r) for r in _require(sub, "radii", "sweep")]
    rows = []
    for radius in radii:
        rep = stability.period2_report(
            mass, phi, 1.0 - 2.0 * radius * math.cos(phi),
            1.0 / radius, 1.0 / radius)
        rows.append([radius, rep.trace_T2, rep.classification])
    _write_csv(sub.get("output", "sweep.csv"),
               ["radius", "trace", "classification"], rows)
    summary = {"critical_radius": stability.sinai_critical_radius(mass, phi)}
    if sub.get("bisect"):
        lo, hi = min(radii), max(radii)

        def trace_at(r):
            return stability.trace_T2(mass, phi, 1.0 - 2.0 * r * math.cos(phi),
                                      1.0 / r, 1.0 / r)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if (trace_at(mid) - 4.0) * (trace_at(lo) - 4.0) > 0:
                lo = mid
            else:
                hi = mid
        summary["bisection_radius"] = 0.5 * (lo + hi)
    _write_json(sub.get("summary", "sweep_summary.json"), summary)
    return 0


def cmd_verify(cfg: dict) -> int:
    table = build_table(_require(cfg, "table", "config"))
    mass = build_mass(_require(cfg, "mass", "config"))
    sub = cfg.get("verify", {})
    seed = int(cfg.get("seed", 0))
    samples = int(sub.get("samples", 200))
    reports = [
        verification.check_reversibility(
            table, mass, n_samples=samples,
            tol=float(sub.get("reversibility_tol", 1e-9)), seed=seed),
        verification.check_measure_invariance(
            table, mass, n_samples=samples,
            tol=float(sub.get("measure_tol", 1e-5)), seed=seed + 1),
    ]
    p2 = sub.get("period2")
    if p2 is not None:
        loc_a = frame_at(table, int(p2["piece_a"]), float(p2["s_a"]))
        loc_b = frame_at(table, int(p2["piece_b"]), float(p2["s_b"]))
        chord = p2.get("chord")
        xi = period2_state(mass, loc_a, loc_b, chord=chord)
        jac, _ = stability.dT_along_orbit(table, mass, xi, 2)
        reports.append(verification.check_eigen_structure(
            jac, tol=float(sub.get("eigen_tol", 1e-8))))
        rec = trajectory(table, mass, xi, int(sub.get("energy_collisions", 1000)))
        reports.append(verification.check_energy(
            rec, tol=float(sub.get("energy_tol", 1e-12))))
    else:
        rng = np.random.default_rng(seed + 2)
        rec = trajectory(table, mass, random_state(table, rng),
                         int(sub.get("energy_collisions", 1000)))
        reports.append(verification.check_energy(
            rec, tol=float(sub.get("energy_tol", 1e-12))))
    _write_json(sub.get("output", "verify.json"),
                [r.to_json_dict() for r in reports])
    return 0 if all(r.passed for r in reports) else 1


_COMMANDS = {
    "simulate": cmd_simulate,
    "portrait": cmd_portrait,
    "stability": cmd_stability,
    "wedge": cmd_wedge,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="noslip", description="no-slip billiard batch runner")
    parser.add_argument("subcommand", choices=sorted(_COMMANDS))
    parser.add_argument("config", help="path to JSON config file")
    parser.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="KEY=VALUE",
                        help="override a scalar config key (dotted path)")
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config, args.overrides)
        return _COMMANDS[args.subcommand](cfg)
    except ConfigError as err:
        print(json.dumps({"error": "config", "message": str(err)}),
              file=sys.stderr)
        return 2
    except Exception as err:
        print(json.dumps({"error": type(err).__name__, "message": str(err)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
