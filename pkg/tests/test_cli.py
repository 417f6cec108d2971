import csv
import json
import math

import numpy as np
import pytest

from noslip import tables
from noslip.cli import main
from noslip.collision import mass_params
from noslip.dynamics import State, billiard_map, velocity_coords
from noslip.geometry import frame_at

UNIFORM_GAMMA = 1.0 / math.sqrt(2.0)


def _write_cfg(path, cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


def test_simulate_csv_roundtrip(tmp_path):
    out = tmp_path / "traj.csv"
    cfg = _write_cfg(tmp_path / "c.json", {
        "seed": 3,
        "table": {"kind": "sinai", "radius": 0.3},
        "mass": {"gamma": UNIFORM_GAMMA},
        "simulate": {"count": 1, "collisions": 30, "output": str(out)},
    })
    assert main(["simulate", cfg]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 31
    assert rows[-1]["termination"] == "completed"
    table = tables.sinai(0.3)
    mass = mass_params(gamma=UNIFORM_GAMMA)
    # continuation from any re-ingested row reproduces the next row exactly
    for k in (0, 10, 25):
        r, r_next = rows[k], rows[k + 1]
        loc = frame_at(table, int(r["piece_index"]), float(r["s"]))
        v = np.array([float(r["v_x"]), float(r["v_y"]), float(r["v_spin"])])
        eta, t = billiard_map(table, mass, State(loc, v))
        assert eta.loc.s == float(r_next["s"])
        assert np.array_equal(
            eta.v, [float(r_next["v_x"]), float(r_next["v_y"]),
                    float(r_next["v_spin"])])
        assert t == float(r_next["flight_time"])
        # the disc coordinates agree with the stored velocity
        u1, u2 = velocity_coords(State(loc, v))
        assert (u1, u2) == (float(r["u1"]), float(r["u2"]))


def test_portrait_and_determinism(tmp_path):
    files = {}
    for tag in ("a", "b"):
        d = tmp_path / tag
        d.mkdir()
        cfg = _write_cfg(d / "c.json", {
            "seed": 5,
            "table": {"kind": "sinai", "radius": 0.35},
            "mass": {"gamma": UNIFORM_GAMMA},
            "portrait": {"orbits": 5, "collisions": 100,
                         "csv": str(d / "p.csv"), "svg": str(d / "p.svg")},
        })
        assert main(["portrait", cfg]) == 0
        files[tag] = (d / "p.csv").read_bytes(), (d / "p.svg").read_bytes()
    assert files["a"] == files["b"]
    assert files["a"][1].startswith(b"<svg")


def test_stability_json(tmp_path):
    out = tmp_path / "st.json"
    cfg = _write_cfg(tmp_path / "c.json", {
        "mass": {"gamma": UNIFORM_GAMMA},
        "stability": {"phi": 0.0, "radius": 0.3, "output": str(out)},
    })
    assert main(["stability", cfg]) == 0
    data = json.loads(out.read_text())
    assert data["class"] == "hyperbolic"
    assert data["critical_radius"] == pytest.approx(1.0 / 3.0)


def test_sweep_bisection(tmp_path):
    cfg = _write_cfg(tmp_path / "c.json", {
        "mass": {"gamma": UNIFORM_GAMMA},
        "sweep": {"phi": 0.0, "radii": [0.30, 0.32, 0.34, 0.36],
                  "bisect": True, "output": str(tmp_path / "s.csv"),
                  "summary": str(tmp_path / "s.json")},
    })
    assert main(["sweep", cfg]) == 0
    summary = json.loads((tmp_path / "s.json").read_text())
    assert summary["bisection_radius"] == pytest.approx(1.0 / 3.0, abs=1e-6)
    with open(tmp_path / "s.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["classification"] for r in rows] == [
        "hyperbolic", "hyperbolic", "elliptic", "elliptic"]


def test_wedge_catalog(tmp_path):
    cfg = _write_cfg(tmp_path / "c.json", {
        "mass": {"gamma": UNIFORM_GAMMA},
        "wedge": {"pairs": [[1, 3, "lower"], [1, 2, "upper"],
                            [1, 5, "upper"]],
                  "output": str(tmp_path / "w.csv")},
    })
    assert main(["wedge", cfg]) == 0
    with open(tmp_path / "w.csv") as fh:
        rows = list(csv.DictReader(fh))
    # the infeasible upper-branch pair is dropped
    assert [(r["p"], r["q"]) for r in rows] == [("1", "3"), ("1", "2")]
    assert float(rows[0]["theta"]) == pytest.approx(2.0 * math.pi / 3.0)
    assert rows[0]["period"] == "6"


def test_verify_exit_codes(tmp_path):
    base = {
        "seed": 2,
        "table": {"kind": "sinai", "radius": 0.25},
        "mass": {"gamma": UNIFORM_GAMMA},
        "verify": {"samples": 40, "output": str(tmp_path / "v.json")},
    }
    cfg = _write_cfg(tmp_path / "ok.json", base)
    assert main(["verify", cfg]) == 0
    reports = json.loads((tmp_path / "v.json").read_text())
    assert all(r["passed"] for r in reports)
    # unreachable tolerance forces a failing check and nonzero exit
    bad = dict(base)
    bad["verify"] = dict(base["verify"], reversibility_tol=1e-18)
    cfg = _write_cfg(tmp_path / "bad.json", bad)
    assert main(["verify", cfg]) == 1


def test_config_errors_and_overrides(tmp_path):
    missing = tmp_path / "nope.json"
    assert main(["simulate", str(missing)]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["simulate", str(broken)]) == 2
    cfg = _write_cfg(tmp_path / "c.json", {
        "mass": {"gamma": UNIFORM_GAMMA},
        "stability": {"phi": 0.0, "radius": 0.3,
                      "output": str(tmp_path / "st.json")},
    })
    assert main(["stability", cfg, "--set", "stability.radius=0.4"]) == 0
    data = json.loads((tmp_path / "st.json").read_text())
    assert data["class"] == "elliptic"
    assert main(["stability", cfg, "--set", "noequals"]) == 2


def test_unknown_table_kind(tmp_path):
    cfg = _write_cfg(tmp_path / "c.json", {
        "seed": 0,
        "table": {"kind": "moebius"},
        "mass": {"gamma": UNIFORM_GAMMA},
        "simulate": {"collisions": 5, "output": str(tmp_path / "t.csv")},
    })
    assert main(["simulate", cfg]) == 2
