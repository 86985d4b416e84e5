"""Command-line behavior: exit codes, file outputs, stdout formats."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from ankleopt.cli import main
from ankleopt.io import load_bundle
from ankleopt.ranking import uniform_weights

DATA = Path(__file__).parent.parent / "data"

RSU_ARGS = ["optimize", "--arch", "rsu",
            "--catalog", str(DATA / "catalog.json"),
            "--actuator", "rot-harmonic-90",
            "--regions", str(DATA / "regions.toml"),
            "--tasks", str(DATA / "tasks"),
            "--pop", "8", "--generations", "3", "--seed", "0"]


@pytest.fixture(scope="module")
def rsu_bundle_path(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundles") / "rsu.json"
    code = main(RSU_ARGS + ["--out", str(out),
                            "--baseline", str(DATA / "baselines" / "serial_incumbent.json")])
    assert code == 0
    return out


def write_tight_design(tmp_path):
    """An RSU realized over a +-30 deg window only."""
    path = tmp_path / "tight.json"
    path.write_text(json.dumps({
        "arch": "rsu", "id": "tight",
        "anchors": {"a1": [-86.0, 40.0, 235.0], "a2": [-86.0, -40.0, 235.0],
                    "b1": [-34.0, 36.0, 36.0], "b2": [-34.0, -36.0, 36.0]},
        "psi_deg": [-90.0, 90.0],
        "gamma": [0.2, 0.2], "delta": [0.5, 0.5],
        "realization": {"roll_deg": [-30.0, 30.0], "pitch_deg": [-30.0, 30.0],
                        "grid_step_deg": 2.0},
    }))
    return path


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------

def test_optimize_writes_a_rankable_bundle(rsu_bundle_path, capsys):
    bundle = load_bundle(rsu_bundle_path)
    assert len(bundle.candidates) >= 2
    assert any(c.is_baseline for c in bundle.candidates)
    searched = [c for c in bundle.candidates if not c.is_baseline]
    assert all(c.arch == "rsu" and len(c.genes) == 9 for c in searched)
    assert all(c.objectives is not None for c in searched)
    ranked = bundle.rank(uniform_weights())
    assert [r.xi for r in ranked] == sorted(r.xi for r in ranked)
    assert bundle.provenance["seed"] == 0
    assert "core" in bundle.region and "operational" in bundle.region


def test_optimize_unknown_actuator_is_input_error(tmp_path, capsys):
    args = list(RSU_ARGS)
    args[args.index("rot-harmonic-90")] = "warp-drive"
    assert main(args + ["--out", str(tmp_path / "x.json")]) == 2
    assert "warp-drive" in capsys.readouterr().err


def test_optimize_missing_catalog_is_input_error(tmp_path, capsys):
    args = list(RSU_ARGS)
    args[args.index(str(DATA / "catalog.json"))] = str(tmp_path / "nope.json")
    assert main(args + ["--out", str(tmp_path / "x.json")]) == 2


# ---------------------------------------------------------------------------
# rank
# ---------------------------------------------------------------------------

def test_rank_prints_and_writes(rsu_bundle_path, tmp_path, capsys):
    out = tmp_path / "ranked.json"
    code = main(["rank", "--bundle", str(rsu_bundle_path),
                 "--out", str(out), "--top", "3"])
    assert code == 0
    table = capsys.readouterr().out.splitlines()
    assert table[0].startswith("rank")
    assert len(table) == 4  # header + top 3

    doc = json.loads(out.read_text())
    xis = [row["xi"] for row in doc["ranking"]]
    assert xis == sorted(xis)
    assert [row["rank"] for row in doc["ranking"]] == list(range(len(xis)))
    # written xi agrees with re-ranking the loaded bundle in-process
    bundle = load_bundle(rsu_bundle_path)
    expect = bundle.rank(np.asarray(doc["weights"]))
    assert [r.candidate_id for r in expect] == [row["id"] for row in doc["ranking"]]
    for r, row in zip(expect, doc["ranking"]):
        assert row["xi"] == r.xi


def test_rank_custom_weights_change_the_order(rsu_bundle_path, capsys):
    assert main(["rank", "--bundle", str(rsu_bundle_path),
                 "--weights", "1,0,0,0,0,0,0", "--top", "0"]) == 0
    speed_order = capsys.readouterr().out
    assert main(["rank", "--bundle", str(rsu_bundle_path),
                 "--weights", "0,0,0,0,0,1,0", "--top", "0"]) == 0
    mass_order = capsys.readouterr().out
    assert speed_order.splitlines()[0].startswith("rank")
    assert speed_order != mass_order


def test_rank_bad_weights_exit_2(rsu_bundle_path, capsys):
    assert main(["rank", "--bundle", str(rsu_bundle_path),
                 "--weights", "1,1,1,1,1,1,1"]) == 2
    assert main(["rank", "--bundle", str(rsu_bundle_path),
                 "--weights", "a,b,c"]) == 2
    assert "error" in capsys.readouterr().err


def test_rank_merge_rejects_duplicate_pools(rsu_bundle_path, capsys):
    assert main(["rank", "--bundle", str(rsu_bundle_path),
                 "--bundle", str(rsu_bundle_path)]) == 2
    assert "duplicate" in capsys.readouterr().err


def test_rank_corrupt_bundle_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{]")
    assert main(["rank", "--bundle", str(bad)]) == 2


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def test_validate_reference_design_contained(capsys):
    code = main(["validate", "--design",
                 str(DATA / "designs" / "reference_rsu.json")])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 6
    assert all("CONTAINED" in line for line in lines)


def test_validate_tight_design_fails_wide_window(tmp_path, capsys):
    design = write_tight_design(tmp_path)
    code = main(["validate", "--design", str(design),
                 "--half-widths", "15,150"])
    assert code == 1
    out = capsys.readouterr().out
    assert "CONTAINED" in out and "VIOLATED" in out


def test_validate_writes_csv_maps(tmp_path, capsys):
    code = main(["validate", "--design",
                 str(DATA / "designs" / "reference_rsu.json"),
                 "--half-widths", "15", "--csv-dir", str(tmp_path)])
    assert code == 0
    csv_path = tmp_path / "solvability_15deg.csv"
    header = csv_path.read_text().splitlines()[0]
    assert header == ("roll_deg,pitch_deg,solvable_leg1,solvable_leg2,"
                      "margin_leg1,margin_leg2")


def test_validate_rejects_spu_design(capsys):
    code = main(["validate", "--design",
                 str(DATA / "designs" / "reference_spu.json")])
    assert code == 2


# ---------------------------------------------------------------------------
# ik / metrics
# ---------------------------------------------------------------------------

def test_ik_spu_matches_closed_form(capsys):
    code = main(["ik", "--design", str(DATA / "designs" / "reference_spu.json"),
                 "--roll", "10", "--pitch", "-20"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["zeta_mm"] == pytest.approx(
        [211.4962648187679, 223.579582406853], abs=1e-9)


def test_ik_rsu_branches_differ(capsys):
    design = str(DATA / "designs" / "reference_rsu.json")
    assert main(["ik", "--design", design, "--roll", "5", "--pitch", "-10"]) == 0
    primary = json.loads(capsys.readouterr().out)
    assert main(["ik", "--design", design, "--roll", "5", "--pitch", "-10",
                 "--branch", "secondary"]) == 0
    secondary = json.loads(capsys.readouterr().out)
    assert primary["alpha_deg"] != secondary["alpha_deg"]
    assert all(-180.0 < a <= 180.0 for a in primary["alpha_deg"])


def test_ik_unreachable_pose_exit_1(tmp_path, capsys):
    design = write_tight_design(tmp_path)
    code = main(["ik", "--design", str(design), "--roll", "150", "--pitch", "0"])
    assert code == 1
    assert "infeasible" in capsys.readouterr().err


def test_metrics_outputs_all_fields(tmp_path, capsys):
    out = tmp_path / "metrics.json"
    code = main(["metrics", "--design",
                 str(DATA / "designs" / "reference_spu.json"),
                 "--catalog", str(DATA / "catalog.json"),
                 "--actuator", "lin-ball-160",
                 "--regions", str(DATA / "regions.toml"),
                 "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["metrics"]["actuation_mass"] == pytest.approx(1.7)
    assert doc["metrics"]["com_height"] == pytest.approx(215.5)
    assert set(doc["metric_vars"]) == {"speed", "torque",
                                       "backdriving_torque", "manipulability"}
    assert doc["singular_poses"] >= 0


def test_metrics_arch_actuator_mismatch_exit_1(capsys):
    code = main(["metrics", "--design",
                 str(DATA / "designs" / "reference_spu.json"),
                 "--catalog", str(DATA / "catalog.json"),
                 "--actuator", "rot-harmonic-90",
                 "--regions", str(DATA / "regions.toml")])
    assert code == 1


def test_reference_rsu_realizes_to_known_crank(capsys):
    # the shipped free design pins down its realized geometry
    from ankleopt.io import load_design
    params = load_design(DATA / "designs" / "reference_rsu.json").mechanism()
    assert params.crank[0] == pytest.approx(params.crank[1], rel=1e-12)
    assert params.crank[0] == pytest.approx(62.108625, abs=1e-5)
    assert params.rod[0] == pytest.approx(253.554169, abs=1e-5)
    assert math.degrees(params.psi[0]) == -90.0
