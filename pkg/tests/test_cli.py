import json

import numpy as np
import pytest

import collisionless as cl
from collisionless.cli import main


def test_list_models(capsys):
    assert main(["list-models"]) == 0
    out = capsys.readouterr().out
    assert "armed-biped" in out


def test_reproduce_passes(capsys):
    assert main(["reproduce"]) == 0
    out = capsys.readouterr().out
    assert "all quantities reproduced" in out
    assert "FAIL" not in out


def test_reproduce_json(capsys):
    assert main(["reproduce", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"] is True
    names = {row["name"] for row in payload["rows"]}
    assert {"lam", "tau", "q_prime"} <= names


def test_reproduce_perturbed_fixtures_exit5(tmp_path, capsys):
    from collisionless.reference import REFERENCE

    perturbed = {
        k: (np.asarray(v) + 1e-2).tolist() if k != "norm_const" else v
        for k, v in REFERENCE.items()
    }
    path = tmp_path / "fixtures.json"
    path.write_text(json.dumps(perturbed))
    assert main(["reproduce", "--fixtures", str(path)]) == 5
    assert "MISMATCH" in capsys.readouterr().out


def test_solve_json_payload(capsys):
    assert main(["solve", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["model"] == "armed-biped"
    sol = payload["solutions"][0]
    assert sol["tau"] == pytest.approx(3.0795, abs=5e-4)
    assert sol["validation"]["passed"] is True


def test_solve_writes_outputs_and_manifest(tmp_path, capsys):
    prefix = tmp_path / "run"
    assert main(["solve", "--out", str(prefix)]) == 0
    payload = json.loads((tmp_path / "run.json").read_text())
    assert payload["solutions"][0]["tau_prime"] == pytest.approx(0.77785, abs=5e-5)
    manifest = json.loads((tmp_path / "run.manifest.json").read_text())
    assert manifest["command"] == "solve"
    assert str(tmp_path / "run.json") in manifest["outputs"]
    assert "wall_time_s" in manifest and "version" in manifest


def test_solve_no_existence_exit2(tmp_path, no_existence_model):
    config = tmp_path / "sunk.json"
    config.write_text(json.dumps(no_existence_model.to_config()))
    assert main(["solve", "--config", str(config)]) == 2


def test_solve_no_root_exit3():
    # a window below the first root: seeds exist nowhere
    assert main(["solve", "--o-n-max", "1.0", "--o-p-max", "0.5"]) == 3


def test_solve_validation_failed_exit4():
    # only the second row is inside this window; all of it is attractive
    code = main(
        ["solve", "--o-p-min", "3.2", "--o-p-max", "5.0", "--o-n-max", "8.0"]
    )
    assert code == 4


def test_solve_pick_all(capsys):
    assert main(["solve", "--pick", "all", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["solutions"]) == 3


def test_solve_pick_nearest(capsys):
    assert main(["solve", "--pick", "nearest=7,1", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["solutions"]) == 1
    assert payload["solutions"][0]["o_n"] == pytest.approx(6.945, abs=1e-2)


def test_solve_tol_scaling(capsys):
    # absurdly tight tolerances make even the true root fail validation
    code = main(["solve", "--tol", "1e-9"])
    assert code == 4


def test_contour_csv_only(tmp_path, capsys):
    prefix = tmp_path / "field"
    code = main(
        ["contour", "--out", str(prefix), "--format", "csv", "--grid-step", "0.1"]
    )
    assert code == 0
    assert (tmp_path / "field.csv").exists()
    assert not (tmp_path / "field.svg").exists()
    assert (tmp_path / "field.manifest.json").exists()


def test_contour_with_asymptotes(tmp_path):
    prefix = tmp_path / "field"
    code = main(
        ["contour", "--out", str(prefix), "--grid-step", "0.1", "--asymptotes", "2..3"]
    )
    assert code == 0
    svg = (tmp_path / "field.svg").read_text()
    assert "polyline" in svg and "<path" in svg  # curves and cross markers


def test_trajectory_then_validate(tmp_path, capsys):
    prefix = tmp_path / "traj"
    assert main(["trajectory", "--out", str(prefix), "--samples", "150"]) == 0
    for ext in (".csv", ".json", ".svg", ".manifest.json"):
        assert (tmp_path / f"traj{ext}").exists()
    capsys.readouterr()
    assert main(["validate", "--trajectory", str(tmp_path / "traj.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True


def test_analytic2_rocker_table(capsys):
    code = main(
        ["analytic2", "--family", "rocker", "--nu1", "1", "--omega2", "2",
         "--omega1p", "1", "--n", "1..5"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    branches = payload["branches"]
    assert len(branches) == 5
    assert "error" in branches[0]  # n = 1 has no root
    ref = cl.solve_rocker(1.0, 2.0, 1.0, 2)
    assert branches[1]["o_2"] == pytest.approx(ref.o_2, rel=1e-12)


def test_critical_study_deterministic(capsys):
    args = ["critical", "--study-c0", "--n", "2", "--samples", "40", "--seed", "11"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    second = capsys.readouterr().out
    assert first == second
    payload = json.loads(first)
    assert payload["nonpositive"] == 0 and payload["failures"] == 0
    assert payload["minC0"] > 0


def test_critical_family_report(capsys):
    code = main(
        ["critical", "--family", "rocker", "--nu1", "1", "--omega2", "2",
         "--omega1p", "0.3", "--branches", "3..4"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["c0"] > 0
    assert len(payload["asymptotic_grid"]) == 2


def test_usage_error_exit64():
    with pytest.raises(SystemExit) as info:
        main(["solve", "--pick", "bogus"])
    assert info.value.code == 64


def test_unknown_builtin_model_reported():
    assert main(["solve", "--model", "teapot"]) == 1
