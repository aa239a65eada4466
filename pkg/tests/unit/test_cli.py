"""Unit tests for the command-line entry point."""
import json

import pytest
import yaml

from app.cli import build_parser, main, resolve_config


def _write_json(tmp_path, data, name="iet.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def flip_2iet_file(tmp_path):
    return _write_json(tmp_path, {"basis": [2], "lengths": ["sqrt(2)", "1"], "perm": [-2, 1]})


# ---------------------------------------------------------------------------
# construct / classify
# ---------------------------------------------------------------------------

def test_construct_showcase(capsys):
    assert main(["construct", "7", "3", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["perm"] == [-7, 6, 5, -3, -4, -1, -2]
    assert data["expected"] == {"n_per": 3, "n_min": 2}
    assert data["word"] == "bbbbbb"


def test_construct_then_classify(tmp_path, capsys):
    out = str(tmp_path / "showcase.json")
    assert main(["construct", "7", "3", "2", "--out", out]) == 0
    assert main(["classify", out]) == 0
    assert capsys.readouterr().out.strip() == "n_per=3 n_min=2 bound=7"


def test_classify_summary(flip_2iet_file, capsys):
    assert main(["classify", flip_2iet_file]) == 0
    assert capsys.readouterr().out.strip() == "n_per=2 n_min=0 bound=2"


def test_classify_json(flip_2iet_file, capsys):
    assert main(["classify", flip_2iet_file, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["n_per"] == 2
    assert [c["period"] for c in data["components"]] == [4, 2]


def test_classify_json_includes_decomposition_and_saddle_connections(flip_2iet_file, capsys):
    assert main(["classify", flip_2iet_file, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["decomposition"] == {"s": 1, "blocks": [{"perm": [-2, 1], "offset": 0, "size": 2}]}
    connections = [
        (c["start"], c["side"], c["end"], c["length"]) for c in data["saddle_connections"]
    ]
    assert connections == [(0, "+", 2, 1), (1, "-", 1, 2), (1, "+", 0, 1), (2, "-", 1, 2)]
    sqrt2, one = {"coeffs": [[[2], "1/1"]]}, {"coeffs": [[[], "1/1"]]}
    assert data["saddle_connections"][1]["itinerary"] == [sqrt2, one, sqrt2]


def test_classify_tie_exits_3(tmp_path, capsys):
    path = _write_json(tmp_path, {"lengths": [1, 1], "perm": [-2, 1]})
    assert main(["classify", path]) == 3
    error = json.loads(capsys.readouterr().out)
    assert error["error"] == "TieEncountered"
    assert error["exit_code"] == 3


def test_classify_invalid_json_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["classify", str(path)]) == 2
    assert json.loads(capsys.readouterr().out)["error"] == "ParseError"


def test_classify_missing_file_exits_2(tmp_path, capsys):
    assert main(["classify", str(tmp_path / "absent.json")]) == 2
    assert json.loads(capsys.readouterr().out)["error"] == "ParseError"


def test_classify_invalid_permutation_exits_2(tmp_path, capsys):
    path = _write_json(tmp_path, {"lengths": [1, 2], "perm": [1, 1]})
    assert main(["classify", path]) == 2
    assert json.loads(capsys.readouterr().out)["error"] == "InvalidPermutation"


def test_construct_invalid_counts_exits_2(capsys):
    assert main(["construct", "6", "1", "3"]) == 2
    assert json.loads(capsys.readouterr().out)["error"] == "InvalidCounts"


# ---------------------------------------------------------------------------
# verify / perturb
# ---------------------------------------------------------------------------

def test_verify_json(capsys):
    assert main(["verify", "--n", "2", "--samples", "3", "--seed", "4", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["samples"] == 3
    assert data["bound_violations"] == 0
    assert data["nper_zero_with_flips"] == 0


def test_verify_text(capsys):
    assert main(["verify", "--n", "2", "--samples", "2"]) == 0
    out = capsys.readouterr().out
    assert "samples=2" in out
    assert "bound_violations=0" in out


def test_perturb(flip_2iet_file, capsys):
    assert main(["perturb", flip_2iet_file, "--magnitude", "1/1000", "--trials", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("preserved=3/3 base=(2,0)")


def test_perturb_rejects_bad_magnitude(flip_2iet_file):
    with pytest.raises(SystemExit):
        main(["perturb", flip_2iet_file, "--magnitude", "tiny"])


def test_perturb_zero_magnitude_reproduces_the_input(flip_2iet_file, capsys):
    assert main(["perturb", flip_2iet_file, "--magnitude", "0", "--trials", "4", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["preserved"] == 4
    assert data["max_rho_ratio"] == 0.0


# ---------------------------------------------------------------------------
# orbit-svg
# ---------------------------------------------------------------------------

def test_orbit_svg_is_deterministic(tmp_path, capsys):
    path = _write_json(tmp_path, {"lengths": [1], "perm": [-1]})
    assert main(["orbit-svg", path, "--witness", "1/3", "--steps", "20"]) == 0
    first = capsys.readouterr().out
    assert main(["orbit-svg", path, "--witness", "1/3", "--steps", "20"]) == 0
    assert capsys.readouterr().out == first
    assert "<svg" in first
    assert "w1 = 1/3" in first


def test_orbit_svg_defaults_to_component_witnesses(flip_2iet_file, tmp_path):
    out = tmp_path / "orbits.svg"
    assert main(["orbit-svg", flip_2iet_file, "--out", str(out)]) == 0
    text = out.read_text()
    assert "w1 = 1/2" in text
    assert "w2 = " in text


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def test_flags_override_config_file(tmp_path):
    config_path = tmp_path / "config.yaml"
    config_path.write_text(yaml.dump({"caps": {"rauzy_cap": 10, "keane_depth": 3}, "harness": {"seed": 5}}))
    args = build_parser().parse_args(
        ["verify", "--config", str(config_path), "--caps-rauzy", "20", "--n", "3", "--exhaustive"]
    )
    config = resolve_config(args)
    assert config.caps.rauzy_cap == 20
    assert config.harness.rauzy_cap == 20
    assert config.caps.keane_depth == 3
    assert config.harness.seed == 5
    assert config.harness.n == 3
    assert config.harness.exhaustive is True


def test_environment_is_used_without_config_file(monkeypatch):
    monkeypatch.setenv("IET_ORBIT_CAP", "77")
    config = resolve_config(build_parser().parse_args(["verify"]))
    assert config.caps.orbit_cap == 77


def test_invalid_config_exits_2(tmp_path, flip_2iet_file):
    config_path = tmp_path / "config.yaml"
    config_path.write_text(yaml.dump({"caps": {"rauzy_cap": 0}}))
    assert main(["classify", flip_2iet_file, "--config", str(config_path)]) == 2


def test_missing_config_file_exits_2(tmp_path, flip_2iet_file):
    assert main(["classify", flip_2iet_file, "--config", str(tmp_path / "none.yaml")]) == 2
