"""
Tests for the lab_cli batch driver
Exit codes: 0 on success, 1 on failed checks or library errors, 2 on usage errors
"""

import json

import pytest

from lab_cli import main


def _write(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.fixture
def small_config(tmp_path):
    return _write(tmp_path / "lab.json", {
        "suite": "chains", "n": [2], "k": [1], "C": [1, 2, 3], "seed": 3, "workers": 1,
    })


def test_gnk(capsys):
    assert main(["gnk", "--n", "2", "--k", "1"]) == 0
    payload = _stdout_json(capsys)
    assert len(payload["edges"]) == 8
    assert payload["axioms"]["passed"] is True


def test_gnk_bad_parameters(capsys):
    assert main(["gnk", "--n", "1", "--k", "1"]) == 1
    assert "error" in capsys.readouterr().err


def test_space_x_n(capsys):
    assert main(["space", "--kind", "X_N", "--n", "2", "--k", "1"]) == 0
    payload = _stdout_json(capsys)
    assert len(payload["assembly"]["space"]["labels"]) == 13


def test_missing_required_option():
    with pytest.raises(SystemExit) as info:
        main(["space"])
    assert info.value.code == 2


def test_ot(tmp_path, capsys):
    path = _write(tmp_path / "ot.json", {
        "space": {"dist": [[0, 3], [3, 0]]}, "mu": [1, 0], "nu": [0.5, 0.5],
    })
    assert main(["ot", "--input", path]) == 0
    assert _stdout_json(capsys)["result"]["value"] == pytest.approx(1.5)


def test_ot_without_input(capsys):
    assert main(["ot"]) == 2
    assert "input" in capsys.readouterr().err


def test_ot_malformed_input(tmp_path):
    path = _write(tmp_path / "ot.json", {"space": {"dist": [[0, 1], [1, 0]]}, "mu": [1, 0]})
    assert main(["ot", "--input", path]) == 2


def test_hyper(tmp_path, capsys):
    path = _write(tmp_path / "hyper.json", {
        "space": {"labels": ["a", "b"], "dist": [[0, 1], [1, 0]]},
        "A": [[1, 0]],
        "B": [[1, 0], [0, 1]],
    })
    assert main(["hyper", "--input", path]) == 0
    payload = _stdout_json(capsys)
    assert payload["hausdorff"] == pytest.approx(1.0)
    assert payload["witness"]["B_generator"] == 1


def test_lip(tmp_path, capsys):
    path = _write(tmp_path / "map.json", {
        "source": {"dist": [[0, 1, 3], [1, 0, 2], [3, 2, 0]]},
        "target": {"dist": [[0, 2, 6], [2, 0, 4], [6, 4, 0]]},
        "assignment": [0, 1, 2],
    })
    assert main(["lip", "--input", path, "--eps", "1", "--lam", "1"]) == 0
    payload = _stdout_json(capsys)
    assert payload["lipschitz"]["lambda_star"] == pytest.approx(5 / 3)
    assert payload["additive"]["epsilon_star"] == pytest.approx(3.0)


def test_pi_probe(capsys):
    assert main(["pi-probe", "--trials", "5", "--family", "thin_segments", "--seed", "2"]) == 0
    payload = _stdout_json(capsys)
    assert payload["probe"]["fixed_ratio"] > 5.0
    assert payload["probe"]["shortness_violated"] is True


def test_asdim(capsys):
    assert main(["asdim", "--n", "2", "--k", "1", "--C", "1..3"]) == 0
    payload = _stdout_json(capsys)
    assert [row["C"] for row in payload["chains"]] == [1, 2, 3]


def test_obstruct(tmp_path):
    out = tmp_path / "obstruct.json"
    code = main(["obstruct", "--n", "2", "--k-range", "1", "--out", str(out)])
    assert code in (0, 1)
    rows = json.loads(out.read_text())["table"]
    assert rows[0]["result"]["lambda_min"] > 1.09
    assert len(rows[0]["placement"]) == 4


def test_suite_output_is_byte_identical(tmp_path, small_config):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["suite", "--config", small_config, "--out", str(first), "--csv"]) == 0
    assert main(["suite", "--config", small_config, "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / "a.json.meta.json").exists()
    assert (tmp_path / "a.csv").read_text().startswith("suite,name,digest,status")


def test_suite_to_stdout(small_config, capsys):
    assert main(["suite", "--config", small_config]) == 0
    assert _stdout_json(capsys)["summary"]["fail"] == 0


def test_suite_tolerance_override(small_config, capsys):
    assert main(["suite", "--config", small_config, "--tol", "oracle=0.5"]) == 0
    assert _stdout_json(capsys)["config"]["tolerances"]["oracle"] == 0.5


@pytest.mark.parametrize("argv", [
    ["suite", "--suite", "everything"],
    ["suite", "--tol", "speed=1"],
    ["suite", "--tol", "oracle"],
])
def test_suite_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert "usage error" in capsys.readouterr().err


def test_suite_missing_config(tmp_path, capsys):
    assert main(["suite", "--config", str(tmp_path / "absent.json")]) == 2
