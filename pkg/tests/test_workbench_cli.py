import json
import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

import config as config_module
from biperfect.file_manager import FileManager
from biperfect.preproj import sl3_example, sl3_fixtures
from biperfect_workbench import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from config import Config


@pytest.fixture(autouse=True)
def fresh_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    fresh = Config()
    fresh.update_cache_dir(str(tmp_path / "cache"))
    monkeypatch.setattr(config_module, "config", fresh)
    return fresh


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_module(tmp_path, name):
    path = tmp_path / f"{name}.json"
    FileManager.save_json_file(sl3_fixtures()[name].to_json(), str(path))
    return str(path)


def test_mvpolytope_reports_all_words(capsys):
    code, out, _ = run(capsys, "--no-cache", "mvpolytope", "--cartan", "A2", "--word", "1,2,1", "--data", "3,2,1")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["nu"] == [5, 3]
    assert {"word": [2, 1, 2], "data": [2, 1, 4]} in data["data_by_word"]
    assert [0, 0] in data["vertices"]


def test_binf_json_and_dot(capsys):
    code, out, _ = run(capsys, "--no-cache", "binf", "--type", "A", "--rank", "2", "--depth", "2")
    assert code == EXIT_OK
    assert json.loads(out)["levels"] == [1, 2, 4]

    code, out, _ = run(capsys, "--no-cache", "binf", "--depth", "1", "--format", "dot")
    assert code == EXIT_OK
    assert out.startswith('digraph "B_infinity_A2"')


def test_binf_uses_cache(capsys, tmp_path):
    first = run(capsys, "blambda", "--cartan", "A2", "--lambda", "1,1")
    entries = list((tmp_path / "cache" / "blambda").glob("*.json"))
    assert len(entries) == 1
    second = run(capsys, "blambda", "--cartan", "A2", "--lambda", "1,1")
    assert first[1] == second[1]
    assert len(json.loads(first[1])["nodes"]) == 8


def test_multiplicities(capsys):
    code, out, _ = run(capsys, "mult", "weight", "--cartan", "A2", "--lambda", "1,1", "--mu", "0,0")
    assert code == EXIT_OK
    assert json.loads(out)["multiplicity"] == 2

    code, out, _ = run(capsys, "mult", "tensor", "--cartan", "A2", "--lambda", "1,0", "--mu", "1,0")
    assert json.loads(out)["table"] == [
        {"weight": [0, 1], "multiplicity": 1},
        {"weight": [2, 0], "multiplicity": 1},
    ]


def test_oracle_character(capsys):
    code, out, _ = run(capsys, "oracle", "character", "--cartan", "A2", "--lambda", "1,0")
    assert code == EXIT_OK
    assert len(json.loads(out)["character"]) == 3


def test_usage_errors(capsys):
    code, _, err = run(capsys, "mult", "weight", "--cartan", "Z9", "--lambda", "1", "--mu", "0")
    assert code == EXIT_USAGE
    assert "❌" in err

    code, _, _ = run(capsys, "mult", "weight", "--cartan", "A2", "--lambda", "1", "--mu", "0,0")
    assert code == EXIT_USAGE


def test_cn_verify(capsys):
    code, out, _ = run(capsys, "cn", "verify", "--group", "sl2", "--maxdeg", "3")
    assert code == EXIT_OK
    assert json.loads(out)["passed"] is True


def test_cn_verify_failing_family(capsys, tmp_path):
    family = tmp_path / "family.json"
    FileManager.save_json_file({
        "group": "sl3",
        "elements": [
            {"key": "one", "polynomial": "1"},
            {"key": "x", "polynomial": "x"},
            {"key": "y", "polynomial": "y"},
            {"key": "z", "polynomial": "z + x*y"},
            {"key": "w", "polynomial": "z"},
        ],
    }, str(family))
    code, out, err = run(capsys, "cn", "verify", "--family", str(family), "--maxdeg", "2")
    assert code == EXIT_FAILED
    assert json.loads(out)["passed"] is False
    assert "验证未通过" in err


def test_measure_check(capsys):
    code, out, _ = run(capsys, "measure", "check", "--group", "sl2", "--element", "x:2")
    assert code == EXIT_OK
    assert json.loads(out)["passed"] is True

    code, out, _ = run(capsys, "measure", "dbar", "--group", "sl3", "--element", "z")
    assert code == EXIT_OK
    assert json.loads(out)["polynomial"] == "x13"


def test_ppa_commands(capsys, tmp_path):
    module = write_module(tmp_path, "S1+X_a")
    code, out, _ = run(capsys, "ppa", "xi", "--module", module)
    assert code == EXIT_OK
    assert json.loads(out)["xi"] == "x12*x13"

    code, out, _ = run(capsys, "ppa", "chi", "--module", module, "--seq", "1,1,2")
    assert json.loads(out)["chi"] == 2

    code, _, _ = run(capsys, "ppa", "chi", "--module", module)
    assert code == EXIT_USAGE

    code, out, _ = run(capsys, "ppa", "hn", "--module", write_module(tmp_path, "X_a"))
    data = json.loads(out)
    assert data["matched_datum"] == [1, 0, 1]
    assert data["mv_equal"] is True

    code, out, _ = run(capsys, "ppa", "eps", "--module", write_module(tmp_path, "S1+S2"))
    data = json.loads(out)
    assert data["epsilon"] == [1, 1]
    assert data["stably_generic"] is False


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out" / "graph.dot"
    code, out, err = run(capsys, "--no-cache", "--output", str(target), "binf", "--depth", "1", "--format", "dot")
    assert code == EXIT_OK
    assert out == ""
    assert target.read_text(encoding="utf-8").startswith("digraph")
    assert "✅" in err


def test_config_file_option(capsys, tmp_path, fresh_config):
    conf = tmp_path / "custom.conf"
    conf.write_text("default_type = A\ndefault_rank = 3\ncache_enabled = false\n", encoding="utf-8")
    code, out, _ = run(capsys, "--config", str(conf), "binf", "--depth", "1")
    assert code == EXIT_OK
    assert json.loads(out)["cartan"] == "A3"
    assert not (tmp_path / "cache").exists()

    code, _, _ = run(capsys, "--config", str(tmp_path / "missing.conf"), "binf", "--depth", "1")
    assert code == EXIT_USAGE


def test_ppa_rejects_module_violating_relation(capsys, tmp_path):
    path = tmp_path / "bad.json"
    FileManager.save_json_file(sl3_example(1, 1).to_json(), str(path))
    code, _, err = run(capsys, "ppa", "eps", "--module", str(path))
    assert code == EXIT_USAGE
    assert "预投射关系" in err
