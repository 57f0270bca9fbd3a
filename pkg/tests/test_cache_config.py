import json
import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from biperfect.cache import CrystalCache
from biperfect.common import CacheLockTimeout
from biperfect.file_manager import FileManager, dump_json
from config import Config
import config_manager


PARAMS = {"depth": 2, "format": "json", "star_edges": False}


def test_cache_round_trip(tmp_path):
    cache = CrystalCache(str(tmp_path))
    assert cache.get("binf", "A2", PARAMS) is None

    path = cache.put("binf", "A2", PARAMS, {"levels": [1, 2, 4]})
    assert path.parent == tmp_path / "binf"
    assert cache.get("binf", "A2", PARAMS) == {"levels": [1, 2, 4]}
    assert cache.get("binf", "A3", PARAMS) is None


def test_cache_key_depends_on_schema(tmp_path):
    old = CrystalCache(str(tmp_path), schema_version=1)
    new = CrystalCache(str(tmp_path), schema_version=2)
    old.put("binf", "A2", PARAMS, "graph")
    assert new.get("binf", "A2", PARAMS) is None


def test_corrupted_entry_is_evicted(tmp_path):
    cache = CrystalCache(str(tmp_path))
    path = cache.put("binf", "A2", PARAMS, {"levels": [1]})

    entry = json.loads(path.read_text(encoding="utf-8"))
    entry["payload"] = {"levels": [7]}
    path.write_text(dump_json(entry), encoding="utf-8")
    assert cache.get("binf", "A2", PARAMS) is None
    assert not path.exists()

    cache.put("binf", "A2", PARAMS, {"levels": [1]})
    path.write_text("{not json", encoding="utf-8")
    assert cache.get("binf", "A2", PARAMS) is None
    assert not path.exists()


def test_disabled_cache_never_writes(tmp_path):
    cache = CrystalCache(str(tmp_path), enabled=False)
    assert cache.put("binf", "A2", PARAMS, [1]) is None
    assert cache.get("binf", "A2", PARAMS) is None
    assert not any(tmp_path.iterdir())


def test_get_or_compute_calls_once(tmp_path):
    cache = CrystalCache(str(tmp_path))
    calls = []

    def compute():
        calls.append(1)
        return {"value": 42}

    assert cache.get_or_compute("blambda", "A2", {"lambda": [1, 1]}, compute) == {"value": 42}
    assert cache.get_or_compute("blambda", "A2", {"lambda": [1, 1]}, compute) == {"value": 42}
    assert len(calls) == 1


def test_lock_timeout(tmp_path):
    cache = CrystalCache(str(tmp_path), lock_timeout=0.1)
    path = cache.entry_path("binf", "A2", PARAMS)
    path.parent.mkdir(parents=True)
    path.with_suffix(".lock").write_text("", encoding="utf-8")
    with pytest.raises(CacheLockTimeout):
        cache.put("binf", "A2", PARAMS, [1])


def test_file_manager(tmp_path):
    target = tmp_path / "out" / "data.json"
    assert FileManager.save_json_file({"b": 1, "a": [1, 2]}, str(target))
    assert target.read_text(encoding="utf-8").startswith('{\n  "a"')
    assert FileManager.load_json_file(str(target)) == {"a": [1, 2], "b": 1}
    assert FileManager.load_json_file(str(tmp_path / "missing.json")) == {}
    with pytest.raises(ValueError, match="无法读取"):
        FileManager.load_model_file(str(tmp_path / "missing.json"))


def test_config_defaults_and_updates():
    config = Config()
    assert config.default_cartan == "A2"
    config.update_setting("default_type", "D")
    config.update_setting("default_rank", "4")
    config.update_setting("cache_enabled", "false")
    assert config.default_cartan == "D4"
    assert config.cache["enabled"] is False

    with pytest.raises(ValueError, match="未知的配置键"):
        config.update_setting("color", "blue")
    with pytest.raises(ValueError, match="正整数"):
        config.update_setting("max_workers", "0")


def test_config_file_round_trip(tmp_path):
    config = Config()
    config.update_setting("max_workers", 2)
    config.update_cache_dir(str(tmp_path / "cache"))
    conf_file = tmp_path / "workbench.conf"
    conf_file.write_text(config.to_conf_text(), encoding="utf-8")

    loaded = Config()
    assert loaded.load_conf_file(str(conf_file))
    assert loaded.compute["max_workers"] == 2
    assert loaded.cache_path == tmp_path / "cache"
    assert not loaded.load_conf_file(str(tmp_path / "missing.conf"))


def test_config_dict_round_trip():
    config = Config()
    config.update_setting("primes_extra", "3")
    copy = Config()
    copy.from_dict(config.to_dict())
    assert copy.to_dict() == config.to_dict()


def test_config_manager_test_command(tmp_path, capsys):
    config = Config()
    config.update_cache_dir(str(tmp_path / "cache"))
    assert config_manager.test_config(config)
    assert "✅" in capsys.readouterr().out

    config.update_setting("default_type", "Q")
    assert not config_manager.test_config(config)


def test_config_shell_commands(tmp_path, capsys):
    config = Config()
    config.update_cache_dir(str(tmp_path / "cache"))
    shell = config_manager.ConfigShell(config)

    assert shell.execute("set default_rank 3")
    assert config.default_cartan == "A3"
    assert shell.execute("set max_workers")
    assert "用法" in capsys.readouterr().out

    assert shell.execute("cartan D4")
    out = capsys.readouterr().out
    assert "正根 12" in out
    assert "σ  = (1, 2, 3, 4)" in out

    assert shell.execute(f"save {tmp_path / 'saved.conf'}")
    assert "default_rank = 3" in (tmp_path / "saved.conf").read_text(encoding="utf-8")

    assert shell.execute("nonsense")
    assert "未知命令" in capsys.readouterr().out
    assert not shell.execute("quit")


def test_cache_summary_counts_entries(tmp_path):
    config = Config()
    config.update_cache_dir(str(tmp_path / "cache"))
    assert config_manager.cache_summary(config) == {}

    cache = CrystalCache(str(tmp_path / "cache"))
    cache.put("binf", "A2", PARAMS, [1])
    cache.put("binf", "A3", PARAMS, [1])
    cache.put("blambda", "A2", {"lambda": [1, 1]}, [1])
    assert config_manager.cache_summary(config) == {"binf": 2, "blambda": 1}


def test_config_manager_main(tmp_path, monkeypatch, capsys):
    fresh = Config()
    fresh.update_cache_dir(str(tmp_path / "cache"))
    monkeypatch.setattr(config_manager, "get_config", lambda: fresh)
    monkeypatch.chdir(tmp_path)

    target = tmp_path / "out.conf"
    assert config_manager.main(["--set", "default_type", "D", "--save", str(target)]) == 0
    assert "default_type = D" in target.read_text(encoding="utf-8")

    assert config_manager.main(["--set", "color", "blue"]) == 2
    assert config_manager.main(["--load", str(tmp_path / "missing.conf")]) == 2


def test_file_manager_read_errors_return_empty(tmp_path):
    assert FileManager.load_json_file(str(tmp_path)) == {}

    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert FileManager.load_json_file(str(broken)) == {}

    binary = tmp_path / "binary.json"
    binary.write_bytes(b"\xff\xfe\x00")
    assert FileManager.load_json_file(str(binary)) == {}
