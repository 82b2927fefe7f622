import json

import settings
from settings import DEFAULT_SETTINGS, MAX_BRUTE_ENV, load_settings


def test_defaults_without_file(tmp_path, monkeypatch):
    monkeypatch.delenv(MAX_BRUTE_ENV, raising=False)
    assert load_settings(str(tmp_path / "settings.json")) == DEFAULT_SETTINGS


def test_file_overrides_defaults(tmp_path, monkeypatch):
    monkeypatch.delenv(MAX_BRUTE_ENV, raising=False)
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"tolerance": 0.05, "run_length": 8}))
    loaded = load_settings(str(path))
    assert loaded["tolerance"] == 0.05
    assert loaded["run_length"] == 8
    assert loaded["max_len"] == DEFAULT_SETTINGS["max_len"]


def test_unreadable_file_falls_back(tmp_path, monkeypatch, caplog):
    monkeypatch.delenv(MAX_BRUTE_ENV, raising=False)
    broken = tmp_path / "settings.json"
    broken.write_text("{not json")
    assert load_settings(str(broken)) == DEFAULT_SETTINGS
    assert "Ignoring unreadable settings file" in caplog.text

    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    assert load_settings(str(listed)) == DEFAULT_SETTINGS


def test_environment_overrides_max_brute(tmp_path, monkeypatch):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"max_brute": 4}))
    monkeypatch.setenv(MAX_BRUTE_ENV, "7")
    assert load_settings(str(path))["max_brute"] == 7
    monkeypatch.setenv(MAX_BRUTE_ENV, "seven")
    assert load_settings(str(path))["max_brute"] == 4


def test_max_brute_reads_settings(monkeypatch):
    monkeypatch.setattr(settings, "SETTINGS_PATH", "/nonexistent/settings.json")
    monkeypatch.setenv(MAX_BRUTE_ENV, "3")
    assert settings.max_brute() == 3
