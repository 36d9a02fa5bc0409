"""Overrides de configuración por entorno y .env."""

import logging

import pytest

from core.config import SystemConfig, get_system_info

ENV_NAMES = (
    "LORENZKIT_LOG_LEVEL",
    "LORENZKIT_SEED",
    "LORENZKIT_SYSTEMS_DIR",
    "LORENZKIT_ATLASES_DIR",
    "LORENZKIT_MONITORING",
)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    for name in ENV_NAMES:
        monkeypatch.delenv(name, raising=False)
    for attr in ("LOG_LEVEL", "DEFAULT_SEED", "SYSTEMS_DIR", "ATLASES_DIR", "MONITORING_ENABLED"):
        monkeypatch.setattr(SystemConfig, attr, getattr(SystemConfig, attr))
    empty = tmp_path / "empty.env"
    empty.write_text("", encoding="utf-8")
    return empty


def test_environment_overrides(monkeypatch, tmp_path, clean_env):
    monkeypatch.setenv("LORENZKIT_SEED", "42")
    monkeypatch.setenv("LORENZKIT_LOG_LEVEL", "debug")
    monkeypatch.setenv("LORENZKIT_MONITORING", "off")
    monkeypatch.setenv("LORENZKIT_SYSTEMS_DIR", str(tmp_path))
    SystemConfig.load_environment(clean_env)
    assert SystemConfig.DEFAULT_SEED == 42
    assert SystemConfig.LOG_LEVEL == "DEBUG"
    assert SystemConfig.MONITORING_ENABLED is False
    assert SystemConfig.SYSTEMS_DIR == tmp_path


def test_invalid_values_keep_defaults(monkeypatch, tmp_path, clean_env, caplog):
    seed = SystemConfig.DEFAULT_SEED
    atlases = SystemConfig.ATLASES_DIR
    monkeypatch.setenv("LORENZKIT_SEED", "many")
    monkeypatch.setenv("LORENZKIT_LOG_LEVEL", "loud")
    monkeypatch.setenv("LORENZKIT_ATLASES_DIR", str(tmp_path / "missing"))
    with caplog.at_level(logging.WARNING, logger="core.config"):
        SystemConfig.load_environment(clean_env)
    assert SystemConfig.DEFAULT_SEED == seed
    assert SystemConfig.LOG_LEVEL != "LOUD"
    assert SystemConfig.ATLASES_DIR == atlases
    assert sum("Invalid" in r.getMessage() for r in caplog.records) == 3


def test_dotenv_file_is_read(tmp_path, clean_env):
    dotenv = tmp_path / ".env"
    dotenv.write_text("LORENZKIT_SEED=7\n", encoding="utf-8")
    SystemConfig.load_environment(dotenv)
    assert SystemConfig.DEFAULT_SEED == 7


def test_setup_logging_normalizes_level():
    SystemConfig.setup_logging("info")
    assert SystemConfig.LOG_LEVEL == "INFO"


def test_system_info_reports_paths():
    info = get_system_info()
    assert info["systems_directory"] == str(SystemConfig.SYSTEMS_DIR)
    assert info["seed"] == SystemConfig.DEFAULT_SEED
    assert "python_version" in info
