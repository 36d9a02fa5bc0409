"""Fixtures compartidos: sistemas empaquetados y estado global limpio."""

import random

import pytest

from core.config import SystemConfig
from core.sysdef import SystemDoc, load_system
from services.monitoring import reset_monitor


def _bundled(name: str) -> SystemDoc:
    return load_system(SystemConfig.SYSTEMS_DIR / f"{name}.sys")


@pytest.fixture(scope="session")
def lorenz_doc() -> SystemDoc:
    return _bundled("lorenz")


@pytest.fixture(scope="session")
def system31_doc() -> SystemDoc:
    return _bundled("system31")


@pytest.fixture(scope="session")
def system41_doc() -> SystemDoc:
    return _bundled("system41")


@pytest.fixture(scope="session")
def system51_doc() -> SystemDoc:
    return _bundled("system51")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240601)


@pytest.fixture(autouse=True)
def clean_globals():
    """Restaura la semilla y el monitor que el CLI modifica."""
    seed = SystemConfig.DEFAULT_SEED
    log_level = SystemConfig.LOG_LEVEL
    reset_monitor()
    yield
    SystemConfig.DEFAULT_SEED = seed
    SystemConfig.LOG_LEVEL = log_level
    reset_monitor()
