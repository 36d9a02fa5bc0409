"""
Configuración global del análisis.

Valores por defecto como atributos de clase; se sobreescriben desde el
entorno (variables LORENZKIT_*) o desde un archivo .env.
"""

import logging
import os
import platform
import sys
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

PROJECT_DIR = Path(__file__).parent.parent


class SystemConfig:
    """Configuraciones globales del sistema."""

    # Configuración de logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Datos empaquetados
    SYSTEMS_DIR: Path = PROJECT_DIR / "systems"
    ATLASES_DIR: Path = PROJECT_DIR / "atlases"

    # Límites del álgebra y de las búsquedas
    MAX_POLE_ORDER: int = 16
    PAINLEVE_MAX_EXP: int = 6
    NUMERIC_RESIDUAL_TOL: float = 1e-12

    # Integración numérica
    BLOWUP_THRESHOLD: float = 1e8

    # Reporte
    DEFAULT_SEED: int = 0
    OVERLAP_SAMPLE_POINTS: int = 5
    REPORT_SCHEMA_VERSION: str = "1.0"
    SIGNIFICANT_DIGITS: int = 15

    # Monitoreo
    MONITORING_ENABLED: bool = True

    # Variable de entorno -> atributo
    _ENV_OVERRIDES: dict[str, str] = {
        "LORENZKIT_LOG_LEVEL": "LOG_LEVEL",
        "LORENZKIT_SEED": "DEFAULT_SEED",
        "LORENZKIT_SYSTEMS_DIR": "SYSTEMS_DIR",
        "LORENZKIT_ATLASES_DIR": "ATLASES_DIR",
        "LORENZKIT_MONITORING": "MONITORING_ENABLED",
    }

    @classmethod
    def load_environment(cls, dotenv_path: str | Path | None = None) -> None:
        """
        Carga overrides desde .env y desde el entorno.

        Un valor inválido se registra como warning y se conserva el valor
        por defecto.

        Args:
            dotenv_path: Ruta explícita al archivo .env (opcional)
        """
        load_dotenv(dotenv_path=dotenv_path)

        for env_name, attr in cls._ENV_OVERRIDES.items():
            raw = os.getenv(env_name)
            if raw is None:
                continue
            try:
                setattr(cls, attr, _coerce(attr, raw, getattr(cls, attr)))
                logger.debug("🔧 Config override %s=%s", attr, raw)
            except ValueError:
                logger.warning(
                    "⚠️ Invalid %s=%r, keeping %s", env_name, raw, getattr(cls, attr)
                )

    @classmethod
    def setup_logging(cls, level: str | None = None) -> None:
        """Configura el logging del sistema (siempre hacia stderr)."""
        if level is not None:
            cls.LOG_LEVEL = level.upper()

        logging.basicConfig(
            level=getattr(logging, cls.LOG_LEVEL, logging.WARNING),
            format=cls.LOG_FORMAT,
            stream=sys.stderr,
        )

        # Reducir ruido de librerías externas
        logging.getLogger("dotenv").setLevel(logging.WARNING)


_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _coerce(attr: str, raw: str, default: Any) -> Any:
    value = raw.strip()
    if attr == "LOG_LEVEL":
        if value.upper() not in _LOG_LEVELS:
            raise ValueError(raw)
        return value.upper()
    if isinstance(default, bool):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(raw)
    if isinstance(default, int):
        return int(value)
    if isinstance(default, Path):
        path = Path(value).expanduser()
        if not path.is_dir():
            raise ValueError(raw)
        return path
    return value


def get_system_info() -> dict[str, Any]:
    """
    Obtiene información del sistema para debugging.

    Returns:
        Información del sistema y configuración
    """
    return {
        "python_version": sys.version,
        "platform": platform.platform(),
        "systems_directory": str(SystemConfig.SYSTEMS_DIR),
        "atlases_directory": str(SystemConfig.ATLASES_DIR),
        "log_level": SystemConfig.LOG_LEVEL,
        "seed": SystemConfig.DEFAULT_SEED,
    }
