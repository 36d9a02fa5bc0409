"""
Monitor de ejecución del análisis.

Registra duración por etapa, memoria residente pico y conteos de
verificaciones. Nada de esto entra en el reporte JSON.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any

import psutil

from core.config import SystemConfig

logger = logging.getLogger(__name__)


@dataclass
class AnalysisMetrics:
    """Métricas de una corrida."""

    # Memoria
    rss_mb: float = 0.0
    peak_rss_mb: float = 0.0

    # Tiempos por etapa
    stage_seconds: dict[str, float] = field(default_factory=dict)
    failed_stages: list[str] = field(default_factory=list)

    # Contadores
    checks_passed: int = 0
    checks_failed: int = 0

    started_at: float = field(default_factory=time.time)


class AnalysisMonitor:
    """Monitor de una corrida del CLI."""

    def __init__(self, enabled: bool | None = None) -> None:
        """
        Inicializa el monitor.

        Args:
            enabled: Fuerza el estado; por defecto SystemConfig.MONITORING_ENABLED
        """
        self.enabled = SystemConfig.MONITORING_ENABLED if enabled is None else enabled
        self.metrics = AnalysisMetrics()
        self._process = psutil.Process() if self.enabled else None
        logger.debug("🔍 Analysis monitor initialized (enabled=%s)", self.enabled)

    def _sample_memory(self) -> None:
        if self._process is None:
            return
        try:
            rss = self._process.memory_info().rss / 1024 / 1024
        except psutil.Error as e:
            logger.debug("Memory sample failed: %s", str(e))
            return
        self.metrics.rss_mb = rss
        self.metrics.peak_rss_mb = max(self.metrics.peak_rss_mb, rss)

    def record_stage(self, stage: str, seconds: float, failed: bool = False) -> None:
        """Acumula el tiempo de una etapa (llamado por StageTimer)."""
        if not self.enabled:
            return
        self.metrics.stage_seconds[stage] = self.metrics.stage_seconds.get(stage, 0.0) + seconds
        if failed:
            self.metrics.failed_stages.append(stage)
        self._sample_memory()

    def record_check(self, name: str, passed: bool) -> None:
        if passed:
            self.metrics.checks_passed += 1
        else:
            self.metrics.checks_failed += 1
            logger.warning("❌ Check failed: %s", name)

    def get_status(self) -> dict[str, Any]:
        """
        Retorna el estado de la corrida.

        Returns:
            Tiempos, memoria y conteos
        """
        self._sample_memory()
        return {
            "elapsed_seconds": time.time() - self.metrics.started_at,
            "stages": dict(self.metrics.stage_seconds),
            "failed_stages": list(self.metrics.failed_stages),
            "memory": {
                "rss_mb": self.metrics.rss_mb,
                "peak_rss_mb": self.metrics.peak_rss_mb,
            },
            "checks": {
                "passed": self.metrics.checks_passed,
                "failed": self.metrics.checks_failed,
            },
        }

    def log_summary(self) -> None:
        """Log del resumen final."""
        if not self.enabled:
            return
        status = self.get_status()
        slowest = sorted(status["stages"].items(), key=lambda kv: kv[1], reverse=True)[:3]
        logger.info(
            "📊 Run summary - Elapsed: %.2fs, Peak RSS: %.1fMB, Checks: %d passed / %d failed",
            status["elapsed_seconds"],
            status["memory"]["peak_rss_mb"],
            status["checks"]["passed"],
            status["checks"]["failed"],
        )
        for stage, seconds in slowest:
            logger.info("⏱️ %s: %.2fs", stage, seconds)


class _MonitorSingleton:
    """Singleton para el monitor global."""

    _instance: AnalysisMonitor | None = None

    @classmethod
    def get_instance(cls) -> AnalysisMonitor:
        if cls._instance is None:
            cls._instance = AnalysisMonitor()
        return cls._instance

    @classmethod
    def reset_instance(cls) -> None:
        """Resetea la instancia (útil para tests)."""
        cls._instance = None


def get_monitor() -> AnalysisMonitor:
    """Obtiene la instancia global del monitor."""
    return _MonitorSingleton.get_instance()


def reset_monitor() -> None:
    _MonitorSingleton.reset_instance()
