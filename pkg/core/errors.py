"""
Errores del análisis - Códigos y jerarquía de excepciones
=========================================================

✅ Códigos numéricos por rango, uno por etapa del pipeline
✅ Excepciones con `code` para que el CLI decida el exit code
✅ Encadenamiento explícito de la causa original (__cause__)
"""

import logging
import time
from dataclasses import dataclass
from typing import Any

logger = logging.getLogger(__name__)


# ==========================================
# ERROR CODES STANDARDIZATION
# ==========================================


class AnalysisErrorCodes:
    """Códigos de error estandarizados para el análisis."""

    # 1000-1099: Algebra errors
    NOT_DIVISIBLE = 1000
    DIVISION_BY_ZERO_IDENTICALLY = 1001
    NOT_POLYNOMIAL = 1002

    # 1100-1199: Field / chart errors
    POLE_ORDER_EXCEEDED = 1100
    INCOMPATIBLE_WEIGHTS = 1101
    NOT_INVERTIBLE = 1102

    # 1200-1299: Singularity / Painlevé errors
    POSITIVE_DIMENSIONAL_LOCUS = 1200
    PARAMETRIC_BOUNDARY = 1201

    # 1300-1399: Resolution / verification errors
    IDENTITY_FAILED = 1300
    UNKNOWN_REDUCTION = 1301

    # 1400-1499: Numeric errors
    BLOW_UP = 1400
    NON_FINITE_STATE = 1401
    NOT_NUMERIC = 1402

    # 1500-1599: System definition errors
    LEX_ERROR = 1500
    PARSE_ERROR = 1501
    UNDECLARED_SYMBOL = 1502
    ARITY_MISMATCH = 1503

    # 1600-1699: Configuration errors
    CONFIGURATION_ERROR = 1600
    INTERNAL_ERROR = 1699


# ==========================================
# EXCEPTION HIERARCHY
# ==========================================


class LorenzKitError(Exception):
    """Excepción base con código de error."""

    code: int = AnalysisErrorCodes.INTERNAL_ERROR

    def __init__(self, message: str, code: int | None = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code


class NotDivisible(LorenzKitError):
    code = AnalysisErrorCodes.NOT_DIVISIBLE


class DivisionByZeroIdentically(LorenzKitError):
    code = AnalysisErrorCodes.DIVISION_BY_ZERO_IDENTICALLY


class NotPolynomial(LorenzKitError):
    code = AnalysisErrorCodes.NOT_POLYNOMIAL


class PoleOrderExceeded(LorenzKitError):
    code = AnalysisErrorCodes.POLE_ORDER_EXCEEDED


class IncompatibleWeights(LorenzKitError):
    code = AnalysisErrorCodes.INCOMPATIBLE_WEIGHTS


class NotInvertible(LorenzKitError):
    code = AnalysisErrorCodes.NOT_INVERTIBLE


class PositiveDimensionalLocus(LorenzKitError):
    code = AnalysisErrorCodes.POSITIVE_DIMENSIONAL_LOCUS


class ParametricBoundary(LorenzKitError):
    code = AnalysisErrorCodes.PARAMETRIC_BOUNDARY


class IdentityFailed(LorenzKitError):
    """Una identidad simbólica no se cumple; guarda los residuos."""

    code = AnalysisErrorCodes.IDENTITY_FAILED

    def __init__(self, message: str, residuals: list[Any] | None = None) -> None:
        super().__init__(message)
        self.residuals = residuals or []


class BlowUp(LorenzKitError):
    code = AnalysisErrorCodes.BLOW_UP


class NonFiniteState(LorenzKitError):
    code = AnalysisErrorCodes.NON_FINITE_STATE


class NotNumeric(LorenzKitError):
    code = AnalysisErrorCodes.NOT_NUMERIC


class SysdefError(LorenzKitError):
    """Error de lectura de un archivo de sistema, con posición 1-based."""

    code = AnalysisErrorCodes.PARSE_ERROR

    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line else ""
        super().__init__(f"{message}{where}")


class LexError(SysdefError):
    code = AnalysisErrorCodes.LEX_ERROR


class ParseError(SysdefError):
    code = AnalysisErrorCodes.PARSE_ERROR


class UndeclaredSymbol(SysdefError):
    code = AnalysisErrorCodes.UNDECLARED_SYMBOL


class ArityMismatch(SysdefError):
    code = AnalysisErrorCodes.ARITY_MISMATCH


# ==========================================
# ERROR HANDLING UTILITIES
# ==========================================


def handle_analysis_error(
    error: Exception, stage: str, error_code: int | None = None
) -> LorenzKitError:
    """
    Registra un error de una etapa y lo convierte en LorenzKitError.

    Args:
        error: Error original
        stage: Nombre de la etapa (charts, singular, resolve, ...)
        error_code: Código específico (opcional)

    Returns:
        LorenzKitError con la causa original encadenada
    """
    logger.error("Stage '%s' error: %s", stage, str(error), exc_info=True)

    if isinstance(error, LorenzKitError):
        return error

    message = f"[{error_code or AnalysisErrorCodes.INTERNAL_ERROR}] {stage} failed: {error}"
    new_error = LorenzKitError(message, code=error_code)
    new_error.__cause__ = error
    return new_error


# ==========================================
# TIMING UTILITIES
# ==========================================


class StageTimer:
    """Context manager para medir el tiempo de una etapa del análisis."""

    def __init__(self, stage: str, monitor: Any | None = None):
        self.stage = stage
        self.monitor = monitor
        self.start_time: float = 0
        self.end_time: float = 0

    def __enter__(self) -> "StageTimer":
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.end_time = time.perf_counter()
        elapsed = self.end_time - self.start_time

        if exc_type is None:
            logger.debug("⏱️ Stage '%s' completed in %.2fs", self.stage, elapsed)
        else:
            logger.warning("⏱️ Stage '%s' failed after %.2fs", self.stage, elapsed)

        if self.monitor is not None:
            self.monitor.record_stage(self.stage, elapsed, failed=exc_type is not None)

    @property
    def execution_time(self) -> float:
        """Retorna el tiempo de ejecución en segundos."""
        return self.end_time - self.start_time


# ==========================================
# NON-RAISED OUTCOMES
# ==========================================


@dataclass(frozen=True)
class NotApplicable:
    """Resultado 'no aplica' con su motivo (se reporta, no se lanza)."""

    reason: str

    def __bool__(self) -> bool:
        return False
