"""
Services module - Integración numérica, reporte y monitoreo de corridas.
"""

from .monitoring import get_monitor, reset_monitor
from .numeric import Trajectory, blowup_exponent, convergence_order, drift_check, export_csv, integrate
from .report import AnalysisReport, report_schema

__all__ = [
    "AnalysisReport",
    "Trajectory",
    "blowup_exponent",
    "convergence_order",
    "drift_check",
    "export_csv",
    "get_monitor",
    "integrate",
    "report_schema",
    "reset_monitor",
]
