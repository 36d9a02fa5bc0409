"""Jerarquía de errores, temporizador de etapas y monitor."""

import pytest

from core.errors import (
    AnalysisErrorCodes,
    LorenzKitError,
    NotApplicable,
    NotNumeric,
    ParseError,
    StageTimer,
    SysdefError,
    UndeclaredSymbol,
    handle_analysis_error,
)
from services.monitoring import AnalysisMonitor, get_monitor, reset_monitor


def test_error_codes_by_class():
    assert NotNumeric("x").code == AnalysisErrorCodes.NOT_NUMERIC
    assert UndeclaredSymbol("x").code == AnalysisErrorCodes.UNDECLARED_SYMBOL
    assert LorenzKitError("x", code=1234).code == 1234
    assert issubclass(ParseError, SysdefError)


def test_sysdef_error_carries_position():
    error = ParseError("unexpected ')'", 3, 14)
    assert (error.line, error.column) == (3, 14)
    assert str(error) == "unexpected ')' (line 3, column 14)"


def test_handle_analysis_error_wraps_foreign_exceptions():
    original = KeyError("chart")
    wrapped = handle_analysis_error(original, "charts")
    assert isinstance(wrapped, LorenzKitError)
    assert wrapped.__cause__ is original
    assert "charts failed" in str(wrapped)

    own = NotNumeric("unbound")
    assert handle_analysis_error(own, "numeric") is own


def test_stage_timer_feeds_monitor():
    monitor = AnalysisMonitor(enabled=True)
    with StageTimer("singular", monitor) as timer:
        pass
    assert timer.execution_time >= 0
    assert "singular" in monitor.get_status()["stages"]

    with pytest.raises(RuntimeError):
        with StageTimer("resolve", monitor):
            raise RuntimeError("boom")
    assert monitor.get_status()["failed_stages"] == ["resolve"]


def test_monitor_counts_checks():
    monitor = AnalysisMonitor(enabled=False)
    monitor.record_check("census", True)
    monitor.record_check("atlas", False)
    monitor.record_stage("charts", 1.0)
    status = monitor.get_status()
    assert status["checks"] == {"passed": 1, "failed": 1}
    assert status["stages"] == {}


def test_monitor_singleton():
    first = get_monitor()
    assert get_monitor() is first
    reset_monitor()
    assert get_monitor() is not first


def test_not_applicable_is_falsy():
    outcome = NotApplicable("ratios are not integers")
    assert not outcome
    assert outcome.reason == "ratios are not integers"
