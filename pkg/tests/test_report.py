"""Modelos del reporte, JSON determinista y texto."""

import json

import pytest
from pydantic import ValidationError

from analysis.painleve import dominant_balances
from core.algebra import MultiPoly, RatExpr, gaussian
from core.config import SystemConfig
from core.field import VField
from services.report import (
    AnalysisReport,
    CheckModel,
    Value,
    format_text,
    numeric_check,
    painleve_section,
    report_schema,
    resolution_section,
    value_of,
)


def test_value_of_marks_exactness():
    assert value_of(gaussian(0, -2)) == Value(value="-2*i", exact=True)
    assert value_of(0.5) == Value(value="0.5", exact=False)
    assert not value_of(1 + 2j).exact
    assert value_of(RatExpr(2, MultiPoly.variable("a"))) == Value(value="(2)/(a)", exact=True)


def test_report_json_is_deterministic():
    def build() -> AnalysisReport:
        return AnalysisReport(
            system="system31",
            seed=7,
            integrals=[CheckModel(name="I", passed=True, detail="L_v(I) = 0")],
            numeric=[numeric_check("drift I", 1.25e-12, 1e-8, True)],
        )

    text = build().to_json()
    assert text == build().to_json()
    data = json.loads(text)
    assert list(data)[:4] == ["schema_version", "system", "params", "seed"]
    assert data["schema_version"] == SystemConfig.REPORT_SCHEMA_VERSION
    assert data["numeric"][0]["value"] == {"value": "1.25e-12", "exact": False}
    assert data["numeric"][0]["bound"] == "1e-08"


def test_failures_collect_every_section():
    report = AnalysisReport(
        system="s",
        integrals=[CheckModel(name="I", passed=False)],
        suite=[CheckModel(name="census", passed=True), CheckModel(name="parser", passed=False)],
        numeric=[numeric_check("slope", -0.5, 0.05, False)],
    )
    assert report.failures() == ["integral I", "numeric slope", "suite parser"]
    assert AnalysisReport(system="s").failures() == []


def test_unknown_fields_are_rejected():
    with pytest.raises(ValidationError):
        AnalysisReport(system="s", metrics={"rss_mb": 1.0})


def test_schema_is_versioned_json():
    schema = json.loads(report_schema())
    assert schema["version"] == SystemConfig.REPORT_SCHEMA_VERSION
    assert schema["$id"].endswith(SystemConfig.REPORT_SCHEMA_VERSION)
    assert "census" in schema["properties"]


def test_painleve_section_and_text():
    x = MultiPoly.variable("x")
    balances = dominant_balances(VField.from_polys("riccati", ("x",), [x**2]))
    report = AnalysisReport(system="riccati", painleve=painleve_section(balances))
    assert report.painleve.balances[0].coefficients == [Value(value="-1")]
    assert report.failures() == []
    text = format_text(report)
    assert text.startswith("system riccati\n")
    assert "branch 0: exponents (1,) coefficients (-1)" in text


def test_resolution_section_lists_conditions():
    section = resolution_section(params={"sigma": gaussian(2)}, resolvable=True)
    assert len(section.conditions) == 4
    assert section.params == {"sigma": "2"}
    text = format_text(AnalysisReport(system="lorenz", resolution=section))
    assert "resolvable: true" in text


def test_inexact_values_are_marked_in_text():
    report = AnalysisReport(system="s", numeric=[numeric_check("order", 3.98, None, True)])
    assert "numeric order: 3.98 PASS" in format_text(report)
