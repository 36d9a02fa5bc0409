"""
Reporte del análisis - Modelos pydantic y esquema JSON versionado
=================================================================

✅ Valores exactos como texto a/b+c/d*i; numéricos con "exact": false
✅ Orden de campos fijo: mismo input + misma semilla = mismo JSON byte a byte
✅ Las métricas del monitor nunca entran aquí
"""

import json
import logging
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from analysis.painleve import BalanceReport
from analysis.resolve import CONDITIONS, ConditionMatch, ParameterFamily
from analysis.singular import (
    AccessibleSingularity,
    Census,
    LocalIndexResult,
    classify,
    format_value,
    resonances,
)
from analysis.verify import AtlasReport, UniquenessResult
from core.algebra import GaussianRational, RatExpr, format_gaussian
from core.config import SystemConfig
from core.errors import NotApplicable

logger = logging.getLogger(__name__)


class ReportModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Value(ReportModel):
    """Número del reporte: exacto sobre Q(i) o aproximación de punto flotante."""

    value: str
    exact: bool = True


def value_of(x: Any) -> Value:
    if isinstance(x, float):
        return Value(value=f"{x:.{SystemConfig.SIGNIFICANT_DIGITS}g}", exact=False)
    if isinstance(x, complex):
        return Value(value=format_value(x), exact=False)
    if isinstance(x, RatExpr):
        return Value(value=x.format())
    return Value(value=format_gaussian(x))


# ==========================================
# SECCIONES
# ==========================================


class SingularityModel(ReportModel):
    label: str
    projective: list[Value]
    chart: str
    point: list[Value]
    vanishing_order: int | None = None
    seen_in: list[str] = Field(default_factory=list)
    local_index: list[Value] = Field(default_factory=list)
    classification: str | None = None
    resonances: list[int] | None = None
    resonance_note: str | None = None


class CensusSection(ReportModel):
    charts: list[str]
    singularities: list[SingularityModel]
    unplaced: list[str] = Field(default_factory=list)


class BalanceModel(ReportModel):
    branch: int
    exponents: list[int]
    coefficients: list[Value]
    residuals_vanish: bool


class PainleveSection(ReportModel):
    balances: list[BalanceModel]
    conjugate_pairs: bool | None = None
    notes: list[str] = Field(default_factory=list)


class PoleCoefficientModel(ReportModel):
    label: str
    coefficient: str
    condition: int | None = None
    factor: str | None = None


class ResolutionSection(ReportModel):
    conditions: list[str]
    pole_coefficients: list[PoleCoefficientModel] = Field(default_factory=list)
    families: list[str] = Field(default_factory=list)
    params: dict[str, str] = Field(default_factory=dict)
    resolvable: bool | None = None
    notes: list[str] = Field(default_factory=list)


class CheckModel(ReportModel):
    """Veredicto de una verificación (integral, reducción, criterio)."""

    name: str
    passed: bool
    detail: str = ""


class ChartCheckModel(ReportModel):
    chart: str
    polynomial: bool
    determinant: str
    volume_preserving: bool | None = None
    passed: bool
    denominators: dict[str, str] = Field(default_factory=dict)


class AtlasSection(ReportModel):
    atlas: str
    params: dict[str, str] = Field(default_factory=dict)
    charts: list[ChartCheckModel]
    overlap_problems: list[str] = Field(default_factory=list)
    passed: bool


class UniquenessSection(ReportModel):
    atlas: str
    params: dict[str, str] = Field(default_factory=dict)
    constraints: int
    dimension: int
    affine_dimension: int | None = None
    unique: bool
    matches_system: bool | None = None
    solution: list[str] = Field(default_factory=list)


class NumericCheckModel(ReportModel):
    name: str
    value: Value
    bound: str | None = None
    passed: bool


class AnalysisReport(ReportModel):
    """Reporte completo de una corrida del CLI."""

    schema_version: str = SystemConfig.REPORT_SCHEMA_VERSION
    system: str
    params: dict[str, str] = Field(default_factory=dict)
    seed: int = 0
    census: CensusSection | None = None
    painleve: PainleveSection | None = None
    resolution: ResolutionSection | None = None
    integrals: list[CheckModel] = Field(default_factory=list)
    reductions: list[CheckModel] = Field(default_factory=list)
    atlases: list[AtlasSection] = Field(default_factory=list)
    uniqueness: list[UniquenessSection] = Field(default_factory=list)
    numeric: list[NumericCheckModel] = Field(default_factory=list)
    suite: list[CheckModel] = Field(default_factory=list)
    discrepancies: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    def failures(self) -> list[str]:
        """Nombres de todas las verificaciones fallidas (para --strict)."""
        failed = [f"integral {c.name}" for c in self.integrals if not c.passed]
        failed += [f"reduction {c.name}" for c in self.reductions if not c.passed]
        failed += [f"atlas {a.atlas}" for a in self.atlases if not a.passed]
        failed += [
            f"uniqueness {u.atlas}"
            for u in self.uniqueness
            if not u.unique or u.matches_system is False
        ]
        failed += [f"numeric {n.name}" for n in self.numeric if not n.passed]
        failed += [f"suite {c.name}" for c in self.suite if not c.passed]
        if self.painleve and not all(b.residuals_vanish for b in self.painleve.balances):
            failed.append("painleve residuals")
        return failed

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, exclude_none=False) + "\n"


def report_schema() -> str:
    """Esquema JSON del reporte, con su versión."""
    schema = AnalysisReport.model_json_schema()
    schema["$id"] = f"lorenzkit/report/{SystemConfig.REPORT_SCHEMA_VERSION}"
    schema["version"] = SystemConfig.REPORT_SCHEMA_VERSION
    return json.dumps(schema, indent=2, sort_keys=True) + "\n"


# ==========================================
# CONSTRUCTORES DESDE LOS RESULTADOS DEL ANÁLISIS
# ==========================================


def singularity_model(
    label: str,
    point: AccessibleSingularity,
    index: LocalIndexResult,
    projective: tuple[Any, ...] = (),
    seen_in: list[str] | None = None,
) -> SingularityModel:
    found = resonances(index)
    return SingularityModel(
        label=label,
        projective=[value_of(c) for c in projective],
        chart=point.chart,
        point=[value_of(c) for c in point.point],
        vanishing_order=point.vanishing_order,
        seen_in=seen_in or [],
        local_index=[value_of(e) for e in index.eigenvalues],
        classification=classify(index).value,
        resonances=None if isinstance(found, NotApplicable) else found,
        resonance_note=found.reason if isinstance(found, NotApplicable) else None,
    )


def census_section(census: Census) -> CensusSection:
    return CensusSection(
        charts=sorted(census.charted),
        singularities=[
            singularity_model(
                entry.label,
                entry.chosen,
                entry.index,
                entry.projective,
                [p.format() for p in entry.occurrences],
            )
            for entry in census.entries
        ],
        unplaced=[p.format() for p in census.unplaced],
    )


def painleve_section(report: BalanceReport) -> PainleveSection:
    return PainleveSection(
        balances=[
            BalanceModel(
                branch=b.branch,
                exponents=list(b.exponents),
                coefficients=[value_of(c) for c in b.coefficients],
                residuals_vanish=all(r.is_zero for r in report.residuals[b.branch]),
            )
            for b in report.balances
        ],
        conjugate_pairs=report.conjugate_pairs,
        notes=list(report.notes),
    )


def resolution_section(
    matches: list[ConditionMatch] | None = None,
    families: list[ParameterFamily] | None = None,
    params: dict[str, GaussianRational] | None = None,
    resolvable: bool | None = None,
    notes: list[str] | None = None,
) -> ResolutionSection:
    return ResolutionSection(
        conditions=[c.format() for c in CONDITIONS],
        pole_coefficients=[
            PoleCoefficientModel(
                label=m.coefficient.label(),
                coefficient=m.coefficient.coefficient.format(),
                condition=None if m.condition is None else m.condition + 1,
                factor=None if m.factor is None else m.factor.format(),
            )
            for m in matches or []
        ],
        families=[f.format() for f in families or []],
        params={k: format_gaussian(v) for k, v in (params or {}).items()},
        resolvable=resolvable,
        notes=list(notes or []),
    )


def atlas_section(report: AtlasReport, params: dict[str, Any] | None = None) -> AtlasSection:
    return AtlasSection(
        atlas=report.name,
        params={k: str(v) for k, v in (params or {}).items()},
        charts=[
            ChartCheckModel(
                chart=c.chart,
                polynomial=c.polynomial,
                determinant=c.determinant.format(),
                volume_preserving=c.volume_preserving,
                passed=c.passed,
                denominators=dict(sorted(c.pole_denominators.items())),
            )
            for c in report.charts
        ],
        overlap_problems=list(report.overlap_problems),
        passed=report.passed,
    )


def uniqueness_section(
    result: UniquenessResult,
    atlas: str,
    params: dict[str, Any] | None = None,
    matches_system: bool | None = None,
) -> UniquenessSection:
    solution = []
    if result.solution is not None:
        solution = result.solution.format().splitlines()
    return UniquenessSection(
        atlas=atlas,
        params={k: str(v) for k, v in (params or {}).items()},
        constraints=result.constraints,
        dimension=result.dimension,
        affine_dimension=result.affine_dimension,
        unique=result.unique,
        matches_system=matches_system,
        solution=solution,
    )


def numeric_check(name: str, value: float, bound: float | None, passed: bool) -> NumericCheckModel:
    digits = SystemConfig.SIGNIFICANT_DIGITS
    return NumericCheckModel(
        name=name,
        value=value_of(float(value)),
        bound=None if bound is None else f"{bound:.{digits}g}",
        passed=passed,
    )


# ==========================================
# TEXTO PARA LA TERMINAL
# ==========================================


def _mark(passed: bool) -> str:
    return "PASS" if passed else "FAIL"


def _values(values: list[Value]) -> str:
    return "(" + ", ".join(v.value if v.exact else f"~{v.value}" for v in values) + ")"


def format_text(report: AnalysisReport) -> str:
    """Resumen legible del reporte (los valores inexactos llevan ~)."""
    lines = [f"system {report.system}"]
    if report.params:
        lines.append("params " + ", ".join(f"{k}={v}" for k, v in report.params.items()))

    if report.census:
        lines.append(f"accessible singularities ({', '.join(report.census.charts)}):")
        for s in report.census.singularities:
            lines.append(
                f"  {s.label} {s.chart}{_values(s.point)} index {_values(s.local_index)} "
                f"{s.classification}"
            )
        lines += [f"  unplaced {p}" for p in report.census.unplaced]

    if report.painleve:
        lines.append("dominant balances:")
        for b in report.painleve.balances:
            lines.append(
                f"  branch {b.branch}: exponents {tuple(b.exponents)} "
                f"coefficients {_values(b.coefficients)}"
            )

    if report.resolution:
        lines.append("resolution conditions:")
        lines += [f"  C{k}: {c}" for k, c in enumerate(report.resolution.conditions, start=1)]
        for p in report.resolution.pole_coefficients:
            target = f"C{p.condition} x ({p.factor})" if p.condition else "unmatched"
            lines.append(f"  {p.label} = {target}")
        if report.resolution.families:
            lines.append("  families: " + ", ".join(report.resolution.families))
        if report.resolution.resolvable is not None:
            lines.append(f"  resolvable: {str(report.resolution.resolvable).lower()}")

    lines += [f"integral {c.name}: {_mark(c.passed)} {c.detail}" for c in report.integrals]
    lines += [f"reduction {c.name}: {_mark(c.passed)} {c.detail}" for c in report.reductions]
    for a in report.atlases:
        lines.append(f"atlas {a.atlas}: {_mark(a.passed)}")
        for c in a.charts:
            lines.append(f"  {c.chart}: polynomial={c.polynomial} det={c.determinant}")
        lines += [f"  overlap: {p}" for p in a.overlap_problems]
    for u in report.uniqueness:
        lines.append(
            f"uniqueness {u.atlas}: nullity {u.dimension}, affine {u.affine_dimension}, "
            f"unique={u.unique}"
        )
        lines += [f"  {row}" for row in u.solution]
    for n in report.numeric:
        bound = f" (bound {n.bound})" if n.bound else ""
        lines.append(f"numeric {n.name}: {n.value.value}{bound} {_mark(n.passed)}")
    lines += [f"suite {c.name}: {_mark(c.passed)} {c.detail}" for c in report.suite]
    lines += [f"note: {n}" for n in report.notes]
    lines += [f"discrepancy: {d}" for d in report.discrepancies]
    return "\n".join(lines) + "\n"
