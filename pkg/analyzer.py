"""
Analyzer.py - CLI de lorenzkit
==============================

✅ Subcomandos: analyze, painleve, index, resolve, verify-integrals, atlas,
   uniqueness, numeric, reduction, schema
✅ Reporte legible en stdout y JSON determinista con --json
✅ Exit codes: 0 ok, 1 error de lectura, 2 fallo interno, 3 fallo con --strict
"""

import argparse
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from analysis.painleve import dominant_balances
from analysis.resolve import (
    PARAMETERS,
    ParameterTriple,
    apply_resolution,
    check_resolvable,
    match_conditions,
    parse_assignments,
    solve_conditions,
)
from analysis.singular import AccessibleSingularity, local_index, singularity_census
from analysis.suite import DISCREPANCIES, run_suite
from analysis.verify import (
    REDUCTIONS,
    AtlasSpec,
    uniqueness_search,
    verify_atlas,
    verify_first_integral,
    verify_reduction,
)
from core.algebra import format_gaussian, gaussian, parse_gaussian, to_complex
from core.atlas_registry import AtlasRegistry
from core.charts import Chart, standard_atlas, to_chart, weighted_chart
from core.config import SystemConfig, get_system_info
from core.errors import (
    IdentityFailed,
    LorenzKitError,
    StageTimer,
    SysdefError,
    handle_analysis_error,
)
from core.field import VField, lie_derivative
from core.sysdef import SystemDoc, load_system
from services.monitoring import get_monitor
from services.numeric import blowup_exponent, drift_check, export_csv, integrate
from services.report import (
    AnalysisReport,
    CensusSection,
    CheckModel,
    atlas_section,
    census_section,
    format_text,
    numeric_check,
    painleve_section,
    report_schema,
    resolution_section,
    singularity_model,
    uniqueness_section,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2
EXIT_STRICT = 3

# Defaults de las verificaciones numéricas dentro de `analyze`
ANALYZE_T_END = 1.0
ANALYZE_STEP = 1e-3
ANALYZE_DRIFT_TOL = 1e-8
SLOPE_TOL = 0.05


# ==========================================
# HELPERS
# ==========================================


def _params(args: argparse.Namespace) -> dict[str, Any]:
    return parse_assignments(args.params) if getattr(args, "params", None) else {}


def _point(text: str) -> tuple[Any, ...]:
    return tuple(parse_gaussian(chunk) for chunk in text.split(","))


def _complex_point(text: str) -> list[complex]:
    return [to_complex(value) for value in _point(text)]


def _new_report(doc: SystemDoc | None, args: argparse.Namespace, name: str = "") -> AnalysisReport:
    params = _params(args)
    return AnalysisReport(
        system=doc.name if doc else name,
        params={k: format_gaussian(v) for k, v in params.items()},
        seed=SystemConfig.DEFAULT_SEED,
    )


def _field(doc: SystemDoc, args: argparse.Namespace) -> VField:
    params = _params(args)
    unknown = sorted(set(params) - set(doc.params))
    if unknown:
        raise LorenzKitError(f"{doc.name}: unknown parameters {unknown}")
    return doc.to_vfield().with_params(params)


def _charts(v: VField, mode: str, report: AnalysisReport) -> tuple[Chart, ...]:
    charts: tuple[Chart, ...] = ()
    if mode in ("standard", "all"):
        charts += standard_atlas(v.statevars).charts
    if mode in ("weighted", "all") and v.is_polynomial:
        balances = dominant_balances(v).balances
        if balances:
            lead = balances[0]
            try:
                charts += (weighted_chart(lead.exponents, v.statevars),)
            except LorenzKitError as e:
                report.notes.append(f"weighted chart skipped: {e}")
        else:
            report.notes.append("weighted chart skipped: no dominant balance")
    return charts


def _chart_by_name(v: VField, name: str) -> Chart:
    for chart in standard_atlas(v.statevars).charts:
        if chart.name == name:
            return chart
    if name.startswith("W(") and name.endswith(")"):
        weights = tuple(int(w) for w in name[2:-1].split(","))
        return weighted_chart(weights, v.statevars)
    raise LorenzKitError(f"unknown chart {name!r}; expected U0..U{v.dimension} or W(m,n,p)")


def _is_lorenz_family(doc: SystemDoc) -> bool:
    return set(PARAMETERS) <= set(doc.params) and doc.variables == ("x", "y", "z")


# ==========================================
# SECCIONES
# ==========================================


def _census(v: VField, args: argparse.Namespace, report: AnalysisReport) -> None:
    monitor = get_monitor()
    with StageTimer("charts", monitor):
        charts = _charts(v, args.charts, report)
    with StageTimer("singular", monitor):
        report.census = census_section(singularity_census(v, charts))
    report.discrepancies += [DISCREPANCIES["eigenvalue_order"], DISCREPANCIES["weighted_origin"]]


def _painleve(v: VField, report: AnalysisReport) -> None:
    if not v.is_polynomial:
        report.notes.append("dominant balance skipped: rational field")
        return
    with StageTimer("painleve", get_monitor()):
        found = dominant_balances(v)
    report.painleve = painleve_section(found)
    report.discrepancies.append(DISCREPANCIES["balance_labels"])


def _resolution(doc: SystemDoc, args: argparse.Namespace, report: AnalysisReport) -> None:
    params = _params(args)
    with StageTimer("resolve", get_monitor()):
        result = apply_resolution(doc.to_vfield())
        matches = match_conditions(result.coefficients)
        families = solve_conditions()
        resolvable = None
        bound = {k: params[k] for k in PARAMETERS if k in params}
        if len(bound) == len(PARAMETERS):
            resolvable = check_resolvable(ParameterTriple(**bound))
    report.resolution = resolution_section(matches, families, bound, resolvable, result.notes)
    report.discrepancies += [DISCREPANCIES["step5_center"], DISCREPANCIES["epsilon_powers"]]


def _integrals(doc: SystemDoc, v: VField, report: AnalysisReport) -> None:
    monitor = get_monitor()
    with StageTimer("verify", monitor):
        for name, expr in doc.integrals:
            passed = verify_first_integral(v, expr)
            residual = lie_derivative(v, expr)
            report.integrals.append(
                CheckModel(name=name, passed=passed, detail=f"L_v({name}) = {residual.format()}")
            )
            monitor.record_check(f"integral {name}", passed)
    if not doc.integrals:
        report.notes.append("no integrals declared")


def _numeric(
    doc: SystemDoc, v: VField, params: dict[str, Any], report: AnalysisReport
) -> None:
    if v.params:
        report.notes.append(f"numeric checks skipped: parameters without values {list(v.params)}")
        return
    monitor = get_monitor()
    with StageTimer("numeric", monitor):
        x0 = [1] + [0] * (v.dimension - 1)
        if doc.integrals:
            traj = integrate(v, x0, (0.0, ANALYZE_T_END), ANALYZE_STEP)
            for name, expr in doc.integrals:
                drift = drift_check(traj, expr, v, params)
                passed = drift <= ANALYZE_DRIFT_TOL
                report.numeric.append(
                    numeric_check(f"drift {name}", drift, ANALYZE_DRIFT_TOL, passed)
                )
                monitor.record_check(f"drift {name}", passed)
        if v.is_polynomial:
            balances = dominant_balances(v).balances
            if balances:
                lead = balances[0]
                try:
                    slope = blowup_exponent(v, lead.exponents, lead.coefficients)
                except LorenzKitError as e:
                    report.notes.append(f"blow-up fit skipped: {e}")
                    return
                passed = abs(slope + lead.exponents[0]) <= SLOPE_TOL
                report.numeric.append(
                    numeric_check(f"blow-up exponent {lead.variables[0]}", slope, SLOPE_TOL, passed)
                )
                monitor.record_check("blow-up exponent", passed)


# ==========================================
# SUBCOMANDOS
# ==========================================


def cmd_analyze(args: argparse.Namespace) -> AnalysisReport:
    """charts -> singular -> painleve -> resolve -> verify -> numeric."""
    doc = load_system(args.file)
    report = _new_report(doc, args)
    v = _field(doc, args)

    if v.dimension == 3:
        try:
            _census(v, args, report)
        except LorenzKitError as e:
            report.notes.append(f"census failed: {e}")
    else:
        report.notes.append("census skipped: only three-dimensional fields")
    _painleve(v, report)
    if _is_lorenz_family(doc):
        _resolution(doc, args, report)
    _integrals(doc, v, report)
    if not args.skip_numeric:
        _numeric(doc, v, _params(args), report)
    if args.paper_suite:
        with StageTimer("suite", get_monitor()):
            report.suite = run_suite(SystemConfig.DEFAULT_SEED, args.skip_numeric)
        report.discrepancies += [DISCREPANCIES["chart2_reading"]]
    report.discrepancies = sorted(set(report.discrepancies))
    return report


def cmd_painleve(args: argparse.Namespace) -> AnalysisReport:
    doc = load_system(args.file)
    report = _new_report(doc, args)
    _painleve(_field(doc, args), report)
    return report


def cmd_index(args: argparse.Namespace) -> AnalysisReport:
    doc = load_system(args.file)
    report = _new_report(doc, args)
    v = _field(doc, args)
    chart = _chart_by_name(v, args.chart)
    point = _point(args.point)
    if len(point) != v.dimension:
        raise LorenzKitError(f"point has {len(point)} coordinates, expected {v.dimension}")
    with StageTimer("index", get_monitor()):
        cs = to_chart(v, chart)
        p = AccessibleSingularity(chart.name, chart.variables, point)
        result = local_index(cs, p)
    report.census = CensusSection(
        charts=[chart.name], singularities=[singularity_model("point", p, result)]
    )
    return report


def cmd_resolve(args: argparse.Namespace) -> AnalysisReport:
    doc = load_system(args.file)
    if not _is_lorenz_family(doc):
        raise LorenzKitError(f"{doc.name}: resolution needs parameters {', '.join(PARAMETERS)}")
    report = _new_report(doc, args)
    _resolution(doc, args, report)
    return report


def cmd_verify_integrals(args: argparse.Namespace) -> AnalysisReport:
    doc = load_system(args.file)
    report = _new_report(doc, args)
    _integrals(doc, _field(doc, args), report)
    return report


def _atlas_spec(doc: SystemDoc, args: argparse.Namespace) -> tuple[AtlasSpec, dict[str, Any]]:
    registry = AtlasRegistry()
    spec = AtlasSpec.from_registry(args.atlas, doc, registry)
    return spec, _params(args)


def cmd_atlas(args: argparse.Namespace) -> AnalysisReport:
    doc = load_system(args.file)
    report = _new_report(doc, args)
    spec, params = _atlas_spec(doc, args)
    if params:
        spec = spec.with_params(params)
    with StageTimer("atlas", get_monitor()):
        checked = verify_atlas(spec)
    report.atlases.append(atlas_section(checked, report.params))
    get_monitor().record_check(f"atlas {args.atlas}", checked.passed)
    if args.atlas == "theorem41":
        report.discrepancies.append(DISCREPANCIES["chart2_reading"])
    return report


def cmd_uniqueness(args: argparse.Namespace) -> AnalysisReport:
    doc = load_system(args.file)
    report = _new_report(doc, args)
    spec, params = _atlas_spec(doc, args)
    if not params:
        params = {k: gaussian(v) for k, v in AtlasRegistry().default_params(args.atlas).items()}
        report.params = {k: format_gaussian(v) for k, v in params.items()}
    with StageTimer("uniqueness", get_monitor()):
        result = uniqueness_search(spec, params)
    matches = None
    if result.solution is not None:
        matches = result.solution == doc.to_vfield().with_params(params)
    report.uniqueness.append(uniqueness_section(result, args.atlas, report.params, matches))
    return report


def cmd_numeric(args: argparse.Namespace) -> AnalysisReport:
    doc = load_system(args.file)
    report = _new_report(doc, args)
    v = _field(doc, args)
    x0 = _complex_point(args.x0) if args.x0 else [1] + [0] * (v.dimension - 1)
    with StageTimer("numeric", get_monitor()):
        traj = integrate(v, x0, (0.0, args.t), args.step)
        if traj.blew_up:
            report.notes += traj.notes
        for name, expr in doc.integrals:
            drift = drift_check(traj, expr, v, _params(args))
            report.numeric.append(
                numeric_check(f"drift {name}", drift, args.tol, drift <= args.tol)
            )
    if args.traj:
        export_csv(traj, args.traj)
        logger.info("💾 Trajectory written to %s", args.traj)
    return report


def cmd_reduction(args: argparse.Namespace) -> AnalysisReport:
    report = AnalysisReport(system="reductions", seed=SystemConfig.DEFAULT_SEED)
    kinds = sorted(REDUCTIONS) if args.kind == "all" else [args.kind]
    perturb = parse_gaussian(args.perturb)
    for kind in kinds:
        try:
            verify_reduction(kind, perturb)
            report.reductions.append(CheckModel(name=kind, passed=True, detail="zero residual"))
        except IdentityFailed as e:
            detail = "; ".join(r.format() for r in e.residuals)
            report.reductions.append(CheckModel(name=kind, passed=False, detail=detail))
    return report


# ==========================================
# PARSER
# ==========================================


def _common(parser: argparse.ArgumentParser, with_file: bool = True) -> None:
    if with_file:
        parser.add_argument("file", type=Path, help="system definition (.sys)")
        parser.add_argument("--params", help="exact parameter values, e.g. sigma=2,epsilon=0,b=1")
    parser.add_argument("--json", dest="json_path", help="write the JSON report here ('-' = stdout)")
    parser.add_argument("--strict", action="store_true", help="exit 3 on any failed check")
    parser.add_argument("--seed", type=int, help="seed for randomized checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorenzkit",
        description="Exact analysis of polynomial 3D vector fields",
    )
    parser.add_argument("--log-level", help="override LORENZKIT_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="full pipeline")
    _common(analyze)
    analyze.add_argument("--charts", choices=["standard", "weighted", "all"], default="all")
    analyze.add_argument("--skip-numeric", action="store_true")
    analyze.add_argument("--paper-suite", action="store_true", help="run every acceptance check")
    analyze.set_defaults(handler=cmd_analyze)

    painleve = sub.add_parser("painleve", help="dominant balances")
    _common(painleve)
    painleve.set_defaults(handler=cmd_painleve)

    index = sub.add_parser("index", help="local index at a chart point")
    _common(index)
    index.add_argument("--chart", required=True, help="U0..U3 or W(m,n,p)")
    index.add_argument("--point", required=True, help="exact coordinates, e.g. 0,i/2,1/2")
    index.set_defaults(handler=cmd_index)

    resolve = sub.add_parser("resolve", help="resolution conditions and parameter families")
    _common(resolve)
    resolve.set_defaults(handler=cmd_resolve)

    integrals = sub.add_parser("verify-integrals", help="Lie derivative of declared integrals")
    _common(integrals)
    integrals.set_defaults(handler=cmd_verify_integrals)

    atlas = sub.add_parser("atlas", help="verify a bundled atlas")
    _common(atlas)
    atlas.add_argument("--atlas", required=True)
    atlas.set_defaults(handler=cmd_atlas)

    uniqueness = sub.add_parser("uniqueness", help="quadratic systems polynomial on an atlas")
    _common(uniqueness)
    uniqueness.add_argument("--atlas", required=True)
    uniqueness.set_defaults(handler=cmd_uniqueness)

    numeric = sub.add_parser("numeric", help="RK4 integration and integral drift")
    _common(numeric)
    numeric.add_argument("--x0", help="initial state, e.g. 1,0,0")
    numeric.add_argument("--t", type=float, default=10.0, help="final time")
    numeric.add_argument("--step", type=float, default=1e-3)
    numeric.add_argument("--tol", type=float, default=1e-8, help="drift bound")
    numeric.add_argument("--traj", help="CSV path for the trajectory")
    numeric.set_defaults(handler=cmd_numeric)

    reduction = sub.add_parser("reduction", help="verify an ODE reduction identity")
    reduction.add_argument("kind", choices=sorted(REDUCTIONS) + ["all"])
    reduction.add_argument("--perturb", default="0", help="shift of the expected linear coefficient")
    _common(reduction, with_file=False)
    reduction.set_defaults(handler=cmd_reduction)

    schema = sub.add_parser("schema", help="print the JSON schema of the report")
    schema.set_defaults(handler=None)
    return parser


# ==========================================
# MAIN
# ==========================================


def _emit(report: AnalysisReport, json_path: str | None) -> None:
    if json_path == "-":
        sys.stdout.write(report.to_json())
        return
    sys.stdout.write(format_text(report))
    if json_path:
        Path(json_path).write_text(report.to_json(), encoding="utf-8")
        logger.info("💾 Report written to %s", json_path)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    SystemConfig.load_environment()
    SystemConfig.setup_logging(args.log_level)
    if getattr(args, "seed", None) is not None:
        SystemConfig.DEFAULT_SEED = args.seed

    if args.command == "schema":
        sys.stdout.write(report_schema())
        return EXIT_OK

    handler: Callable[[argparse.Namespace], AnalysisReport] = args.handler
    monitor = get_monitor()
    logger.info("🚀 lorenzkit %s", args.command)
    logger.debug("🖥️ Environment: %s", get_system_info())
    try:
        _params(args)
        if getattr(args, "point", None):
            _point(args.point)
        if getattr(args, "x0", None):
            _point(args.x0)
        if getattr(args, "perturb", None):
            parse_gaussian(args.perturb)
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT

    try:
        report = handler(args)
    except (SysdefError, OSError) as e:
        logger.error("❌ Cannot read input: %s", str(e))
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except Exception as e:
        wrapped = handle_analysis_error(e, args.command)
        sys.stderr.write(f"error: {wrapped}\n")
        return EXIT_INTERNAL

    _emit(report, args.json_path)
    monitor.log_summary()

    failures = report.failures()
    if failures:
        logger.warning("⚠️ %d failed check(s): %s", len(failures), ", ".join(failures))
        if args.strict:
            return EXIT_STRICT
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
