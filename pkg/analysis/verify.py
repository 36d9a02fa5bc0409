"""
Verificaciones exactas
======================

✅ Integrales primeras por derivada de Lie (con factores e^{λt})
✅ Reducciones de EDO como identidades simbólicas con residuo cero
✅ Atlas birracionales: polinomialidad por carta + determinante jacobiano
✅ Unicidad: ansatz cuadrático de 30 coeficientes y núcleo exacto sobre Q(i)
"""

import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Any

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from core.algebra import (
    ExpSymbol,
    GaussianRational,
    MultiPoly,
    RatExpr,
    gaussian,
)
from core.atlas_registry import AtlasRegistry
from core.charts import Atlas, Chart, check_overlaps
from core.config import SystemConfig
from core.errors import IdentityFailed, LorenzKitError, NotPolynomial
from core.field import RationalMap, VField, jacobian_det, lie_derivative, pushforward
from core.sysdef import SystemDoc, load_system, parse_expression

logger = logging.getLogger(__name__)


# ==========================================
# FIRST INTEGRALS
# ==========================================


def integral_residual(v: VField, f: Any) -> RatExpr:
    return lie_derivative(v, f)


def verify_first_integral(v: VField, f: Any) -> bool:
    """True si la derivada de Lie de f a lo largo de v se anula idénticamente."""
    residual = integral_residual(v, f)
    if residual.is_zero:
        logger.debug("✅ %s conserves %s", v.name, RatExpr.coerce(f).format())
        return True
    logger.debug("❌ %s: L_v(f) = %s", v.name, residual.format())
    return False


# ==========================================
# ODE REDUCTIONS
# ==========================================


def _bundled(name: str) -> SystemDoc:
    return load_system(SystemConfig.SYSTEMS_DIR / f"{name}.sys")


def _expr(text: str, *symbols: str) -> RatExpr:
    return parse_expression(text, symbols, allow_rational=True)


def _third_order_21(perturb: GaussianRational) -> list[tuple[str, RatExpr, RatExpr]]:
    """Elimina y, z de (2.1): x''' como función de x, x', x''."""
    v = _bundled("system21").to_vfield()
    x = RatExpr.variable("x")
    first = lie_derivative(v, x)
    second = lie_derivative(v, first)
    third = lie_derivative(v, second)
    target = _expr(
        "-epsilon/3*x^3 - x^2*xd + 4*epsilon/(3*x)*xd^2 + xd*xdd/x - 4*epsilon/3*xdd",
        "x", "xd", "xdd", "epsilon",
    ) + perturb * x
    expected = target.substitute({"xd": first, "xdd": second})
    return [("x'''", third, expected)]


def _ince_viii_31(perturb: GaussianRational) -> list[tuple[str, RatExpr, RatExpr]]:
    v = _bundled("system31").to_vfield()
    x = RatExpr.variable("x")
    on_level = {"z": _expr("(x^2 - I)/2", "x", "I")}
    second = lie_derivative(v, lie_derivative(v, x)).substitute(on_level)
    expected = _expr("-x^3/2 + (1 + I/2)*x", "x", "I") + perturb * x
    return [("x''", second, expected)]


def _reduced_field_41() -> VField:
    return VField.from_polys(
        "reduced41",
        ("x", "y"),
        [_expr("y - 3*x", "x", "y"), _expr("-x^3/2 - 3*y + (I*E/2 + 1)*x", "x", "y", "I", "E")],
        params=("I",),
        expsyms=(ExpSymbol("E", gaussian(-6)),),
    )


def _reduced_41(perturb: GaussianRational) -> list[tuple[str, RatExpr, RatExpr]]:
    """z = (x² − I·e^{−6t})/2 en (4.1), con E = e^{−6t}."""
    v = _bundled("system41").to_vfield()
    reduced = _reduced_field_41()
    z_level = _expr("(x^2 - I*E)/2", "x", "I", "E")
    on_level = {"z": z_level}
    checks = [
        ("x'", v.component("x").substitute(on_level), reduced.component("x")),
        (
            "y'",
            v.component("y").substitute(on_level),
            reduced.component("y") + perturb * RatExpr.variable("x"),
        ),
        # la ecuación de z eliminada debe seguir el flujo reducido
        ("z'", v.component("z").substitute(on_level), lie_derivative(reduced, z_level)),
    ]
    return checks


def change_of_vars_map() -> RationalMap:
    """X = (i/2)x, Y = (2x + ix² − 2y)/(2x)."""
    return RationalMap.build(
        ("x", "y"),
        ("X", "Y"),
        [_expr("i/2*x", "x"), _expr("(2*x + i*x^2 - 2*y)/(2*x)", "x", "y")],
        [_expr("-2*i*X", "X"), _expr("-2*i*X*(1 + X - Y)", "X", "Y")],
        name="XY41",
    )


def _change_of_vars_41(perturb: GaussianRational) -> list[tuple[str, RatExpr, RatExpr]]:
    pushed = pushforward(_reduced_field_41(), change_of_vars_map())
    expected_x = _expr("X^2 - X*Y - 2*X", "X", "Y") + perturb * RatExpr.variable("X")
    expected_y = _expr("Y^2 - 3*X*Y - 2*Y - I/2*E", "X", "Y", "I", "E")
    return [
        ("X'", pushed.component("X"), expected_x),
        ("Y'", pushed.component("Y"), expected_y),
    ]


REDUCTIONS: dict[str, Callable[[GaussianRational], list[tuple[str, RatExpr, RatExpr]]]] = {
    "third_order_21": _third_order_21,
    "ince_viii_31": _ince_viii_31,
    "reduced_41": _reduced_41,
    "change_of_vars_41": _change_of_vars_41,
}


def verify_reduction(kind: str, perturb: Any = 0) -> bool:
    """
    Comprueba una reducción como identidad exacta.

    Args:
        kind: third_order_21, ince_viii_31, reduced_41 o change_of_vars_41
        perturb: Desplazamiento del coeficiente lineal del lado esperado (control)

    Returns:
        True si todos los residuos son cero

    Raises:
        IdentityFailed: Con los residuos no nulos
        KeyError: Si el tipo de reducción no existe
    """
    if kind not in REDUCTIONS:
        raise KeyError(f"unknown reduction {kind!r}; expected one of {sorted(REDUCTIONS)}")

    residuals = []
    for label, computed, expected in REDUCTIONS[kind](gaussian(perturb)):
        residual = computed - expected
        if not residual.is_zero:
            residuals.append(residual)
            logger.debug("❌ %s %s residual: %s", kind, label, residual.format())
    if residuals:
        raise IdentityFailed(
            f"reduction {kind} fails with {len(residuals)} nonzero residual(s)", residuals
        )
    logger.info("✅ Reduction %s verified", kind)
    return True


# ==========================================
# ATLAS VERIFICATION
# ==========================================


@dataclass(frozen=True)
class AtlasSpec:
    base: VField
    charts: tuple[Chart, ...]
    name: str = ""

    @classmethod
    def from_registry(
        cls, atlas_id: str, doc: SystemDoc, registry: AtlasRegistry | None = None
    ) -> "AtlasSpec":
        charts = (registry or AtlasRegistry()).build_charts(atlas_id, doc)
        return cls(doc.to_vfield(), charts, atlas_id)

    def with_params(self, values: Mapping[str, Any]) -> "AtlasSpec":
        bound = {k: gaussian(v) for k, v in values.items()}
        charts = tuple(
            Chart(c.name, c.map.with_params(bound), c.boundary.evaluate(bound),
                  c.volume_preserving, c.homogeneous)
            for c in self.charts
        )
        return AtlasSpec(self.base.with_params(bound), charts, self.name)


@dataclass
class ChartCheck:
    chart: str
    polynomial: bool
    pole_denominators: dict[str, str]
    determinant: RatExpr
    volume_preserving: bool | None
    determinant_ok: bool

    @property
    def passed(self) -> bool:
        return self.polynomial and self.determinant_ok


@dataclass
class AtlasReport:
    name: str
    charts: list[ChartCheck] = field(default_factory=list)
    overlap_problems: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.charts) and not self.overlap_problems


def verify_atlas(a: AtlasSpec, check_overlap: bool = True) -> AtlasReport:
    """
    Por carta: (i) el sistema transportado es polinomial en las variables de
    la carta, (ii) det J = 1 donde se declara preservación de volumen.

    Returns:
        Reporte agregado (los fallos van en el reporte, no se lanzan)
    """
    report = AtlasReport(a.name or a.base.name)
    for chart in a.charts:
        try:
            pushed = pushforward(a.base, chart.map, f"{a.base.name}@{chart.name}")
            denominators = {
                var: component.den.format()
                for var, component in zip(pushed.statevars, pushed.components)
                if not component.is_polynomial_in(pushed.statevars)
            }
        except LorenzKitError as e:
            logger.warning("⚠️ Chart %s could not be transported: %s", chart.name, e)
            denominators = {"*": str(e)}
        det = jacobian_det(chart.map)
        det_ok = chart.volume_preserving is not True or det == RatExpr(1)
        check = ChartCheck(
            chart.name, not denominators, denominators, det, chart.volume_preserving, det_ok
        )
        report.charts.append(check)
        logger.debug(
            "%s Chart %s: polynomial=%s det=%s",
            "✅" if check.passed else "❌", chart.name, check.polynomial, det.format(),
        )

    if check_overlap and len(a.charts) > 1:
        extras = list(a.base.params) + [e.name for e in a.base.expsyms]
        report.overlap_problems = check_overlaps(
            Atlas(a.base.statevars, a.charts, a.name), params=extras
        )
    logger.info(
        "🗺️ Atlas %s: %d/%d charts pass", report.name,
        sum(c.passed for c in report.charts), len(report.charts),
    )
    return report


# ==========================================
# UNIQUENESS OF THE QUADRATIC SYSTEM
# ==========================================


@dataclass(frozen=True)
class QuadraticAnsatz:
    """f_i = Σ a_{i,m}·m sobre los 10 monomios de grado ≤ 2."""

    statevars: tuple[str, ...] = ("x", "y", "z")

    @property
    def monomials(self) -> list[tuple[int, ...]]:
        n = len(self.statevars)
        result = []
        for degree in range(3):
            for combo in combinations_with_replacement(range(n), degree):
                exps = [0] * n
                for index in combo:
                    exps[index] += 1
                result.append(tuple(exps))
        return result

    @property
    def unknowns(self) -> list[str]:
        return [
            f"a_{var}_{k}"
            for var in self.statevars
            for k in range(len(self.monomials))
        ]

    def _monomial(self, exps: tuple[int, ...]) -> MultiPoly:
        return MultiPoly.from_terms(self.statevars, {exps: 1})

    def field(self) -> VField:
        components = []
        for var in self.statevars:
            total = MultiPoly.zero()
            for k, exps in enumerate(self.monomials):
                total = total + MultiPoly.variable(f"a_{var}_{k}") * self._monomial(exps)
            components.append(total)
        return VField.from_polys("ansatz", self.statevars, components, self.unknowns)

    def instantiate(self, values: Sequence[GaussianRational], name: str = "solution") -> VField:
        bound = dict(zip(self.unknowns, values))
        v = self.field().with_params(bound)
        return VField(name, v.statevars, v.components)

    def index_of(self, var: str, monomial_var: str) -> int:
        """Posición del coeficiente del monomio lineal `monomial_var` en d(var)/dt."""
        exps = tuple(int(v == monomial_var) for v in self.statevars)
        per_component = len(self.monomials)
        return self.statevars.index(var) * per_component + self.monomials.index(exps)


@dataclass
class UniquenessResult:
    ansatz: QuadraticAnsatz
    constraints: int
    dimension: int
    affine_dimension: int | None
    solution: VField | None

    @property
    def unique(self) -> bool:
        return self.affine_dimension == 0


def _polynomiality_rows(
    component: RatExpr, chart_vars: Sequence[str], unknowns: Sequence[str]
) -> list[list[GaussianRational]]:
    """Filas lineales: coeficientes del numerador que no alcanzan el monomio denominador."""
    den_terms = component.den.coefficients(chart_vars)
    if len(den_terms) != 1:
        raise NotPolynomial(f"denominator {component.den} is not a monomial in {chart_vars}")
    (den_monom, den_coeff), = den_terms.items()
    if not den_coeff.free_of(unknowns):
        raise NotPolynomial(f"denominator {component.den} depends on the ansatz")

    rows = []
    for monom, coeff in component.num.coefficients(chart_vars).items():
        if all(m >= d for m, d in zip(monom, den_monom)) or coeff.is_zero:
            continue
        linear = coeff.coefficients(unknowns)
        row = [QQ_I.zero] * len(unknowns)
        for exps, value in linear.items():
            if sum(exps) == 0:
                if not value.is_zero:
                    raise NotPolynomial("constraint is not homogeneous in the ansatz")
                continue
            if sum(exps) != 1:
                raise NotPolynomial("constraint is not linear in the ansatz")
            row[exps.index(1)] = value.constant_value()
        rows.append(row)
    return rows


def uniqueness_search(
    a: AtlasSpec, params: Mapping[str, Any] | None = None, pin: tuple[str, str] = ("x", "y")
) -> UniquenessResult:
    """
    Impone polinomialidad del ansatz cuadrático en cada carta (mapas en
    valores exactos) y resuelve el sistema lineal por núcleo exacto.

    Args:
        a: Atlas cuyas cartas se usan como restricciones
        params: Valores exactos de los parámetros de las cartas
        pin: (componente, variable) cuyo coeficiente se fija a 1

    Returns:
        Dimensión del espacio homogéneo, dimensión afín tras fijar y la solución
    """
    atlas = a.with_params(params or {})
    ansatz = QuadraticAnsatz(atlas.base.statevars)
    unknowns = ansatz.unknowns
    template = ansatz.field()

    rows: list[list[GaussianRational]] = []
    for chart in atlas.charts:
        if chart.map.new_vars == chart.map.old_vars and all(
            f == RatExpr.variable(n) for f, n in zip(chart.map.forward, chart.map.new_vars)
        ):
            continue
        pushed = pushforward(template, chart.map, f"ansatz@{chart.name}")
        for component in pushed.components:
            rows.extend(_polynomiality_rows(component, chart.variables, unknowns))
        logger.debug("🧮 Chart %s: %d constraints so far", chart.name, len(rows))

    n = len(unknowns)
    if rows:
        matrix = DomainMatrix(rows, (len(rows), n), QQ_I)
        basis = matrix.nullspace().to_list()
    else:
        basis = [[QQ_I.one if j == k else QQ_I.zero for j in range(n)] for k in range(n)]

    pinned = ansatz.index_of(*pin)
    solution = None
    affine_dimension = None
    for vector in basis:
        if vector[pinned]:
            scale = vector[pinned]
            solution = ansatz.instantiate([c / scale for c in vector], f"unique({a.name})")
            affine_dimension = len(basis) - 1
            break

    logger.info(
        "🔎 Uniqueness over %s: %d constraints, nullity %d",
        a.name, len(rows), len(basis),
    )
    return UniquenessResult(ansatz, len(rows), len(basis), affine_dimension, solution)
