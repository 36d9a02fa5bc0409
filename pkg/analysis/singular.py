"""
Singularidades accesibles e índice local
========================================

✅ Puntos de la frontera donde se anulan todos los numeradores a_i (i ≥ 2)
✅ Resolución exacta por resultantes + raíces sobre Q(i) (factorización)
✅ Refinamiento sobre rectas {v = c} contenidas en el lugar de ceros
✅ Índice local: autovalores de la linealización de (s·a_1, a_2, ..., a_n)
✅ Resonancias y clasificación por signo
✅ Censo sobre un atlas, identificando puntos por coordenadas homogéneas
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Union

import numpy as np

from core.algebra import (
    GaussianRational,
    MultiPoly,
    RatExpr,
    ZERO,
    format_gaussian,
    gaussian,
    is_integer,
    norm_squared,
    to_complex,
)
from core.charts import Chart, projective_point, to_chart
from core.config import SystemConfig
from core.errors import (
    NotApplicable,
    ParametricBoundary,
    PositiveDimensionalLocus,
)
from core.field import ChartedSystem, VField, determinant

logger = logging.getLogger(__name__)

Value = Union[GaussianRational, complex]

_LAMBDA = "lambda_"


# ==========================================
# DATA TYPES
# ==========================================


class Classification(str, Enum):
    """Clasificación del índice local por el signo de sus cocientes."""

    VERTICAL_ONLY = "vertical_only"
    BLOWUP_RESOLVABLE = "blowup_resolvable"
    MIXED_SIGN = "mixed_sign"


@dataclass(frozen=True)
class AccessibleSingularity:
    """Punto de la frontera con todos los a_i (i ≥ 2) nulos."""

    chart: str
    variables: tuple[str, ...]
    point: tuple[Value, ...]
    exact: bool = True
    vanishing_order: int | None = None

    def as_dict(self) -> dict[str, Value]:
        return dict(zip(self.variables, self.point))

    def format(self) -> str:
        coords = ", ".join(format_value(v) for v in self.point)
        return f"{self.chart}({coords})"


@dataclass(frozen=True)
class LocalIndexResult:
    """Autovalores ordenados de la linealización en un punto accesible."""

    eigenvalues: tuple[Value, ...]
    exact: bool
    linearization: tuple[tuple[RatExpr, ...], ...]
    variables: tuple[str, ...]
    characteristic: MultiPoly
    residuals: tuple[float, ...] = ()

    @property
    def leading(self) -> Value:
        return self.eigenvalues[0]

    @property
    def ratios(self) -> tuple[Value, ...] | None:
        """(1, a2/a1, ..., an/a1) cuando a1 ≠ 0."""
        a1 = self.eigenvalues[0]
        if not a1:
            return None
        return tuple(a / a1 for a in self.eigenvalues)

    def format(self) -> str:
        return "(" + ", ".join(format_value(v) for v in self.eigenvalues) + ")"


def format_value(value: Value) -> str:
    if isinstance(value, complex):
        digits = SystemConfig.SIGNIFICANT_DIGITS
        return f"{value.real:.{digits}g}{value.imag:+.{digits}g}*i"
    return format_gaussian(value)


# ==========================================
# UNIVARIATE ROOTS
# ==========================================


def _numeric_coefficients(poly: MultiPoly, var: str) -> list[complex]:
    degree = poly.degree(var)
    coeffs = [0j] * (degree + 1)
    for (k,), c in poly.coefficients([var]).items():
        coeffs[degree - k] = to_complex(c.constant_value())
    return coeffs


def univariate_roots(poly: MultiPoly, var: str) -> tuple[list[GaussianRational], list[complex]]:
    """
    Raíces con multiplicidad de un polinomio en una variable.

    Los factores lineales sobre Q(i) dan raíces exactas; el resto se
    resuelve numéricamente con numpy.

    Returns:
        (raíces exactas, raíces numéricas)
    """
    exact: list[GaussianRational] = []
    numeric: list[complex] = []
    if poly.is_zero or poly.is_constant:
        return exact, numeric
    if set(poly.variables) != {var}:
        raise ParametricBoundary(f"{poly} depends on symbols other than {var}")
    _, factors = poly.factor_list()
    for factor, multiplicity in factors:
        degree = factor.degree(var)
        if degree == 1:
            a = factor.coeff_in(var, 1).constant_value()
            b = factor.coeff_in(var, 0)
            b_value = b.constant_value() if not b.is_zero else ZERO
            exact.extend([-b_value / a] * multiplicity)
        else:
            roots = np.roots(_numeric_coefficients(factor, var))
            numeric.extend(complex(r) for r in roots for _ in range(multiplicity))
    return exact, numeric


def _distinct(values: Sequence[GaussianRational]) -> list[GaussianRational]:
    seen: list[GaussianRational] = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def _numeric_value(poly: MultiPoly, point: dict[str, complex]) -> complex:
    total = 0j
    names = poly.variables
    for monom, coeff in poly.terms().items():
        term = to_complex(coeff)
        for name, e in zip(names, monom):
            term *= point[name] ** e
        total += term
    return total


# ==========================================
# ACCESSIBLE SINGULARITIES
# ==========================================


def boundary_numerators(cs: ChartedSystem) -> dict[str, MultiPoly]:
    """Numeradores a_i (i ≥ 2) restringidos a la frontera s = 0."""
    s = cs.boundary_var
    if s is None:
        raise ValueError(f"chart {cs.chart}: boundary {cs.boundary} is not a coordinate")
    restricted = {}
    for var, numerator in cs.numerators().items():
        if var == s:
            continue
        restricted[var] = numerator.as_poly().evaluate({s: 0})
    return restricted


def _shift(poly: MultiPoly, var: str, value: Any) -> MultiPoly:
    return poly.substitute({var: RatExpr.variable(var) + RatExpr(gaussian(value))}).as_poly()


def vanishing_order(polys: Sequence[MultiPoly], point: dict[str, GaussianRational]) -> int:
    """Mínimo orden de Taylor de los numeradores de frontera en el punto."""
    orders = []
    for poly in polys:
        shifted = poly
        for var, value in point.items():
            if value:
                shifted = _shift(shifted, var, value)
        if not shifted.is_zero:
            orders.append(shifted.min_total_degree())
    return min(orders) if orders else 0


def _line_points(
    polys: list[MultiPoly], line_var: str, value: GaussianRational, other: str
) -> tuple[list[GaussianRational], list[complex]]:
    """Raíces de los coeficientes de menor orden transversal a {line_var = value}."""
    exact: list[GaussianRational] = []
    numeric: list[complex] = []
    for poly in polys:
        if poly.is_zero:
            continue
        shifted = _shift(poly, line_var, value)
        lowest = shifted.coeff_in(line_var, shifted.tail_degree(line_var))
        roots, approx = univariate_roots(lowest, other)
        exact.extend(roots)
        numeric.extend(approx)
    return _distinct(exact), numeric


def _isolated_points(
    h: list[MultiPoly], u: str, w: str
) -> tuple[list[tuple[GaussianRational, GaussianRational]], list[tuple[complex, complex]]]:
    """Ceros comunes aislados de dos polinomios coprimos en (u, w)."""
    exact: list[tuple[GaussianRational, GaussianRational]] = []
    numeric: list[tuple[complex, complex]] = []
    first, second = h
    if first.is_constant and not first.is_zero or second.is_constant and not second.is_zero:
        return exact, numeric

    eliminant = first.resultant(second, w)
    u_exact, u_numeric = univariate_roots(eliminant, u)
    for u0 in _distinct(u_exact):
        a = first.evaluate({u: u0})
        b = second.evaluate({u: u0})
        common = a.gcd(b) if not (a.is_zero and b.is_zero) else MultiPoly.zero()
        w_exact, w_numeric = univariate_roots(common, w)
        exact.extend((u0, w0) for w0 in _distinct(w_exact))
        numeric.extend((to_complex(u0), w0) for w0 in w_numeric)

    tol = 1e-8
    for u0 in u_numeric:
        coeffs = [
            _numeric_value(first.coeff_in(w, d), {u: u0}) for d in range(first.degree(w), -1, -1)
        ]
        while coeffs and abs(coeffs[0]) < tol:
            coeffs.pop(0)
        if len(coeffs) < 2:
            continue
        for w0 in np.roots(coeffs):
            if abs(_numeric_value(second, {u: u0, w: complex(w0)})) < 1e-6:
                numeric.append((u0, complex(w0)))
    return exact, numeric


def find_accessible_singularities(
    cs: ChartedSystem, eliminate: str | None = None
) -> list[AccessibleSingularity]:
    """
    Singularidades accesibles de un sistema en carta.

    Args:
        cs: Sistema en carta con frontera {s = 0}
        eliminate: Variable a eliminar en la resultante (por defecto la última)

    Returns:
        Puntos exactos primero (orden de construcción), luego numéricos

    Raises:
        PositiveDimensionalLocus: Si el lugar de ceros contiene una curva que no es recta
        ParametricBoundary: Si los numeradores en la frontera dependen de parámetros
    """
    if cs.pole_order == 0 or cs.boundary.is_constant:
        logger.debug("Chart %s: no pole along the boundary", cs.chart)
        return []

    s = cs.boundary_var
    numerators = boundary_numerators(cs)
    others = [v for v in cs.field.statevars if v != s]
    polys = [numerators[v] for v in others]
    symbols = set().union(*(p.variables for p in polys))
    if symbols - set(others):
        raise ParametricBoundary(
            f"chart {cs.chart}: boundary numerators depend on {sorted(symbols - set(others))}"
        )

    exact_points: list[dict[str, GaussianRational]] = []
    numeric_points: list[dict[str, complex]] = []

    if len(others) == 1:
        (var,) = others
        if all(p.is_zero for p in polys):
            raise PositiveDimensionalLocus(f"chart {cs.chart}: boundary is entirely singular")
        roots, approx = univariate_roots(polys[0], var)
        exact_points = [{var: r} for r in _distinct(roots)]
        numeric_points = [{var: r} for r in approx]
    elif len(others) == 2:
        exact_points, numeric_points = _solve_pair(cs.chart, polys, others, eliminate)
    else:
        raise ValueError(f"chart {cs.chart}: only 2D and 3D systems are supported")

    result = []
    for values in exact_points:
        point = {s: ZERO, **values}
        for var, poly in zip(others, polys):
            if not poly.evaluate(values).is_zero:
                raise AssertionError(f"{cs.chart}: numerator a_{var} does not vanish at {values}")
        order = vanishing_order(polys, values)
        result.append(
            AccessibleSingularity(
                cs.chart,
                cs.field.statevars,
                tuple(point[v] for v in cs.field.statevars),
                True,
                order,
            )
        )
    for values in numeric_points:
        point = {s: 0j, **values}
        result.append(
            AccessibleSingularity(
                cs.chart, cs.field.statevars, tuple(point[v] for v in cs.field.statevars), False
            )
        )

    logger.debug("🎯 Chart %s: %d accessible points", cs.chart, len(result))
    return result


def _solve_pair(
    chart: str, polys: list[MultiPoly], others: list[str], eliminate: str | None
) -> tuple[list[dict[str, GaussianRational]], list[dict[str, complex]]]:
    u, w = others
    if eliminate == u:
        u, w = w, u
    g2, g3 = polys
    if g2.is_zero and g3.is_zero:
        raise PositiveDimensionalLocus(f"chart {chart}: boundary is entirely singular")

    common = g2.gcd(g3) if not (g2.is_zero or g3.is_zero) else (g3 if g2.is_zero else g2)
    exact: list[dict[str, GaussianRational]] = []
    numeric: list[dict[str, complex]] = []

    if not common.is_constant:
        _, factors = common.factor_list()
        for factor, _ in factors:
            variables = factor.variables
            if len(variables) != 1 or factor.degree(variables[0]) != 1:
                raise PositiveDimensionalLocus(
                    f"chart {chart}: boundary zero set contains the curve {factor.format()} = 0"
                )
            line_var = variables[0]
            other = w if line_var == u else u
            a = factor.coeff_in(line_var, 1).constant_value()
            b = factor.coeff_in(line_var, 0)
            value = -(b.constant_value() if not b.is_zero else ZERO) / a
            on_line, approx = _line_points(polys, line_var, value, other)
            logger.debug("📏 Chart %s: line %s = %s refined", chart, line_var, format_gaussian(value))
            exact.extend({line_var: value, other: r} for r in on_line)
            numeric.extend({line_var: to_complex(value), other: r} for r in approx)
        g2 = g2.exact_div(common) if not g2.is_zero else MultiPoly.one()
        g3 = g3.exact_div(common) if not g3.is_zero else MultiPoly.one()

    isolated, approx_pairs = _isolated_points([g2, g3], u, w)
    exact.extend({u: a, w: b} for a, b in isolated)
    numeric.extend({u: a, w: b} for a, b in approx_pairs)

    unique: list[dict[str, GaussianRational]] = []
    for p in exact:
        if p not in unique:
            unique.append(p)
    return unique, numeric


# ==========================================
# LOCAL INDEX
# ==========================================


def _eigen_key(value: Value) -> tuple:
    if isinstance(value, complex):
        return (-abs(value) ** 2, -value.imag, -value.real)
    return (
        -float(norm_squared(value)),
        -float(to_complex(value).imag),
        -float(to_complex(value).real),
    )


def _exact_key(value: GaussianRational) -> tuple:
    # módulo descendente, luego parte imaginaria y real descendentes
    return (-norm_squared(value), -value.y, -value.x)


def linearization(
    cs: ChartedSystem, p: AccessibleSingularity
) -> tuple[tuple[str, ...], list[list[RatExpr]]]:
    """
    Jacobiano de (s^k·f_i) en p, con la variable frontera primero.

    La columna frontera puede depender de parámetros: la fila frontera es
    (J00, 0, ..., 0), así que no entra en el polinomio característico.
    """
    order = cs.ordered_vars()
    numerators = cs.numerators()
    values = p.as_dict()
    matrix = [
        [numerators[row_var].derivative(col_var).evaluate(values) for col_var in order]
        for row_var in order
    ]
    return order, matrix


def characteristic_polynomial(matrix: list[list[RatExpr]]) -> MultiPoly:
    """det(λ·I − J) como polinomio en λ."""
    lam = RatExpr.variable(_LAMBDA)
    n = len(matrix)
    shifted = [
        [(lam if i == j else RatExpr(0)) - RatExpr.coerce(matrix[i][j]) for j in range(n)]
        for i in range(n)
    ]
    charpoly = determinant(shifted)
    if not charpoly.is_polynomial or set(charpoly.variables) - {_LAMBDA}:
        raise ParametricBoundary(
            f"characteristic polynomial depends on {sorted(set(charpoly.variables) - {_LAMBDA})}"
        )
    return charpoly.as_poly()


def local_index(cs: ChartedSystem, p: AccessibleSingularity) -> LocalIndexResult:
    """
    Índice local en un punto accesible.

    El primer autovalor es la entrada frontera J[0][0]; los demás se ordenan
    por módulo decreciente, luego parte imaginaria y real decrecientes.
    """
    if not p.exact:
        raise ValueError(f"{p.format()}: local index needs an exact point")
    variables, matrix = linearization(cs, p)
    charpoly = characteristic_polynomial(matrix)
    exact_roots, numeric_roots = univariate_roots(charpoly, _LAMBDA)

    corner = matrix[0][0]
    if corner.variables:
        raise ParametricBoundary(f"{p.format()}: boundary eigenvalue depends on {corner.variables}")
    boundary_value = corner.constant_value()
    if boundary_value in exact_roots:
        exact_roots.remove(boundary_value)

    if numeric_roots:
        rest: list[Value] = [to_complex(v) for v in exact_roots] + numeric_roots
        rest.sort(key=_eigen_key)
        eigenvalues: tuple[Value, ...] = (to_complex(boundary_value), *rest)
        coeffs = _numeric_coefficients(charpoly, _LAMBDA)
        residuals = tuple(float(abs(np.polyval(coeffs, v))) for v in eigenvalues)
        scale = max(1.0, max(abs(c) for c in coeffs))
        if max(residuals) > SystemConfig.NUMERIC_RESIDUAL_TOL * scale:
            logger.warning("⚠️ Large eigenvalue residual at %s: %.3g", p.format(), max(residuals))
        exact = False
    else:
        exact_roots.sort(key=_exact_key)
        eigenvalues = (boundary_value, *exact_roots)
        for value in eigenvalues:
            if not charpoly.evaluate({_LAMBDA: value}).is_zero:
                raise AssertionError(f"eigenvalue {format_gaussian(value)} is not a root")
        residuals = tuple(0.0 for _ in eigenvalues)
        exact = True

    result = LocalIndexResult(
        eigenvalues,
        exact,
        tuple(tuple(row) for row in matrix),
        variables,
        charpoly,
        residuals,
    )
    logger.debug("📐 Local index at %s: %s", p.format(), result.format())
    return result


def resonances(r: LocalIndexResult) -> list[int] | NotApplicable:
    """Cocientes enteros a_k/a_1 más allá del 1 inicial."""
    if not r.exact:
        return NotApplicable("eigenvalues are not exact")
    ratios = r.ratios
    if ratios is None:
        return NotApplicable("boundary eigenvalue a1 is zero")
    if not all(is_integer(q) for q in ratios):
        return NotApplicable("ratios are not integers")
    return [int(q.x) for q in ratios[1:]]


def classify(r: LocalIndexResult) -> Classification:
    """
    vertical_only si a1 = 0 o los cocientes no son enteros; blowup_resolvable
    si todos los cocientes tienen el mismo signo; mixed_sign en otro caso.
    """
    found = resonances(r)
    if isinstance(found, NotApplicable):
        return Classification.VERTICAL_ONLY
    if all(k >= 0 for k in found):
        return Classification.BLOWUP_RESOLVABLE
    return Classification.MIXED_SIGN


# ==========================================
# CENSUS OVER AN ATLAS
# ==========================================


@dataclass
class CensusEntry:
    """Un punto de la frontera de P^n visto desde una o más cartas."""

    label: str
    projective: tuple[Value, ...]
    occurrences: list[AccessibleSingularity] = field(default_factory=list)
    chosen: AccessibleSingularity | None = None
    index: LocalIndexResult | None = None
    classification: Classification | None = None
    resonances: list[int] | NotApplicable | None = None


@dataclass
class Census:
    entries: list[CensusEntry]
    unplaced: list[AccessibleSingularity]
    charted: dict[str, ChartedSystem]

    def entry(self, label: str) -> CensusEntry:
        for entry in self.entries:
            if entry.label == label:
                return entry
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.entries]


def _projective_key(coords: tuple[Value, ...]) -> tuple:
    return tuple((v.x, v.y) if not isinstance(v, complex) else (v.real, v.imag) for v in coords)


def _label_key(coords: tuple[Value, ...]) -> tuple:
    nonzero = [i for i, v in enumerate(coords) if v]
    vertex = len(nonzero) == 1
    return (0 if vertex else 1, nonzero[0] if vertex else 0, _projective_key(coords))


def singularity_census(
    v: VField, charts: Sequence[Chart], eliminate_first: bool = False
) -> Census:
    """
    Detecta, identifica y etiqueta P1, P2, ... sobre todas las cartas.

    Los vértices coordenados van primero; para cada punto se usa la
    aparición de menor orden de anulación para el índice local.
    """
    groups: dict[tuple, CensusEntry] = {}
    unplaced: list[AccessibleSingularity] = []
    charted_systems: dict[str, ChartedSystem] = {}

    for chart in charts:
        if chart.boundary.is_constant:
            continue
        cs = to_chart(v, chart)
        charted_systems[chart.name] = cs
        eliminate = None
        if eliminate_first:
            eliminate = next(x for x in cs.field.statevars if x != cs.boundary_var)
        for point in find_accessible_singularities(cs, eliminate):
            if not point.exact:
                unplaced.append(point)
                continue
            try:
                coords = projective_point(chart, point.point)
            except ValueError:
                logger.debug("Point %s has no projective image", point.format())
                unplaced.append(point)
                continue
            key = _projective_key(coords)
            entry = groups.setdefault(key, CensusEntry("", coords))
            entry.occurrences.append(point)

    ordered = sorted(groups.values(), key=lambda e: _label_key(e.projective))
    for number, entry in enumerate(ordered, start=1):
        entry.label = f"P{number}"
        entry.chosen = min(
            entry.occurrences,
            key=lambda p: p.vanishing_order if p.vanishing_order is not None else 99,
        )
        cs = charted_systems[entry.chosen.chart]
        entry.index = local_index(cs, entry.chosen)
        entry.classification = classify(entry.index)
        entry.resonances = resonances(entry.index)
        logger.info(
            "📍 %s = [%s] via %s, index %s",
            entry.label,
            ":".join(format_value(c) for c in entry.projective),
            entry.chosen.chart,
            entry.index.format(),
        )
    return Census(ordered, unplaced, charted_systems)
