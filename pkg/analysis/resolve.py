"""
Resolución explícita de P4/P5 y condiciones de polinomialidad
============================================================

✅ Secuencia de seis cambios de coordenadas (centrado, lineal, tres blow-ups de punto y dos de curva)
✅ Partes de Laurent en u del sistema final y su emparejamiento con las cuatro condiciones
✅ Decisión exacta y enumeración por casos de las familias (sigma, epsilon, b)
✅ P5 por conjugación global i -> -i
"""

import itertools
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import sympy
from sympy.polys.domains import QQ_I
from sympy.polys.polyerrors import CoercionFailed

from core.algebra import (
    IMAG,
    GaussianRational,
    MultiPoly,
    RatExpr,
    format_gaussian,
    gaussian,
    parse_gaussian,
)
from core.charts import weighted_chart
from core.config import SystemConfig
from core.errors import NotDivisible, NotPolynomial
from core.field import RationalMap, VField, pushforward
from core.sysdef import load_system

logger = logging.getLogger(__name__)

SIGMA, EPSILON, B = "sigma", "epsilon", "b"
PARAMETERS = (SIGMA, EPSILON, B)
FINAL_VARS = ("u", "v", "w")

_s = RatExpr.variable(SIGMA)
_e = RatExpr.variable(EPSILON)
_b = RatExpr.variable(B)
_i = RatExpr(IMAG)
# ε²(b−1)(7b−15σ+2) − 9
_D = _e**2 * (_b - 1) * (7 * _b - 15 * _s + 2) - 9


# ==========================================
# PARAMETERS
# ==========================================


@dataclass(frozen=True)
class ParameterTriple:
    sigma: GaussianRational
    epsilon: GaussianRational
    b: GaussianRational

    @classmethod
    def of(cls, sigma: Any, epsilon: Any, b: Any) -> "ParameterTriple":
        return cls(gaussian(sigma), gaussian(epsilon), gaussian(b))

    @classmethod
    def parse(cls, text: str) -> "ParameterTriple":
        """Lee `sigma=2,epsilon=0,b=1` (faltantes -> ValueError)."""
        values = parse_assignments(text)
        missing = [p for p in PARAMETERS if p not in values]
        if missing:
            raise ValueError(f"missing parameters: {', '.join(missing)}")
        return cls(values[SIGMA], values[EPSILON], values[B])

    def as_dict(self) -> dict[str, GaussianRational]:
        return {SIGMA: self.sigma, EPSILON: self.epsilon, B: self.b}

    def format(self) -> str:
        return "(" + ", ".join(format_gaussian(v) for v in self.as_dict().values()) + ")"


def parse_assignments(text: str) -> dict[str, GaussianRational]:
    """`k=v,k=v` con valores en formato a/b+c/d*i."""
    values: dict[str, GaussianRational] = {}
    for chunk in filter(None, (c.strip() for c in text.split(","))):
        name, sep, raw = chunk.partition("=")
        if not sep or not name.strip():
            raise ValueError(f"expected name=value, got {chunk!r}")
        values[name.strip()] = parse_gaussian(raw)
    return values


@dataclass(frozen=True)
class ParameterFamily:
    """Familia de parámetros: valores fijos + parámetros libres."""

    fixed: tuple[tuple[str, GaussianRational], ...]
    free: tuple[str, ...]

    @property
    def values(self) -> dict[str, GaussianRational]:
        return dict(self.fixed)

    def contains(self, t: ParameterTriple) -> bool:
        given = t.as_dict()
        return all(given[name] == value for name, value in self.fixed)

    def specialize(self, free_values: Mapping[str, Any]) -> ParameterTriple:
        values = {**self.values, **{k: gaussian(v) for k, v in free_values.items()}}
        return ParameterTriple(values[SIGMA], values[EPSILON], values[B])

    def format(self) -> str:
        fixed = self.values
        return "(" + ", ".join(
            format_gaussian(fixed[p]) if p in fixed else p for p in PARAMETERS
        ) + ")"


# ==========================================
# RESOLUTION SEQUENCE
# ==========================================


@dataclass(frozen=True)
class ResolutionStep:
    label: str
    map: RationalMap
    center: str


def _step(label: str, old: Sequence[str], new: Sequence[str], forward, inverse, center: str):
    mapping = RationalMap.build(old, new, forward, inverse, center, label, check=True)
    return ResolutionStep(label, mapping, center)


@lru_cache(maxsize=1)
def _p4_steps() -> tuple[ResolutionStep, ...]:
    var = RatExpr.variable
    half_i = RatExpr(gaussian(0, "1/2"))
    half = RatExpr(gaussian("1/2"))

    X, Y, Z = var("X"), var("Y"), var("Z")
    p, q, r = var("p"), var("q"), var("r")
    p1, q1, r1 = var("p1"), var("q1"), var("r1")
    p2, q2, r2 = var("p2"), var("q2"), var("r2")
    p3, q3, r3 = var("p3"), var("q3"), var("r3")
    p4, q4, r4 = var("p4"), var("q4"), var("r4")
    u, v, w = (var(n) for n in FINAL_VARS)

    q_center3 = _e * (_b - 1) / 3
    r_center3 = _i * _e * (_b - 2 * _s)
    q_center4 = RatExpr(gaussian(0, "1/9")) * _D
    # curva del paso 5: q4 = (4/3)ε(b−1)·r4 − (2/27)ε(b+2)·D
    q_center5 = (
        RatExpr(gaussian("4/3")) * _e * (_b - 1) * r4
        - RatExpr(gaussian("2/27")) * _e * (_b + 2) * _D
    )

    return (
        _step("Step 0", ("X", "Y", "Z"), ("p", "q", "r"),
              [X, Y - half_i, Z - half], [p, q + half_i, r + half],
              "translate P4 = (0, i/2, 1/2) to the origin"),
        _step("Step 1", ("p", "q", "r"), ("p1", "q1", "r1"),
              [p, q - _i * r, r], [p1, q1 + _i * r1, r1],
              "linear change diagonalizing the linear part"),
        _step("Step 2", ("p1", "q1", "r1"), ("p2", "q2", "r2"),
              [p1, q1 / p1, r1 / p1], [p2, q2 * p2, r2 * p2],
              "blow-up at the origin"),
        _step("Step 3", ("p2", "q2", "r2"), ("p3", "q3", "r3"),
              [p2, (q2 - q_center3) / p2, (r2 - r_center3) / p2],
              [p3, p3 * q3 + q_center3, p3 * r3 + r_center3],
              "blow-up at (0, ε(b-1)/3, iε(b-2σ))"),
        _step("Step 4", ("p3", "q3", "r3"), ("p4", "q4", "r4"),
              [p3, (q3 - q_center4) / p3, r3],
              [p4, p4 * q4 + q_center4, r4],
              "blow-up along p3 = 0, q3 = (i/9)(ε²(b-1)(7b-15σ+2)-9)"),
        _step("Step 5", ("p4", "q4", "r4"), FINAL_VARS,
              [p4, (q4 - q_center5) / p4, r4],
              [u, u * v + q_center5.substitute({"r4": w}), w],
              "blow-up along p4 = 0, q4 = (4/3)ε(b-1)r4 - (2/27)ε(b+2)(ε²(b-1)(7b-15σ+2)-9)"),
    )


def resolution_sequence_p4() -> list[ResolutionStep]:
    """Los seis mapas de resolución en P4 con sigma, epsilon, b simbólicos."""
    return list(_p4_steps())


def resolution_sequence_p5() -> list[ResolutionStep]:
    """Secuencia conjugada (centrada en P5 = (0, -i/2, 1/2))."""
    return [
        ResolutionStep(s.label, s.map.conjugate(), f"conjugate of: {s.center}")
        for s in _p4_steps()
    ]


# ==========================================
# APPLYING THE SEQUENCE
# ==========================================


@dataclass(frozen=True)
class PoleCoefficient:
    """Coeficiente de u^-power·(monomio en v, w) en una componente."""

    component: str
    power: int
    monomial: tuple[int, ...]
    coefficient: MultiPoly

    def label(self) -> str:
        rest = "·".join(
            name if k == 1 else f"{name}^{k}"
            for name, k in zip(FINAL_VARS[1:], self.monomial) if k
        )
        return f"d{self.component}/dt [u^-{self.power}{'·' + rest if rest else ''}]"


@dataclass
class ResolutionResult:
    field: VField
    pole_parts: dict[str, dict[int, RatExpr]]
    regular_parts: dict[str, RatExpr]
    coefficients: list[PoleCoefficient]
    notes: list[str] = field(default_factory=list)

    @property
    def is_polynomial(self) -> bool:
        return not self.coefficients


def apply_resolution(
    v: VField,
    steps: Sequence[ResolutionStep] | None = None,
    params: Mapping[str, Any] | None = None,
) -> ResolutionResult:
    """
    Lleva v a la carta pesada (1,2,2) y aplica la secuencia de resolución.

    Args:
        v: Sistema de Lorenz en (x, y, z) con parámetros sigma, epsilon, b
        steps: Secuencia (por defecto la de P4)
        params: Valores exactos para especializar parámetros (opcional)

    Returns:
        Sistema final en (u, v, w), partes de Laurent en u y coeficientes de polo

    Raises:
        NotPolynomial: Si queda un denominador que no es potencia de u
    """
    sequence = list(steps) if steps is not None else resolution_sequence_p4()
    bound = {k: gaussian(val) for k, val in (params or {}).items()}
    current = v.with_params(bound) if bound else v

    chart = weighted_chart((1, 2, 2), v.statevars)
    current = pushforward(current, chart.map, f"{v.name}@{chart.name}")
    for step in sequence:
        mapping = step.map.with_params(bound) if bound else step.map
        current = pushforward(current, mapping, f"{v.name}@{step.label}")
        logger.debug("🔧 %s applied (%s)", step.label, step.center)

    pole_parts: dict[str, dict[int, RatExpr]] = {}
    regular_parts: dict[str, RatExpr] = {}
    coefficients: list[PoleCoefficient] = []
    others = current.statevars[1:]
    for var, component in zip(current.statevars, current.components):
        poles, regular = component.pole_parts(current.statevars[0])
        if not regular.is_polynomial_in(current.statevars):
            raise NotPolynomial(f"d{var}/dt keeps a pole off u = 0: {regular.den}")
        pole_parts[var] = poles
        regular_parts[var] = regular
        for power, coeff in poles.items():
            if not coeff.is_polynomial_in(current.statevars):
                raise NotPolynomial(f"d{var}/dt: u^-{power} coefficient is not polynomial")
            for monomial, poly in sorted(coeff.as_poly().coefficients(others).items()):
                if not poly.is_zero:
                    coefficients.append(PoleCoefficient(var, power, monomial, poly))

    notes = [
        "step 5 center read with r4 on the right-hand side (the displayed map uses r4)",
    ]
    logger.info(
        "🧩 Resolution of %s: %d pole coefficients", v.name, len(coefficients)
    )
    return ResolutionResult(current, pole_parts, regular_parts, coefficients, notes)


@lru_cache(maxsize=1)
def lorenz_field() -> VField:
    """Sistema de Lorenz empaquetado (systems/lorenz.sys)."""
    return load_system(SystemConfig.SYSTEMS_DIR / "lorenz.sys").to_vfield()


# ==========================================
# POLYNOMIALITY CONDITIONS
# ==========================================


def _conditions() -> tuple[MultiPoly, ...]:
    s, e, b = (MultiPoly.variable(n) for n in PARAMETERS)
    d = _D.as_poly()
    return (
        e * (b - 1) * (b - 2 * s) * (b + 3 * s - 1),
        (b - 1) * (b - 3 * s + 1),
        (b**2 - 5 * b - 2 - 3 * (b - 2) * s) * d,
        e * (b - 2 * s) * (b + 3 * s - 1),
    )


CONDITIONS: tuple[MultiPoly, ...] = _conditions()


@dataclass(frozen=True)
class ConditionMatch:
    coefficient: PoleCoefficient
    condition: int | None
    factor: MultiPoly | None

    @property
    def matched(self) -> bool:
        return self.condition is not None


def match_conditions(coefficients: Sequence[PoleCoefficient]) -> list[ConditionMatch]:
    """
    Empareja cada coeficiente de polo con una condición: coeficiente =
    factor·condición, con factor constante por monomio en los parámetros.
    """
    matches = []
    for pole in coefficients:
        found = ConditionMatch(pole, None, None)
        for index, condition in enumerate(CONDITIONS):
            try:
                factor = pole.coefficient.exact_div(condition)
            except NotDivisible:
                continue
            if factor.is_monomial and not factor.is_zero:
                found = ConditionMatch(pole, index, factor)
                break
        if found.matched:
            logger.debug("✅ %s = (%s)·C%d", pole.label(), found.factor, found.condition + 1)
        else:
            logger.warning("⚠️ %s matches no listed condition", pole.label())
        matches.append(found)
    return matches


def check_resolvable(t: ParameterTriple) -> bool:
    """True si las cuatro condiciones se anulan exactamente en t."""
    values = t.as_dict()
    return all(not c.value_at(values) for c in CONDITIONS)


def direct_resolvability(t: ParameterTriple, v: VField | None = None) -> bool:
    """Polinomialidad decidida corriendo la resolución en t."""
    return apply_resolution(v or lorenz_field(), params=t.as_dict()).is_polynomial


def _subsumes(general: dict, special: dict) -> bool:
    return all(
        name in special and sympy.simplify(special[name] - value) == 0
        for name, value in general.items()
    )


def solve_conditions() -> list[ParameterFamily]:
    """
    Separa por casos: un factor de cada condición igualado a cero, se
    resuelve exactamente y se conservan las familias maximales.

    Returns:
        Familias verificadas por sustitución exacta
    """
    symbols = [sympy.Symbol(n) for n in PARAMETERS]
    factor_sets = []
    for condition in CONDITIONS:
        _, factors = condition.factor_list()
        factor_sets.append(sorted({f.to_sympy() for f, _ in factors}, key=sympy.default_sort_key))

    solutions: list[dict] = []
    for combo in itertools.product(*factor_sets):
        for solution in sympy.solve(list(set(combo)), symbols, dict=True):
            if any(value.free_symbols for value in solution.values()):
                logger.warning("⚠️ Non-constant solution branch skipped: %s", solution)
                continue
            solutions.append({str(k): v for k, v in solution.items()})

    # familias con más parámetros libres primero
    solutions.sort(key=len)
    maximal: list[dict] = []
    for solution in solutions:
        if not any(_subsumes(kept, solution) for kept in maximal):
            maximal.append(solution)

    families = []
    for solution in maximal:
        try:
            fixed = {name: QQ_I.from_sympy(value) for name, value in solution.items()}
        except CoercionFailed:
            logger.warning("⚠️ Family outside Q(i) skipped: %s", solution)
            continue
        if any(not c.evaluate(fixed).is_zero for c in CONDITIONS):
            logger.error("❌ Family %s fails resubstitution", solution)
            continue
        families.append(
            ParameterFamily(
                tuple((p, fixed[p]) for p in PARAMETERS if p in fixed),
                tuple(p for p in PARAMETERS if p not in fixed),
            )
        )

    def order(family: ParameterFamily) -> tuple:
        values = family.values
        return tuple(
            (1, values[p].x, values[p].y) if p in values else (0, 0, 0) for p in PARAMETERS
        )

    families.sort(key=order)
    logger.info("🧮 %d parameter families: %s", len(families),
                ", ".join(f.format() for f in families))
    return families
