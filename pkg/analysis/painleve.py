"""
Test de Painlevé a orden dominante.

Busca exponentes enteros (m, n, p) y coeficientes (a, b, c) tales que
x ~ a·τ^-m, y ~ b·τ^-n, z ~ c·τ^-p equilibren los términos de menor
orden en τ de cada ecuación. Con parámetros simbólicos los coeficientes
se expresan como funciones racionales de los parámetros.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Union

import sympy
from sympy.polys.domains import QQ_I
from sympy.polys.polyerrors import CoercionFailed

from core.algebra import (
    GaussianRational,
    MultiPoly,
    RatExpr,
    conjugate_gaussian,
    format_gaussian,
)
from core.charts import Chart, reduce_weights, weighted_chart
from core.config import SystemConfig
from core.errors import NotPolynomial
from core.field import VField

logger = logging.getLogger(__name__)

Coefficient = Union[GaussianRational, RatExpr]

# variable auxiliar s = 1/τ de la resustitución
_INVERSE_TAU = "s_tau"


def format_coefficient(c: Coefficient) -> str:
    return c.format() if isinstance(c, RatExpr) else format_gaussian(c)


def _conjugate(c: Coefficient) -> Coefficient:
    return c.conjugate() if isinstance(c, RatExpr) else conjugate_gaussian(c)


@dataclass(frozen=True)
class Balance:
    """Rama de equilibrio dominante."""

    variables: tuple[str, ...]
    exponents: tuple[int, ...]
    coefficients: tuple[Coefficient, ...]
    branch: int = 0

    @property
    def is_parametric(self) -> bool:
        return any(isinstance(c, RatExpr) for c in self.coefficients)

    def format(self) -> str:
        parts = [
            f"{var} ~ {format_coefficient(c)}·τ^-{e}"
            for var, e, c in zip(self.variables, self.exponents, self.coefficients)
        ]
        return ", ".join(parts)


@dataclass
class BalanceReport:
    balances: list[Balance] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    residuals: dict[int, list[MultiPoly]] = field(default_factory=dict)
    conjugate_pairs: bool | None = None


def _unknown(var: str) -> str:
    return f"c_{var}"


def _dominant_equations(
    v: VField, exponents: tuple[int, ...]
) -> list[MultiPoly] | None:
    """Ecuaciones de coeficientes para un vector de exponentes, o None si no hay equilibrio."""
    unknowns = {var: MultiPoly.variable(_unknown(var)) for var in v.statevars}
    equations = []
    for var, e, component in zip(v.statevars, exponents, v.components):
        lhs = unknowns[var] * (-e)
        candidates: list[tuple[int, MultiPoly]] = []
        for monom, coeff in component.as_poly().coefficients(v.statevars).items():
            order = -sum(k * w for k, w in zip(monom, exponents))
            term = coeff
            for name, k in zip(v.statevars, monom):
                if k:
                    term = term * unknowns[name] ** k
            candidates.append((order, term))
        # d(c·τ^-e)/dτ = -e·c·τ^(-e-1) compite con los términos del campo
        lowest = min([-e - 1] + [order for order, _ in candidates])
        dominant = [term for order, term in candidates if order == lowest]
        if lowest != -e - 1 or not dominant:
            return None
        total = lhs
        for term in dominant:
            total = total - term
        equations.append(total)
    return equations


def _to_gaussian(value: sympy.Expr) -> GaussianRational | None:
    try:
        return QQ_I.from_sympy(sympy.nsimplify(value) if value.is_Float else value)
    except (CoercionFailed, TypeError, ValueError):
        return None


def _to_coefficient(value: sympy.Expr) -> Coefficient | None:
    """Número de Q(i) o, si depende de parámetros, función racional exacta."""
    if not value.free_symbols:
        return _to_gaussian(value)
    try:
        expr = RatExpr.from_sympy(value)
    except (NotPolynomial, CoercionFailed, TypeError, ValueError):
        return None
    return expr


def leading_residuals(
    v: VField, exponents: tuple[int, ...], coefficients: tuple[Coefficient, ...]
) -> list[MultiPoly]:
    """
    Resustituye x_k = c_k·s^m_k (s = 1/τ) en el campo.

    Devuelve, por ecuación, la parte de -m·c·s^(m+1) - f de grado en s al
    menos m+1: se anula exactamente cuando la rama equilibra el orden
    dominante y ningún término del campo es más singular.
    """
    s = RatExpr.variable(_INVERSE_TAU)
    bindings = {
        var: RatExpr.coerce(c) * s**e for var, e, c in zip(v.statevars, exponents, coefficients)
    }
    residuals = []
    for var, e, c, component in zip(v.statevars, exponents, coefficients, v.components):
        expr = RatExpr.coerce(c) * (-e) * s ** (e + 1) - component.substitute(bindings)
        head = MultiPoly.zero()
        for (degree,), coeff in expr.num.coefficients([_INVERSE_TAU]).items():
            if degree >= e + 1:
                head = head + coeff * MultiPoly.variable(_INVERSE_TAU) ** degree
        residuals.append(head)
    return residuals


def _sort_key(b: Balance) -> tuple:
    return (
        b.exponents,
        [
            (1, 0, 0, c.format()) if isinstance(c, RatExpr) else (0, -c.y, -c.x, "")
            for c in b.coefficients
        ],
    )


def dominant_balances(v: VField, max_exp: int | None = None) -> BalanceReport:
    """
    Enumera exponentes enteros positivos hasta `max_exp` y resuelve los
    coeficientes exactamente sobre Q(i), o sobre Q(i)(parámetros) cuando
    los términos dominantes llevan parámetros.

    Returns:
        Reporte con las ramas (coeficientes no nulos), notas y residuos
    """
    limit = max_exp or SystemConfig.PAINLEVE_MAX_EXP
    if not v.is_polynomial:
        raise ValueError(f"{v.name}: dominant balance needs a polynomial field")

    report = BalanceReport()
    report.notes.append("only integer exponents are searched")
    symbols = [sympy.Symbol(_unknown(var)) for var in v.statevars]
    ambient = {sympy.Symbol(name) for name in v.params} | {
        sympy.Symbol(e.name) for e in v.expsyms
    }
    found: list[Balance] = []
    residuals: list[list[MultiPoly]] = []

    for exponents in itertools.product(range(1, limit + 1), repeat=v.dimension):
        equations = _dominant_equations(v, exponents)
        if equations is None:
            continue
        solutions = sympy.solve([eq.to_sympy() for eq in equations], symbols, dict=True)
        for solution in solutions:
            if len(solution) < len(symbols) or any(
                solution[s].free_symbols - ambient for s in symbols
            ):
                report.notes.append(f"exponents {exponents}: non-isolated coefficient family")
                continue
            values = [_to_coefficient(solution[s]) for s in symbols]
            if any(value is None for value in values):
                report.notes.append(f"exponents {exponents}: coefficients outside Q(i)(params)")
                continue
            if any(not value for value in values):
                continue
            balance = Balance(v.statevars, tuple(exponents), tuple(values))
            found.append(balance)
            residuals.append(leading_residuals(v, balance.exponents, balance.coefficients))

    order = sorted(range(len(found)), key=lambda k: _sort_key(found[k]))
    for branch, k in enumerate(order):
        b = found[k]
        balance = Balance(b.variables, b.exponents, b.coefficients, branch)
        report.balances.append(balance)
        report.residuals[branch] = residuals[k]
        logger.info("⚖️ Balance %d: %s", branch, balance.format())

    if any(b.is_parametric for b in report.balances):
        report.notes.append("coefficients depend on parameters; generic parameter values assumed")
    real_field = all(
        coeff.y == 0 for c in v.components for coeff in c.num.terms().values()
    )
    if report.balances and real_field:
        keys = {(b.exponents, b.coefficients) for b in report.balances}
        report.conjugate_pairs = all(
            (b.exponents, tuple(_conjugate(c) for c in b.coefficients)) in keys
            for b in report.balances
        )
    return report


def balance_residuals_vanish(report: BalanceReport) -> bool:
    return all(r.is_zero for residuals in report.residuals.values() for r in residuals)


def balance_to_chart(bal: Balance, lead: int = 0) -> Chart:
    """
    Carta pesada sugerida por los exponentes (reducidos por su mcd).

    Raises:
        IncompatibleWeights: Si el exponente principal no divide a los demás
    """
    return weighted_chart(reduce_weights(bal.exponents), bal.variables, lead)
