"""
Campos vectoriales y cambios de coordenadas racionales
======================================================

✅ VField: sistema dinámico con variables de estado, parámetros y símbolos exponenciales
✅ RationalMap: cambio birracional con inversa explícita (verificada al construir)
✅ pushforward: regla de la cadena + término temporal rate·E·∂F/∂E
✅ ChartedSystem: sistema en una carta con divisor frontera y orden de polo
✅ lie_derivative, divergence, jacobian_det
"""

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

from .algebra import (
    TIME,
    ExpSymbol,
    GaussianRational,
    MultiPoly,
    RatExpr,
    conjugate_gaussian,
    gaussian,
)
from .config import SystemConfig
from .errors import (
    DivisionByZeroIdentically,
    NotDivisible,
    NotInvertible,
    NotPolynomial,
    PoleOrderExceeded,
)

logger = logging.getLogger(__name__)


# ==========================================
# VECTOR FIELDS
# ==========================================


@dataclass(frozen=True)
class VField:
    """Sistema dx_i/dt = f_i con componentes racionales exactas."""

    name: str
    statevars: tuple[str, ...]
    components: tuple[RatExpr, ...]
    params: tuple[str, ...] = ()
    expsyms: tuple[ExpSymbol, ...] = ()

    def __post_init__(self) -> None:
        if len(self.statevars) != len(self.components):
            raise ValueError(
                f"{self.name}: {len(self.statevars)} variables but "
                f"{len(self.components)} components"
            )
        declared = set(self.statevars) | set(self.params) | {e.name for e in self.expsyms}
        for var, component in zip(self.statevars, self.components):
            stray = set(component.variables) - declared
            if stray:
                raise ValueError(
                    f"{self.name}: d{var}/dt uses undeclared symbols {sorted(stray)}"
                )

    @classmethod
    def from_polys(
        cls,
        name: str,
        statevars: Sequence[str],
        components: Sequence[Any],
        params: Sequence[str] = (),
        expsyms: Sequence[ExpSymbol] = (),
    ) -> "VField":
        return cls(
            name,
            tuple(statevars),
            tuple(RatExpr.coerce(c) for c in components),
            tuple(params),
            tuple(expsyms),
        )

    @property
    def dimension(self) -> int:
        return len(self.statevars)

    @property
    def rates(self) -> dict[str, GaussianRational]:
        return {e.name: e.rate for e in self.expsyms}

    def component(self, var: str) -> RatExpr:
        return self.components[self.statevars.index(var)]

    def as_dict(self) -> dict[str, RatExpr]:
        return dict(zip(self.statevars, self.components))

    @property
    def is_polynomial(self) -> bool:
        return all(c.is_polynomial_in(self.statevars) for c in self.components)

    def with_params(self, values: Mapping[str, Any]) -> "VField":
        """Especializa parámetros a valores exactos de Q(i)."""
        bound = {k: gaussian(v) for k, v in values.items() if k in self.params}
        if not bound:
            return self
        return replace(
            self,
            components=tuple(c.evaluate(bound) for c in self.components),
            params=tuple(p for p in self.params if p not in bound),
        )

    def conjugate(self) -> "VField":
        return replace(
            self,
            components=tuple(c.conjugate() for c in self.components),
            expsyms=tuple(ExpSymbol(e.name, conjugate_gaussian(e.rate)) for e in self.expsyms),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VField):
            return NotImplemented
        return (
            self.statevars == other.statevars
            and all(a == b for a, b in zip(self.components, other.components))
            and self.rates == other.rates
        )

    def __hash__(self) -> int:
        return hash((self.statevars, self.components))

    def format(self) -> str:
        return "\n".join(
            f"d{var}/dt = {component.format()}"
            for var, component in zip(self.statevars, self.components)
        )


def lie_derivative(v: VField, f: Any) -> RatExpr:
    """
    Derivada total de f a lo largo de v.

    Incluye el término explícito de los símbolos exponenciales
    (dE/dt = rate·E).

    Args:
        v: Campo vectorial
        f: Expresión (RatExpr o MultiPoly)

    Returns:
        df/dt exacto y normalizado
    """
    expr = RatExpr.coerce(f)
    total = expr.derivative(TIME, v.rates)
    used = set(expr.variables)
    for var, component in zip(v.statevars, v.components):
        if var in used:
            total = total + expr.derivative(var) * component
    return total


def divergence(v: VField) -> RatExpr:
    total = RatExpr(0)
    for var, component in zip(v.statevars, v.components):
        total = total + component.derivative(var)
    return total


def is_polynomial_in(f: Any, names: Iterable[str]) -> bool:
    return RatExpr.coerce(f).is_polynomial_in(names)


# ==========================================
# RATIONAL MAPS
# ==========================================


def determinant(rows: list[list[RatExpr]]) -> RatExpr:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = RatExpr(0)
    for j in range(n):
        if rows[0][j].is_zero:
            continue
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = rows[0][j] * determinant(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


@dataclass(frozen=True)
class RationalMap:
    """Cambio de coordenadas birracional old_vars -> new_vars.

    `forward[j]` expresa new_vars[j] en las variables viejas; `inverse[i]`
    expresa old_vars[i] en las nuevas. Los parámetros y símbolos
    exponenciales pueden aparecer en ambos lados.
    """

    old_vars: tuple[str, ...]
    new_vars: tuple[str, ...]
    forward: tuple[RatExpr, ...]
    inverse: tuple[RatExpr, ...]
    note: str = ""
    name: str = ""
    checked: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        n = len(self.old_vars)
        if not (len(self.new_vars) == len(self.forward) == len(self.inverse) == n):
            raise ValueError(f"map {self.name or self.note}: arity mismatch")
        if self.checked:
            self.check_inverse()

    @classmethod
    def build(
        cls,
        old_vars: Sequence[str],
        new_vars: Sequence[str],
        forward: Sequence[Any],
        inverse: Sequence[Any],
        note: str = "",
        name: str = "",
        check: bool = True,
    ) -> "RationalMap":
        return cls(
            tuple(old_vars),
            tuple(new_vars),
            tuple(RatExpr.coerce(f) for f in forward),
            tuple(RatExpr.coerce(g) for g in inverse),
            note,
            name,
            check,
        )

    @classmethod
    def identity(cls, names: Sequence[str], name: str = "identity") -> "RationalMap":
        variables = [RatExpr.variable(n) for n in names]
        return cls(tuple(names), tuple(names), tuple(variables), tuple(variables), "", name, False)

    def check_inverse(self) -> None:
        """
        Verifica inverse∘forward = identidad como RatExpr.

        Raises:
            NotInvertible: Si alguna componente no vuelve a su variable
        """
        bindings = dict(zip(self.new_vars, self.forward))
        for old, component in zip(self.old_vars, self.inverse):
            try:
                back = component.substitute(bindings)
            except DivisionByZeroIdentically as e:
                raise NotInvertible(f"map {self.name}: inverse degenerates on {old}") from e
            if back != RatExpr.variable(old):
                raise NotInvertible(
                    f"map {self.name}: inverse∘forward gives {old} -> {back.format()}"
                )

    @property
    def dimension(self) -> int:
        return len(self.old_vars)

    def inverted(self) -> "RationalMap":
        return RationalMap(
            self.new_vars, self.old_vars, self.inverse, self.forward,
            self.note, f"{self.name}^-1" if self.name else "", False,
        )

    def compose(self, other: "RationalMap") -> "RationalMap":
        """`self` seguido de `other` (old -> self.new = other.old -> other.new)."""
        if other.old_vars != self.new_vars:
            raise ValueError(
                f"cannot compose {self.name} -> {other.name}: "
                f"{self.new_vars} != {other.old_vars}"
            )
        into_mid = dict(zip(self.new_vars, self.forward))
        back_mid = dict(zip(other.new_vars, other.inverse))
        return RationalMap(
            self.old_vars,
            other.new_vars,
            tuple(f.substitute(into_mid) for f in other.forward),
            tuple(g.substitute(back_mid) for g in self.inverse),
            f"{self.note}; {other.note}".strip("; "),
            f"{self.name}*{other.name}",
            False,
        )

    def conjugate(self) -> "RationalMap":
        return RationalMap(
            self.old_vars, self.new_vars,
            tuple(f.conjugate() for f in self.forward),
            tuple(g.conjugate() for g in self.inverse),
            self.note, f"conj({self.name})", False,
        )

    def with_params(self, values: Mapping[str, Any]) -> "RationalMap":
        bound = {k: gaussian(v) for k, v in values.items()}
        return RationalMap(
            self.old_vars, self.new_vars,
            tuple(f.evaluate(bound) for f in self.forward),
            tuple(g.evaluate(bound) for g in self.inverse),
            self.note, self.name, False,
        )

    def apply_point(
        self, point: Sequence[Any], extra: Mapping[str, Any] | None = None
    ) -> tuple[GaussianRational, ...]:
        """Evalúa `forward` en un punto exacto de las coordenadas viejas."""
        values = {n: gaussian(v) for n, v in zip(self.old_vars, point)}
        values.update({k: gaussian(v) for k, v in (extra or {}).items()})
        return tuple(f.value_at(values) for f in self.forward)

    def apply_inverse(
        self, point: Sequence[Any], extra: Mapping[str, Any] | None = None
    ) -> tuple[GaussianRational, ...]:
        values = {n: gaussian(v) for n, v in zip(self.new_vars, point)}
        values.update({k: gaussian(v) for k, v in (extra or {}).items()})
        return tuple(g.value_at(values) for g in self.inverse)

    def jacobian(self) -> list[list[RatExpr]]:
        return [[f.derivative(x) for x in self.old_vars] for f in self.forward]

    def format(self) -> str:
        return ", ".join(
            f"{new} = {f.format()}" for new, f in zip(self.new_vars, self.forward)
        )


def jacobian_det(m: RationalMap) -> RatExpr:
    """Determinante del jacobiano de `forward` respecto de las variables viejas."""
    return determinant(m.jacobian())


def pushforward(v: VField, m: RationalMap, name: str | None = None) -> VField:
    """
    Transporta v a las coordenadas nuevas de m.

    dF_j/dt = Σ ∂F_j/∂x_i·f_i + Σ rate·E·∂F_j/∂E, luego x -> inverse(nuevas).

    Raises:
        DivisionByZeroIdentically: Si el mapa degenera sobre el soporte del campo
    """
    if m.old_vars != v.statevars:
        raise ValueError(f"map {m.name} expects {m.old_vars}, field has {v.statevars}")

    rates = dict(v.rates)
    back = dict(zip(m.old_vars, m.inverse))
    components = []
    for new_var, f in zip(m.new_vars, m.forward):
        rate_of_change = f.derivative(TIME, rates)
        for var, component in zip(v.statevars, v.components):
            partial = f.derivative(var)
            if not partial.is_zero:
                rate_of_change = rate_of_change + partial * component
        components.append(rate_of_change.substitute(back))
        logger.debug("🔁 %s: d%s/dt computed", m.name or "map", new_var)

    extra_params = set()
    for expr in m.forward + m.inverse:
        extra_params.update(expr.variables)
    extra_params -= set(m.old_vars) | set(m.new_vars) | set(rates)
    params = tuple(sorted(set(v.params) | extra_params))

    return VField(name or f"{v.name}@{m.name}", m.new_vars, tuple(components), params, v.expsyms)


# ==========================================
# CHARTED SYSTEMS
# ==========================================


@dataclass(frozen=True)
class ChartedSystem:
    """Sistema en una carta: boundary^pole_order·f_i es polinomial en el estado."""

    chart: str
    field: VField
    boundary: MultiPoly
    pole_order: int

    @property
    def boundary_var(self) -> str | None:
        """Nombre de la variable frontera cuando el divisor es {s = 0}."""
        variables = self.boundary.variables
        if len(variables) == 1 and self.boundary == MultiPoly.variable(variables[0]):
            return variables[0]
        return None

    def numerators(self) -> dict[str, RatExpr]:
        """
        Numeradores de la forma normal: s^k·f_i para cada componente.

        Para k = 1 la componente frontera da x1·a1 y las demás a_i.
        """
        factor = RatExpr(self.boundary) ** self.pole_order
        return {
            var: component * factor
            for var, component in zip(self.field.statevars, self.field.components)
        }

    def ordered_vars(self) -> tuple[str, ...]:
        """Variables con la frontera primero."""
        s = self.boundary_var
        if s is None:
            return self.field.statevars
        return (s,) + tuple(v for v in self.field.statevars if v != s)


def pole_order(v: VField, boundary: MultiPoly, max_order: int | None = None) -> int:
    """
    Mínimo k tal que boundary^k·f_i es polinomial en las variables de estado.

    Raises:
        NotPolynomial: Si algún denominador tiene factores fuera de la frontera
        PoleOrderExceeded: Si k supera el límite configurado
    """
    limit = SystemConfig.MAX_POLE_ORDER if max_order is None else max_order
    order = 0
    for var, component in zip(v.statevars, v.components):
        den = component.den
        k = 0
        while not den.free_of(v.statevars):
            if boundary.is_constant:
                raise NotPolynomial(f"d{var}/dt has a pole away from any boundary")
            try:
                den = den.exact_div(boundary)
            except NotDivisible as e:
                raise NotPolynomial(
                    f"d{var}/dt has poles off the boundary {boundary}: {component.den}"
                ) from e
            k += 1
            if k > limit:
                raise PoleOrderExceeded(f"d{var}/dt: pole order exceeds {limit}")
        order = max(order, k)
    return order


def charted(v: VField, m: RationalMap, boundary: Any, chart: str | None = None) -> ChartedSystem:
    """Transporta v por m y completa frontera y orden de polo."""
    pushed = pushforward(v, m)
    boundary_poly = MultiPoly.coerce(boundary)
    order = pole_order(pushed, boundary_poly)
    label = chart or m.name
    logger.debug("🗺️ Chart %s: pole order %d along %s", label, order, boundary_poly)
    return ChartedSystem(label, pushed, boundary_poly, order)
