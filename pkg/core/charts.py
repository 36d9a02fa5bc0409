"""
Atlas de compactificación: cartas estándar de P^n y cartas pesadas.

Cada carta guarda su mapa desde U0, la ecuación local de la frontera y,
cuando existe, la expresión de las coordenadas homogéneas (para identificar
el mismo punto de la frontera visto desde varias cartas).
"""

import logging
import random
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any

from .algebra import ZERO, GaussianRational, MultiPoly, RatExpr, gaussian
from .config import SystemConfig
from .errors import IncompatibleWeights
from .field import ChartedSystem, RationalMap, VField, charted

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Chart:
    """Carta de un atlas: mapa desde U0 + divisor frontera."""

    name: str
    map: RationalMap
    boundary: MultiPoly
    volume_preserving: bool | None = None
    homogeneous: tuple[RatExpr, ...] | None = None

    @property
    def variables(self) -> tuple[str, ...]:
        return self.map.new_vars


@dataclass(frozen=True)
class Atlas:
    """Conjunto de cartas sobre las mismas coordenadas base."""

    base_vars: tuple[str, ...]
    charts: tuple[Chart, ...]
    name: str = ""

    def chart(self, name: str) -> Chart:
        for chart in self.charts:
            if chart.name == name:
                return chart
        raise KeyError(f"atlas {self.name!r} has no chart {name!r}")

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.charts]

    def __iter__(self):
        return iter(self.charts)

    def __len__(self) -> int:
        return len(self.charts)


def _upper(name: str, taken: Sequence[str], suffix: str = "") -> str:
    candidate = name.upper() + suffix
    if candidate in taken:
        candidate = name + (suffix or "w")
    return candidate


# ==========================================
# STANDARD ATLAS
# ==========================================


def standard_atlas(statevars: Sequence[str] = ("x", "y", "z")) -> Atlas:
    """
    Cartas U0..Un de P^n (n = 2 o 3).

    En U_j: la coordenada j se invierte (frontera) y las demás se dividen
    por ella; U0 es la identidad sin frontera.

    Returns:
        Atlas con n + 1 cartas
    """
    base = tuple(statevars)
    n = len(base)
    if n not in (2, 3):
        raise ValueError(f"standard atlas supports 2 or 3 variables, got {n}")

    one = RatExpr(1)
    charts = [
        Chart(
            "U0",
            RationalMap.identity(base, "U0"),
            MultiPoly.one(),
            True,
            (one,) + tuple(RatExpr.variable(v) for v in base),
        )
    ]
    for j in range(n):
        new = tuple(_upper(v, base, str(j + 1)) for v in base)
        lead = RatExpr.variable(base[j])
        forward = tuple(
            1 / lead if k == j else RatExpr.variable(base[k]) / lead for k in range(n)
        )
        flead = RatExpr.variable(new[j])
        inverse = tuple(
            1 / flead if k == j else RatExpr.variable(new[k]) / flead for k in range(n)
        )
        homogeneous = [flead] + [
            one if k == j else RatExpr.variable(new[k]) for k in range(n)
        ]
        name = f"U{j + 1}"
        charts.append(
            Chart(
                name,
                RationalMap(base, new, forward, inverse, f"{base[j]} -> 1/{base[j]}", name, False),
                MultiPoly.variable(new[j]),
                None,
                tuple(homogeneous),
            )
        )
    return Atlas(base, tuple(charts), "standard")


standard_p3_atlas = standard_atlas


# ==========================================
# WEIGHTED CHARTS
# ==========================================


def reduce_weights(weights: Sequence[int]) -> tuple[int, ...]:
    common = 0
    for w in weights:
        common = gcd(common, w)
    return tuple(w // common for w in weights)


def weighted_chart(
    weights: Sequence[int],
    statevars: Sequence[str] = ("x", "y", "z"),
    lead: int = 0,
    names: Sequence[str] | None = None,
) -> Chart:
    """
    Carta pesada (1/x, y/x^(n/m), z/x^(p/m)) alrededor de la variable `lead`.

    Args:
        weights: Órdenes de polo (m, n, p), enteros positivos
        statevars: Variables base
        lead: Índice de la variable que se invierte
        names: Nombres de las nuevas coordenadas (por defecto X, Y, Z)

    Raises:
        IncompatibleWeights: Si m no divide a los demás pesos
    """
    base = tuple(statevars)
    if len(weights) != len(base) or any(int(w) <= 0 for w in weights):
        raise IncompatibleWeights(f"weights {tuple(weights)} do not fit {base}")
    m = weights[lead]
    if any(w % m for w in weights):
        raise IncompatibleWeights(f"weight {m} does not divide {tuple(weights)}")

    powers = [w // m for w in weights]
    new = tuple(names) if names else tuple(_upper(v, base) for v in base)
    x = RatExpr.variable(base[lead])
    big = RatExpr.variable(new[lead])

    forward = []
    inverse = []
    for k, var in enumerate(base):
        if k == lead:
            forward.append(1 / x)
            inverse.append(1 / big)
        else:
            forward.append(RatExpr.variable(var) / x ** powers[k])
            inverse.append(RatExpr.variable(new[k]) / big ** powers[k])

    top = max(powers)
    homogeneous: list[RatExpr] = [big**top]
    for k in range(len(base)):
        if k == lead:
            homogeneous.append(big ** (top - 1))
        else:
            homogeneous.append(RatExpr.variable(new[k]) * big ** (top - powers[k]))

    label = "W(" + ",".join(str(w) for w in weights) + ")"
    mapping = RationalMap(
        base, new, tuple(forward), tuple(inverse), f"weights {tuple(weights)}", label, False
    )
    return Chart(label, mapping, MultiPoly.variable(new[lead]), None, tuple(homogeneous))


def to_chart(v: VField, chart: Chart) -> ChartedSystem:
    """Sistema en la carta, con frontera y orden de polo."""
    return charted(v, chart.map, chart.boundary, chart.name)


def transition(a: Chart, b: Chart) -> RationalMap:
    """Mapa de la carta `a` a la carta `b` pasando por U0."""
    return a.map.inverted().compose(b.map)


# ==========================================
# POINTS AND OVERLAPS
# ==========================================


def _boundary_limit(
    chart: Chart, values: dict[str, GaussianRational]
) -> list[GaussianRational] | None:
    """
    Límite de las coordenadas homogéneas al acercarse al punto a lo largo de
    la coordenada de frontera, con las demás fijas.

    Devuelve los coeficientes del menor orden en esa coordenada, o None si la
    frontera no es una coordenada de la carta.
    """
    if not chart.boundary.is_monomial or chart.boundary.total_degree() != 1:
        return None
    (var,) = chart.boundary.variables
    rest = {n: v for n, v in values.items() if n != var}
    expansions = [h.evaluate(rest) for h in chart.homogeneous]
    orders = [
        e.num.tail_degree(var) - e.den.tail_degree(var) if e else None for e in expansions
    ]
    present = [k for k in orders if k is not None]
    if not present:
        return None
    lowest = min(present)
    coords = []
    for e, k in zip(expansions, orders):
        if k != lowest:
            coords.append(ZERO)
            continue
        lead = e.num.coeff_in(var, e.num.tail_degree(var)).constant_value()
        scale = e.den.coeff_in(var, e.den.tail_degree(var)).constant_value()
        coords.append(lead / scale)
    return coords


def projective_point(chart: Chart, point: Sequence[Any]) -> tuple[GaussianRational, ...]:
    """
    Coordenadas homogéneas [z0 : z1 : ... : zn] de un punto de la carta.

    Normalizadas con la primera entrada no nula igual a 1. Si todas se anulan
    (origen de una carta pesada) se toma el límite a lo largo de la
    coordenada de frontera: el origen de W(1,2,2) va a [0 : 1 : 0 : 0].

    Raises:
        ValueError: Si la carta no declara coordenadas homogéneas o el punto
            no tiene imagen
    """
    if chart.homogeneous is None:
        raise ValueError(f"chart {chart.name} has no homogeneous coordinates")
    values = {n: gaussian(v) for n, v in zip(chart.variables, point)}
    coords = [h.value_at(values) for h in chart.homogeneous]
    if not any(coords):
        coords = _boundary_limit(chart, values) or coords
    pivot = next((c for c in coords if c), None)
    if pivot is None:
        raise ValueError(f"point {tuple(point)} has no projective image in {chart.name}")
    return tuple(c / pivot for c in coords)


def _random_gaussian(rng: random.Random) -> GaussianRational:
    numerator = rng.choice([n for n in range(-7, 8) if n])
    return gaussian(Fraction(numerator, rng.randint(1, 5)), Fraction(rng.randint(-3, 3), 2))


def check_overlaps(
    atlas: Atlas,
    samples: int | None = None,
    seed: int | None = None,
    params: Sequence[str] = (),
) -> list[str]:
    """
    Compara, en puntos racionales aleatorios de U0, la transición a→b con
    la composición directa por U0.

    Returns:
        Lista de discrepancias (vacía si todo es compatible)
    """
    rng = random.Random(SystemConfig.DEFAULT_SEED if seed is None else seed)
    count = samples or SystemConfig.OVERLAP_SAMPLE_POINTS
    problems: list[str] = []
    charts = [c for c in atlas.charts if c.name != "U0"]
    transitions = {
        (a.name, b.name): transition(a, b) for a in charts for b in charts if a is not b
    }

    checked = 0
    while checked < count:
        point = [_random_gaussian(rng) for _ in atlas.base_vars]
        extra = {p: _random_gaussian(rng) for p in params}
        try:
            images = {c.name: c.map.apply_point(point, extra) for c in charts}
            for (a, b), mapping in transitions.items():
                through = mapping.apply_point(images[a], extra)
                if through != images[b]:
                    problems.append(f"{a}->{b} disagrees at {point}")
        except ZeroDivisionError:
            continue
        checked += 1

    if problems:
        logger.warning("⚠️ Atlas %s: %d overlap mismatches", atlas.name, len(problems))
    else:
        logger.debug("✅ Atlas %s overlaps agree on %d points", atlas.name, count)
    return problems
