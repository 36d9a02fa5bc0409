"""
Álgebra exacta sobre Q(i)
=========================

✅ GaussianRational: números a+b·i con a, b racionales (dominio QQ_I de sympy)
✅ MultiPoly: polinomios multivariados dispersos, variables ordenadas por nombre
✅ RatExpr: cocientes normalizados (coprimos, denominador con LC = 1)
✅ Derivaciones con símbolos exponenciales (d E/dt = rate·E)
✅ Sustitución racional por expansión con denominador común

Todas las instancias son inmutables después de construirse.
"""

import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Union

from sympy import Expr, Rational, Symbol, fraction, together
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.orderings import lex
from sympy.polys.polyerrors import CoercionFailed, ExactQuotientFailed
from sympy.polys.rings import PolyElement, PolyRing

from .errors import DivisionByZeroIdentically, NotDivisible, NotPolynomial

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, str, GaussianRational]
Monomial = tuple[int, ...]


# ==========================================
# GAUSSIAN RATIONALS
# ==========================================

ZERO: GaussianRational = QQ_I.zero
ONE: GaussianRational = QQ_I.one
IMAG: GaussianRational = QQ_I(0, 1)


def _rational(value: Any) -> Any:
    """Convierte int / Fraction / str / elemento de QQ a un elemento de QQ."""
    if QQ.of_type(value):
        return value
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.from_sympy(Rational(str(value).strip()))


def gaussian(re_part: Any = 0, im_part: Any = 0) -> GaussianRational:
    """
    Construye un GaussianRational canónico.

    Args:
        re_part: Parte real (int, Fraction, texto racional o GaussianRational);
            un texto con `i` como "2+i" se lee completo con `parse_gaussian`
        im_part: Parte imaginaria

    Returns:
        Elemento de QQ_I
    """
    if isinstance(re_part, GaussianRational) and not im_part:
        return re_part
    if isinstance(re_part, str) and "i" in re_part and not im_part:
        return parse_gaussian(re_part)
    return QQ_I(_rational(re_part), _rational(im_part))


def conjugate_gaussian(z: GaussianRational) -> GaussianRational:
    return QQ_I(z.x, -z.y)


def is_real(z: GaussianRational) -> bool:
    return not z.y


def is_integer(z: GaussianRational) -> bool:
    return not z.y and QQ.denom(z.x) == 1


def norm_squared(z: GaussianRational) -> Any:
    return z.x * z.x + z.y * z.y


def to_complex(z: GaussianRational) -> complex:
    return complex(_to_float(z.x), _to_float(z.y))


def _to_float(q: Any) -> float:
    return int(QQ.numer(q)) / int(QQ.denom(q))


def _format_rational(q: Any) -> str:
    num, den = int(QQ.numer(q)), int(QQ.denom(q))
    return str(num) if den == 1 else f"{num}/{den}"


def format_gaussian(z: GaussianRational) -> str:
    """Formato canónico `a/b+c/d*i` (se omiten las partes nulas)."""
    re_text = _format_rational(z.x) if z.x else ""
    if not z.y:
        return re_text or "0"

    magnitude = abs(z.y) if hasattr(z.y, "__abs__") else z.y
    im_abs = _format_rational(magnitude)
    im_text = "i" if im_abs == "1" else f"{im_abs}*i"
    sign = "-" if z.y < 0 else "+"
    if not re_text:
        return im_text if sign == "+" else f"-{im_text}"
    return f"{re_text}{sign}{im_text}"


_GAUSSIAN_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:\.\d+)?(?:/\d+)?)\s*(\*\s*i)?|(i)(?:\s*/\s*(\d+))?)\s*"
)


def parse_gaussian(text: str) -> GaussianRational:
    """
    Lee un número en el formato de `format_gaussian` (también `i/2`, `0.5`).

    Raises:
        ValueError: Si el texto no es un racional gaussiano
    """
    source = text.strip()
    if not source:
        raise ValueError("empty Gaussian rational")

    total = ZERO
    position = 0
    while position < len(source):
        match = _GAUSSIAN_TERM.match(source, position)
        if match is None or match.end() == position:
            raise ValueError(f"invalid Gaussian rational: {text!r}")
        sign, number, star_i, bare_i, divisor = match.groups()
        if position > 0 and sign is None:
            raise ValueError(f"invalid Gaussian rational: {text!r}")
        factor = -1 if sign == "-" else 1
        if bare_i:
            value = gaussian(0, QQ(1, int(divisor)) if divisor else 1)
        elif star_i:
            value = gaussian(0, number)
        else:
            value = gaussian(number)
        total += value * factor
        position = match.end()
    return total


# ==========================================
# SYMBOLS
# ==========================================


@dataclass(frozen=True)
class ExpSymbol:
    """Símbolo exponencial E = e^{rate·t}: d(E)/dt = rate·E."""

    name: str
    rate: GaussianRational


class _TimeDerivative:
    """Marcador para derivar respecto del tiempo."""

    def __repr__(self) -> str:
        return "TIME"


TIME = _TimeDerivative()


@lru_cache(maxsize=None)
def _ring(names: tuple[str, ...]) -> PolyRing:
    return PolyRing(tuple(Symbol(name) for name in names), QQ_I, lex)


def _names(element: PolyElement) -> tuple[str, ...]:
    return tuple(str(symbol) for symbol in element.ring.symbols)


# ==========================================
# MULTIVARIATE POLYNOMIALS
# ==========================================


class MultiPoly:
    """Polinomio multivariado sobre Q(i).

    Envuelve un PolyElement de sympy cuyo anillo tiene las variables
    ordenadas por nombre; al operar, los universos se unen por nombre.
    """

    __slots__ = ("_p",)

    def __init__(self, element: PolyElement) -> None:
        self._p = element

    # ---------- construcción ----------

    @classmethod
    def zero(cls) -> "MultiPoly":
        return cls(_ring(()).zero)

    @classmethod
    def one(cls) -> "MultiPoly":
        return cls(_ring(()).one)

    @classmethod
    def constant(cls, value: Number) -> "MultiPoly":
        return cls(_ring(()).ground_new(gaussian(value)))

    @classmethod
    def variable(cls, name: str) -> "MultiPoly":
        return cls(_ring((name,)).gens[0])

    @classmethod
    def from_terms(
        cls, names: Sequence[str], terms: Mapping[Monomial, Number]
    ) -> "MultiPoly":
        """Construye desde {exponentes: coeficiente} alineados con `names`."""
        ordered = tuple(sorted(set(names)))
        if len(ordered) != len(names):
            raise ValueError(f"duplicate variable names: {names}")
        permutation = [list(names).index(name) for name in ordered]
        data: dict[Monomial, GaussianRational] = {}
        for exps, coeff in terms.items():
            if len(exps) != len(names):
                raise ValueError("exponent vector does not match variable arity")
            value = gaussian(coeff)
            if value:
                key = tuple(exps[i] for i in permutation)
                data[key] = data.get(key, ZERO) + value
        return cls(_ring(ordered).from_dict({k: v for k, v in data.items() if v}))

    @classmethod
    def from_sympy(cls, expr: Expr) -> "MultiPoly":
        """Convierte una expresión polinomial de sympy (con `I`) a MultiPoly."""
        names = tuple(sorted(str(s) for s in expr.free_symbols))
        ring = _ring(names)
        try:
            return cls(ring.from_expr(expr))
        except (ValueError, CoercionFailed) as e:
            raise NotPolynomial(f"not a polynomial over Q(i): {expr}") from e

    @staticmethod
    def coerce(value: Any) -> "MultiPoly":
        if isinstance(value, MultiPoly):
            return value
        return MultiPoly.constant(value)

    # ---------- anillos ----------

    @property
    def element(self) -> PolyElement:
        return self._p

    @property
    def ring_names(self) -> tuple[str, ...]:
        return _names(self._p)

    @property
    def variables(self) -> tuple[str, ...]:
        """Variables que aparecen efectivamente (ordenadas)."""
        names = self.ring_names
        used = [False] * len(names)
        for monom in self._p.itermonoms():
            for i, e in enumerate(monom):
                if e:
                    used[i] = True
        return tuple(name for name, flag in zip(names, used) if flag)

    def lift(self, names: Sequence[str]) -> PolyElement:
        target = tuple(names)
        if target == self.ring_names:
            return self._p
        return self._p.set_ring(_ring(target))

    def trimmed(self) -> "MultiPoly":
        used = self.variables
        if used == self.ring_names:
            return self
        return MultiPoly(self._p.set_ring(_ring(used)))

    @staticmethod
    def unify(*polys: "MultiPoly") -> tuple[tuple[str, ...], list[PolyElement]]:
        first = polys[0].ring_names
        if all(p.ring_names == first for p in polys):
            return first, [p._p for p in polys]
        names = tuple(sorted(set().union(*(p.ring_names for p in polys))))
        return names, [p.lift(names) for p in polys]

    # ---------- aritmética ----------

    def __add__(self, other: Any) -> "MultiPoly":
        if isinstance(other, RatExpr):
            return NotImplemented
        _, (a, b) = MultiPoly.unify(self, MultiPoly.coerce(other))
        return MultiPoly(a + b)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "MultiPoly":
        if isinstance(other, RatExpr):
            return NotImplemented
        _, (a, b) = MultiPoly.unify(self, MultiPoly.coerce(other))
        return MultiPoly(a - b)

    def __rsub__(self, other: Any) -> "MultiPoly":
        return MultiPoly.coerce(other) - self

    def __mul__(self, other: Any) -> "MultiPoly":
        if isinstance(other, RatExpr):
            return NotImplemented
        if isinstance(other, MultiPoly):
            _, (a, b) = MultiPoly.unify(self, other)
            return MultiPoly(a * b)
        return MultiPoly(self._p.mul_ground(gaussian(other)))

    __rmul__ = __mul__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(-self._p)

    def __pow__(self, exponent: int) -> "MultiPoly":
        if exponent < 0:
            raise ValueError("negative power of a polynomial; use RatExpr")
        return MultiPoly(self._p**exponent)

    def __truediv__(self, other: Any) -> "RatExpr":
        return RatExpr(self) / other

    def __rtruediv__(self, other: Any) -> "RatExpr":
        return RatExpr(MultiPoly.coerce(other)) / self

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RatExpr):
            return other == self
        try:
            other_poly = MultiPoly.coerce(other)
        except (TypeError, ValueError, CoercionFailed):
            return NotImplemented
        _, (a, b) = MultiPoly.unify(self, other_poly)
        return a == b

    def __hash__(self) -> int:
        names = self.ring_names
        return hash(
            frozenset(
                (tuple((n, e) for n, e in zip(names, monom) if e), coeff)
                for monom, coeff in self._p.iterterms()
            )
        )

    def __bool__(self) -> bool:
        return bool(self._p)

    # ---------- inspección ----------

    @property
    def is_zero(self) -> bool:
        return not self._p

    @property
    def is_constant(self) -> bool:
        return self._p.is_ground

    @property
    def is_monomial(self) -> bool:
        """Un único término (cualquier coeficiente)."""
        return len(self._p) == 1

    def constant_value(self) -> GaussianRational:
        if not self.is_constant:
            raise NotPolynomial(f"{self} is not constant")
        return self._p.LC if self._p else ZERO

    @property
    def leading_coefficient(self) -> GaussianRational:
        return self._p.LC

    def terms(self) -> dict[Monomial, GaussianRational]:
        """Términos indexados por exponentes alineados con `variables`."""
        used = self.variables
        names = self.ring_names
        index = [names.index(name) for name in used]
        return {
            tuple(monom[i] for i in index): coeff for monom, coeff in self._p.iterterms()
        }

    def degree(self, var: str) -> int:
        names = self.ring_names
        if var not in names:
            return 0 if self._p else -1
        return max((m[names.index(var)] for m in self._p.itermonoms()), default=-1)

    def tail_degree(self, var: str) -> int:
        names = self.ring_names
        if var not in names:
            return 0
        return min((m[names.index(var)] for m in self._p.itermonoms()), default=0)

    def total_degree(self) -> int:
        return max((sum(m) for m in self._p.itermonoms()), default=-1)

    def min_total_degree(self) -> int:
        return min((sum(m) for m in self._p.itermonoms()), default=-1)

    def free_of(self, names: Iterable[str]) -> bool:
        return not set(names) & set(self.variables)

    # ---------- operaciones exactas ----------

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        """
        División exacta.

        Raises:
            DivisionByZeroIdentically: Si el divisor es cero
            NotDivisible: Si el resto no es nulo
        """
        divisor = MultiPoly.coerce(other)
        if divisor.is_zero:
            raise DivisionByZeroIdentically("exact division by the zero polynomial")
        _, (a, b) = MultiPoly.unify(self, divisor)
        try:
            return MultiPoly(a.exquo(b))
        except ExactQuotientFailed as e:
            raise NotDivisible(f"{self} is not divisible by {divisor}") from e

    def divides(self, other: "MultiPoly") -> bool:
        try:
            MultiPoly.coerce(other).exact_div(self)
        except NotDivisible:
            return False
        return True

    def diff(self, var: str) -> "MultiPoly":
        names = self.ring_names
        if var not in names:
            return MultiPoly(self._p.ring.zero)
        return MultiPoly(self._p.diff(names.index(var)))

    def evaluate(self, values: Mapping[str, Any]) -> "MultiPoly":
        """Evaluación parcial exacta en un punto de Q(i)."""
        names = self.ring_names
        bound = [(i, gaussian(values[n])) for i, n in enumerate(names) if n in values]
        if not bound:
            return self
        keep = [i for i, n in enumerate(names) if n not in values]
        result: dict[Monomial, GaussianRational] = {}
        for monom, coeff in self._p.iterterms():
            value = coeff
            for i, point in bound:
                if monom[i]:
                    value *= point ** monom[i]
            if not value:
                continue
            key = tuple(monom[i] for i in keep)
            result[key] = result.get(key, ZERO) + value
        ring = _ring(tuple(names[i] for i in keep))
        return MultiPoly(ring.dtype({k: v for k, v in result.items() if v}))

    def value_at(self, values: Mapping[str, Any]) -> GaussianRational:
        return self.evaluate(values).constant_value()

    def coefficients(self, names: Sequence[str]) -> dict[Monomial, "MultiPoly"]:
        """Separa en {exponentes en `names`: coeficiente polinomial en el resto}."""
        ring_names = self.ring_names
        index = [ring_names.index(n) if n in ring_names else -1 for n in names]
        rest = [i for i, n in enumerate(ring_names) if n not in names]
        rest_ring = _ring(tuple(ring_names[i] for i in rest))
        grouped: dict[Monomial, dict[Monomial, GaussianRational]] = {}
        for monom, coeff in self._p.iterterms():
            key = tuple(monom[i] if i >= 0 else 0 for i in index)
            grouped.setdefault(key, {})[tuple(monom[i] for i in rest)] = coeff
        return {key: MultiPoly(rest_ring.dtype(data)) for key, data in grouped.items()}

    def coeff_in(self, var: str, degree: int) -> "MultiPoly":
        return self.coefficients([var]).get((degree,), MultiPoly.zero())

    def substitute(self, bindings: Mapping[str, Any]) -> "RatExpr":
        """
        Sustituye variables por expresiones racionales.

        Expansión con denominador común: para cada variable ligada v de grado
        k_v, el término c·Π v^e se convierte en c·Π n_v^e·d_v^(k_v−e) sobre
        Π d_v^k_v.
        """
        names = self.ring_names
        active = [n for n in self.variables if n in bindings]
        if not active:
            return RatExpr(self)

        values = {n: RatExpr.coerce(bindings[n]) for n in active}
        degrees = {n: self.degree(n) for n in active}
        positions = [names.index(n) for n in active]
        keep = [i for i, n in enumerate(names) if n not in bindings or n not in active]
        rest_ring = _ring(tuple(names[i] for i in keep))

        grouped: dict[Monomial, dict[Monomial, GaussianRational]] = {}
        for monom, coeff in self._p.iterterms():
            key = tuple(monom[i] for i in positions)
            grouped.setdefault(key, {})[tuple(monom[i] for i in keep)] = coeff

        num_powers = {n: _PowerCache(values[n].num) for n in active}
        den_powers = {n: _PowerCache(values[n].den) for n in active}
        polynomial = all(values[n].den.is_constant for n in active)

        total = MultiPoly.zero()
        for key, data in grouped.items():
            term = MultiPoly(rest_ring.dtype(data))
            for n, e in zip(active, key):
                if e:
                    term = term * num_powers[n][e]
                if not polynomial and degrees[n] - e:
                    term = term * den_powers[n][degrees[n] - e]
            total = total + term

        denominator = MultiPoly.one()
        if not polynomial:
            for n in active:
                denominator = denominator * den_powers[n][degrees[n]]
        if denominator.is_zero:
            raise DivisionByZeroIdentically("substitution produced a zero denominator")
        return RatExpr(total, denominator)

    def gcd(self, other: "MultiPoly") -> "MultiPoly":
        _, (a, b) = MultiPoly.unify(self, MultiPoly.coerce(other))
        return MultiPoly(a.gcd(b))

    def resultant(self, other: "MultiPoly", var: str) -> "MultiPoly":
        """Resultante de Sylvester respecto de `var` (determinante exacto)."""
        names, _ = MultiPoly.unify(self, MultiPoly.coerce(other))
        rest = tuple(n for n in names if n != var)
        ring = _ordered_ring((var,) + rest)
        a = self._p.set_ring(ring)
        b = MultiPoly.coerce(other)._p.set_ring(ring)
        result = a.resultant(b)
        if isinstance(result, PolyElement):
            return MultiPoly(result.set_ring(_ring(rest)))
        return MultiPoly.constant(result)

    def factor_list(self) -> tuple[GaussianRational, list[tuple["MultiPoly", int]]]:
        """Factorización sobre Q(i): (constante, [(factor, multiplicidad)])."""
        poly = self.trimmed()
        if poly.is_constant:
            return poly.constant_value(), []
        coeff, factors = poly._p.factor_list()
        return coeff, [(MultiPoly(f), k) for f, k in factors]

    def conjugate(self) -> "MultiPoly":
        return MultiPoly(
            self._p.ring.dtype(
                {m: conjugate_gaussian(c) for m, c in self._p.iterterms()}
            )
        )

    def map_coefficients(self, fn: Any) -> "MultiPoly":
        data = {m: fn(c) for m, c in self._p.iterterms()}
        return MultiPoly(self._p.ring.dtype({m: c for m, c in data.items() if c}))

    # ---------- conversión ----------

    def to_sympy(self) -> Expr:
        return self._p.as_expr()

    def format(self) -> str:
        return format_polynomial(self)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"MultiPoly({self.format()!r})"


class _PowerCache:
    """Potencias sucesivas de un polinomio, calculadas bajo demanda."""

    def __init__(self, base: MultiPoly) -> None:
        self._powers = [MultiPoly.one(), base]

    def __getitem__(self, exponent: int) -> MultiPoly:
        while len(self._powers) <= exponent:
            self._powers.append(self._powers[-1] * self._powers[1])
        return self._powers[exponent]


@lru_cache(maxsize=None)
def _ordered_ring(names: tuple[str, ...]) -> PolyRing:
    return PolyRing(tuple(Symbol(name) for name in names), QQ_I, lex)


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Suma, resta o producto exacto con unión automática de variables."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation: {op}")


def poly_exact_div(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return a.exact_div(b)


def resultant(a: MultiPoly, b: MultiPoly, var: str) -> MultiPoly:
    return a.resultant(b, var)


# ==========================================
# RATIONAL EXPRESSIONS
# ==========================================


def _normalize(num: PolyElement, den: PolyElement) -> tuple[PolyElement, PolyElement]:
    if not den:
        raise DivisionByZeroIdentically("zero denominator")
    ring = num.ring
    if not num:
        return ring.zero, ring.one
    if den.is_ground:
        return num.quo_ground(den.LC), ring.one
    if len(den) == 1:
        return _cancel_monomial(num, den)
    p, q = num.cancel(den)
    lc = q.LC
    return p.quo_ground(lc), q.quo_ground(lc)


def _cancel_monomial(num: PolyElement, den: PolyElement) -> tuple[PolyElement, PolyElement]:
    ring = num.ring
    (den_monom, den_coeff), = den.iterterms()
    common = list(den_monom)
    for monom in num.itermonoms():
        common = [min(c, e) for c, e in zip(common, monom)]
        if not any(common):
            break
    if any(common):
        num = ring.dtype(
            {tuple(e - c for e, c in zip(m, common)): v for m, v in num.iterterms()}
        )
        den_monom = tuple(e - c for e, c in zip(den_monom, common))
    return num.quo_ground(den_coeff), ring.dtype({den_monom: ring.domain.one})


class RatExpr:
    """Cociente normalizado de dos MultiPoly.

    Invariante: numerador y denominador coprimos; el coeficiente principal
    del denominador (orden lex) es 1. La igualdad se decide por producto
    cruzado.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Any, den: Any = None) -> None:
        numerator = MultiPoly.coerce(num)
        denominator = MultiPoly.one() if den is None else MultiPoly.coerce(den)
        _, (p, q) = MultiPoly.unify(numerator, denominator)
        p, q = _normalize(p, q)
        self.num = MultiPoly(p)
        self.den = MultiPoly(q)

    @classmethod
    def _raw(cls, num: MultiPoly, den: MultiPoly) -> "RatExpr":
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @staticmethod
    def coerce(value: Any) -> "RatExpr":
        if isinstance(value, RatExpr):
            return value
        return RatExpr(value)

    @classmethod
    def variable(cls, name: str) -> "RatExpr":
        return cls(MultiPoly.variable(name))

    @classmethod
    def from_sympy(cls, expr: Expr) -> "RatExpr":
        num, den = fraction(together(expr))
        return cls(MultiPoly.from_sympy(num), MultiPoly.from_sympy(den))

    # ---------- aritmética ----------

    def __add__(self, other: Any) -> "RatExpr":
        o = RatExpr.coerce(other)
        if self.den == o.den:
            return RatExpr(self.num + o.num, self.den)
        return RatExpr(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "RatExpr":
        return self + (-RatExpr.coerce(other))

    def __rsub__(self, other: Any) -> "RatExpr":
        return RatExpr.coerce(other) - self

    def __mul__(self, other: Any) -> "RatExpr":
        o = RatExpr.coerce(other)
        return RatExpr(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RatExpr":
        o = RatExpr.coerce(other)
        if o.num.is_zero:
            raise DivisionByZeroIdentically("division by an identically zero expression")
        return RatExpr(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other: Any) -> "RatExpr":
        return RatExpr.coerce(other) / self

    def __neg__(self) -> "RatExpr":
        return RatExpr._raw(-self.num, self.den)

    def __pow__(self, exponent: int) -> "RatExpr":
        if exponent >= 0:
            return RatExpr._raw(self.num**exponent, self.den**exponent)
        if self.num.is_zero:
            raise DivisionByZeroIdentically("negative power of zero")
        return RatExpr(self.den ** (-exponent), self.num ** (-exponent))

    def __eq__(self, other: object) -> bool:
        try:
            o = RatExpr.coerce(other)
        except (TypeError, ValueError, CoercionFailed):
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self) -> int:
        return hash((hash(self.num), hash(self.den)))

    def __bool__(self) -> bool:
        return not self.num.is_zero

    # ---------- inspección ----------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return self.den.is_constant

    def is_polynomial_in(self, names: Iterable[str]) -> bool:
        """Denominador libre de las variables dadas."""
        return self.den.free_of(names)

    def as_poly(self) -> MultiPoly:
        if not self.is_polynomial:
            raise NotPolynomial(f"{self} has a non-constant denominator")
        return self.num

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.num.variables) | set(self.den.variables)))

    def constant_value(self) -> GaussianRational:
        return self.num.constant_value() / self.den.constant_value()

    # ---------- operaciones ----------

    def derivative(
        self, var: Any, rates: Mapping[str, GaussianRational] | None = None
    ) -> "RatExpr":
        """
        Derivada exacta (regla del cociente).

        Args:
            var: Nombre de variable o TIME
            rates: Tasas de los símbolos exponenciales (solo para TIME)
        """
        if var is TIME:
            total = RatExpr(0)
            for name, rate in (rates or {}).items():
                if name in self.variables:
                    total = total + RatExpr.variable(name) * self.derivative(name) * rate
            return total

        dn = self.num.diff(var)
        if self.den.is_constant:
            return RatExpr(dn, self.den)
        dd = self.den.diff(var)
        return RatExpr(dn * self.den - self.num * dd, self.den * self.den)

    def substitute(self, bindings: Mapping[str, Any]) -> "RatExpr":
        """
        Composición exacta, normalizada.

        Raises:
            DivisionByZeroIdentically: Si el denominador se anula idénticamente
        """
        num = self.num.substitute(bindings)
        if self.den.is_constant:
            return RatExpr(num.num, num.den * self.den)
        den = self.den.substitute(bindings)
        if den.is_zero:
            raise DivisionByZeroIdentically(f"denominator {self.den} vanishes after substitution")
        return num / den

    def evaluate(self, values: Mapping[str, Any]) -> "RatExpr":
        den = self.den.evaluate(values)
        if den.is_zero:
            raise ZeroDivisionError(f"denominator {self.den} vanishes at {dict(values)}")
        return RatExpr(self.num.evaluate(values), den)

    def value_at(self, values: Mapping[str, Any]) -> GaussianRational:
        return self.evaluate(values).constant_value()

    def conjugate(self) -> "RatExpr":
        return RatExpr(self.num.conjugate(), self.den.conjugate())

    def pole_parts(self, var: str) -> tuple[dict[int, "RatExpr"], "RatExpr"]:
        """
        Parte de Laurent en `var` cuando el denominador es var^k·D, D libre de var.

        Returns:
            ({k: coeficiente de var^-k}, parte regular)

        Raises:
            NotPolynomial: Si el denominador no tiene esa forma
        """
        order = self.den.degree(var)
        if order <= 0:
            return {}, self
        if self.den.tail_degree(var) != order:
            raise NotPolynomial(f"denominator {self.den} is not monomial in {var}")
        rest = self.den.exact_div(MultiPoly.variable(var) ** order)
        by_degree = self.num.coefficients([var])
        poles: dict[int, RatExpr] = {}
        regular = MultiPoly.zero()
        x = MultiPoly.variable(var)
        for (degree,), coeff in by_degree.items():
            if degree < order:
                poles[order - degree] = RatExpr(coeff, rest)
            else:
                regular = regular + coeff * x ** (degree - order)
        return dict(sorted(poles.items(), reverse=True)), RatExpr(regular, rest)

    def to_sympy(self) -> Expr:
        return self.num.to_sympy() / self.den.to_sympy()

    def format(self) -> str:
        if self.den.is_constant:
            return self.num.format()
        return f"({self.num.format()})/({self.den.format()})"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"RatExpr({self.format()!r})"


def derivative(f: RatExpr, var: Any, rates: Mapping[str, GaussianRational] | None = None) -> RatExpr:
    return RatExpr.coerce(f).derivative(var, rates)


def substitute(f: Any, bindings: Mapping[str, Any]) -> RatExpr:
    return RatExpr.coerce(f).substitute(bindings)


# ==========================================
# CANONICAL PRINTING
# ==========================================


def _format_monomial(names: Sequence[str], monom: Monomial) -> str:
    parts = []
    for name, e in zip(names, monom):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_term(coeff: GaussianRational, monomial: str, first: bool) -> str:
    negative = (not coeff.y and coeff.x < 0) or (not coeff.x and coeff.y < 0)
    magnitude = -coeff if negative else coeff
    if magnitude.x and magnitude.y:
        body = f"({format_gaussian(magnitude)})"
        body = f"{body}*{monomial}" if monomial else body
    elif magnitude == ONE and monomial:
        body = monomial
    else:
        text = format_gaussian(magnitude)
        body = f"{text}*{monomial}" if monomial else text
    if first:
        return f"-{body}" if negative else body
    return f" - {body}" if negative else f" + {body}"


def format_polynomial(poly: MultiPoly) -> str:
    """Texto canónico: orden lex sobre nombres ordenados, `^` para potencias."""
    element = poly.element
    if not element:
        return "0"
    names = poly.ring_names
    pieces = []
    for monom, coeff in element.terms():
        pieces.append(_format_term(coeff, _format_monomial(names, monom), not pieces))
    return "".join(pieces)
