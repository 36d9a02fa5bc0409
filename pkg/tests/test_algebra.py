"""Álgebra exacta sobre Q(i): números, polinomios y cocientes."""

from fractions import Fraction

import pytest

from core.algebra import (
    TIME,
    MultiPoly,
    RatExpr,
    format_gaussian,
    gaussian,
    is_integer,
    parse_gaussian,
    poly_arith,
    poly_exact_div,
    resultant,
    to_complex,
)
from core.errors import DivisionByZeroIdentically, NotDivisible, NotPolynomial

x = MultiPoly.variable("x")
y = MultiPoly.variable("y")
u = MultiPoly.variable("u")


@pytest.mark.parametrize(
    "value, text",
    [
        (gaussian(0), "0"),
        (gaussian(0, 1), "i"),
        (gaussian(0, -1), "-i"),
        (gaussian(0, Fraction(1, 2)), "1/2*i"),
        (gaussian(0, -2), "-2*i"),
        (gaussian(Fraction(1, 2), Fraction(-3, 4)), "1/2-3/4*i"),
        (gaussian(-3), "-3"),
    ],
)
def test_format_gaussian_canonical(value, text):
    assert format_gaussian(value) == text


@pytest.mark.parametrize(
    "text, expected",
    [
        ("i/2", gaussian(0, Fraction(1, 2))),
        ("0.5", gaussian(Fraction(1, 2))),
        ("-1/2*i", gaussian(0, Fraction(-1, 2))),
        ("1+2*i", gaussian(1, 2)),
        ("8/3", gaussian(Fraction(8, 3))),
        ("-i", gaussian(0, -1)),
    ],
)
def test_parse_gaussian_accepts_cli_forms(text, expected):
    assert parse_gaussian(text) == expected


@pytest.mark.parametrize("text", ["", "abc", "1**2", "2 3"])
def test_parse_gaussian_rejects_garbage(text):
    with pytest.raises(ValueError):
        parse_gaussian(text)


def test_formatted_gaussians_parse_back(rng):
    for _ in range(50):
        value = gaussian(
            Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
            Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
        )
        assert parse_gaussian(format_gaussian(value)) == value


def test_gaussian_helpers():
    assert is_integer(gaussian(4))
    assert not is_integer(gaussian(Fraction(1, 2)))
    assert not is_integer(gaussian(1, 1))
    assert to_complex(gaussian(Fraction(1, 4), -2)) == complex(0.25, -2.0)


def test_polynomial_arithmetic_is_exact():
    assert (x + y) ** 2 == x**2 + 2 * x * y + y**2
    assert (x**2 - y**2).exact_div(x - y) == x + y
    assert (3 - x) + x == MultiPoly.constant(3)


def test_exact_div_failures():
    with pytest.raises(NotDivisible):
        (x**2 + 1).exact_div(x)
    with pytest.raises(DivisionByZeroIdentically):
        x.exact_div(MultiPoly.zero())


def test_module_level_operations():
    assert poly_arith(x, y, "mul") == x * y
    assert poly_arith(x, y, "sub") == x - y
    with pytest.raises(ValueError):
        poly_arith(x, y, "pow")
    assert poly_exact_div(x**2 - y**2, x + y) == x - y


def test_resultant_eliminates_variable():
    r = resultant(x - y, x + y, "x")
    assert r in (2 * y, -2 * y)
    assert "x" not in r.variables
    assert resultant(x**2 + 1, x - MultiPoly.constant(gaussian(0, 1)), "x").is_zero


def test_negative_power_of_polynomial_is_rejected():
    with pytest.raises(ValueError):
        x ** (-1)


def test_polynomial_division_yields_rational_expression():
    quotient = x / y
    assert isinstance(quotient, RatExpr)
    assert not quotient.is_polynomial
    assert quotient * RatExpr(y) == RatExpr(x)


def test_rational_expressions_normalize():
    assert RatExpr(x * y, x) == RatExpr.variable("y")
    assert RatExpr(x * y, x).is_polynomial
    assert (1 / RatExpr(x)) * x == RatExpr(1)


def test_division_by_zero_expression():
    with pytest.raises(DivisionByZeroIdentically):
        RatExpr(x) / RatExpr(0)
    with pytest.raises(ZeroDivisionError):
        (1 / RatExpr(x)).evaluate({"x": 0})


def test_substitution_composes():
    expr = RatExpr(x**2 + y)
    result = expr.substitute({"x": RatExpr(1) / RatExpr(u), "y": RatExpr(u)})
    assert result == RatExpr(1 + u**3, u**2)


def test_derivative_quotient_rule():
    f = RatExpr(x, y)
    assert f.derivative("x") == RatExpr(1, y)
    assert f.derivative("y") == RatExpr(-x, y**2)


def test_time_derivative_uses_exponential_rates():
    e = RatExpr.variable("E")
    assert (e * x).derivative(TIME, {"E": gaussian(6)}) == 6 * e * x
    assert RatExpr(x).derivative(TIME, {"E": gaussian(6)}).is_zero


def test_pole_parts_split_laurent_expansion():
    f = RatExpr(x + 2 * u + 3 * u**2, u**2)
    poles, regular = f.pole_parts("u")
    assert sorted(poles) == [1, 2]
    assert poles[2] == RatExpr(x)
    assert poles[1] == RatExpr(2)
    assert regular == RatExpr(3)


def test_pole_parts_need_monomial_denominator():
    with pytest.raises(NotPolynomial):
        RatExpr(x, u + 1).pole_parts("u")


def test_evaluate_and_constant_value():
    p = x**2 + gaussian(0, 1) * y
    assert p.value_at({"x": 2, "y": gaussian(0, 1)}) == gaussian(3)
    with pytest.raises(NotPolynomial):
        p.constant_value()


def test_factor_list_splits_product():
    _, factors = ((x - 1) * (x + y)).factor_list()
    assert {f for f, _ in factors} == {x - 1, x + y}


def test_gaussian_reads_complex_text():
    assert gaussian("2+i") == gaussian(2, 1)
    assert gaussian("-i/2") == gaussian(0, Fraction(-1, 2))
    assert gaussian("8/3") == gaussian(Fraction(8, 3))


def _random_poly(rng, names=("x", "y"), terms=3) -> MultiPoly:
    data = {}
    for _ in range(terms):
        exps = tuple(rng.randint(0, 2) for _ in names)
        data[exps] = gaussian(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), rng.randint(-2, 2))
    return MultiPoly.from_terms(names, data)


@pytest.mark.slow
def test_ring_axioms_on_random_polynomials(rng):
    for _ in range(1000):
        a, b, c = (_random_poly(rng) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == MultiPoly.zero()
        if not b.is_zero:
            assert (a * b).exact_div(b) == a


def test_chain_rule_through_substitution(rng):
    for _ in range(20):
        f = _random_poly(rng, ("u", "w"))
        g = _random_poly(rng, ("x", "y"))
        h = _random_poly(rng, ("x", "y"))
        composed = RatExpr(f).substitute({"u": g, "w": h})
        bindings = {"u": g, "w": h}
        expected = RatExpr(f.diff("u")).substitute(bindings) * g.diff("x") + RatExpr(
            f.diff("w")
        ).substitute(bindings) * h.diff("x")
        assert composed.derivative("x") == expected
