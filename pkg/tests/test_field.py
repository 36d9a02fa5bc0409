"""Campos vectoriales, derivadas de Lie y cambios de coordenadas."""

from fractions import Fraction

import pytest

from core.algebra import MultiPoly, RatExpr, gaussian
from core.charts import standard_atlas
from core.errors import NotInvertible, NotPolynomial
from core.field import (
    RationalMap,
    VField,
    divergence,
    jacobian_det,
    lie_derivative,
    pole_order,
    pushforward,
)

x = MultiPoly.variable("x")
y = MultiPoly.variable("y")
z = MultiPoly.variable("z")


def test_lorenz_specializes_to_system31(lorenz_doc, system31_doc):
    specialized = lorenz_doc.to_vfield().with_params({"sigma": 2, "epsilon": 0, "b": 1})
    assert specialized.params == ()
    assert specialized == system31_doc.to_vfield()


def test_with_params_ignores_unknown_names(lorenz_doc):
    v = lorenz_doc.to_vfield()
    assert v.with_params({"alpha": 1}) is v


def test_undeclared_symbol_in_component():
    with pytest.raises(ValueError):
        VField.from_polys("bad", ("x",), [x * MultiPoly.variable("k")])


def test_lie_derivative_of_polynomial_integral(system31_doc):
    v = system31_doc.to_vfield()
    assert lie_derivative(v, system31_doc.integral("I")).is_zero
    assert lie_derivative(v, x**2 + z) == RatExpr(3 * x * y)


def test_lie_derivative_includes_time_term(system41_doc):
    v = system41_doc.to_vfield()
    integral = system41_doc.integral("I")
    assert lie_derivative(v, integral).is_zero
    # sin el factor E la misma expresión ya no se conserva
    assert not lie_derivative(v, x**2 - 2 * z).is_zero


def test_divergence_of_lorenz(lorenz_doc):
    v = lorenz_doc.to_vfield()
    sigma, epsilon, b = (MultiPoly.variable(n) for n in ("sigma", "epsilon", "b"))
    assert divergence(v) == RatExpr(-sigma * epsilon - epsilon - epsilon * b)


def test_rational_map_checks_its_inverse():
    a, bb = MultiPoly.variable("a"), MultiPoly.variable("bb")
    shear = RationalMap.build(("x", "y"), ("a", "bb"), [x + y, y], [a - bb, bb], name="shear")
    assert jacobian_det(shear) == RatExpr(1)
    assert shear.apply_point((1, 2)) == (gaussian(3), gaussian(2))
    assert shear.inverted().apply_point((3, 2)) == (gaussian(1), gaussian(2))
    with pytest.raises(NotInvertible):
        RationalMap.build(("x", "y"), ("a", "bb"), [x + y, y], [a + bb, bb], name="broken")


def test_pushforward_by_linear_map():
    v = VField.from_polys("rot", ("x", "y"), [-y, x])
    p, q = MultiPoly.variable("p"), MultiPoly.variable("q")
    swap = RationalMap.build(("x", "y"), ("p", "q"), [y, x], [q, p])
    pushed = pushforward(v, swap)
    assert pushed.statevars == ("p", "q")
    assert pushed.component("p") == RatExpr(q)
    assert pushed.component("q") == RatExpr(-p)


def test_pushforward_rejects_foreign_map(system31_doc):
    m = RationalMap.identity(("a", "b", "c"))
    with pytest.raises(ValueError):
        pushforward(system31_doc.to_vfield(), m)


def test_pole_order_along_boundary():
    s = MultiPoly.variable("s")
    w = MultiPoly.variable("w")
    v = VField.from_polys("poles", ("s", "w"), [RatExpr(1, s**2), RatExpr(w, s)])
    assert pole_order(v, s) == 2
    with pytest.raises(NotPolynomial):
        pole_order(v, w)


def _random_field(rng, names=("x", "y", "z")) -> VField:
    components = []
    for _ in names:
        data = {}
        for _ in range(3):
            exps = tuple(rng.randint(0, 1) for _ in names)
            data[exps] = gaussian(Fraction(rng.randint(-4, 4), rng.randint(1, 3)), rng.randint(-1, 1))
        components.append(MultiPoly.from_terms(names, data))
    return VField.from_polys("random", names, components)


def test_pushforward_and_back_is_identity(rng):
    chart_map = standard_atlas().chart("U1").map
    for _ in range(5):
        v = _random_field(rng)
        there = pushforward(v, chart_map)
        assert pushforward(there, chart_map.inverted()) == v


def test_lie_derivative_is_a_derivation(rng):
    for _ in range(10):
        v = _random_field(rng)
        f = RatExpr(x * y + gaussian(Fraction(rng.randint(1, 5), 2)) * z)
        g = RatExpr(z**2 - rng.randint(1, 4) * x, y + 1)
        assert lie_derivative(v, f * g) == lie_derivative(v, f) * g + f * lie_derivative(v, g)
