"""Atlas estándar, cartas pesadas y compatibilidad de transiciones."""

from fractions import Fraction

import pytest

from core.algebra import MultiPoly, RatExpr, gaussian
from core.charts import (
    check_overlaps,
    projective_point,
    reduce_weights,
    standard_atlas,
    to_chart,
    transition,
    weighted_chart,
)
from core.errors import IncompatibleWeights
from core.field import VField


def test_standard_atlas_layout():
    atlas = standard_atlas()
    assert atlas.names == ["U0", "U1", "U2", "U3"]
    assert atlas.chart("U1").variables == ("X1", "Y1", "Z1")
    assert atlas.chart("U0").boundary == MultiPoly.one()
    assert atlas.chart("U3").boundary == MultiPoly.variable("Z3")
    with pytest.raises(KeyError):
        atlas.chart("U7")


def test_standard_atlas_dimension_limits():
    assert len(standard_atlas(("x", "y"))) == 3
    with pytest.raises(ValueError):
        standard_atlas(("x",))


def test_transition_between_standard_charts():
    atlas = standard_atlas()
    mapping = transition(atlas.chart("U1"), atlas.chart("U2"))
    third = Fraction(1, 3)
    assert mapping.apply_point((2, 3, 5)) == (
        gaussian(third), gaussian(2 * third), gaussian(5 * third)
    )


def test_standard_overlaps_agree():
    assert check_overlaps(standard_atlas(), samples=4, seed=7) == []


def test_projective_point_of_boundary_vertex():
    atlas = standard_atlas()
    assert projective_point(atlas.chart("U1"), (0, 0, 0)) == tuple(
        gaussian(v) for v in (0, 1, 0, 0)
    )


def test_weighted_chart_homogeneous_coordinates():
    chart = weighted_chart((1, 2, 2))
    assert chart.name == "W(1,2,2)"
    assert chart.variables == ("X", "Y", "Z")
    point = (0, gaussian(0, Fraction(1, 2)), gaussian(Fraction(1, 2)))
    assert projective_point(chart, point) == (
        gaussian(0), gaussian(0), gaussian(1), gaussian(0, -1)
    )


def test_weighted_chart_requires_divisible_weights():
    with pytest.raises(IncompatibleWeights):
        weighted_chart((2, 3, 4))
    with pytest.raises(IncompatibleWeights):
        weighted_chart((1, 2))
    assert reduce_weights((2, 4, 4)) == (1, 2, 2)


def test_lorenz_in_first_chart_has_simple_pole(lorenz_doc):
    cs = to_chart(lorenz_doc.to_vfield(), standard_atlas().chart("U1"))
    assert cs.boundary_var == "X1"
    assert cs.pole_order == 1
    assert cs.ordered_vars()[0] == "X1"
    assert all(n.is_polynomial_in(cs.field.statevars) for n in cs.numerators().values())


def test_lorenz_in_weighted_chart(lorenz_doc):
    cs = to_chart(lorenz_doc.to_vfield(), weighted_chart((1, 2, 2)))
    assert cs.boundary_var == "X"
    assert cs.pole_order == 1


def test_weighted_origin_maps_to_first_vertex():
    chart = weighted_chart((1, 2, 2))
    assert projective_point(chart, (0, 0, 0)) == tuple(gaussian(v) for v in (0, 1, 0, 0))


def _random_cubic(rng) -> VField:
    names = ("x", "y", "z")
    components = []
    for _ in names:
        data = {}
        for _ in range(4):
            exps = (rng.randint(0, 3), rng.randint(0, 2), rng.randint(0, 1))
            if sum(exps) <= 3:
                data[exps] = gaussian(Fraction(rng.randint(-6, 6), rng.randint(1, 3)))
        components.append(MultiPoly.from_terms(names, data))
    return VField.from_polys("cubic", names, components)


def test_unit_weights_reproduce_first_standard_chart(rng):
    weighted = weighted_chart((1, 1, 1))
    standard = standard_atlas().chart("U1")
    rename = {w: RatExpr.variable(s) for w, s in zip(weighted.variables, standard.variables)}
    assert [f.substitute(rename) for f in weighted.map.inverse] == list(standard.map.inverse)
    for _ in range(5):
        v = _random_cubic(rng)
        a, b = to_chart(v, weighted), to_chart(v, standard)
        assert a.pole_order == b.pole_order
        assert [c.substitute(rename) for c in a.field.components] == list(b.field.components)
