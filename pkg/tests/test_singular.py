"""Singularidades accesibles, índice local y censo."""

import random

import numpy as np
import pytest

from analysis.resolve import ParameterTriple, lorenz_field
from analysis.singular import (
    AccessibleSingularity,
    Classification,
    LocalIndexResult,
    classify,
    find_accessible_singularities,
    local_index,
    resonances,
    singularity_census,
    univariate_roots,
    vanishing_order,
)
from analysis.suite import check_census, check_local_indices, lorenz_census
from core.algebra import MultiPoly, gaussian, to_complex
from core.charts import standard_atlas, to_chart, weighted_chart
from core.errors import NotApplicable
from core.field import VField

lam = MultiPoly.variable("lam")


def _index(*eigenvalues) -> LocalIndexResult:
    values = tuple(gaussian(v) for v in eigenvalues)
    return LocalIndexResult(values, True, (), (), MultiPoly.one())


def test_exact_roots_over_gaussian_rationals():
    exact, numeric = univariate_roots(lam**2 + 1, "lam")
    assert sorted(exact, key=lambda r: r.y) == [gaussian(0, -1), gaussian(0, 1)]
    assert numeric == []


def test_irreducible_factor_goes_numeric():
    exact, numeric = univariate_roots((lam - 2) * (lam**3 - 2), "lam")
    assert exact == [gaussian(2)]
    assert len(numeric) == 3
    assert np.allclose([abs(r) ** 3 for r in numeric], 2.0)


def test_vanishing_order_at_origin():
    y, z = MultiPoly.variable("y"), MultiPoly.variable("z")
    origin = {"y": gaussian(0), "z": gaussian(0)}
    assert vanishing_order([y + z**2, y * z], origin) == 1
    assert vanishing_order([y**2, z**3], origin) == 2


def test_lorenz_vertex_in_first_chart(lorenz_doc):
    chart = standard_atlas().chart("U1")
    cs = to_chart(lorenz_doc.to_vfield(), chart)
    points = find_accessible_singularities(cs)
    assert any(p.exact and not any(p.point) for p in points)

    vertex = AccessibleSingularity(chart.name, chart.variables, (gaussian(0),) * 3)
    result = local_index(cs, vertex)
    assert result.format() == "(0, i, -i)"
    assert result.exact
    assert classify(result) is Classification.VERTICAL_ONLY
    assert isinstance(resonances(result), NotApplicable)


def test_local_index_needs_exact_point(lorenz_doc):
    chart = standard_atlas().chart("U1")
    cs = to_chart(lorenz_doc.to_vfield(), chart)
    with pytest.raises(ValueError):
        local_index(cs, AccessibleSingularity(chart.name, chart.variables, (0j, 0j, 0j), False))


@pytest.mark.parametrize(
    "eigenvalues, expected",
    [
        ((2, 8, 4), Classification.BLOWUP_RESOLVABLE),
        ((2, 0, 4), Classification.BLOWUP_RESOLVABLE),
        ((1, -2, 3), Classification.MIXED_SIGN),
        ((2, 1, 4), Classification.VERTICAL_ONLY),
        ((0, 1, -1), Classification.VERTICAL_ONLY),
    ],
)
def test_classification_by_ratio_signs(eigenvalues, expected):
    assert classify(_index(*eigenvalues)) is expected


def test_resonances_are_integer_ratios():
    assert resonances(_index(2, 8, 4)) == [4, 2]
    assert _index(gaussian(0, -1), gaussian(0, -4)).ratios == (gaussian(1), gaussian(4))


def test_lorenz_census_has_five_points():
    census = lorenz_census()
    assert census.labels == ["P1", "P2", "P3", "P4", "P5"]
    for entry in census.entries:
        assert entry.chosen in entry.occurrences
        assert entry.index is not None


def test_lorenz_census_acceptance():
    passed, detail = check_census(random.Random(0))
    assert passed, detail
    passed, detail = check_local_indices(random.Random(0))
    assert passed, detail


def test_field_without_pole_has_no_accessible_points():
    v = VField.from_polys("drift", ("x", "y", "z"), [1, 0, 0])
    cs = to_chart(v, standard_atlas().chart("U1"))
    assert find_accessible_singularities(cs) == []


def test_weighted_origin_joins_first_vertex():
    census = lorenz_census()
    weighted = weighted_chart((1, 2, 2)).name
    first = census.entries[0]
    assert first.projective == (gaussian(0), gaussian(1), gaussian(0), gaussian(0))
    assert any(p.chart == weighted and not any(p.point) for p in first.occurrences)
    assert first.chosen.chart == "U1"
    assert not [p for p in census.unplaced if p.chart == weighted]


@pytest.mark.slow
def test_census_does_not_depend_on_eliminated_variable():
    base = lorenz_field().statevars
    charts = standard_atlas(base).charts + (weighted_chart((1, 2, 2), base),)
    default = lorenz_census()
    swapped = singularity_census(lorenz_field(), charts, eliminate_first=True)
    assert [e.projective for e in swapped.entries] == [e.projective for e in default.entries]
    assert [e.index.format() for e in swapped.entries] == [
        e.index.format() for e in default.entries
    ]


@pytest.mark.slow
def test_census_at_numeric_parameters_keeps_five_points():
    base = lorenz_field().statevars
    charts = standard_atlas(base).charts + (weighted_chart((1, 2, 2), base),)
    v = lorenz_field().with_params(ParameterTriple.of(1, 3, 2).as_dict())
    census = singularity_census(v, charts)
    assert census.labels == ["P1", "P2", "P3", "P4", "P5"]
    assert [e.projective for e in census.entries] == [
        e.projective for e in lorenz_census().entries
    ]


def test_non_boundary_eigenvalues_ordered_by_modulus():
    indices = [e.index for e in lorenz_census().entries]
    expected = (gaussian(0, "-1/2"), gaussian(0, -2), gaussian(0, -1))
    assert expected in [index.eigenvalues for index in indices]
    for index in indices:
        rest = [abs(v if isinstance(v, complex) else to_complex(v)) for v in index.eigenvalues[1:]]
        assert rest == sorted(rest, reverse=True)
