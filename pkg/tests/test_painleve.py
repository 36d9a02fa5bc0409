"""Balances dominantes del test de Painlevé."""

import random

import pytest

from analysis.painleve import (
    balance_residuals_vanish,
    balance_to_chart,
    dominant_balances,
    leading_residuals,
)
from analysis.suite import check_painleve
from core.algebra import MultiPoly, RatExpr, gaussian
from core.field import VField

x = MultiPoly.variable("x")
y = MultiPoly.variable("y")


def test_riccati_balance():
    report = dominant_balances(VField.from_polys("riccati", ("x",), [x**2]))
    assert [(b.exponents, b.coefficients) for b in report.balances] == [((1,), (gaussian(-1),))]
    assert report.conjugate_pairs is True
    assert balance_residuals_vanish(report)


def test_lorenz_balances(lorenz_doc):
    report = dominant_balances(lorenz_doc.to_vfield())
    assert [b.branch for b in report.balances] == [0, 1]
    first, second = report.balances
    assert first.exponents == second.exponents == (1, 2, 2)
    assert first.coefficients == (gaussian(0, 2), gaussian(0, -2), gaussian(-2))
    assert second.coefficients == (gaussian(0, -2), gaussian(0, 2), gaussian(-2))
    assert report.conjugate_pairs is True
    assert balance_residuals_vanish(report)
    assert balance_to_chart(first).name == "W(1,2,2)"


def test_residuals_reject_time_reversed_branch(lorenz_doc):
    v = lorenz_doc.to_vfield()
    # rama de -v: x ~ 2i/τ pero y ~ 2i/τ², z ~ 2/τ²
    reversed_branch = (gaussian(0, 2), gaussian(0, 2), gaussian(2))
    assert not all(r.is_zero for r in leading_residuals(v, (1, 2, 2), reversed_branch))
    riccati = VField.from_polys("riccati", ("x",), [x**2])
    (residual,) = leading_residuals(riccati, (1,), (gaussian(1),))
    assert residual == -2 * MultiPoly.variable("s_tau") ** 2


def test_parametric_balance_is_solved_over_parameters():
    a = MultiPoly.variable("a")
    v = VField.from_polys("pole", ("x", "y"), [a * y, x * y], params=("a",))
    report = dominant_balances(v)
    (balance,) = report.balances
    assert balance.exponents == (1, 2)
    assert balance.coefficients == (gaussian(-2), RatExpr(2, a))
    assert balance.is_parametric
    assert balance.format() == "x ~ -2·τ^-1, y ~ (2)/(a)·τ^-2"
    assert balance_residuals_vanish(report)
    assert report.conjugate_pairs is True
    assert any("depend on parameters" in note for note in report.notes)


def test_field_without_balances_has_no_conjugate_claim():
    report = dominant_balances(VField.from_polys("linear", ("x",), [x]))
    assert report.balances == []
    assert report.conjugate_pairs is None


def test_lorenz_balance_acceptance():
    passed, detail = check_painleve(random.Random(0))
    assert passed, detail


def test_rational_field_is_rejected():
    v = VField.from_polys("rational", ("x",), [RatExpr(1, x)])
    with pytest.raises(ValueError):
        dominant_balances(v)
