"""Resolución en P4: condiciones de polinomialidad y familias de parámetros."""

import itertools
import random

import pytest

from analysis.resolve import (
    CONDITIONS,
    FINAL_VARS,
    ParameterTriple,
    apply_resolution,
    check_resolvable,
    direct_resolvability,
    lorenz_field,
    parse_assignments,
    resolution_sequence_p4,
    resolution_sequence_p5,
    solve_conditions,
)
from analysis.suite import EXPECTED_FAMILIES, check_conditions, check_families
from core.algebra import gaussian


def test_parameter_triple_parsing():
    t = ParameterTriple.parse("sigma=1/3, epsilon=i, b=0")
    assert t.format() == "(1/3, i, 0)"
    assert t.as_dict()["epsilon"] == gaussian(0, 1)
    with pytest.raises(ValueError):
        ParameterTriple.parse("sigma=1,b=2")


@pytest.mark.parametrize("text", ["sigma", "=2", "sigma=two"])
def test_parse_assignments_errors(text):
    with pytest.raises(ValueError):
        parse_assignments(text)


@pytest.mark.parametrize(
    "triple",
    [(2, 0, 1), (1, 3, 2), (1, -3, 2), ("1/3", 5, 0), ("1/3", "2+i", 0)],
)
def test_listed_families_are_resolvable(triple):
    assert check_resolvable(ParameterTriple.of(*triple))


@pytest.mark.parametrize("triple", [(10, 1, "8/3"), (1, 1, 2), (2, 1, 1), (1, 3, 3)])
def test_generic_parameters_are_not_resolvable(triple):
    assert not check_resolvable(ParameterTriple.of(*triple))


def test_conditions_are_four_polynomials():
    assert len(CONDITIONS) == 4
    assert all(set(c.variables) <= {"sigma", "epsilon", "b"} for c in CONDITIONS)


def test_sequences_have_six_invertible_steps():
    p4 = resolution_sequence_p4()
    p5 = resolution_sequence_p5()
    assert [s.label for s in p4] == [f"Step {k}" for k in range(6)]
    assert p4[-1].map.new_vars == FINAL_VARS
    assert p5[0].map.forward == tuple(f.conjugate() for f in p4[0].map.forward)


def test_families_are_solved_exactly():
    families = solve_conditions()
    assert [f.format() for f in families] == EXPECTED_FAMILIES
    free = [f for f in families if f.free]
    assert [f.free for f in free] == [("epsilon",)]
    assert free[0].contains(ParameterTriple.of("1/3", 7, 0))
    assert free[0].specialize({"epsilon": 4}) == ParameterTriple.of("1/3", 4, 0)


@pytest.mark.slow
def test_symbolic_resolution_matches_conditions():
    passed, detail = check_conditions(random.Random(0))
    assert passed, detail


@pytest.mark.slow
def test_resolution_is_polynomial_on_a_family():
    result = apply_resolution(lorenz_field(), params={"sigma": 1, "epsilon": 3, "b": 2})
    assert result.field.statevars == FINAL_VARS
    assert result.is_polynomial
    assert not direct_resolvability(ParameterTriple.of(1, 1, 2))


@pytest.mark.slow
def test_family_sampling_acceptance():
    passed, detail = check_families(random.Random(5))
    assert passed, detail


def test_parameter_triple_accepts_complex_text():
    t = ParameterTriple.of("1/3", "2+i", 0)
    assert t.epsilon == gaussian(2, 1)
    assert t.format() == "(1/3, 2+i, 0)"


@pytest.mark.slow
@pytest.mark.parametrize("sigma", ["1/3", 1, 2, 3, -1])
def test_condition_check_agrees_with_running_the_resolution(sigma):
    # fuera de epsilon = 0, donde los coeficientes de polo llevan potencias extra de epsilon
    for epsilon, b in itertools.product([1, 3, -3, 2, "i"], [0, 1, 2, "8/3", 3]):
        t = ParameterTriple.of(sigma, epsilon, b)
        assert check_resolvable(t) == direct_resolvability(t), t.format()
