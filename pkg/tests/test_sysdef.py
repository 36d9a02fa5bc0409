"""Lector y escritor del formato .sys."""

import random

import pytest

from analysis.suite import random_document
from core.algebra import ExpSymbol, MultiPoly, RatExpr, gaussian
from core.errors import ArityMismatch, LexError, ParseError, UndeclaredSymbol
from core.sysdef import parse, parse_expression, roundtrip, system_from_vfield, tokenize

LORENZ_TEXT = """\
# comentario inicial
system lorenz
params sigma epsilon b
vars x y z
dx/dt = y - sigma*epsilon*x
dy/dt = -x*z + x - epsilon*y
dz/dt = x*y - epsilon*b*z   # cola
"""


def test_parse_bundled_lorenz(lorenz_doc):
    assert lorenz_doc.name == "lorenz"
    assert lorenz_doc.params == ("sigma", "epsilon", "b")
    assert lorenz_doc.variables == ("x", "y", "z")
    assert parse(LORENZ_TEXT) == lorenz_doc


def test_exponential_symbol_and_integral(system41_doc):
    assert system41_doc.expsyms == (ExpSymbol("E", gaussian(6)),)
    e, x, z = (MultiPoly.variable(n) for n in ("E", "x", "z"))
    assert system41_doc.integral("I") == RatExpr(e * (x**2 - 2 * z))
    with pytest.raises(KeyError):
        system41_doc.integral("J")


def test_numbers_and_imaginary_unit():
    expr = parse_expression("(1/2 + i)*x^2 - 0.25", ["x"])
    x = MultiPoly.variable("x")
    assert expr == RatExpr(gaussian(0.5, 1) * x**2 - gaussian("1/4"))


def test_lex_error_position():
    with pytest.raises(LexError) as info:
        parse("system s\nvars x\ndx/dt = x $ 2\n")
    assert (info.value.line, info.value.column) == (3, 11)


def test_tokenize_marks_end_of_line():
    tokens = tokenize("dx/dt = 2*x")
    assert [t.kind for t in tokens][-1] == "END"
    assert tokens[0].text == "dx"


@pytest.mark.parametrize(
    "text, error",
    [
        ("", ParseError),
        ("vars x\ndx/dt = x\n", ParseError),
        ("system s\ndx/dt = 1\n", UndeclaredSymbol),
        ("system s\nvars x y\ndx/dt = y\n", ArityMismatch),
        ("system s\nvars x\ndx/dt = k*x\n", UndeclaredSymbol),
        ("system s\nvars x\ndx/dt = x^-1\n", ParseError),
        ("system s\nvars x\ndx/dt = x^2^2\n", ParseError),
        ("system s\nvars x x\ndx/dt = x\n", ParseError),
        ("system s\nvars i\ndi/dt = 1\n", ParseError),
        ("system s\nvars x\ndx/dt = x\ndx/dt = 1\n", ParseError),
        ("system s\nvars x\nfoo x\ndx/dt = x\n", ParseError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse(text)


def test_missing_system_line_points_at_start():
    with pytest.raises(ParseError) as info:
        parse("")
    assert (info.value.line, info.value.column) == (1, 1)


def test_chart_with_inverse():
    doc = parse(
        "system s\nvars x y\ndx/dt = y\ndy/dt = x\n"
        "chart A: a = 1/x, c = y/x\n"
        "inverse A: x = 1/a, y = c/a\n"
    )
    chart = doc.chart("A")
    assert chart.new_vars == ("a", "c")
    mapping = chart.to_map(doc.variables)
    assert mapping.apply_point((2, 4)) == (gaussian("1/2"), gaussian(2))
    assert parse(roundtrip(doc)) == doc


def test_inverse_of_unknown_chart():
    with pytest.raises(UndeclaredSymbol):
        parse("system s\nvars x\ndx/dt = x\ninverse B: x = 1/b\n")


def test_roundtrip_is_a_fixpoint(lorenz_doc, system41_doc):
    for doc in (lorenz_doc, system41_doc):
        text = roundtrip(doc)
        assert parse(text) == doc
        assert roundtrip(parse(text)) == text


def test_random_documents_roundtrip():
    rng = random.Random(11)
    for number in range(40):
        doc = random_document(rng, number)
        text = roundtrip(doc)
        assert parse(text) == doc, text
        assert roundtrip(parse(text)) == text


def test_system_from_vfield_keeps_integrals(system31_doc):
    doc = system_from_vfield(system31_doc.to_vfield(), {"I": system31_doc.integral("I")})
    assert doc == system31_doc
