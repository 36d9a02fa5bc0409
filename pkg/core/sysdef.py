"""
Formato de definición de sistemas (.sys)
========================================

✅ Lexer por línea con posiciones 1-based (línea, columna)
✅ Parser descendente recursivo para expresiones polinomiales sobre Q(i)
✅ Declaraciones: system, params, vars, d<var>/dt, exp, integral, chart, inverse
✅ roundtrip: texto canónico tal que parse(roundtrip(doc)) == doc

Gramática de expresiones:

    <EXPRESSION> -> <TERM> { ( '+' | '-' ) <TERM> }*
    <TERM>       -> <FACTOR> { ( '*' | '/' ) <FACTOR> }*
    <FACTOR>     -> [ '-' | '+' ] <FACTOR> | <ATOM>
    <ATOM>       -> <BASE> [ '^' <INTEGER> ]
    <BASE>       -> <NUMBER> | 'i' | <IDENT> | '(' <EXPRESSION> ')'
"""

import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import IMAG, ExpSymbol, RatExpr, format_gaussian, gaussian
from .errors import ArityMismatch, LexError, ParseError, UndeclaredSymbol
from .field import RationalMap, VField

logger = logging.getLogger(__name__)

IMAGINARY_UNIT = "i"
KEYWORDS = ("system", "params", "vars", "exp", "integral", "chart", "inverse")

_TOKEN_SPEC = [
    ("NUMBER", r"\d+(?:\.\d+)?"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("PLUS", r"\+"),
    ("MINUS", r"-"),
    ("TIMES", r"\*"),
    ("DIVIDE", r"/"),
    ("CARET", r"\^"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("COLON", r":"),
    ("EQUALS", r"="),
    ("SPACE", r"[ \t\r]+"),
]
_TOKEN_REGEX = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1) -> list[Token]:
    """
    Tokeniza una línea (sin el comentario '#').

    Raises:
        LexError: En el primer carácter no reconocido
    """
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN_REGEX.match(text, position)
        if match is None:
            raise LexError(f"unexpected character {text[position]!r}", line, position + 1)
        if match.lastgroup != "SPACE":
            tokens.append(Token(match.lastgroup or "", match.group(), line, position + 1))
        position = match.end()
    tokens.append(Token("END", "", line, len(text) + 1))
    return tokens


# ==========================================
# EXPRESSION PARSER
# ==========================================


class ExpressionParser:
    """Parser descendente recursivo sobre los tokens de una línea."""

    def __init__(
        self,
        tokens: Sequence[Token],
        symbols: Iterable[str],
        allow_rational: bool = False,
    ) -> None:
        self.tokens = list(tokens)
        self.index = 0
        self.symbols = set(symbols)
        self.allow_rational = allow_rational

    @property
    def token(self) -> Token:
        return self.tokens[self.index]

    def peek(self, kind: str) -> bool:
        return self.token.kind == kind

    def accept(self, kind: str) -> Token | None:
        if self.peek(kind):
            current = self.token
            self.index += 1
            return current
        return None

    def expect(self, kind: str) -> Token:
        current = self.accept(kind)
        if current is None:
            found = self.token.text or "end of line"
            raise ParseError(
                f"expected {kind.lower()}, found {found!r}", self.token.line, self.token.column
            )
        return current

    def parse(self) -> RatExpr:
        expr = self._expression()
        if not (self.peek("END") or self.peek("COMMA")):
            raise ParseError(
                f"unexpected {self.token.text!r}", self.token.line, self.token.column
            )
        return expr

    # <EXPRESSION> -> <TERM> { ( '+' | '-' ) <TERM> }*
    def _expression(self) -> RatExpr:
        expr = self._term()
        while True:
            if self.accept("PLUS"):
                expr = expr + self._term()
            elif self.accept("MINUS"):
                expr = expr - self._term()
            else:
                return expr

    # <TERM> -> <FACTOR> { ( '*' | '/' ) <FACTOR> }*
    def _term(self) -> RatExpr:
        expr = self._factor()
        while True:
            if self.accept("TIMES"):
                expr = expr * self._factor()
            elif self.peek("DIVIDE"):
                slash = self.expect("DIVIDE")
                divisor = self._factor()
                if divisor.is_zero:
                    raise ParseError("division by zero", slash.line, slash.column)
                if not self.allow_rational and not (
                    divisor.num.is_constant and divisor.den.is_constant
                ):
                    raise ParseError(
                        "division is only allowed by numeric literals", slash.line, slash.column
                    )
                expr = expr / divisor
            else:
                return expr

    # <FACTOR> -> [ '-' | '+' ] <FACTOR> | <ATOM>
    def _factor(self) -> RatExpr:
        if self.accept("MINUS"):
            return -self._factor()
        if self.accept("PLUS"):
            return self._factor()
        return self._atom()

    # <ATOM> -> <BASE> [ '^' <INTEGER> ]
    def _atom(self) -> RatExpr:
        base = self._base()
        if self.accept("CARET"):
            exponent = self.expect("NUMBER")
            if not exponent.text.isdigit():
                raise ParseError(
                    f"exponent must be a nonnegative integer, found {exponent.text!r}",
                    exponent.line,
                    exponent.column,
                )
            if self.peek("CARET"):
                raise ParseError("chained exponents are not allowed", self.token.line, self.token.column)
            return base ** int(exponent.text)
        return base

    # <BASE> -> <NUMBER> | 'i' | <IDENT> | '(' <EXPRESSION> ')'
    def _base(self) -> RatExpr:
        number = self.accept("NUMBER")
        if number is not None:
            return RatExpr(gaussian(number.text))
        ident = self.accept("IDENT")
        if ident is not None:
            if ident.text == IMAGINARY_UNIT:
                return RatExpr(IMAG)
            if ident.text not in self.symbols:
                raise UndeclaredSymbol(
                    f"undeclared symbol {ident.text!r}", ident.line, ident.column
                )
            return RatExpr.variable(ident.text)
        if self.accept("LPAREN"):
            expr = self._expression()
            self.expect("RPAREN")
            return expr
        found = self.token.text or "end of line"
        raise ParseError(f"unexpected {found!r}", self.token.line, self.token.column)


def parse_expression(
    text: str, symbols: Iterable[str], allow_rational: bool = False, line: int = 1
) -> RatExpr:
    """Lee una expresión aislada (usada también por el registro de atlas)."""
    return ExpressionParser(tokenize(text, line), symbols, allow_rational).parse()


# ==========================================
# DOCUMENT MODEL
# ==========================================


@dataclass(frozen=True)
class ChartDecl:
    """Carta declarada en un documento: componentes forward y (opcional) inversa."""

    name: str
    forward: tuple[tuple[str, RatExpr], ...]
    inverse: tuple[tuple[str, RatExpr], ...] = ()

    @property
    def new_vars(self) -> tuple[str, ...]:
        return tuple(var for var, _ in self.forward)

    def to_map(self, statevars: Sequence[str], check: bool = True) -> RationalMap:
        if not self.inverse:
            raise ValueError(f"chart {self.name} declares no inverse")
        inverse = dict(self.inverse)
        missing = [v for v in statevars if v not in inverse]
        if missing:
            raise ValueError(f"chart {self.name}: inverse misses {missing}")
        return RationalMap.build(
            statevars,
            self.new_vars,
            [expr for _, expr in self.forward],
            [inverse[v] for v in statevars],
            name=self.name,
            check=check,
        )


@dataclass(frozen=True)
class SystemDoc:
    """Documento .sys ya validado."""

    name: str
    params: tuple[str, ...]
    variables: tuple[str, ...]
    components: tuple[RatExpr, ...]
    expsyms: tuple[ExpSymbol, ...] = ()
    integrals: tuple[tuple[str, RatExpr], ...] = ()
    charts: tuple[ChartDecl, ...] = ()

    def to_vfield(self) -> VField:
        return VField(self.name, self.variables, self.components, self.params, self.expsyms)

    def integral(self, name: str) -> RatExpr:
        for key, expr in self.integrals:
            if key == name:
                return expr
        raise KeyError(f"{self.name} declares no integral {name!r}")

    def chart(self, name: str) -> ChartDecl:
        for chart in self.charts:
            if chart.name == name:
                return chart
        raise KeyError(f"{self.name} declares no chart {name!r}")


@dataclass
class _DocBuilder:
    name: str | None = None
    params: list[str] = field(default_factory=list)
    variables: list[str] = field(default_factory=list)
    components: dict[str, RatExpr] = field(default_factory=dict)
    expsyms: list[ExpSymbol] = field(default_factory=list)
    integrals: list[tuple[str, RatExpr]] = field(default_factory=list)
    charts: dict[str, ChartDecl] = field(default_factory=dict)

    def symbols(self) -> set[str]:
        return set(self.params) | set(self.variables) | {e.name for e in self.expsyms}

    def declared(self) -> set[str]:
        taken = self.symbols() | {n for n, _ in self.integrals}
        return taken


# ==========================================
# DOCUMENT PARSER
# ==========================================


class SystemParser:
    """Lee un documento .sys línea por línea."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.doc = _DocBuilder()

    def parse(self) -> SystemDoc:
        last_line = 1
        for number, raw in enumerate(self.text.splitlines(), start=1):
            last_line = number
            body = raw.split("#", 1)[0]
            if not body.strip():
                continue
            tokens = tokenize(body, number)
            self._statement(tokens)
        return self._finish(last_line)

    def _statement(self, tokens: list[Token]) -> None:
        head = tokens[0]
        if head.kind != "IDENT":
            raise ParseError(f"unexpected {head.text!r} at start of line", head.line, head.column)
        handler = {
            "system": self._system,
            "params": self._params,
            "vars": self._vars,
            "exp": self._exp,
            "integral": self._integral,
            "chart": self._chart,
            "inverse": self._inverse,
        }.get(head.text)
        if handler is not None:
            handler(tokens)
        elif head.text.startswith("d") and len(tokens) > 2 and tokens[1].kind == "DIVIDE":
            self._derivative(tokens)
        else:
            raise ParseError(f"unknown statement {head.text!r}", head.line, head.column)

    # ---------- declaraciones ----------

    def _system(self, tokens: list[Token]) -> None:
        if self.doc.name is not None:
            raise ParseError("duplicate system line", tokens[0].line, tokens[0].column)
        ident = self._single_ident(tokens)
        self.doc.name = ident.text

    def _params(self, tokens: list[Token]) -> None:
        for ident in self._ident_list(tokens):
            self.doc.params.append(ident.text)

    def _vars(self, tokens: list[Token]) -> None:
        if self.doc.variables:
            raise ParseError("duplicate vars line", tokens[0].line, tokens[0].column)
        for ident in self._ident_list(tokens):
            self.doc.variables.append(ident.text)

    def _exp(self, tokens: list[Token]) -> None:
        # exp <id> rate <constant expression>
        if len(tokens) < 4 or tokens[1].kind != "IDENT" or tokens[2].text != "rate":
            bad = tokens[min(2, len(tokens) - 1)]
            raise ParseError("expected 'exp <name> rate <number>'", bad.line, bad.column)
        name = tokens[1]
        self._check_new(name)
        parser = ExpressionParser(tokens[3:], ())
        rate = parser.parse()
        if not parser.peek("END"):
            raise ParseError("unexpected ','", parser.token.line, parser.token.column)
        self.doc.expsyms.append(ExpSymbol(name.text, rate.constant_value()))

    def _integral(self, tokens: list[Token]) -> None:
        if len(tokens) < 4 or tokens[1].kind != "IDENT" or tokens[2].kind != "EQUALS":
            bad = tokens[min(2, len(tokens) - 1)]
            raise ParseError("expected 'integral <name> = <expr>'", bad.line, bad.column)
        name = tokens[1]
        if name.text in self.doc.declared() or name.text == IMAGINARY_UNIT:
            raise ParseError(f"symbol {name.text!r} already declared", name.line, name.column)
        expr = self._full_expression(tokens[3:], self.doc.symbols())
        self.doc.integrals.append((name.text, expr))

    def _derivative(self, tokens: list[Token]) -> None:
        # d<var> / dt = <expr>
        head = tokens[0]
        var = head.text[1:]
        if len(tokens) < 5 or tokens[2].text != "dt" or tokens[3].kind != "EQUALS":
            raise ParseError("expected 'd<var>/dt = <expr>'", head.line, head.column)
        if var not in self.doc.variables:
            raise UndeclaredSymbol(f"undeclared variable {var!r}", head.line, head.column + 1)
        if var in self.doc.components:
            raise ParseError(f"duplicate equation for {var!r}", head.line, head.column)
        self.doc.components[var] = self._full_expression(tokens[4:], self.doc.symbols())

    def _chart(self, tokens: list[Token]) -> None:
        name, pairs = self._assignments(tokens, self.doc.symbols(), new_targets=True)
        if name.text in self.doc.charts:
            raise ParseError(f"duplicate chart {name.text!r}", name.line, name.column)
        self.doc.charts[name.text] = ChartDecl(name.text, tuple(pairs))

    def _inverse(self, tokens: list[Token]) -> None:
        if len(tokens) < 2 or tokens[1].text not in self.doc.charts:
            where = tokens[min(1, len(tokens) - 1)]
            raise UndeclaredSymbol(f"inverse of unknown chart {where.text!r}", where.line, where.column)
        chart = self.doc.charts[tokens[1].text]
        symbols = (self.doc.symbols() - set(self.doc.variables)) | set(chart.new_vars)
        _, pairs = self._assignments(tokens, symbols, new_targets=False)
        for target, _ in pairs:
            if target not in self.doc.variables:
                raise UndeclaredSymbol(
                    f"inverse assigns unknown variable {target!r}", tokens[0].line, tokens[0].column
                )
        self.doc.charts[chart.name] = ChartDecl(chart.name, chart.forward, tuple(pairs))

    # ---------- utilidades ----------

    def _assignments(
        self, tokens: list[Token], symbols: set[str], new_targets: bool
    ) -> tuple[Token, list[tuple[str, RatExpr]]]:
        # <kw> <id> ':' <id> '=' <expr> { ',' <id> '=' <expr> }*
        parser = ExpressionParser(tokens, symbols, allow_rational=True)
        parser.expect("IDENT")
        name = parser.expect("IDENT")
        parser.expect("COLON")
        pairs: list[tuple[str, RatExpr]] = []
        while True:
            target = parser.expect("IDENT")
            if new_targets and (target.text in self.doc.declared() or target.text == IMAGINARY_UNIT):
                raise ParseError(
                    f"chart coordinate {target.text!r} clashes with a declared symbol",
                    target.line,
                    target.column,
                )
            if target.text in (t for t, _ in pairs):
                raise ParseError(f"duplicate target {target.text!r}", target.line, target.column)
            parser.expect("EQUALS")
            pairs.append((target.text, parser.parse()))
            if not parser.accept("COMMA"):
                break
        parser.expect("END")
        return name, pairs

    def _full_expression(self, tokens: list[Token], symbols: set[str]) -> RatExpr:
        parser = ExpressionParser(tokens, symbols)
        expr = parser.parse()
        if not parser.peek("END"):
            raise ParseError("unexpected ','", parser.token.line, parser.token.column)
        return expr

    def _check_new(self, ident: Token) -> None:
        if ident.text in KEYWORDS or ident.text == IMAGINARY_UNIT:
            raise ParseError(f"reserved name {ident.text!r}", ident.line, ident.column)
        if ident.text in self.doc.declared():
            raise ParseError(f"symbol {ident.text!r} already declared", ident.line, ident.column)

    def _single_ident(self, tokens: list[Token]) -> Token:
        if len(tokens) != 3 or tokens[1].kind != "IDENT":
            bad = tokens[min(1, len(tokens) - 1)]
            raise ParseError(f"expected a single name after {tokens[0].text!r}", bad.line, bad.column)
        return tokens[1]

    def _ident_list(self, tokens: list[Token]) -> list[Token]:
        idents = []
        for token in tokens[1:-1]:
            if token.kind != "IDENT":
                raise ParseError(f"expected a name, found {token.text!r}", token.line, token.column)
            self._check_new(token)
            if token.text in (t.text for t in idents):
                raise ParseError(f"duplicate name {token.text!r}", token.line, token.column)
            idents.append(token)
        return idents

    def _finish(self, last_line: int) -> SystemDoc:
        doc = self.doc
        if doc.name is None:
            raise ParseError("missing 'system <name>' line", 1, 1)
        if not doc.variables:
            raise ParseError("missing 'vars' line", last_line, 1)
        missing = [v for v in doc.variables if v not in doc.components]
        if missing:
            raise ArityMismatch(
                f"{len(doc.variables)} variables but {len(doc.components)} equations "
                f"(missing d{missing[0]}/dt)",
                last_line,
                1,
            )
        logger.debug("📄 Parsed system %s (%d vars)", doc.name, len(doc.variables))
        return SystemDoc(
            doc.name,
            tuple(doc.params),
            tuple(doc.variables),
            tuple(doc.components[v] for v in doc.variables),
            tuple(doc.expsyms),
            tuple(doc.integrals),
            tuple(doc.charts.values()),
        )


def parse(text: str) -> SystemDoc:
    """
    Lee un documento .sys.

    Raises:
        LexError / ParseError / UndeclaredSymbol / ArityMismatch con línea y columna
    """
    return SystemParser(text).parse()


def load_system(path: str | Path) -> SystemDoc:
    source = Path(path)
    logger.info("📂 Loading system from %s", source)
    return parse(source.read_text(encoding="utf-8"))


# ==========================================
# CANONICAL PRINTER
# ==========================================


def _format_assignments(pairs: Iterable[tuple[str, RatExpr]]) -> str:
    return ", ".join(f"{name} = {expr.format()}" for name, expr in pairs)


def roundtrip(doc: SystemDoc) -> str:
    """Texto canónico del documento (punto fijo de parse∘roundtrip)."""
    lines = [f"system {doc.name}"]
    if doc.params:
        lines.append("params " + " ".join(doc.params))
    lines.append("vars " + " ".join(doc.variables))
    for symbol in doc.expsyms:
        lines.append(f"exp {symbol.name} rate {format_gaussian(symbol.rate)}")
    for var, component in zip(doc.variables, doc.components):
        lines.append(f"d{var}/dt = {component.format()}")
    for name, expr in doc.integrals:
        lines.append(f"integral {name} = {expr.format()}")
    for chart in doc.charts:
        lines.append(f"chart {chart.name}: {_format_assignments(chart.forward)}")
        if chart.inverse:
            lines.append(f"inverse {chart.name}: {_format_assignments(chart.inverse)}")
    return "\n".join(lines) + "\n"


def system_from_vfield(
    v: VField, integrals: Mapping[str, RatExpr] | None = None
) -> SystemDoc:
    return SystemDoc(
        v.name,
        v.params,
        v.statevars,
        v.components,
        v.expsyms,
        tuple((integrals or {}).items()),
    )
