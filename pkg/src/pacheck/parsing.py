"""Concrete syntax: a recursive-descent parser for terms, formulas, and model files.

Model files are UTF-8 text with ``#`` line comments.  A file is a sequence of
definitions ``Name = term ;`` and directives: ``root Name ;`` picks the root
definition (default: the first one) and ``property Name expected true|false :
formula ;`` declares a named HML property.  ``root`` and ``property`` are
reserved at statement position only.

Operator precedence in terms, tightest to loosest: hiding ``\\ {..}`` (postfix
on atoms), prefix ``.`` (right-associative), parallel ``||[..]``
(left-associative), choice ``+`` (right-associative).  In formulas: ``not``
and the modalities bind tightest, then ``and``, then ``or``.

Only the first error is reported, as a ``SourceDiagnostic`` with 1-based line
and column.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NoReturn

from . import hml
from .terms import (
    TAU,
    TAU_NAME,
    Action,
    Choice,
    Const,
    Environment,
    Hide,
    Nil,
    Parallel,
    Prefix,
    ProcessTerm,
    validate_environment,
)

_MULTI_TOKENS = ("||", "<<", ">>", "[[", "]]")
_SINGLE_TOKENS = ".+()\\{},=;:[]<>"


@dataclass(frozen=True)
class SourceDiagnostic:
    """A parse or validation error anchored to a position in the input."""

    line: int
    column: int
    message: str
    snippet: str = ""

    def __str__(self) -> str:
        text = f"{self.line}:{self.column}: {self.message}"
        if self.snippet:
            text += f"\n  {self.snippet}"
        return text


class ModelSyntaxError(ValueError):
    def __init__(self, diagnostic: SourceDiagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


@dataclass(frozen=True)
class DeclaredProperty:
    """A named HML property with its expected verdict (None when unstated)."""

    name: str
    formula: hml.HmlFormula
    expected: bool | None = None


@dataclass(frozen=True)
class ModelFile:
    """A parsed model: a validated environment plus declared properties."""

    env: Environment
    properties: tuple[DeclaredProperty, ...] = ()

    def property_named(self, name: str) -> DeclaredProperty:
        for prop in self.properties:
            if prop.name == name:
                return prop
        raise KeyError(f"no declared property named {name!r}")


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident" | "nil" | an operator/punctuation literal | "eof"
    text: str
    line: int
    column: int


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, column = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
            continue
        if ch in " \t\r":
            column += 1
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_column = line, column
        two = text[i : i + 2]
        if two in _MULTI_TOKENS:
            tokens.append(_Token(two, two, start_line, start_column))
            i += 2
            column += 2
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append(_Token("ident", word, start_line, start_column))
            column += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            word = text[i:j]
            if word != "0":
                raise ModelSyntaxError(
                    SourceDiagnostic(start_line, start_column, f"unexpected number {word!r}")
                )
            tokens.append(_Token("nil", word, start_line, start_column))
            column += j - i
            i = j
            continue
        if ch in _SINGLE_TOKENS:
            tokens.append(_Token(ch, ch, start_line, start_column))
            i += 1
            column += 1
            continue
        raise ModelSyntaxError(
            SourceDiagnostic(start_line, start_column, f"unexpected character {ch!r}")
        )
    tokens.append(_Token("eof", "", line, max(column, 1)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _lex(text)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        token = self.current
        if token.kind != "eof":
            self.pos += 1
        return token

    def fail(self, message: str, token: _Token | None = None) -> NoReturn:
        token = token or self.current
        shown = token.text if token.kind != "eof" else "end of input"
        raise ModelSyntaxError(
            SourceDiagnostic(token.line, token.column, message, snippet=f"at {shown!r}")
        )

    def expect(self, kind: str, description: str) -> _Token:
        if self.current.kind != kind:
            self.fail(f"expected {description}")
        return self.advance()

    def expect_ident(self, description: str) -> _Token:
        if self.current.kind != "ident":
            self.fail(f"expected {description}")
        return self.advance()

    def at_end(self) -> bool:
        return self.current.kind == "eof"

    # -- terms ------------------------------------------------------------

    def term(self) -> ProcessTerm:
        alternatives = [self.parallel()]
        while self.current.kind == "+":
            self.advance()
            alternatives.append(self.parallel())
        result = alternatives[-1]
        for alt in reversed(alternatives[:-1]):  # choice is right-nested
            result = Choice(alt, result)
        return result

    def parallel(self) -> ProcessTerm:
        result = self.prefix()
        while self.current.kind == "||":  # parallel is left-associative
            self.advance()
            self.expect("[", "'[' opening a synchronization set")
            names = self.name_list("]")
            self.expect("]", "']' closing the synchronization set")
            right = self.prefix()
            result = Parallel(result, names, right)
        return result

    def prefix(self) -> ProcessTerm:
        if self.current.kind == "ident" and self.peek(1).kind == ".":
            action_token = self.advance()
            self.advance()
            action = TAU if action_token.text == TAU_NAME else Action(action_token.text)
            return Prefix(action, self.prefix())
        return self.atom()

    def atom(self) -> ProcessTerm:
        token = self.current
        if token.kind == "nil":
            self.advance()
            result: ProcessTerm = Nil()
        elif token.kind == "(":
            self.advance()
            result = self.term()
            self.expect(")", "')'")
        elif token.kind == "ident":
            if token.text == TAU_NAME:
                self.fail("'tau' cannot be used as a process constant")
            self.advance()
            result = Const(token.text)
        else:
            self.fail("expected a process term")
        while self.current.kind == "\\":  # hiding is a tight postfix
            self.advance()
            self.expect("{", "'{' opening a hiding set")
            names = self.name_list("}")
            self.expect("}", "'}' closing the hiding set")
            result = Hide(result, names)
        return result

    def name_list(self, closer: str) -> tuple[str, ...]:
        names: list[str] = []
        if self.current.kind == "ident":
            names.append(self.action_name())
            while self.current.kind == ",":
                self.advance()
                names.append(self.action_name())
        elif self.current.kind != closer:
            self.fail(f"expected an action name or {closer!r}")
        return tuple(names)

    def action_name(self) -> str:
        token = self.expect_ident("an action name")
        if token.text == TAU_NAME:
            self.fail("'tau' is internal and cannot be synchronized or hidden", token)
        return token.text

    # -- formulas ----------------------------------------------------------

    def formula(self) -> hml.HmlFormula:
        left = self.formula_and()
        if self.current.kind == "ident" and self.current.text == "or":
            self.advance()
            return hml.Or(left, self.formula())
        return left

    def formula_and(self) -> hml.HmlFormula:
        left = self.formula_unary()
        if self.current.kind == "ident" and self.current.text == "and":
            self.advance()
            return hml.And(left, self.formula_and())
        return left

    def formula_unary(self) -> hml.HmlFormula:
        token = self.current
        if token.kind == "ident" and token.text == "not":
            self.advance()
            return hml.Not(self.formula_unary())
        if token.kind == "<":
            self.advance()
            action = self.modality_action()
            self.expect(">", "'>' closing the modality")
            return hml.Diamond(action, self.formula_unary())
        if token.kind == "[":
            self.advance()
            action = self.modality_action()
            self.expect("]", "']' closing the modality")
            return hml.Box(action, self.formula_unary())
        if token.kind == "<<":
            self.advance()
            action = self.modality_action()
            self.expect(">>", "'>>' closing the modality")
            return hml.WeakDiamond(action, self.formula_unary())
        if token.kind == "[[":
            self.advance()
            action = self.modality_action()
            self.expect("]]", "']]' closing the modality")
            return hml.WeakBox(action, self.formula_unary())
        return self.formula_atom()

    def formula_atom(self) -> hml.HmlFormula:
        token = self.current
        if token.kind == "ident" and token.text == "tt":
            self.advance()
            return hml.Tt()
        if token.kind == "ident" and token.text == "ff":
            self.advance()
            return hml.Ff()
        if token.kind == "(":
            self.advance()
            inner = self.formula()
            self.expect(")", "')'")
            return inner
        self.fail("expected a formula")

    def modality_action(self) -> Action:
        token = self.expect_ident("an action name inside the modality")
        return TAU if token.text == TAU_NAME else Action(token.text)

    # -- model files --------------------------------------------------------

    def model_file(self) -> ModelFile:
        defs: dict[str, ProcessTerm] = {}
        positions: dict[str, _Token] = {}
        properties: list[DeclaredProperty] = []
        root_token: _Token | None = None
        root_name: str | None = None
        while not self.at_end():
            token = self.current
            if token.kind != "ident":
                self.fail("expected a definition or directive")
            if token.text == "root":
                if root_token is not None:
                    self.fail("duplicate root directive")
                root_token = self.advance()
                root_name = self.expect_ident("a definition name after 'root'").text
                self.expect(";", "';' after the root directive")
            elif token.text == "property":
                self.advance()
                name_token = self.expect_ident("a property name")
                if any(p.name == name_token.text for p in properties):
                    self.fail(f"duplicate property {name_token.text!r}", name_token)
                expected_kw = self.expect_ident("'expected'")
                if expected_kw.text != "expected":
                    self.fail("expected the keyword 'expected'", expected_kw)
                value_token = self.expect_ident("'true' or 'false'")
                if value_token.text not in ("true", "false"):
                    self.fail("expected 'true' or 'false'", value_token)
                self.expect(":", "':' before the property formula")
                formula = self.formula()
                self.expect(";", "';' after the property formula")
                properties.append(
                    DeclaredProperty(name_token.text, formula, value_token.text == "true")
                )
            else:
                name_token = self.advance()
                if name_token.text == TAU_NAME:
                    self.fail("'tau' cannot be defined as a process", name_token)
                if name_token.text in defs:
                    self.fail(f"duplicate definition {name_token.text!r}", name_token)
                self.expect("=", "'=' after the definition name")
                body = self.term()
                self.expect(";", "';' after the definition body")
                defs[name_token.text] = body
                positions[name_token.text] = name_token

        if not defs:
            self.fail("model file declares no process definitions")
        if root_name is None:
            root_name = next(iter(defs))
        elif root_name not in defs:
            assert root_token is not None
            self.fail(f"root {root_name!r} has no definition", root_token)

        env = Environment(defs, root_name)
        report = validate_environment(env)
        if not report.ok:
            first = report.diagnostics[0]
            anchor = positions.get(first.definition, self.current)
            raise ModelSyntaxError(
                SourceDiagnostic(anchor.line, anchor.column, first.message)
            )
        return ModelFile(env, tuple(properties))


def parse_term(text: str) -> ProcessTerm:
    """Parse a single term; the whole input must be consumed."""
    parser = _Parser(text)
    term = parser.term()
    if not parser.at_end():
        parser.fail("unexpected trailing input after the term")
    return term


def parse_formula(text: str) -> hml.HmlFormula:
    """Parse a single HML formula; the whole input must be consumed."""
    parser = _Parser(text)
    formula = parser.formula()
    if not parser.at_end():
        parser.fail("unexpected trailing input after the formula")
    return formula


def parse_model_file(text: str) -> ModelFile:
    """Parse and validate a model file; raises ``ModelSyntaxError`` on failure."""
    return _Parser(text).model_file()


def render_model_file(model: ModelFile, header: str = "") -> str:
    """Render a model back to file syntax; parses back to an equal model."""
    from .terms import render_term

    lines: list[str] = []
    if header:
        lines.extend(f"# {line}".rstrip() for line in header.splitlines())
        lines.append("")
    for name, body in model.env.defs.items():
        lines.append(f"{name} = {render_term(body)};")
    first = next(iter(model.env.defs))
    if model.env.root != first:
        lines.append(f"root {model.env.root};")
    for prop in model.properties:
        expected = "true" if prop.expected else "false"
        lines.append(
            f"property {prop.name} expected {expected} : {hml.render_formula(prop.formula)};"
        )
    return "\n".join(lines) + "\n"
