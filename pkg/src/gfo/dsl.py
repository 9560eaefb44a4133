"""The `.gfo` declaration language: parser, diagnostics, canonical serializer.

The language is statement-oriented (``keyword name ... ;`` with braces for
maps) and resolved in two passes, so forward references are legal.  Parsing
either yields a model satisfying every structural invariant of the store,
or raises :class:`ParseError` carrying span-annotated diagnostics — never a
partial model.  Error recovery skips to the next ``;`` at brace depth zero,
so one run reports as many diagnostics as possible.

``serialize`` emits canonical text: declarations sorted by kind and id,
map entries sorted by coordinate, rationals normalized.  Parsing the
serialization of a model reproduces a store-equal model, and serialization
of a parse is invariant under declaration reordering of the source.

The full grammar is published in docs/grammar.md.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chrono import Chronoid, TimeBoundary, coord_str, inner_boundary
from .errors import GfoError
from .functions import (
    CONCEPTUAL,
    FUNCTION_KINDS,
    INDIVIDUAL,
    FactPattern,
    FunctionSpec,
    PropertyConstraint,
    SituationConcept,
)
from .model import (
    CATEGORICAL,
    GLOBAL,
    ISOLATED,
    NON_ISOLATED,
    NUMERIC,
    Continuant,
    Fact,
    Model,
    Presential,
    Process,
    PropertyDef,
    Situation,
    Support,
    ValueDomain,
)
from .truthmakers import AtTime, DuringSpan, FactProp, HoldsProp

# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

DIAGNOSTIC_CODES = frozenset(
    {
        "unexpected-token",
        "unknown-id",
        "duplicate-id",
        "bad-rational",
        "dangling-reference",
        "kind-conflict",
        "zero-duration",
        "out-of-extent",
        "missing-endpoint",
        "coordinate-mismatch",
        "bad-value",
        "orphan-fact",
        "empty-concept",
    }
)


@dataclass(frozen=True)
class SourceSpan:
    """1-based line/column position with a length in characters."""

    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    code: str
    message: str

    def __post_init__(self) -> None:
        if self.code not in DIAGNOSTIC_CODES:
            raise ValueError(f"unregistered diagnostic code: {self.code!r}")

    def __str__(self) -> str:
        return f"{self.span}: {self.code}: {self.message}"

    def to_json(self) -> dict:
        return {
            "file": self.span.file,
            "line": self.span.line,
            "column": self.span.column,
            "length": self.span.length,
            "code": self.code,
            "message": self.message,
        }


class ParseError(GfoError):
    """Raised when a source cannot be loaded; carries all diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = sorted(
            diagnostics,
            key=lambda d: (d.span.file, d.span.line, d.span.column, d.code, d.message),
        )
        summary = "; ".join(str(d) for d in self.diagnostics[:3])
        if len(self.diagnostics) > 3:
            summary += f"; ... ({len(self.diagnostics)} total)"
        super().__init__(summary)


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

IDENT = "ident"
NUMBER = "number"
STRING = "string"
PUNCT = "punct"
EOF = "eof"

_PUNCT_SINGLE = set("=;,(){}[]@:")
_ID_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_ID_CONT = _ID_START | set("0123456789")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    value: object
    line: int
    column: int

    def span(self, file: str) -> SourceSpan:
        return SourceSpan(file, self.line, self.column, max(1, len(self.text)))


def _tokenize(source: str, file: str, diagnostics: list) -> list:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(source)

    def diag(code, message, length=1, at_line=None, at_col=None):
        diagnostics.append(
            ParseDiagnostic(
                SourceSpan(file, at_line or line, at_col or col, length), code, message
            )
        )

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        start_line, start_col = line, col
        if ch in _ID_START:
            j = i + 1
            while j < n:
                c = source[j]
                if c in _ID_CONT:
                    j += 1
                elif c == "-" and j + 1 < n and source[j + 1] in _ID_CONT:
                    j += 1
                else:
                    break
            text = source[i:j]
            tokens.append(Token(IDENT, text, text, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and source[i + 1].isdigit()):
            j = i + 1 if ch == "-" else i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            elif j < n and source[j] == "/" and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            try:
                value = Fraction(text)
            except (ValueError, ZeroDivisionError):
                diag(
                    "bad-rational",
                    f"{text!r} is not a valid rational literal",
                    length=len(text),
                    at_line=start_line,
                    at_col=start_col,
                )
                value = Fraction(0)
            tokens.append(Token(NUMBER, text, value, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "-" and i + 1 < n and source[i + 1] == ">":
            tokens.append(Token(PUNCT, "->", "->", start_line, start_col))
            i += 2
            col += 2
            continue
        if ch == '"':
            j = i + 1
            out = []
            closed = False
            while j < n:
                c = source[j]
                if c == "\\" and j + 1 < n:
                    nxt = source[j + 1]
                    out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
                    j += 2
                    continue
                if c == '"':
                    closed = True
                    j += 1
                    break
                if c == "\n":
                    break
                out.append(c)
                j += 1
            if not closed:
                diag(
                    "unexpected-token",
                    "unterminated string literal",
                    at_line=start_line,
                    at_col=start_col,
                )
            text = source[i:j]
            tokens.append(Token(STRING, text, "".join(out), start_line, start_col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT_SINGLE:
            tokens.append(Token(PUNCT, ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        diag("unexpected-token", f"unexpected character {ch!r}")
        i += 1
        col += 1
    tokens.append(Token(EOF, "", None, line, col))
    return tokens


# ---------------------------------------------------------------------------
# Raw declarations (first pass)
# ---------------------------------------------------------------------------


@dataclass
class _Chronoid:
    name: str
    name_span: SourceSpan
    left: Fraction
    left_span: SourceSpan
    right: Fraction
    right_span: SourceSpan


@dataclass
class _Property:
    name: str
    name_span: SourceSpan
    domain_kind: str
    symbols: list
    support_kind: str
    radius: Fraction | None
    radius_span: SourceSpan | None


@dataclass
class _Presential:
    name: str
    name_span: SourceSpan
    chron: str
    chron_span: SourceSpan
    t: Fraction
    t_span: SourceSpan
    material: bool
    valuation: list  # (prop, prop_span, value, value_span)


@dataclass
class _Process:
    name: str
    name_span: SourceSpan
    chron: str
    chron_span: SourceSpan
    boundaries: list  # (t, t_span, target, target_span)
    trajectories: list  # (prop, prop_span, [(t, t_span, value, value_span)])


@dataclass
class _Continuant:
    name: str
    name_span: SourceSpan
    chron: str
    chron_span: SourceSpan
    material: bool
    exhibits: list  # (t, t_span, target, target_span)


@dataclass
class _Situation:
    name: str
    name_span: SourceSpan
    mode: str  # "at" | "during"
    chron: str
    chron_span: SourceSpan
    t: Fraction | None
    t_span: SourceSpan | None
    founded: str | None
    founded_span: SourceSpan | None
    contains: list  # (fact id, span)
    participants: list  # (entity id, span)


@dataclass
class _Fact:
    name: str
    name_span: SourceSpan
    relator: str
    relator_span: SourceSpan
    args: list  # (value, span)


@dataclass
class _Function:
    name: str
    name_span: SourceSpan
    kind: str
    bearer: str | None
    bearer_span: SourceSpan | None
    labels: list
    req_items: list | None  # None when the block is missing
    goal_items: list | None
    fitem: list  # (prop, prop_span, value, value_span)


@dataclass
class _Exe:
    x: str
    x_span: SourceSpan
    p: str
    p_span: SourceSpan


@dataclass
class _Instance:
    which: str  # "requirement" | "goal"
    fn: str
    fn_span: SourceSpan
    sit: str
    sit_span: SourceSpan


class _Syntax(Exception):
    def __init__(self, span: SourceSpan, message: str):
        self.span = span
        self.message = message


class _Parser:
    def __init__(self, tokens: list, file: str, diagnostics: list):
        self.tokens = tokens
        self.file = file
        self.diagnostics = diagnostics
        self.pos = 0

    # -- token helpers -------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def span(self, tok: Token) -> SourceSpan:
        return tok.span(self.file)

    def at_word(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == IDENT and tok.text == text

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == PUNCT and tok.text == text

    def take_word(self, text: str) -> Token:
        if not self.at_word(text):
            tok = self.peek()
            raise _Syntax(self.span(tok), f"expected {text!r}, found {tok.text!r}")
        return self.advance()

    def take_punct(self, text: str) -> Token:
        if not self.at_punct(text):
            tok = self.peek()
            raise _Syntax(self.span(tok), f"expected {text!r}, found {tok.text!r}")
        return self.advance()

    def take_ident(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != IDENT:
            raise _Syntax(self.span(tok), f"expected {what}, found {tok.text!r}")
        return self.advance()

    def take_number(self, what: str = "a rational literal") -> Token:
        tok = self.peek()
        if tok.kind != NUMBER:
            raise _Syntax(self.span(tok), f"expected {what}, found {tok.text!r}")
        return self.advance()

    def take_value(self) -> Token:
        tok = self.peek()
        if tok.kind not in (IDENT, NUMBER):
            raise _Syntax(
                self.span(tok), f"expected a symbol or rational, found {tok.text!r}"
            )
        return self.advance()

    def end_simple(self) -> None:
        self.take_punct(";")

    def end_block(self) -> None:
        # a ';' after '}' is permitted but not required
        if self.at_punct(";"):
            self.advance()

    # -- recovery --------------------------------------------------------------

    def sync(self) -> None:
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == EOF:
                return
            if tok.kind == PUNCT:
                if tok.text == "{":
                    depth += 1
                elif tok.text == "}":
                    if depth <= 1:
                        self.advance()
                        if self.at_punct(";"):
                            self.advance()
                        return
                    depth -= 1
                elif tok.text == ";" and depth == 0:
                    self.advance()
                    return
            self.advance()

    # -- statements --------------------------------------------------------------

    def parse(self) -> list:
        decls = []
        table = {
            "chronoid": self.chronoid,
            "property": self.property,
            "presential": self.presential,
            "process": self.process,
            "continuant": self.continuant,
            "situation": self.situation,
            "fact": self.fact,
            "function": self.function,
            "exe": self.exe,
            "requirement-instance": self.instance,
            "goal-instance": self.instance,
        }
        while self.peek().kind != EOF:
            tok = self.peek()
            handler = table.get(tok.text) if tok.kind == IDENT else None
            if handler is None:
                self.diagnostics.append(
                    ParseDiagnostic(
                        self.span(tok),
                        "unexpected-token",
                        f"expected a declaration keyword, found {tok.text!r}",
                    )
                )
                self.advance()
                self.sync()
                continue
            try:
                decls.append(handler())
            except _Syntax as err:
                self.diagnostics.append(
                    ParseDiagnostic(err.span, "unexpected-token", err.message)
                )
                self.sync()
        return decls

    def chronoid(self) -> _Chronoid:
        self.advance()
        name = self.take_ident("a chronoid name")
        self.take_punct("=")
        self.take_punct("[")
        left = self.take_number()
        self.take_punct(",")
        right = self.take_number()
        self.take_punct("]")
        self.end_simple()
        return _Chronoid(
            name.text,
            self.span(name),
            left.value,
            self.span(left),
            right.value,
            self.span(right),
        )

    def property(self) -> _Property:
        self.advance()
        name = self.take_ident("a property name")
        self.take_punct(":")
        kind_tok = self.take_ident("'categorical' or 'numeric'")
        symbols = []
        if kind_tok.text == CATEGORICAL:
            self.take_punct("{")
            symbols.append(self.take_ident("a symbol").text)
            while self.at_punct(","):
                self.advance()
                symbols.append(self.take_ident("a symbol").text)
            self.take_punct("}")
        elif kind_tok.text != NUMERIC:
            raise _Syntax(
                self.span(kind_tok),
                f"expected 'categorical' or 'numeric', found {kind_tok.text!r}",
            )
        support_kind = ISOLATED
        radius = None
        radius_span = None
        if self.peek().kind == IDENT and self.peek().text in (
            ISOLATED,
            NON_ISOLATED,
            GLOBAL,
        ):
            support_tok = self.advance()
            support_kind = support_tok.text
            if support_kind == NON_ISOLATED:
                self.take_punct("(")
                radius_tok = self.take_number("a window radius")
                radius = radius_tok.value
                radius_span = self.span(radius_tok)
                self.take_punct(")")
        self.end_simple()
        return _Property(
            name.text,
            self.span(name),
            kind_tok.text,
            symbols,
            support_kind,
            radius,
            radius_span,
        )

    def _time_point(self):
        chron = self.take_ident("a chronoid name")
        self.take_punct("@")
        t = self.take_number("a coordinate")
        return chron, t

    def presential(self) -> _Presential:
        self.advance()
        name = self.take_ident("a presential name")
        self.take_word("at")
        chron, t = self._time_point()
        material = True
        if self.at_word("immaterial"):
            self.advance()
            material = False
        valuation = []
        if self.at_punct("{"):
            self.advance()
            while not self.at_punct("}"):
                prop = self.take_ident("a property name")
                self.take_punct("=")
                value = self.take_value()
                self.end_simple()
                valuation.append(
                    (prop.text, self.span(prop), value.value, self.span(value))
                )
            self.take_punct("}")
            self.end_block()
        else:
            self.end_simple()
        return _Presential(
            name.text,
            self.span(name),
            chron.text,
            self.span(chron),
            t.value,
            self.span(t),
            material,
            valuation,
        )

    def process(self) -> _Process:
        self.advance()
        name = self.take_ident("a process name")
        self.take_word("extent")
        chron = self.take_ident("a chronoid name")
        boundaries = []
        trajectories = []
        if self.at_punct("{"):
            self.advance()
            while not self.at_punct("}"):
                if self.at_word("boundary"):
                    self.advance()
                    t = self.take_number("a coordinate")
                    self.take_punct("->")
                    target = self.take_ident("a presential name")
                    self.end_simple()
                    boundaries.append(
                        (t.value, self.span(t), target.text, self.span(target))
                    )
                elif self.at_word("trajectory"):
                    self.advance()
                    prop = self.take_ident("a property name")
                    self.take_punct("{")
                    samples = []
                    while not self.at_punct("}"):
                        ts = self.take_number("a coordinate")
                        self.take_punct("->")
                        value = self.take_value()
                        self.end_simple()
                        samples.append(
                            (ts.value, self.span(ts), value.value, self.span(value))
                        )
                    self.take_punct("}")
                    trajectories.append((prop.text, self.span(prop), samples))
                else:
                    tok = self.peek()
                    raise _Syntax(
                        self.span(tok),
                        f"expected 'boundary' or 'trajectory', found {tok.text!r}",
                    )
            self.take_punct("}")
            self.end_block()
        else:
            self.end_simple()
        return _Process(
            name.text, self.span(name), chron.text, self.span(chron), boundaries, trajectories
        )

    def continuant(self) -> _Continuant:
        self.advance()
        name = self.take_ident("a continuant name")
        self.take_word("lifetime")
        chron = self.take_ident("a chronoid name")
        material = True
        if self.at_word("immaterial"):
            self.advance()
            material = False
        exhibits = []
        if self.at_punct("{"):
            self.advance()
            while not self.at_punct("}"):
                self.take_word("exhibits")
                t = self.take_number("a coordinate")
                self.take_punct("->")
                target = self.take_ident("a presential name")
                self.end_simple()
                exhibits.append(
                    (t.value, self.span(t), target.text, self.span(target))
                )
            self.take_punct("}")
            self.end_block()
        else:
            self.end_simple()
        return _Continuant(
            name.text, self.span(name), chron.text, self.span(chron), material, exhibits
        )

    def situation(self) -> _Situation:
        self.advance()
        name = self.take_ident("a situation name")
        t = t_span = None
        if self.at_word("at"):
            self.advance()
            chron, t_tok = self._time_point()
            mode = "at"
            t, t_span = t_tok.value, self.span(t_tok)
        elif self.at_word("during"):
            self.advance()
            chron = self.take_ident("a chronoid name")
            mode = "during"
        else:
            tok = self.peek()
            raise _Syntax(
                self.span(tok), f"expected 'at' or 'during', found {tok.text!r}"
            )
        founded = founded_span = None
        if self.at_word("founded"):
            self.advance()
            self.take_word("on")
            target = self.take_ident("a process name")
            founded, founded_span = target.text, self.span(target)
        contains = []
        participants = []
        if self.at_punct("{"):
            self.advance()
            while not self.at_punct("}"):
                if self.at_word("contains"):
                    self.advance()
                    fact = self.take_ident("a fact name")
                    self.end_simple()
                    contains.append((fact.text, self.span(fact)))
                elif self.at_word("participant"):
                    self.advance()
                    entity = self.take_ident("an entity name")
                    self.end_simple()
                    participants.append((entity.text, self.span(entity)))
                else:
                    tok = self.peek()
                    raise _Syntax(
                        self.span(tok),
                        f"expected 'contains' or 'participant', found {tok.text!r}",
                    )
            self.take_punct("}")
            self.end_block()
        else:
            self.end_simple()
        return _Situation(
            name.text,
            self.span(name),
            mode,
            chron.text,
            self.span(chron),
            t,
            t_span,
            founded,
            founded_span,
            contains,
            participants,
        )

    def fact(self) -> _Fact:
        self.advance()
        name = self.take_ident("a fact name")
        self.take_punct("=")
        relator = self.take_ident("a relator name")
        self.take_punct("(")
        args = [self._fact_arg()]
        while self.at_punct(","):
            self.advance()
            args.append(self._fact_arg())
        self.take_punct(")")
        self.end_simple()
        return _Fact(
            name.text, self.span(name), relator.text, self.span(relator), args
        )

    def _fact_arg(self):
        tok = self.take_value()
        return (tok.value, self.span(tok))

    def function(self) -> _Function:
        self.advance()
        name = self.take_ident("a function name")
        kind = CONCEPTUAL
        if self.peek().kind == IDENT and self.peek().text in FUNCTION_KINDS:
            kind = self.advance().text
        bearer = bearer_span = None
        if self.at_word("bearer"):
            self.advance()
            tok = self.take_ident("a bearer entity")
            bearer, bearer_span = tok.text, self.span(tok)
        self.take_punct("{")
        labels = []
        req_items = None
        goal_items = None
        fitem = []
        while not self.at_punct("}"):
            if self.at_word("label"):
                self.advance()
                tok = self.peek()
                if tok.kind != STRING:
                    raise _Syntax(
                        self.span(tok), f"expected a string label, found {tok.text!r}"
                    )
                self.advance()
                labels.append(tok.value)
                self.end_simple()
            elif self.at_word("requires"):
                self.advance()
                req_items = self._concept_block()
            elif self.at_word("achieves"):
                self.advance()
                goal_items = self._concept_block()
            elif self.at_word("fitem"):
                self.advance()
                self.take_punct("{")
                while not self.at_punct("}"):
                    prop = self.take_ident("a property name")
                    self.take_punct("=")
                    value = self.take_value()
                    self.end_simple()
                    fitem.append(
                        (prop.text, self.span(prop), value.value, self.span(value))
                    )
                self.take_punct("}")
            else:
                tok = self.peek()
                raise _Syntax(
                    self.span(tok),
                    "expected 'label', 'requires', 'achieves' or 'fitem', "
                    f"found {tok.text!r}",
                )
        self.take_punct("}")
        self.end_block()
        return _Function(
            name.text,
            self.span(name),
            kind,
            bearer,
            bearer_span,
            labels,
            req_items,
            goal_items,
            fitem,
        )

    def _concept_block(self) -> list:
        self.take_punct("{")
        items = []
        while not self.at_punct("}"):
            if self.at_word("fact"):
                self.advance()
                relator = self.take_ident("a relator name")
                self.take_punct("(")
                pats = [self._fact_arg()]
                while self.at_punct(","):
                    self.advance()
                    pats.append(self._fact_arg())
                self.take_punct(")")
                self.end_simple()
                items.append(("fact", relator.text, self.span(relator), pats))
            elif self.at_word("holds"):
                self.advance()
                self.take_punct("(")
                entity = self.take_ident("an entity name")
                self.take_punct(",")
                prop = self.take_ident("a property name")
                self.take_punct(",")
                value = self.take_value()
                self.take_punct(")")
                self.end_simple()
                items.append(
                    (
                        "holds",
                        entity.text,
                        self.span(entity),
                        prop.text,
                        self.span(prop),
                        value.value,
                        self.span(value),
                    )
                )
            else:
                tok = self.peek()
                raise _Syntax(
                    self.span(tok), f"expected 'fact' or 'holds', found {tok.text!r}"
                )
        self.take_punct("}")
        return items

    def exe(self) -> _Exe:
        self.advance()
        self.take_punct("(")
        x = self.take_ident("an executor entity")
        self.take_punct(",")
        p = self.take_ident("a process name")
        self.take_punct(")")
        self.end_simple()
        return _Exe(x.text, self.span(x), p.text, self.span(p))

    def instance(self) -> _Instance:
        keyword = self.advance()
        which = "requirement" if keyword.text == "requirement-instance" else "goal"
        self.take_punct("(")
        fn = self.take_ident("a function name")
        self.take_punct(",")
        sit = self.take_ident("a situation name")
        self.take_punct(")")
        self.end_simple()
        return _Instance(which, fn.text, self.span(fn), sit.text, self.span(sit))


# ---------------------------------------------------------------------------
# Linker (second pass)
# ---------------------------------------------------------------------------


class _Linker:
    def __init__(self, decls: list, diagnostics: list):
        self.decls = decls
        self.diagnostics = diagnostics
        self.properties: dict = {}
        self.chron_decls: dict = {}
        self.entity_kinds: dict = {}  # name -> kind string (first declaration wins)
        self.fn_decls: dict = {}

    def diag(self, span: SourceSpan, code: str, message: str) -> None:
        self.diagnostics.append(ParseDiagnostic(span, code, message))

    # -- namespace registration ------------------------------------------------

    _ENTITY_KIND = {
        _Presential: "presential",
        _Process: "process",
        _Continuant: "continuant",
        _Situation: "situation",
        _Fact: "fact",
    }

    def register(self) -> None:
        prop_decls: dict = {}
        for decl in self.decls:
            if isinstance(decl, _Property):
                if decl.name in prop_decls:
                    self.diag(
                        decl.name_span,
                        "duplicate-id",
                        f"property {decl.name!r} is declared twice",
                    )
                else:
                    prop_decls[decl.name] = decl
            elif isinstance(decl, _Chronoid):
                if decl.name in self.chron_decls:
                    self.diag(
                        decl.name_span,
                        "duplicate-id",
                        f"chronoid {decl.name!r} is declared twice",
                    )
                else:
                    self.chron_decls[decl.name] = decl
            elif isinstance(decl, _Function):
                if decl.name in self.fn_decls:
                    self.diag(
                        decl.name_span,
                        "duplicate-id",
                        f"function {decl.name!r} is declared twice",
                    )
                else:
                    self.fn_decls[decl.name] = decl
            elif type(decl) in self._ENTITY_KIND:
                kind = self._ENTITY_KIND[type(decl)]
                prior = self.entity_kinds.get(decl.name)
                if prior is None:
                    self.entity_kinds[decl.name] = kind
                elif prior == kind:
                    self.diag(
                        decl.name_span,
                        "duplicate-id",
                        f"{kind} {decl.name!r} is declared twice",
                    )
                else:
                    self.diag(
                        decl.name_span,
                        "kind-conflict",
                        f"{decl.name!r} is already declared as a {prior}, "
                        f"cannot also be a {kind}",
                    )
        self.prop_decls = prop_decls

    # -- reference helpers -------------------------------------------------------

    def resolve_entity(self, name: str, span: SourceSpan, kind: str | None = None):
        declared = self.entity_kinds.get(name)
        if declared is None:
            self.diag(span, "dangling-reference", f"{name!r} is not declared")
            return False
        if kind is not None and declared != kind:
            self.diag(
                span,
                "kind-conflict",
                f"{name!r} is a {declared}, but a {kind} is required here",
            )
            return False
        return True

    def resolve_chronoid(self, name: str, span: SourceSpan):
        ch = self.chronoids.get(name)
        if ch is None:
            self.diag(span, "dangling-reference", f"chronoid {name!r} is not declared")
        return ch

    def check_value(self, prop_name: str, value, span: SourceSpan) -> bool:
        pdef = self.property_defs.get(prop_name)
        if pdef is None:
            return False  # reported where the property name is resolved
        if not pdef.domain.admits(value):
            shown = coord_str(value) if isinstance(value, Fraction) else str(value)
            self.diag(
                span,
                "bad-value",
                f"{shown!r} is not in the value domain of property {prop_name!r}",
            )
            return False
        return True

    def resolve_property(self, name: str, span: SourceSpan):
        pdef = self.property_defs.get(name)
        if pdef is None:
            self.diag(span, "unknown-id", f"property {name!r} is not declared")
        return pdef

    # -- stages --------------------------------------------------------------------

    def build_properties(self) -> None:
        self.property_defs = {}
        for decl in self.prop_decls.values():
            if decl.support_kind == NON_ISOLATED and decl.radius is not None:
                if decl.radius <= 0:
                    self.diag(
                        decl.radius_span,
                        "bad-value",
                        "window radius must be strictly positive",
                    )
            domain = ValueDomain(decl.domain_kind, frozenset(decl.symbols))
            self.property_defs[decl.name] = PropertyDef(
                name=decl.name,
                domain=domain,
                support=Support(decl.support_kind, decl.radius),
            )

    def build_chronoids(self) -> None:
        self.chronoids = {}
        for decl in self.chron_decls.values():
            if decl.left >= decl.right:
                self.diag(
                    decl.left_span,
                    "zero-duration",
                    f"chronoid {decl.name!r}: [{coord_str(decl.left)}, "
                    f"{coord_str(decl.right)}] has no duration",
                )
                continue
            self.chronoids[decl.name] = Chronoid(decl.name, decl.left, decl.right)

    def _boundary_at(self, decl_chron, chron_span, t, t_span):
        ch = self.resolve_chronoid(decl_chron, chron_span)
        if ch is None:
            return None
        if not ch.contains(t):
            self.diag(
                t_span,
                "out-of-extent",
                f"{coord_str(t)} lies outside chronoid {ch.id!r} "
                f"[{coord_str(ch.left)}, {coord_str(ch.right)}]",
            )
            return None
        return inner_boundary(ch, t)

    def build_presentials(self) -> None:
        self.presentials = {}
        for decl in self.decls:
            if not isinstance(decl, _Presential):
                continue
            boundary = self._boundary_at(
                decl.chron, decl.chron_span, decl.t, decl.t_span
            )
            valuation = {}
            for prop, prop_span, value, value_span in decl.valuation:
                pdef = self.resolve_property(prop, prop_span)
                if pdef is None:
                    continue
                if pdef.support.kind != ISOLATED:
                    self.diag(
                        prop_span,
                        "kind-conflict",
                        f"property {prop!r} has {pdef.support.kind} support and "
                        "cannot be valued at a single boundary",
                    )
                    continue
                if prop in valuation:
                    self.diag(
                        prop_span,
                        "duplicate-id",
                        f"property {prop!r} is valued twice on {decl.name!r}",
                    )
                    continue
                if self.check_value(prop, value, value_span):
                    valuation[prop] = value
            if boundary is not None:
                self.presentials[decl.name] = Presential(
                    id=decl.name,
                    at=boundary,
                    valuation=valuation,
                    material=decl.material,
                )

    def _sample_map(self, decl, entries, ch, keyword: str) -> dict:
        out: dict = {}
        for t, t_span, target, target_span in entries:
            if ch is not None and not ch.contains(t):
                self.diag(
                    t_span,
                    "out-of-extent",
                    f"{coord_str(t)} lies outside [{coord_str(ch.left)}, "
                    f"{coord_str(ch.right)}]",
                )
                continue
            if t in out:
                self.diag(
                    t_span,
                    "duplicate-id",
                    f"{keyword} at {coord_str(t)} is declared twice",
                )
                continue
            if not self.resolve_entity(target, target_span, kind="presential"):
                continue
            pres = self.presentials.get(target)
            if pres is not None and pres.at.coordinate != t:
                self.diag(
                    target_span,
                    "coordinate-mismatch",
                    f"presential {target!r} is at {coord_str(pres.at.coordinate)}, "
                    f"not at {coord_str(t)}",
                )
                continue
            out[t] = target
        if ch is not None:
            for endpoint in (ch.left, ch.right):
                if endpoint not in out:
                    self.diag(
                        decl.name_span,
                        "missing-endpoint",
                        f"{decl.name!r} has no {keyword} at the endpoint "
                        f"{coord_str(endpoint)}",
                    )
        return out

    def build_processes(self) -> None:
        self.processes = {}
        for decl in self.decls:
            if not isinstance(decl, _Process):
                continue
            ch = self.resolve_chronoid(decl.chron, decl.chron_span)
            boundary_map = self._sample_map(decl, decl.boundaries, ch, "boundary")
            trajectories: dict = {}
            for prop, prop_span, samples in decl.trajectories:
                pdef = self.resolve_property(prop, prop_span)
                if pdef is None:
                    continue
                if pdef.support.kind == ISOLATED:
                    self.diag(
                        prop_span,
                        "kind-conflict",
                        f"property {prop!r} has isolated support; its values live "
                        "on presentials, not trajectories",
                    )
                    continue
                if prop in trajectories:
                    self.diag(
                        prop_span,
                        "duplicate-id",
                        f"trajectory for {prop!r} is declared twice",
                    )
                    continue
                points: dict = {}
                for t, t_span, value, value_span in samples:
                    if ch is not None and not ch.contains(t):
                        self.diag(
                            t_span,
                            "out-of-extent",
                            f"{coord_str(t)} lies outside [{coord_str(ch.left)}, "
                            f"{coord_str(ch.right)}]",
                        )
                        continue
                    if t in points:
                        self.diag(
                            t_span,
                            "duplicate-id",
                            f"trajectory sample at {coord_str(t)} is declared twice",
                        )
                        continue
                    if self.check_value(prop, value, value_span):
                        points[t] = value
                trajectories[prop] = tuple(sorted(points.items()))
            if ch is not None:
                self.processes[decl.name] = Process(
                    id=decl.name,
                    extent=ch,
                    boundary_map=boundary_map,
                    trajectories=trajectories,
                )

    def build_continuants(self) -> None:
        self.continuants = {}
        for decl in self.decls:
            if not isinstance(decl, _Continuant):
                continue
            ch = self.resolve_chronoid(decl.chron, decl.chron_span)
            exhibit_map = self._sample_map(decl, decl.exhibits, ch, "exhibits")
            if ch is not None:
                self.continuants[decl.name] = Continuant(
                    id=decl.name,
                    lifetime=ch,
                    exhibit_map=exhibit_map,
                    material=decl.material,
                )

    def build_facts(self) -> None:
        self.facts = {}
        for decl in self.decls:
            if not isinstance(decl, _Fact):
                continue
            args = []
            ok = True
            if decl.relator in self.property_defs:
                # property fact: (subject entity, literal value)
                if len(decl.args) != 2:
                    self.diag(
                        decl.relator_span,
                        "bad-value",
                        f"a property fact takes (subject, value); "
                        f"{decl.relator!r} got {len(decl.args)} argument(s)",
                    )
                    ok = False
                else:
                    subject, subject_span = decl.args[0]
                    value, value_span = decl.args[1]
                    if isinstance(subject, Fraction):
                        self.diag(
                            subject_span,
                            "bad-value",
                            "the subject of a property fact must be an entity",
                        )
                        ok = False
                    elif not self.resolve_entity(subject, subject_span):
                        ok = False
                    if not self.check_value(decl.relator, value, value_span):
                        ok = False
                    args = [subject, value]
            else:
                for value, span in decl.args:
                    if isinstance(value, Fraction):
                        self.diag(
                            span,
                            "bad-value",
                            "literal arguments are only allowed in property facts",
                        )
                        ok = False
                    elif not self.resolve_entity(value, span):
                        ok = False
                    args.append(value)
            if ok:
                self.facts[decl.name] = Fact(
                    id=decl.name, relator=decl.relator, args=tuple(args)
                )

    def build_situations(self) -> None:
        self.situations = {}
        used_facts = set()
        for decl in self.decls:
            if not isinstance(decl, _Situation):
                continue
            if decl.mode == "at":
                extent = self._boundary_at(
                    decl.chron, decl.chron_span, decl.t, decl.t_span
                )
            else:
                extent = self.resolve_chronoid(decl.chron, decl.chron_span)
            if decl.founded is not None:
                self.resolve_entity(decl.founded, decl.founded_span, kind="process")
            constituents = set()
            for fact, span in decl.contains:
                if self.resolve_entity(fact, span, kind="fact"):
                    constituents.add(fact)
                    used_facts.add(fact)
            participants = set()
            for entity, span in decl.participants:
                if self.resolve_entity(entity, span):
                    participants.add(entity)
            if extent is not None:
                self.situations[decl.name] = Situation(
                    id=decl.name,
                    extent=extent,
                    constituents=frozenset(constituents),
                    participants=frozenset(participants),
                    founded_on=decl.founded,
                )
        # facts are properties of processes only through situations; a fact
        # contained in no situation has nothing to be founded on
        for decl in self.decls:
            if isinstance(decl, _Fact) and decl.name not in used_facts:
                self.diag(
                    decl.name_span,
                    "orphan-fact",
                    f"fact {decl.name!r} is not a constituent of any situation",
                )

    def _concept(self, fn_name: str, which: str, items: list | None, name_span):
        if not items:
            self.diag(
                name_span,
                "empty-concept",
                f"function {fn_name!r} needs a non-empty '"
                + ("requires" if which == "req" else "achieves")
                + "' block",
            )
            return None
        patterns = set()
        constraints = set()
        for item in items:
            if item[0] == "fact":
                _, relator, _relator_span, pats = item
                patterns.add(
                    FactPattern(relator=relator, args=tuple(v for v, _ in pats))
                )
            else:
                _, entity, _e_span, prop, prop_span, value, value_span = item
                if self.resolve_property(prop, prop_span) is None:
                    continue
                if not self.check_value(prop, value, value_span):
                    continue
                constraints.add(
                    PropertyConstraint(entity=entity, prop=prop, value=value)
                )
        if not patterns and not constraints:
            return None
        return SituationConcept(
            required_facts=frozenset(patterns),
            required_props=frozenset(constraints),
            name=f"{fn_name}.{which}",
        )

    def build_functions(self) -> None:
        self.functions = {}
        for decl in self.fn_decls.values():
            req = self._concept(decl.name, "req", decl.req_items, decl.name_span)
            goal = self._concept(decl.name, "goal", decl.goal_items, decl.name_span)
            if decl.kind == INDIVIDUAL and decl.bearer is None:
                self.diag(
                    decl.name_span,
                    "dangling-reference",
                    f"individual function {decl.name!r} must name a bearer",
                )
            if decl.bearer is not None:
                self.resolve_entity(decl.bearer, decl.bearer_span)
            fitem = []
            for prop, prop_span, value, value_span in decl.fitem:
                if self.resolve_property(prop, prop_span) is None:
                    continue
                if self.check_value(prop, value, value_span):
                    fitem.append((prop, value))
            if req is None or goal is None:
                continue
            self.functions[decl.name] = FunctionSpec(
                id=decl.name,
                req=req,
                goal=goal,
                labels=frozenset(decl.labels),
                fitem=tuple(sorted(fitem, key=lambda c: (c[0], str(c[1])))),
                kind=decl.kind,
                bearer=decl.bearer,
            )

    def build_assertions(self) -> None:
        self.exe = set()
        self.req_instances: dict = {}
        self.goal_instances: dict = {}
        for decl in self.decls:
            if isinstance(decl, _Exe):
                ok = self.resolve_entity(decl.x, decl.x_span)
                ok = self.resolve_entity(decl.p, decl.p_span, kind="process") and ok
                if ok:
                    self.exe.add((decl.x, decl.p))
            elif isinstance(decl, _Instance):
                if decl.fn not in self.fn_decls:
                    self.diag(
                        decl.fn_span,
                        "unknown-id",
                        f"function {decl.fn!r} is not declared",
                    )
                    continue
                if not self.resolve_entity(decl.sit, decl.sit_span, kind="situation"):
                    continue
                store = (
                    self.req_instances
                    if decl.which == "requirement"
                    else self.goal_instances
                )
                store.setdefault(decl.fn, set()).add(decl.sit)

    def link(self) -> Model | None:
        self.register()
        self.build_properties()
        self.build_chronoids()
        self.build_presentials()
        self.build_processes()
        self.build_continuants()
        self.build_facts()
        self.build_situations()
        self.build_functions()
        self.build_assertions()
        if self.diagnostics:
            return None
        return Model(
            chronoids=self.chronoids,
            presentials=self.presentials,
            processes=self.processes,
            continuants=self.continuants,
            situations=self.situations,
            facts=self.facts,
            property_defs=self.property_defs,
            functions=self.functions,
            exe_assertions=frozenset(self.exe),
            requirement_instances={
                fn: frozenset(sits) for fn, sits in self.req_instances.items()
            },
            goal_instances={
                fn: frozenset(sits) for fn, sits in self.goal_instances.items()
            },
        )


def parse(source: str, file: str = "<input>") -> Model:
    """Parse `.gfo` source into a validated model.

    Raises :class:`ParseError` with the full diagnostic list on any lexical,
    syntactic or structural problem; a returned model always satisfies the
    store invariants.
    """
    diagnostics: list = []
    tokens = _tokenize(source, file, diagnostics)
    decls = _Parser(tokens, file, diagnostics).parse()
    model = _Linker(decls, diagnostics).link()
    if diagnostics:
        raise ParseError(diagnostics)
    assert model is not None
    return model


def parse_file(path) -> Model:
    with open(path, encoding="utf-8") as handle:
        return parse(handle.read(), file=str(path))


# ---------------------------------------------------------------------------
# Canonical serializer
# ---------------------------------------------------------------------------


def _fmt_value(value) -> str:
    return coord_str(value) if isinstance(value, Fraction) else str(value)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _time_point_ref(boundary: TimeBoundary) -> str:
    return f"{boundary.owner}@{coord_str(boundary.coordinate)}"


def serialize(m: Model) -> str:
    """Canonical text for a model: sorted declarations, normalized rationals.

    ``parse(serialize(m))`` is store-equal to ``m``, and serialization is a
    fixed point: reparsing and reserializing reproduces the bytes.
    """
    out: list = []

    for name in sorted(m.property_defs):
        pdef = m.property_defs[name]
        if pdef.domain.kind == CATEGORICAL:
            domain = "categorical { " + ", ".join(sorted(pdef.domain.symbols)) + " }"
        else:
            domain = "numeric"
        support = pdef.support.kind
        if pdef.support.kind == NON_ISOLATED:
            support = f"{NON_ISOLATED}({coord_str(pdef.support.window_radius)})"
        out.append(f"property {name} : {domain} {support};")

    for name in sorted(m.chronoids):
        ch = m.chronoids[name]
        out.append(
            f"chronoid {name} = [{coord_str(ch.left)}, {coord_str(ch.right)}];"
        )

    for name in sorted(m.presentials):
        pres = m.presentials[name]
        head = f"presential {name} at {_time_point_ref(pres.at)}"
        if not pres.material:
            head += " immaterial"
        if pres.valuation:
            out.append(head + " {")
            for prop in sorted(pres.valuation):
                out.append(f"  {prop} = {_fmt_value(pres.valuation[prop])};")
            out.append("}")
        else:
            out.append(head + ";")

    for name in sorted(m.processes):
        p = m.processes[name]
        out.append(f"process {name} extent {p.extent.id} {{")
        for t in sorted(p.boundary_map):
            out.append(f"  boundary {coord_str(t)} -> {p.boundary_map[t]};")
        for prop in sorted(p.trajectories):
            out.append(f"  trajectory {prop} {{")
            for t, value in sorted(p.trajectories[prop]):
                out.append(f"    {coord_str(t)} -> {_fmt_value(value)};")
            out.append("  }")
        out.append("}")

    for name in sorted(m.continuants):
        c = m.continuants[name]
        head = f"continuant {name} lifetime {c.lifetime.id}"
        if not c.material:
            head += " immaterial"
        out.append(head + " {")
        for t in sorted(c.exhibit_map):
            out.append(f"  exhibits {coord_str(t)} -> {c.exhibit_map[t]};")
        out.append("}")

    for name in sorted(m.facts):
        fact = m.facts[name]
        args = ", ".join(_fmt_value(a) for a in fact.args)
        out.append(f"fact {name} = {fact.relator}({args});")

    for name in sorted(m.situations):
        s = m.situations[name]
        if s.presentic:
            head = f"situation {name} at {_time_point_ref(s.extent)}"
        else:
            head = f"situation {name} during {s.extent.id}"
        if s.founded_on is not None:
            head += f" founded on {s.founded_on}"
        if s.constituents or s.participants:
            out.append(head + " {")
            for fid in sorted(s.constituents):
                out.append(f"  contains {fid};")
            for entity in sorted(s.participants):
                out.append(f"  participant {entity};")
            out.append("}")
        else:
            out.append(head + ";")

    for name in sorted(m.functions):
        fn = m.functions[name]
        head = f"function {name}"
        if fn.kind != CONCEPTUAL:
            head += f" {fn.kind}"
        if fn.bearer is not None:
            head += f" bearer {fn.bearer}"
        out.append(head + " {")
        for label in sorted(fn.labels):
            out.append(f'  label "{_escape(label)}";')
        for keyword, concept in (("requires", fn.req), ("achieves", fn.goal)):
            out.append(f"  {keyword} {{")
            for pattern in sorted(
                concept.required_facts,
                key=lambda p: (p.relator, tuple(map(str, p.args))),
            ):
                args = ", ".join(_fmt_value(a) for a in pattern.args)
                out.append(f"    fact {pattern.relator}({args});")
            for pc in sorted(
                concept.required_props, key=lambda c: (c.entity, c.prop, str(c.value))
            ):
                out.append(
                    f"    holds({pc.entity}, {pc.prop}, {_fmt_value(pc.value)});"
                )
            out.append("  }")
        if fn.fitem:
            out.append("  fitem {")
            for prop, value in fn.fitem:
                out.append(f"    {prop} = {_fmt_value(value)};")
            out.append("  }")
        out.append("}")

    for x, p in sorted(m.exe_assertions):
        out.append(f"exe({x}, {p});")
    for fn in sorted(m.requirement_instances):
        for sit in sorted(m.requirement_instances[fn]):
            out.append(f"requirement-instance({fn}, {sit});")
    for fn in sorted(m.goal_instances):
        for sit in sorted(m.goal_instances[fn]):
            out.append(f"goal-instance({fn}, {sit});")

    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Query sublanguage
# ---------------------------------------------------------------------------


def parse_query(text: str, m: Model | None = None):
    """Parse an elementary proposition.

    Forms: ``holds(subject, property, value)`` and ``fact relator(arg, ...)``
    with an optional time reference ``at <rational>`` or ``during [l, r]``
    and an optional trailing ``;``.  When a model is supplied, the property
    name of a ``holds`` proposition must be declared in it.
    """
    diagnostics: list = []
    file = "<query>"
    tokens = _tokenize(text, file, diagnostics)
    parser = _Parser(tokens, file, diagnostics)
    prop = None
    try:
        if parser.at_word("holds"):
            parser.advance()
            parser.take_punct("(")
            subject = parser.take_ident("an entity name")
            parser.take_punct(",")
            prop_name = parser.take_ident("a property name")
            parser.take_punct(",")
            value = parser.take_value()
            parser.take_punct(")")
            time_ref = _parse_time_ref(parser, diagnostics)
            if m is not None and prop_name.text not in m.property_defs:
                diagnostics.append(
                    ParseDiagnostic(
                        parser.span(prop_name),
                        "unknown-id",
                        f"property {prop_name.text!r} is not declared",
                    )
                )
            prop = HoldsProp(
                subject=subject.text,
                prop=prop_name.text,
                value=value.value,
                time_ref=time_ref,
            )
        elif parser.at_word("fact"):
            parser.advance()
            relator = parser.take_ident("a relator name")
            parser.take_punct("(")
            patterns = [parser.take_value().value]
            while parser.at_punct(","):
                parser.advance()
                patterns.append(parser.take_value().value)
            parser.take_punct(")")
            time_ref = _parse_time_ref(parser, diagnostics)
            prop = FactProp(
                relator=relator.text, patterns=tuple(patterns), time_ref=time_ref
            )
        else:
            tok = parser.peek()
            raise _Syntax(
                parser.span(tok), f"expected 'holds' or 'fact', found {tok.text!r}"
            )
        if parser.at_punct(";"):
            parser.advance()
        tok = parser.peek()
        if tok.kind != EOF:
            raise _Syntax(
                parser.span(tok), f"unexpected trailing input: {tok.text!r}"
            )
    except _Syntax as err:
        diagnostics.append(ParseDiagnostic(err.span, "unexpected-token", err.message))
    if diagnostics:
        raise ParseError(diagnostics)
    return prop


def _parse_time_ref(parser: _Parser, diagnostics: list):
    if parser.at_word("at"):
        parser.advance()
        t = parser.take_number("a coordinate")
        return AtTime(t.value)
    if parser.at_word("during"):
        parser.advance()
        parser.take_punct("[")
        left = parser.take_number("a coordinate")
        parser.take_punct(",")
        right = parser.take_number("a coordinate")
        parser.take_punct("]")
        if left.value >= right.value:
            diagnostics.append(
                ParseDiagnostic(
                    parser.span(left),
                    "zero-duration",
                    f"[{coord_str(left.value)}, {coord_str(right.value)}] "
                    "has no duration",
                )
            )
        return DuringSpan(left.value, right.value)
    return None


__all__ = [
    "DIAGNOSTIC_CODES",
    "SourceSpan",
    "ParseDiagnostic",
    "ParseError",
    "parse",
    "parse_file",
    "serialize",
    "parse_query",
]
