"""A small condition language over pair types, compiled to invariant relations.

Grammar, loosest binding first::

    expr  := conj ("or" conj)*
    conj  := neg ("and" neg)*
    neg   := "not" neg | cmp
    cmp   := sum [("=" | "!=" | "<" | "<=" | ">" | ">=") sum]
    sum   := atom ("+" atom)*
    atom  := INT | VAR | "omega" | "(" expr ")"

Variables are a, b, c, d, n, x, y, sd, csd.  ``omega`` exceeds every finite
term and equals itself.  Unicode ≠ ≤ ≥ ω are accepted.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .relations import InvariantRelation, ValidationReport, from_predicate, validate
from .universe import PairType, orbit_types

VARIABLES = ("a", "b", "c", "d", "n", "x", "y", "sd", "csd")
KEYWORDS = ("and", "or", "not", "omega")
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")
_UNICODE_OPS = {"≠": "!=", "≤": "<=", "≥": ">="}


class DSLError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message, self.line, self.col = message, line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


class DSLSyntaxError(DSLError):
    pass


class DSLNameError(DSLSyntaxError):
    """Unknown identifier."""


class DSLTypeError(DSLError):
    """Arithmetic used where a condition is expected, or the reverse."""


class DSLCompileError(DSLError):
    """The condition does not define an equivalence relation at the requested n."""

    def __init__(self, message: str, report: ValidationReport):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Token:
    kind: str  # int, name, op, lparen, rparen, eof
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\f]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<int>\d+)|(?P<name>[A-Za-z_]\w*|ω)"
    r"|(?P<op><=|>=|!=|[=<>+≠≤≥])|(?P<lparen>\()|(?P<rparen>\))"
)


def tokenize(text: str) -> list[Token]:
    out, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind, tok = m.lastgroup, m.group()
        col = pos - line_start + 1
        pos = m.end()
        if kind == "nl":
            line, line_start = line + 1, pos
        elif kind in ("ws", "comment"):
            continue
        elif kind == "op":
            out.append(Token("op", _UNICODE_OPS.get(tok, tok), line, col))
        elif kind == "name" and tok == "ω":
            out.append(Token("name", "omega", line, col))
        else:
            out.append(Token(kind, tok, line, col))
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# AST.  Positions are kept for error messages but ignored by equality.


@dataclass(frozen=True)
class Num:
    value: int
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Omega:
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Cmp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    operand: "Expr"
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


Expr = Union[Num, Omega, Var, Add, Cmp, Not, And, Or]
_TERMS = (Num, Omega, Var, Add)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, t: Optional[Token] = None):
        t = t or self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise DSLSyntaxError(f"{msg}, found {found}", t.line, t.col)

    def is_word(self, w: str) -> bool:
        return self.tok.kind == "name" and self.tok.text == w

    def parse(self) -> Expr:
        e = self.disjunction()
        if self.tok.kind != "eof":
            self.error("expected 'and', 'or' or end of input")
        return e

    def disjunction(self) -> Expr:
        e = self.conjunction()
        while self.is_word("or"):
            t = self.advance()
            e = Or(e, self.conjunction(), (t.line, t.col))
        return e

    def conjunction(self) -> Expr:
        e = self.negation()
        while self.is_word("and"):
            t = self.advance()
            e = And(e, self.negation(), (t.line, t.col))
        return e

    def negation(self) -> Expr:
        if self.is_word("not"):
            t = self.advance()
            return Not(self.negation(), (t.line, t.col))
        return self.comparison()

    def comparison(self) -> Expr:
        e = self.sum()
        if self.tok.kind == "op" and self.tok.text in CMP_OPS:
            t = self.advance()
            e = Cmp(t.text, e, self.sum(), (t.line, t.col))
            if self.tok.kind == "op" and self.tok.text in CMP_OPS:
                self.error("comparisons do not chain; add parentheses or 'and'")
        return e

    def sum(self) -> Expr:
        e = self.atom()
        while self.tok.kind == "op" and self.tok.text == "+":
            t = self.advance()
            e = Add(e, self.atom(), (t.line, t.col))
        return e

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Num(int(t.text), (t.line, t.col))
        if t.kind == "name":
            if t.text == "omega":
                self.advance()
                return Omega((t.line, t.col))
            if t.text in VARIABLES:
                self.advance()
                return Var(t.text, (t.line, t.col))
            if t.text in KEYWORDS:
                self.error("expected a term")
            raise DSLNameError(f"unknown identifier {t.text!r}; variables are {', '.join(VARIABLES)}", t.line, t.col)
        if t.kind == "lparen":
            self.advance()
            e = self.disjunction()
            if self.tok.kind != "rparen":
                self.error("expected ')'")
            self.advance()
            return e
        self.error("expected a term")


def _typecheck(e: Expr, want_bool: bool) -> None:
    is_term = isinstance(e, _TERMS)
    if want_bool and is_term:
        raise DSLTypeError("expected a condition, found an arithmetic term", *e.pos)
    if not want_bool and not is_term:
        raise DSLTypeError("expected an arithmetic term, found a condition", *e.pos)
    if isinstance(e, Add):
        _typecheck(e.left, False)
        _typecheck(e.right, False)
    elif isinstance(e, Cmp):
        _typecheck(e.left, False)
        _typecheck(e.right, False)
    elif isinstance(e, Not):
        _typecheck(e.operand, True)
    elif isinstance(e, (And, Or)):
        _typecheck(e.left, True)
        _typecheck(e.right, True)


def parse(text: str) -> Expr:
    """Parse and type-check a condition."""
    e = _Parser(tokenize(text)).parse()
    _typecheck(e, True)
    return e


def to_source(e: Expr) -> str:
    """Canonical text; ``parse(to_source(e)) == e``."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Omega):
        return "omega"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        right = to_source(e.right)
        return f"{to_source(e.left)} + {'(' + right + ')' if isinstance(e.right, Add) else right}"
    if isinstance(e, Cmp):
        return f"{to_source(e.left)} {e.op} {to_source(e.right)}"
    if isinstance(e, Not):
        inner = to_source(e.operand)
        return f"not ({inner})" if isinstance(e.operand, (And, Or)) else f"not {inner}"
    if isinstance(e, And):
        left = _wrap(e.left, Or)
        right = _wrap(e.right, (And, Or))
        return f"{left} and {right}"
    if isinstance(e, Or):
        return f"{to_source(e.left)} or {_wrap(e.right, Or)}"
    raise TypeError(f"not an expression: {e!r}")


def _wrap(e: Expr, kinds) -> str:
    s = to_source(e)
    return f"({s})" if isinstance(e, kinds) else s


def evaluate(e: Expr, t: PairType):
    """Value of ``e`` at pair type ``t``: an int, ``math.inf`` for omega, or a bool."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Omega):
        return math.inf
    if isinstance(e, Var):
        return t.n if e.name == "n" else getattr(t, e.name)
    if isinstance(e, Add):
        return evaluate(e.left, t) + evaluate(e.right, t)
    if isinstance(e, Cmp):
        l, r = evaluate(e.left, t), evaluate(e.right, t)
        return {"=": l == r, "!=": l != r, "<": l < r, "<=": l <= r, ">": l > r, ">=": l >= r}[e.op]
    if isinstance(e, Not):
        return not evaluate(e.operand, t)
    if isinstance(e, And):
        return evaluate(e.left, t) and evaluate(e.right, t)
    if isinstance(e, Or):
        return evaluate(e.left, t) or evaluate(e.right, t)
    raise TypeError(f"not an expression: {e!r}")


def types_satisfying(e: Expr, n: int) -> frozenset[PairType]:
    return frozenset(t for t in orbit_types(n) if evaluate(e, t))


def compile(e: Expr | str, n: int, name: Optional[str] = None) -> InvariantRelation:
    """The relation whose pair types satisfy ``e`` at n; rejected unless it is an equivalence."""
    if isinstance(e, str):
        e = parse(e)
    types = types_satisfying(e, n)
    report = validate(types, n)
    if not report.ok:
        raise DSLCompileError(f"not an equivalence relation at n={n}: {report.describe()}", report)
    return from_predicate(n, lambda t: t in types, name)


_NAME_RE = re.compile(r"^\s*#\s*name\s*:\s*(.*?)\s*$")


@dataclass(frozen=True)
class RelFile:
    name: Optional[str]
    expr: Expr
    source: str


def load_rel(text: str) -> RelFile:
    """Read the .rel format: an optional ``# name:`` header, then one expression."""
    name = None
    for line in text.splitlines():
        m = _NAME_RE.match(line)
        if m:
            name = m.group(1) or None
            break
        if line.strip() and not line.lstrip().startswith("#"):
            break
    return RelFile(name, parse(text), text)


def dump_rel(expr: Expr, name: Optional[str] = None) -> str:
    head = f"# name: {name}\n" if name else ""
    return head + to_source(expr) + "\n"

