"""Tokenizer and recursive-descent parser for .ocl constraint documents.

Grammar (binding from loosest to tightest)::

    document      := { "context" Ident { "inv" [Ident] ":" expr } }
    expr          := implies
    implies       := xor { "implies" xor }
    xor           := or { "xor" or }
    or            := and { "or" and }
    and           := equality { "and" equality }
    equality      := relational { ("=" | "<>") relational }
    relational    := additive { ("<" | "<=" | ">" | ">=") additive }
    additive      := multiplicative { ("+" | "-") multiplicative }
    multiplicative:= unary { ("*" | "/") unary }
    unary         := ("not" | "-") unary | postfix
    postfix       := primary { "." Ident | "->" call }
    call          := IterKind "(" [Ident "|"] expr ")" | OpKind "(" [expr] ")"
    primary       := literal | "self" | Ident [".allInstances()"]
                   | "Sequence" "{" [expr {"," expr}] "}"
                   | "(" expr ")" | "if" expr "then" expr "else" expr "endif"
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import OvcError
from .ast import (
    COLLECTION_OPS,
    COLLECTION_OPS_WITH_ARG,
    ITERATOR_KINDS,
    AllInstances,
    Binary,
    CollectionLiteral,
    CollectionOp,
    ConstraintDocument,
    Expr,
    IfThenElse,
    Invariant,
    IteratorCall,
    Literal,
    Nav,
    SelfRef,
    Unary,
    VarRef,
)

KEYWORDS = {
    "context", "inv", "self", "if", "then", "else", "endif",
    "and", "or", "xor", "implies", "not", "true", "false",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<real>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<string>'(?:[^'\\\n]|\\.)*')
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|<>|<=|>=|[=<>+\-*/().:|,{}])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", "'": "'", "\\": "\\"}


class ParseError(OvcError):
    def __init__(self, message: str, line: int, column: int, expected: frozenset[str] = frozenset()) -> None:
        self.line = line
        self.column = column
        self.expected = expected
        suffix = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{line}:{column}: {message}{suffix}")


class DuplicateInvariant(OvcError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # int, real, string, ident, keyword, op, eof
    text: str
    line: int
    column: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.column)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, index = 1, 0, 0
    while index < len(text):
        match = _TOKEN_RE.match(text, index)
        column = index - line_start + 1
        if match is None:
            raise ParseError(f"unexpected character {text[index]!r}", line, column)
        kind = match.lastgroup
        lexeme = match.group()
        if kind == "ident" and lexeme in KEYWORDS:
            kind = "keyword"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, lexeme, line, column))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = index + lexeme.rindex("\n") + 1
        index = match.end()
    column = index - line_start + 1
    tokens.append(Token("eof", "", line, column))
    return tokens


def _unquote(lexeme: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), lexeme[1:-1])


_BINARY_LEVELS: list[tuple[str, ...]] = [
    ("implies",),
    ("xor",),
    ("or",),
    ("and",),
    ("=", "<>"),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/"),
]


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.tok
        if token.kind != "eof":
            self.index += 1
        return token

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "keyword") and self.tok.text in texts

    def fail(self, expected: set[str] | frozenset[str], what: str | None = None) -> ParseError:
        found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
        return ParseError(what or f"unexpected {found}", self.tok.line, self.tok.column, frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail({text})
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.fail({"identifier"})
        return self.advance()

    # -- document ---------------------------------------------------------

    def document(self, source: str) -> ConstraintDocument:
        invariants: list[Invariant] = []
        while self.tok.kind != "eof":
            self.expect("context")
            context = self.expect_ident().text
            if not self.at("inv"):
                raise self.fail({"inv"})
            while self.at("inv"):
                inv_tok = self.advance()
                if self.tok.kind == "ident":
                    name = self.advance().text
                else:
                    name = f"{context}_inv{len(invariants) + 1}"
                self.expect(":")
                body = self.expr()
                invariants.append(Invariant(context, name, body, pos=inv_tok.pos))
            if self.tok.kind != "eof" and not self.at("context"):
                raise self.fail({"context", "inv", "<operator>"})
        seen: set[tuple[str, str]] = set()
        for inv in invariants:
            key = (inv.context_class, inv.name)
            if key in seen:
                raise DuplicateInvariant(f"invariant {inv.name!r} declared twice for context {inv.context_class!r}")
            seen.add(key)
        return ConstraintDocument(source, tuple(invariants))

    # -- expressions ------------------------------------------------------

    def expr(self) -> Expr:
        return self.binary(0)

    def binary(self, level: int) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        lhs = self.binary(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.at(*ops):
            op_tok = self.advance()
            rhs = self.binary(level + 1)
            lhs = Binary(op_tok.text, lhs, rhs, pos=op_tok.pos)
        return lhs

    def unary(self) -> Expr:
        if self.at("not"):
            op_tok = self.advance()
            return Unary("not", self.unary(), pos=op_tok.pos)
        if self.at("-"):
            op_tok = self.advance()
            nxt = self.peek()
            if self.tok.kind in ("int", "real") and not (nxt.kind == "op" and nxt.text in (".", "->")):
                number = self.advance()
                value = int(number.text) if number.kind == "int" else float(number.text)
                return Literal(-value, pos=op_tok.pos)
            return Unary("-", self.unary(), pos=op_tok.pos)
        return self.postfix()

    def postfix(self) -> Expr:
        expr = self.primary()
        while True:
            if self.at("."):
                dot = self.advance()
                name = self.expect_ident()
                expr = Nav(expr, name.text, pos=dot.pos)
            elif self.at("->"):
                arrow = self.advance()
                expr = self.call(expr, arrow)
            else:
                return expr

    def call(self, receiver: Expr, arrow: Token) -> Expr:
        name_tok = self.tok
        if name_tok.kind != "ident" or name_tok.text not in ITERATOR_KINDS + COLLECTION_OPS:
            raise self.fail(set(ITERATOR_KINDS + COLLECTION_OPS))
        self.advance()
        self.expect("(")
        kind = name_tok.text
        if kind in ITERATOR_KINDS:
            var = None
            if self.tok.kind == "ident" and self.peek().kind == "op" and self.peek().text == "|":
                var = self.advance().text
                self.advance()
            body = self.expr()
            self.expect(")")
            return IteratorCall(receiver, kind, var, body, pos=arrow.pos)
        arg = None
        if kind in COLLECTION_OPS_WITH_ARG:
            arg = self.expr()
        self.expect(")")
        return CollectionOp(receiver, kind, arg, pos=arrow.pos)

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return Literal(int(tok.text), pos=tok.pos)
        if tok.kind == "real":
            self.advance()
            return Literal(float(tok.text), pos=tok.pos)
        if tok.kind == "string":
            self.advance()
            return Literal(_unquote(tok.text), pos=tok.pos)
        if self.at("true", "false"):
            self.advance()
            return Literal(tok.text == "true", pos=tok.pos)
        if self.at("self"):
            self.advance()
            return SelfRef(pos=tok.pos)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if self.at("if"):
            self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            else_ = self.expr()
            self.expect("endif")
            return IfThenElse(cond, then, else_, pos=tok.pos)
        if tok.kind == "ident":
            self.advance()
            if tok.text == "Sequence" and self.at("{"):
                return self.collection_literal(tok)
            if self.at(".") and self.peek().kind == "ident" and self.peek().text == "allInstances":
                self.advance()
                self.advance()
                self.expect("(")
                self.expect(")")
                return AllInstances(tok.text, pos=tok.pos)
            return VarRef(tok.text, pos=tok.pos)
        raise self.fail({"literal", "identifier", "self", "(", "if", "not", "-"})

    def collection_literal(self, start: Token) -> Expr:
        self.expect("{")
        items = []
        if not self.at("}"):
            items.append(self.expr())
            while self.at(","):
                self.advance()
                items.append(self.expr())
        self.expect("}")
        return CollectionLiteral(tuple(items), pos=start.pos)


def parse(text: str) -> ConstraintDocument:
    """Parse a constraint document; raises ParseError or DuplicateInvariant."""
    return _Parser(text).document(text)


def parse_expr(text: str) -> Expr:
    """Parse a single standalone expression."""
    parser = _Parser(text)
    expr = parser.expr()
    if parser.tok.kind != "eof":
        raise parser.fail({"<operator>", "end of input"})
    return expr
