"""Tokenizer shared by the ontology, scene, rule, source and expectation formats.

All formats use the same lexical conventions: ``#`` starts a comment that runs
to the end of the line, strings are double-quoted with ``\\"`` and ``\\\\`` as
the only escapes, variables are ``?name``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .errors import ParseError

IDENT = "IDENT"
VAR = "VAR"
STRING = "STRING"
INT = "INT"
PUNCT = "PUNCT"
NEWLINE = "NEWLINE"
EOF = "EOF"

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r﻿]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<string>"(?:[^"\\\n]|\\["\\])*")
  | (?P<var>\?[A-Za-z][A-Za-z0-9_]*)
  | (?P<int>-?[0-9]+(?![\w]))
  | (?P<ident>[^\W\d][\w.\-]*)
  | (?P<punct>[(),&:=])
""", re.VERBOSE)

_ESCAPE_RE = re.compile(r'\\(["\\])')


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int

    def describe(self) -> str:
        if self.kind in (NEWLINE, EOF):
            return "end of line" if self.kind == NEWLINE else "end of input"
        return repr(self.value)


def unescape(body: str) -> str:
    return _ESCAPE_RE.sub(r"\1", body)


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tokenize(text: str, source: str = "") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            if text[pos] == '"':
                raise ParseError("unterminated string", line, column, source=source)
            raise ParseError(f"unexpected character {text[pos]!r}", line, column, source=source)
        kind = m.lastgroup
        raw = m.group()
        if kind == "newline":
            tokens.append(Token(NEWLINE, "\n", line, column))
            line += 1
            line_start = m.end()
        elif kind == "string":
            tokens.append(Token(STRING, unescape(raw[1:-1]), line, column))
        elif kind == "var":
            tokens.append(Token(VAR, raw, line, column))
        elif kind == "int":
            tokens.append(Token(INT, raw, line, column))
        elif kind == "ident":
            tokens.append(Token(IDENT, raw, line, column))
        elif kind == "punct":
            tokens.append(Token(PUNCT, raw, line, column))
        pos = m.end()
    tokens.append(Token(EOF, "", line, pos - line_start + 1))
    return tokens


class TokenStream:
    """Cursor over a token list with expected-set error reporting."""

    def __init__(self, tokens: list[Token], source: str = "", skip_newlines: bool = False):
        if skip_newlines:
            tokens = [t for t in tokens if t.kind != NEWLINE]
        self.tokens = tokens
        self.pos = 0
        self.source = source

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek
        return tok.kind == kind and (value is None or tok.value == value)

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        if self.at(kind, value):
            return self.next()
        return None

    def expect(self, kind: str, value: str | None = None, what: str | None = None) -> Token:
        if self.at(kind, value):
            return self.next()
        self.fail({what or value or kind})

    def fail(self, expected: set[str], message: str | None = None):
        tok = self.peek
        raise ParseError(message or f"unexpected {tok.describe()}", tok.line, tok.column,
                         expected, source=self.source)


def logical_lines(text: str, source: str = "") -> Iterator[list[Token]]:
    """Yield the non-empty token lines of ``text`` (without NEWLINE tokens)."""
    current: list[Token] = []
    for tok in tokenize(text, source):
        if tok.kind in (NEWLINE, EOF):
            if current:
                yield current + [Token(EOF, "", tok.line, tok.column)]
            current = []
        else:
            current.append(tok)
