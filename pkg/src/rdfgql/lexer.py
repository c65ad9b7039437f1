"""Tokenizer shared by the SDL and query parsers."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import Location

NAME = "name"
STRING = "string"
INT = "int"
FLOAT = "float"
PUNCT = "punct"
EOF = "eof"

_TOKEN = re.compile(
    r"""
    (?P<ws>[\s,﻿]+|\#[^\n]*)
  | (?P<block>\"\"\"(?:[^"\\]|\\.|"(?!""))*\"\"\")
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<float>-?(?:0|[1-9][0-9]*)(?:\.[0-9]+[eE][+-]?[0-9]+|\.[0-9]+|[eE][+-]?[0-9]+))
  | (?P<int>-?(?:0|[1-9][0-9]*))
  | (?P<name>[_A-Za-z][_0-9A-Za-z]*)
  | (?P<punct>\.\.\.|[!$&()\[\]{}:=@|.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    location: Location


def tokenize(text: str, error: Callable[[str, Location], Exception]) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        loc = Location(line, pos - line_start + 1)
        if not m:
            raise error(f"unexpected character {text[pos]!r}", loc)
        kind = m.lastgroup
        raw = m.group()
        if kind == "string":
            try:
                value = json.loads(raw)
            except ValueError:
                raise error("invalid string literal", loc) from None
            tokens.append(Token(STRING, value, loc))
        elif kind == "block":
            tokens.append(Token(STRING, raw[3:-3].replace('\\"""', '"""'), loc))
        elif kind != "ws":
            tokens.append(Token(kind, raw, loc))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            line_start = pos + raw.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token(EOF, "", Location(line, pos - line_start + 1)))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token], error: Callable[[str, Location], Exception]):
        self.tokens = tokens
        self.pos = 0
        self.error = error

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        tok = self.current
        return tok.kind == kind and (value is None or tok.value == value)

    def at_punct(self, value: str) -> bool:
        return self.at(PUNCT, value)

    def advance(self) -> Token:
        tok = self.current
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def accept(self, kind: str, value: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, value):
            return self.advance()
        return None

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        if not self.at(kind, value):
            want = repr(value) if value is not None else kind
            got = repr(self.current.value) if self.current.kind != EOF else "end of input"
            raise self.fail(f"expected {want}, found {got}")
        return self.advance()

    def fail(self, message: str, location: Optional[Location] = None) -> Exception:
        return self.error(message, location or self.current.location)
