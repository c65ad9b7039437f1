"""Line-oriented N-Triples reader.

Blank nodes are folded into IRIs under the reserved ``_:b{n}`` namespace,
numbered in first-seen order per document.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .errors import NTriplesError

IRI = "iri"
LITERAL = "literal"

XSD = "http://www.w3.org/2001/XMLSchema#"


@dataclass(frozen=True, order=True)
class Term:
    kind: str
    lexical: str
    datatype: Optional[str] = None
    language: Optional[str] = None

    def __post_init__(self):
        if self.kind == IRI:
            if self.datatype is not None or self.language is not None:
                raise ValueError("IRIs carry no datatype or language tag")
        elif self.kind == LITERAL:
            if self.datatype is not None and self.language is not None:
                raise ValueError("a literal carries a datatype or a language tag, not both")
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")

    @classmethod
    def iri(cls, value: str) -> "Term":
        return cls(IRI, value)

    @classmethod
    def literal(cls, value: str, datatype: Optional[str] = None, language: Optional[str] = None) -> "Term":
        return cls(LITERAL, value, datatype, language)

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    def n3(self) -> str:
        if self.kind == IRI:
            return f"<{self.lexical}>"
        text = '"' + _escape(self.lexical) + '"'
        if self.language:
            return f"{text}@{self.language}"
        if self.datatype:
            return f"{text}^^<{self.datatype}>"
        return text


_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}

_IRIREF = r"<([^<>\"{}|^`\\\x00-\x20]*)>"
_BNODE = r"_:([A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)"
_LITERAL = r'"((?:[^"\\\n\r]|\\.)*)"(?:\^\^' + _IRIREF + r"|@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*))?"

_SUBJECT = re.compile(r"\s*(?:" + _IRIREF + "|" + _BNODE + ")")
_PREDICATE = re.compile(r"\s*" + _IRIREF)
_OBJECT = re.compile(r"\s*(?:" + _IRIREF + "|" + _BNODE + "|" + _LITERAL + ")")
_END = re.compile(r"\s*\.\s*(?:#.*)?$")
_WS = " \t\r\n"
_LINE_BREAK = re.compile(r"\r\n|\r|\n")
_UNICODE = re.compile(r"\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})")


_SHORT = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_NEEDS_ESCAPE = re.compile(r'[\\"\x00-\x1f\x7f\x85\u2028\u2029]')


def _escape(text: str) -> str:
    return _NEEDS_ESCAPE.sub(lambda m: _SHORT.get(m.group(), f"\\u{ord(m.group()):04X}"), text)


def _unescape_literal(text: str, lineno: int) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = text[i + 1]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
            continue
        m = _UNICODE.match(text, i)
        if not m:
            raise NTriplesError(f"bad escape sequence \\{nxt}", lineno)
        out.append(chr(int(m.group(1) or m.group(2), 16)))
        i = m.end()
    return "".join(out)


def _unescape_iri(text: str, lineno: int) -> str:
    if "\\" not in text:
        return text

    def sub(m):
        return chr(int(m.group(1) or m.group(2), 16))

    result = _UNICODE.sub(sub, text)
    if "\\" in result:
        raise NTriplesError("bad escape in IRI", lineno)
    return result


class _BlankNodes:
    def __init__(self):
        self.labels: dict[str, Term] = {}

    def __call__(self, label: str) -> Term:
        term = self.labels.get(label)
        if term is None:
            term = Term.iri(f"_:b{len(self.labels)}")
            self.labels[label] = term
        return term


def _parse_line(line: str, lineno: int, bnodes: _BlankNodes):
    m = _SUBJECT.match(line)
    if not m:
        raise NTriplesError("expected subject IRI or blank node", lineno)
    subject = Term.iri(_unescape_iri(m.group(1), lineno)) if m.group(1) is not None else bnodes(m.group(2))
    pos = m.end()

    m = _PREDICATE.match(line, pos)
    if not m:
        raise NTriplesError("expected predicate IRI", lineno)
    predicate = Term.iri(_unescape_iri(m.group(1), lineno))
    pos = m.end()

    m = _OBJECT.match(line, pos)
    if not m:
        raise NTriplesError("expected object term", lineno)
    iri, bnode, lexical, datatype, lang = m.groups()
    if iri is not None:
        obj = Term.iri(_unescape_iri(iri, lineno))
    elif bnode is not None:
        obj = bnodes(bnode)
    else:
        dt = _unescape_iri(datatype, lineno) if datatype is not None else None
        obj = Term.literal(_unescape_literal(lexical, lineno), dt, lang.lower() if lang else None)
    pos = m.end()

    if not _END.match(line, pos):
        raise NTriplesError("expected '.' terminating the statement", lineno)
    return subject, predicate, obj


def parse_ntriples(source: Union[str, bytes, Iterable[str], Iterable[bytes]]) -> Iterator[tuple[Term, Term, Term]]:
    """Yield ``(subject, predicate, object)`` terms in input order.

    ``source`` may be a whole document (text or UTF-8 bytes) or an iterable of
    lines such as an open file. A malformed line raises ``NTriplesError``
    carrying its 1-based line number; nothing is yielded for that line.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    # only LF and CR end a line; str.splitlines would also split on FF, NEL and others
    lines = _LINE_BREAK.split(source) if isinstance(source, str) else source
    bnodes = _BlankNodes()
    for lineno, line in enumerate(lines, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        stripped = line.strip(_WS)
        if not stripped or stripped.startswith("#"):
            continue
        yield _parse_line(stripped, lineno, bnodes)


def serialize_ntriples(triples: Iterable[tuple[Term, Term, Term]]) -> str:
    return "".join(f"{s.n3()} {p.n3()} {o.n3()} .\n" for s, p, o in triples)
