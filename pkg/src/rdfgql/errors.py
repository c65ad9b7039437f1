from __future__ import annotations

from typing import Optional


class RdfGqlError(Exception):
    """Base class for every error raised by this package."""


class NTriplesError(RdfGqlError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.message = message
        self.line = line


class Location(tuple):
    __slots__ = ()

    def __new__(cls, line: int, column: int):
        return super().__new__(cls, (line, column))

    @property
    def line(self) -> int:
        return self[0]

    @property
    def column(self) -> int:
        return self[1]

    def __str__(self):
        return f"{self[0]}:{self[1]}"


class SchemaError(RdfGqlError):
    """A single schema problem. ``code`` identifies the kind of violation."""

    def __init__(self, code: str, message: str, location: Optional[Location] = None):
        where = f" at {location}" if location else ""
        super().__init__(f"{code}: {message}{where}")
        self.code = code
        self.message = message
        self.location = location


class SchemaValidationError(RdfGqlError):
    def __init__(self, errors: list[SchemaError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


class QuerySyntaxError(RdfGqlError):
    def __init__(self, message: str, location: Optional[Location] = None):
        where = f" at {location}" if location else ""
        super().__init__(f"syntax error: {message}{where}")
        self.message = message
        self.location = location


class QueryValidationError(RdfGqlError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class BindingError(RdfGqlError):
    """A query touches a schema element that has no RDF term bound to it."""


class QueryTimeout(RdfGqlError):
    pass
