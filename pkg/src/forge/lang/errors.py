from __future__ import annotations


class LangError(Exception):
    """Base class for front-end errors."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


class ParseError(LangError):
    pass


class DuplicateDeclaration(LangError):
    pass


class UnknownIdentifier(LangError):
    pass


class UnknownPredicate(LangError):
    pass


class TypeError_(LangError):
    """A single ill-typed node. Collected, never raised alone."""


class TypeErrors(LangError):
    def __init__(self, errors: list[TypeError_]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors))
