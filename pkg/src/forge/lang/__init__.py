"""Front end for the annotated mini-language."""

from .ast import *  # noqa: F401,F403
from .errors import (
    DuplicateDeclaration,
    LangError,
    ParseError,
    TypeErrors,
    UnknownIdentifier,
    UnknownPredicate,
)
from .normalize import formula_key, normalize
from .parser import parse_formula, parse_program
from .predicates import LIBRARY, PredicateDef
from .printer import show, show_program
from .typecheck import subexpressions, type_of, typecheck

__all__ = [
    "DuplicateDeclaration",
    "LIBRARY",
    "LangError",
    "ParseError",
    "PredicateDef",
    "TypeErrors",
    "UnknownIdentifier",
    "UnknownPredicate",
    "formula_key",
    "normalize",
    "parse_formula",
    "parse_program",
    "show",
    "show_program",
    "subexpressions",
    "type_of",
    "typecheck",
]
