"""Lexing, parsing and resolution of the supported Solidity subset."""

from .ast import SourceUnit
from .parser import parse
from .resolver import resolve
from .types import TypeDescriptor


def load(source_text: str, *, extended: bool = False, imported=None) -> SourceUnit:
    """Parse and resolve in one step."""
    return resolve(parse(source_text, extended=extended), imported)


__all__ = ["SourceUnit", "TypeDescriptor", "load", "parse", "resolve"]
