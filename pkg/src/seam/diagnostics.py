"""Diagnostic records and the exception hierarchy shared by every stage."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

ERROR = "error"
WARNING = "warning"
INFO = "info"

_SEVERITY_RANK = {ERROR: 0, WARNING: 1, INFO: 2}


@dataclass(frozen=True)
class Pos:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass
class Diagnostic:
    code: str
    severity: str
    message: str
    positions: list[Pos] = field(default_factory=list)
    suggestion: dict[str, Any] | None = None
    details: dict[str, Any] | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def to_json(self) -> dict[str, Any]:
        first = self.positions[0] if self.positions else None
        out: dict[str, Any] = {
            "code": self.code,
            "severity": self.severity,
            "message": self.message,
            "line": first.line if first else None,
            "column": first.column if first else None,
            "positions": [{"line": p.line, "column": p.column} for p in self.positions],
        }
        if self.suggestion is not None:
            out["suggestion"] = self.suggestion
        if self.details is not None:
            out["details"] = self.details
        return out

    def render(self, path: str = "") -> str:
        loc = f"{path}:{self.positions[0]}" if self.positions else path
        prefix = f"{loc}: " if loc else ""
        text = f"{prefix}{self.severity}[{self.code}]: {self.message}"
        if self.suggestion and "text" in self.suggestion:
            text += f"\n    suggestion: {self.suggestion['text']}"
        return text


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    def key(d: Diagnostic):
        p = d.positions[0] if d.positions else Pos(0, 0)
        return (_SEVERITY_RANK.get(d.severity, 3), p.line, p.column, d.code, d.message)

    return sorted(diags, key=key)


def diagnostics_json(diags: list[Diagnostic]) -> str:
    return json.dumps({"diagnostics": [d.to_json() for d in diags]}, indent=2, sort_keys=True)


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.is_error for d in diags)


class SeamError(Exception):
    """Base class. Subclasses set ``code`` for their diagnostic form."""

    code = "SEAM_ERROR"

    def __init__(self, message: str, pos: Pos | None = None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    def to_diagnostic(self) -> Diagnostic:
        return Diagnostic(self.code, ERROR, self.message, [self.pos] if self.pos else [])

    def __str__(self) -> str:
        return f"{self.pos}: {self.message}" if self.pos else self.message


class SourceSyntaxError(SeamError):
    code = "SYNTAX_ERROR"

    def __init__(self, message: str, pos: Pos | None = None, expected: tuple[str, ...] = ()):
        super().__init__(message, pos)
        self.expected = expected


class UnsupportedConstruct(SeamError):
    code = "UNSUPPORTED_CONSTRUCT"

    def __init__(self, construct: str, pos: Pos | None = None):
        super().__init__(f"unsupported construct: {construct}", pos)
        self.construct = construct


class UnresolvedIdentifier(SeamError):
    code = "UNRESOLVED_IDENTIFIER"

    def __init__(self, name: str, pos: Pos | None = None):
        super().__init__(f"unresolved identifier '{name}'", pos)
        self.name = name


class DuplicateDeclaration(SeamError):
    code = "DUPLICATE_DECLARATION"

    def __init__(self, name: str, pos: Pos | None = None, detail: str = ""):
        super().__init__(f"duplicate declaration of '{name}'" + (f" ({detail})" if detail else ""), pos)
        self.name = name


class RecursiveStruct(SeamError):
    code = "RECURSIVE_STRUCT"


class UnknownType(SeamError):
    code = "UNKNOWN_TYPE"


class EmptyNamespace(SeamError):
    code = "EMPTY_NAMESPACE"


class MalformedSignature(SeamError):
    code = "MALFORMED_SIGNATURE"


class Unresolvable(SeamError):
    code = "UNRESOLVABLE_CLASH"


class UnsupportedUsage(SeamError):
    code = "UNSUPPORTED_USAGE"


class FacetMapError(SeamError):
    code = "FACET_MAP_ERROR"


class InternalRewriteError(SeamError):
    code = "INTERNAL_REWRITE_ERROR"


class SchemaError(SeamError):
    code = "SCHEMA_ERROR"


class ClashInNew(SeamError):
    code = "CLASH_IN_NEW"


class UnresolvedPlaceholder(SeamError):
    code = "UNRESOLVED_PLACEHOLDER"


class OversizeSelectorList(SeamError):
    code = "OVERSIZE_SELECTOR_LIST"


class VersionGap(SeamError):
    code = "VERSION_GAP"


class ForkDetected(SeamError):
    code = "FORK_DETECTED"


class UnknownVersion(SeamError):
    code = "UNKNOWN_VERSION"


class InvalidCut(SeamError):
    code = "INVALID_CUT"


class IrreversibleUpgrade(SeamError):
    code = "IRREVERSIBLE_UPGRADE"
