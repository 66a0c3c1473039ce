"""Shipped JSON schemas and validation helpers."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
from referencing import Registry, Resource

from ..diagnostics import SchemaError

NAMES = ("manifest", "changelog", "plan", "diagnostics", "report")
_BASE = "https://seam.invalid/schemas/"


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in NAMES:
        raise KeyError(name)
    text = resources.files(__package__).joinpath(f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


@lru_cache(maxsize=None)
def _registry() -> Registry:
    return Registry().with_resources(
        (_BASE + f"{n}.schema.json", Resource.from_contents(load_schema(n))) for n in NAMES
    )


@lru_cache(maxsize=None)
def _validator(name: str):
    schema = load_schema(name)
    cls = jsonschema.validators.validator_for(schema)
    return cls(schema, registry=_registry())


def validate(instance, name: str, what: str = "") -> None:
    """Raise SchemaError naming the first violation (path and reason)."""
    errors = sorted(_validator(name).iter_errors(instance), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SchemaError(f"{what or name} is not valid: at {where}: {e.message}")


def is_valid(instance, name: str) -> bool:
    return _validator(name).is_valid(instance)
