"""Source generation: diamond proxy, facets, storage libraries, shared library, manifest."""

from .generate import (
    GeneratedBundle, check_bundle, emit_manifest, generate_bundle, generate_diamond, generate_facet,
    generate_shared_lib, generate_storage_lib, manifest_json, storage_lib_name, write_bundle,
)
from .printer import print_function, print_unit

__all__ = [
    "GeneratedBundle", "check_bundle", "emit_manifest", "generate_bundle", "generate_diamond", "generate_facet",
    "generate_shared_lib", "generate_storage_lib", "manifest_json", "print_function", "print_unit",
    "storage_lib_name", "write_bundle",
]
