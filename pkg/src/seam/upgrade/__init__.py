"""Upgrade lifecycle: compatibility checks, diamondCut plans, changelog and reverts."""

from .abi import AbiError, decode, encode
from .changelog import (
    append_changelog,
    empty_changelog,
    entry_at,
    fold,
    load_changelog,
    make_entry,
    record_upgrade,
    revert_plan,
    save_changelog,
    verify_changelog,
)
from .compat import CompatibilityReport, diff_layouts, validate_upgrade
from .cuts import ADD, REMOVE, REPLACE, ZERO_ADDRESS, FacetCut, apply_cuts, diff_maps, diff_selectors, placeholder
from .manifest import load_manifest, manifest_fingerprint, selector_map
from .plan import decode_diamond_cut, emit_deployment_plan, encode_diamond_cut, render_calldata

__all__ = [
    "ADD", "REPLACE", "REMOVE", "ZERO_ADDRESS", "AbiError", "CompatibilityReport", "FacetCut",
    "append_changelog", "apply_cuts", "decode", "decode_diamond_cut", "diff_layouts", "diff_maps",
    "diff_selectors", "emit_deployment_plan", "empty_changelog", "encode", "encode_diamond_cut", "entry_at",
    "fold", "load_changelog", "load_manifest", "make_entry", "manifest_fingerprint", "placeholder",
    "record_upgrade", "render_calldata", "revert_plan", "save_changelog", "selector_map", "validate_upgrade",
    "verify_changelog",
]
