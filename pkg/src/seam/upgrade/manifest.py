"""Manifest loading, fingerprints and selector maps."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from ..diagnostics import SchemaError
from ..hashing import keccak256
from ..schemas import validate

# selector hex → facet reference ("Name#codeHash")
SelectorMap = dict[str, str]


def load_manifest(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    check_manifest(data, str(path))
    return data


def check_manifest(data: dict, what: str = "manifest") -> None:
    validate(data, "manifest", what)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def manifest_fingerprint(manifest: dict) -> str:
    """keccak256 of the canonical manifest without ``toolVersion``."""
    body = {k: v for k, v in manifest.items() if k != "toolVersion"}
    return "0x" + keccak256(canonical_json(body).encode("utf-8")).hex()


def facet_ref(facet: dict) -> str:
    """Identity of one facet build: its name plus the hash of its code (or layout, if no source hash)."""
    return f"{facet['name']}#{facet.get('sourceHash') or facet['layoutFingerprint']}"


def ref_name(ref: str) -> str:
    return ref.split("#", 1)[0]


def selector_map(manifest: Optional[dict]) -> SelectorMap:
    if manifest is None:
        return {}
    out: SelectorMap = {}
    for facet in manifest["facets"]:
        ref = facet_ref(facet)
        for s in facet["selectors"]:
            out[s["selector"]] = ref
    return out


def signature_index(*manifests: Optional[dict]) -> dict[str, str]:
    """selector hex → signature over the given manifests (later ones win)."""
    out: dict[str, str] = {}
    for m in manifests:
        if m is None:
            continue
        for s in m.get("diamondCore", {}).get("selectors", []):
            out[s["selector"]] = s["signature"]
        for f in m["facets"]:
            for s in f["selectors"]:
                out[s["selector"]] = s["signature"]
    return out


def selector_owners(manifest: dict) -> dict[str, list[tuple[str, str]]]:
    """selector hex → [(facet name or "Diamond", signature)] including the diamond core."""
    owners: dict[str, list[tuple[str, str]]] = {}
    core = manifest.get("diamondCore") or {}
    for s in core.get("selectors", []):
        owners.setdefault(s["selector"], []).append((core.get("name", "Diamond"), s["signature"]))
    for f in manifest["facets"]:
        for s in f["selectors"]:
            owners.setdefault(s["selector"], []).append((f["name"], s["signature"]))
    return owners


def manifest_clashes(manifest: dict) -> dict[str, list[tuple[str, str]]]:
    return {sel: who for sel, who in sorted(selector_owners(manifest).items()) if len(who) > 1}


def facet_by_name(manifest: Optional[dict], name: str) -> Optional[dict]:
    if manifest is None:
        return None
    return next((f for f in manifest["facets"] if f["name"] == name), None)
