"""The version changelog: an append-only, fingerprint-chained record of cuts.

Each entry records the cuts that took the previous version to this one, the
fingerprint of the resulting manifest and (for revert planning) a snapshot of
that manifest. Timestamps are kept for people but excluded from fingerprints.
Folding the cuts of entries 1..k reproduces the selector map of version k.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from ..diagnostics import (
    ERROR,
    Diagnostic,
    ForkDetected,
    InvalidCut,
    IrreversibleUpgrade,
    SchemaError,
    UnknownVersion,
    VersionGap,
)
from ..hashing import keccak256
from ..schemas import validate
from .compat import diff_layouts
from .cuts import FacetCut, apply_cuts, diff_maps, diff_selectors, placeholder
from .manifest import SelectorMap, canonical_json, manifest_fingerprint, ref_name, selector_map
from .plan import emit_deployment_plan

CHANGELOG_SCHEMA_VERSION = 1


def empty_changelog(contract_name: Optional[str] = None) -> dict:
    return {"schemaVersion": CHANGELOG_SCHEMA_VERSION, "contractName": contract_name, "entries": []}


def check_changelog(log: dict, what: str = "changelog") -> None:
    validate(log, "changelog", what)


def load_changelog(path: str | Path, *, missing_ok: bool = True) -> dict:
    p = Path(path)
    if not p.exists():
        if missing_ok:
            return empty_changelog()
        raise SchemaError(f"{path}: no such changelog")
    try:
        log = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    check_changelog(log, str(path))
    return log


def changelog_json(log: dict) -> str:
    return json.dumps(log, indent=2, sort_keys=True) + "\n"


def save_changelog(log: dict, path: str | Path) -> None:
    """Write atomically: a temporary file in the same directory, then rename over the target."""
    check_changelog(log)
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{p.name}.", dir=p.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(changelog_json(log))
        os.replace(tmp, p)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def utc_timestamp() -> str:
    """Now (or ``SOURCE_DATE_EPOCH`` when set, for reproducible output) as ``YYYY-MM-DDTHH:MM:SSZ``."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch and epoch.isdigit() else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def entry_fingerprint(entry: Mapping[str, Any]) -> str:
    body = {k: v for k, v in entry.items() if k not in ("timestampUTC", "entryFingerprint")}
    return "0x" + keccak256(canonical_json(body).encode("utf-8")).hex()


def head(log: dict) -> Optional[dict]:
    return log["entries"][-1] if log["entries"] else None


def head_version(log: dict) -> Optional[int]:
    h = head(log)
    return h["version"] if h else None


def make_entry(
    version: int,
    parent_version: Optional[int],
    cuts: Sequence[FacetCut],
    manifest: dict,
    note: str = "",
    *,
    parent_fingerprint: Optional[str] = None,
    timestamp: Optional[str] = None,
) -> dict:
    entry = {
        "version": version,
        "parentVersion": parent_version,
        "timestampUTC": timestamp or utc_timestamp(),
        "cuts": [c.to_json() for c in cuts],
        "manifestFingerprint": manifest_fingerprint(manifest),
        "parentFingerprint": parent_fingerprint,
        "note": note,
        "manifest": manifest,
    }
    entry["entryFingerprint"] = entry_fingerprint(entry)
    return entry


def append_changelog(log: dict, entry: dict) -> dict:
    """New log with ``entry`` appended; the chain must stay gapless and unforked."""
    last = head(log)
    expected = 1 if last is None else last["version"] + 1
    if entry["version"] != expected:
        raise VersionGap(f"entry is version {entry['version']}, but the next version must be {expected}")
    parent = None if last is None else last["version"]
    if entry["parentVersion"] != parent:
        raise ForkDetected(f"entry claims parent version {entry['parentVersion']}, but the head is {parent}")
    parent_fp = None if last is None else last["entryFingerprint"]
    if entry.get("parentFingerprint") != parent_fp:
        raise ForkDetected("entry was made against a different head (parent fingerprint mismatch); "
                           "the changelog changed since the plan was computed")
    if entry["entryFingerprint"] != entry_fingerprint(entry):
        raise ForkDetected(f"entry for version {entry['version']} has a stale or forged fingerprint")
    out = dict(log)
    out["entries"] = list(log["entries"]) + [entry]
    if out.get("contractName") is None and entry.get("manifest"):
        out["contractName"] = entry["manifest"]["contractName"]
    return out


def next_entry(log: dict, cuts: Sequence[FacetCut], manifest: dict, note: str = "",
               timestamp: Optional[str] = None) -> dict:
    """The entry that would extend ``log`` to ``manifest`` via ``cuts``."""
    last = head(log)
    return make_entry(
        manifest["version"],
        None if last is None else last["version"],
        cuts,
        manifest,
        note,
        parent_fingerprint=None if last is None else last["entryFingerprint"],
        timestamp=timestamp,
    )


def entry_at(log: dict, version: int) -> dict:
    for e in log["entries"]:
        if e["version"] == version:
            return e
    known = ", ".join(str(e["version"]) for e in log["entries"]) or "none"
    raise UnknownVersion(f"version {version} is not in the changelog (recorded versions: {known})")


def entry_cuts(entry: dict) -> list[FacetCut]:
    return [FacetCut.from_json(c) for c in entry["cuts"]]


def fold(log: dict, version: Optional[int] = None) -> SelectorMap:
    """Selector → facet ref map after applying the cuts of every entry up to ``version`` (default: head)."""
    if version is not None:
        entry_at(log, version)
    smap: SelectorMap = {}
    for e in log["entries"]:
        if version is not None and e["version"] > version:
            break
        smap = apply_cuts(smap, entry_cuts(e))
    return smap


def deployed_in(log: dict, upto: Optional[int] = None) -> dict[str, int]:
    """facet ref → earliest version whose cuts deployed it."""
    out: dict[str, int] = {}
    for e in log["entries"]:
        if upto is not None and e["version"] > upto:
            break
        for c in e["cuts"]:
            ref = c.get("facetRef")
            if ref and c["action"] != 2 and ref not in out:
                out[ref] = e["version"]
    return out


def known_placeholders(log: dict) -> dict[str, str]:
    """facet ref → ``@deploy:<Name>@v<K>`` naming the deployment that introduced it."""
    return {ref: placeholder(ref_name(ref), v) for ref, v in deployed_in(log).items()}


def verify_changelog(log: dict) -> list[Diagnostic]:
    """Re-check the whole chain: linkage, fingerprints, and fold == recorded manifest at every version."""
    out: list[Diagnostic] = []
    smap: SelectorMap = {}
    prev: Optional[dict] = None
    for e in log["entries"]:
        v = e["version"]
        if prev is None and (v != 1 or e["parentVersion"] is not None):
            out.append(Diagnostic("CHANGELOG_BROKEN", ERROR, f"chain does not start at version 1 (found {v})"))
        if prev is not None and (v != prev["version"] + 1 or e["parentVersion"] != prev["version"]):
            out.append(Diagnostic("CHANGELOG_BROKEN", ERROR, f"version {v} does not follow {prev['version']}"))
        if prev is not None and e.get("parentFingerprint") != prev["entryFingerprint"]:
            out.append(Diagnostic("CHANGELOG_BROKEN", ERROR, f"version {v}: parent fingerprint mismatch"))
        if e["entryFingerprint"] != entry_fingerprint(e):
            out.append(Diagnostic("CHANGELOG_BROKEN", ERROR, f"version {v}: entry fingerprint mismatch"))
        try:
            smap = apply_cuts(smap, entry_cuts(e))
        except InvalidCut as exc:
            out.append(Diagnostic("CHANGELOG_BROKEN", ERROR, f"version {v}: {exc.message}"))
        m = e.get("manifest")
        if m is not None:
            if manifest_fingerprint(m) != e["manifestFingerprint"]:
                out.append(Diagnostic("CHANGELOG_BROKEN", ERROR, f"version {v}: manifest snapshot does not match "
                                                                 f"its fingerprint"))
            elif selector_map(m) != smap:
                out.append(Diagnostic("CHANGELOG_BROKEN", ERROR, f"version {v}: folded cuts do not reproduce the "
                                                                 f"recorded selector map"))
        prev = e
    return out


def record_upgrade(log: dict, old: Optional[dict], new: dict, note: str = "",
                   timestamp: Optional[str] = None) -> tuple[dict, list[FacetCut]]:
    """Extend ``log`` with the step old → new, bootstrapping a genesis entry for ``old`` if the log is empty.

    Returns the new log and the cuts of the new entry.
    """
    if not log["entries"] and old is not None:
        genesis_cuts = diff_selectors(None, old)
        log = append_changelog(log, next_entry(log, genesis_cuts, old, "recorded from existing manifest",
                                               timestamp))
    last = head(log)
    if last is not None and old is not None:
        if last.get("manifestFingerprint") != manifest_fingerprint(old):
            raise ForkDetected(f"the old manifest (version {old['version']}) is not the changelog head "
                               f"(version {last['version']})")
    cuts = diff_maps(selector_map(old), selector_map(new), _address_for(log))
    diff_selectors(old, new)  # raises ClashInNew on a clashing new manifest
    log = append_changelog(log, next_entry(log, cuts, new, note, timestamp))
    return log, cuts


def _address_for(log: dict):
    known = known_placeholders(log)

    def address_for(ref: str) -> str:
        return known.get(ref) or placeholder(ref_name(ref))

    return address_for


def revert_plan(log: dict, target_version: int, current: dict, *, strict: bool = False,
                addresses: Optional[Mapping[str, str]] = None) -> tuple[list[FacetCut], dict]:
    """Cuts and plan routing ``current`` back to the selector map of ``target_version``.

    Storage safety is judged by asking whether ``current`` would have been a valid upgrade of the
    target: if so, the target's code can run over current storage. Otherwise the plan is still
    produced but flagged irreversible (or IrreversibleUpgrade is raised when ``strict``).
    """
    target_entry = entry_at(log, target_version)
    target_map = fold(log, target_version)
    current_map = selector_map(current)
    known = known_placeholders(log)
    cuts = diff_maps(current_map, target_map, lambda ref: known.get(ref) or placeholder(ref_name(ref)))
    findings: list[Diagnostic] = []
    target_manifest = target_entry.get("manifest")
    notes: list[str] = []
    if target_manifest is not None:
        report = diff_layouts(target_manifest, current)
        findings = report.findings
        irreversible = not report.ok
    else:
        irreversible = False
        notes.append(f"version {target_version} has no manifest snapshot; storage compatibility was not checked")
    if irreversible and strict:
        raise IrreversibleUpgrade(f"reverting to version {target_version} is unsafe for existing storage")
    last = head(log)
    version = (last["version"] if last else current["version"]) + 1
    basis = target_manifest or current
    plan = emit_deployment_plan(
        current, basis, cuts,
        addresses=addresses, known_addresses=known, kind="revert", version=version, parent_version=current["version"],
        findings=findings, notes=[f"routes version {current['version']} back to version {target_version}"] + notes,
    )
    plan["revertTo"] = target_version
    plan["irreversible"] = irreversible
    if irreversible:
        plan["notes"].append("storage layout of the current version cannot be read by the target version's "
                             "code; executing this plan is discouraged")
    return cuts, plan
