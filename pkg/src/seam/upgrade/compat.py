"""Storage and routing compatibility between two manifest versions.

Rules, per namespace present in both versions:

* every old entry keeps its label, slot, offset and type;
* new entries start at or after the end of the last old entry (append-only);
* a struct may only grow by appending members, and only where nothing is
  laid out after it: growth is an error for array elements and for structs
  followed by other members, a warning for mapping values and for a struct
  that is the last entry, and always fine for the namespace's own root;
* a namespace that disappears is reported as orphaned storage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..diagnostics import ERROR, INFO, WARNING, Diagnostic
from .cuts import ADD, REMOVE, REPLACE, FacetCut
from .manifest import check_manifest, manifest_clashes, selector_map, signature_index

COMPATIBLE = "compatible"
INCOMPATIBLE = "incompatible"
WITH_WARNINGS = "compatibleWithWarnings"

ARRAY_ELEMENT = "array element"
MAPPING_VALUE = "mapping value"
NON_TERMINAL = "non-terminal"
TERMINAL = "terminal"


@dataclass
class CompatibilityReport:
    findings: list[Diagnostic] = field(default_factory=list)
    old_version: Optional[int] = None
    new_version: Optional[int] = None

    @property
    def verdict(self) -> str:
        if any(f.severity == ERROR for f in self.findings):
            return INCOMPATIBLE
        if any(f.severity == WARNING for f in self.findings):
            return WITH_WARNINGS
        return COMPATIBLE

    @property
    def ok(self) -> bool:
        return self.verdict != INCOMPATIBLE

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "oldVersion": self.old_version,
            "newVersion": self.new_version,
            "findings": [f.to_json() for f in self.findings],
        }


def _entry_view(e: Optional[dict], types: dict) -> Optional[dict]:
    if e is None:
        return None
    return {"slot": e["slot"], "offset": e["offset"], "type": types[e["type"]]["label"]}


def _end_byte(e: dict, types: dict) -> int:
    size = int(types[e["type"]]["numberOfBytes"])
    if e["numSlots"] == 1 and size < 32:
        return e["slot"] * 32 + e["offset"] + size
    return (e["slot"] + e["numSlots"]) * 32


def _array_length(tid: str) -> str:
    return tid[tid.rfind(")") + 1:]


class _TypeComparer:
    """Structural comparison of one old type against one new type."""

    def __init__(self, old_types: dict, new_types: dict):
        self.ot = old_types
        self.nt = new_types

    def compare(self, otid: str, ntid: str, ctx: str, path: str) -> list[tuple[str, str, dict]]:
        """(severity, message, extra details) for each problem found below this type."""
        o, n = self.ot[otid], self.nt[ntid]
        if o["encoding"] != n["encoding"]:
            return [(ERROR, f"{path}: storage encoding changed from {o['label']} to {n['label']}", {})]
        if "members" in o or "members" in n:
            return self._struct(otid, ntid, o, n, ctx, path)
        if "values" in o or "values" in n:
            ov, nv = o.get("values", []), n.get("values", [])
            if nv[:len(ov)] != ov or o["numberOfBytes"] != n["numberOfBytes"]:
                return [(ERROR, f"{path}: enum values of {o['label']} changed (only appending values that "
                                f"keep the same width is safe)", {})]
            return []
        if o["encoding"] == "mapping":
            if self.ot[o["key"]]["label"] != self.nt[n["key"]]["label"]:
                return [(ERROR, f"{path}: mapping key type changed from {self.ot[o['key']]['label']} to "
                                f"{self.nt[n['key']]['label']}", {})]
            return self.compare(o["value"], n["value"], MAPPING_VALUE, f"{path}[key]")
        if "base" in o or "base" in n:
            if "base" not in o or "base" not in n or _array_length(otid) != _array_length(ntid):
                return [(ERROR, f"{path}: array shape changed from {o['label']} to {n['label']}", {})]
            if o["encoding"] == "inplace" and o["numberOfBytes"] != n["numberOfBytes"]:
                problems = self.compare(o["base"], n["base"], ARRAY_ELEMENT, f"{path}[i]")
                return problems or [(ERROR, f"{path}: fixed array size changed", {})]
            return self.compare(o["base"], n["base"], ARRAY_ELEMENT, f"{path}[i]")
        if o["label"] != n["label"] or o["numberOfBytes"] != n["numberOfBytes"]:
            return [(ERROR, f"{path}: type changed from {o['label']} to {n['label']}", {})]
        return []

    def _struct(self, otid, ntid, o, n, ctx, path):
        name = otid[len("t_struct("):-1] if otid.startswith("t_struct(") else o["label"]
        om, nm = o.get("members", []), n.get("members", [])
        info = {"struct": name, "site": path, "context": ctx}
        out: list[tuple[str, str, dict]] = []
        changed = []
        for i, m in enumerate(om):
            if i >= len(nm):
                changed.append(f"member '{m['label']}' removed")
                continue
            x = nm[i]
            if (m["label"], m["slot"], m["offset"]) != (x["label"], x["slot"], x["offset"]):
                changed.append(f"member '{m['label']}' moved or renamed")
                continue
            sub_ctx = NON_TERMINAL if i < len(nm) - 1 else TERMINAL
            out.extend(self.compare(m["type"], x["type"], sub_ctx, f"{path}.{m['label']}"))
        if changed:
            return [(ERROR, f"struct {name} at {path} changed: {'; '.join(changed)}", info)] + out
        if len(nm) > len(om):
            added = ", ".join(x["label"] for x in nm[len(om):])
            if ctx == ARRAY_ELEMENT:
                out.append((ERROR, f"struct {name} gained member(s) {added} but is stored as an array element at "
                                   f"{path}; elements are laid out back to back, so every element after the "
                                   f"first would overlap its successor", info))
            elif ctx == NON_TERMINAL:
                out.append((ERROR, f"struct {name} gained member(s) {added} at {path}, which is followed by other "
                                   f"storage; the growth overlaps what comes next", info))
            elif ctx == MAPPING_VALUE:
                out.append((WARNING, f"struct {name} gained member(s) {added} at {path} (mapping value); "
                                     f"existing entries read the new members as zero", info))
            else:
                out.append((WARNING, f"struct {name} gained member(s) {added} at {path}; existing data reads "
                                     f"the new members as zero", info))
        return out


def _namespace_index(manifest: dict) -> dict[str, dict]:
    return {f["storageNamespace"]: f for f in manifest["facets"]}


def diff_layouts(old: dict, new: dict, *, check_schema: bool = True) -> CompatibilityReport:
    """Storage compatibility of upgrading ``old`` to ``new``."""
    if check_schema:
        check_manifest(old, "old manifest")
        check_manifest(new, "new manifest")
    report = CompatibilityReport(old_version=old.get("version"), new_version=new.get("version"))
    old_ns, new_ns = _namespace_index(old), _namespace_index(new)
    label_homes: dict[str, list[str]] = {}
    for ns, f in new_ns.items():
        for e in f["layout"]["entries"]:
            label_homes.setdefault(e["label"], []).append(ns)

    for ns in sorted(old_ns):
        ofacet = old_ns[ns]
        olay = ofacet["layout"]
        if ns not in new_ns:
            report.findings.append(Diagnostic(
                "UPGRADE_ORPHANED_NAMESPACE", WARNING,
                f"namespace {ns} (facet {ofacet['name']}) no longer exists; its storage is left orphaned",
                details={"namespace": ns, "facet": ofacet["name"]},
            ))
            for e in olay["entries"]:
                homes = [h for h in label_homes.get(e["label"], []) if h != ns]
                if homes:
                    report.findings.append(_relocated(ns, e, olay["types"], homes[0], new_ns[homes[0]]))
            continue
        nlay = new_ns[ns]["layout"]
        cmp = _TypeComparer(olay["types"], nlay["types"])
        new_by_label = {e["label"]: e for e in nlay["entries"]}
        oentries = olay["entries"]
        for i, e in enumerate(oentries):
            x = new_by_label.get(e["label"])
            base = {"namespace": ns, "label": e["label"], "old": _entry_view(e, olay["types"])}
            if x is None:
                homes = [h for h in label_homes.get(e["label"], []) if h != ns]
                if homes:
                    report.findings.append(_relocated(ns, e, olay["types"], homes[0], new_ns[homes[0]]))
                else:
                    report.findings.append(Diagnostic(
                        "UPGRADE_INCOMPATIBLE", ERROR,
                        f"{ns}: variable '{e['label']}' was removed; its slot would be reused",
                        details={**base, "new": None}))
                continue
            base["new"] = _entry_view(x, nlay["types"])
            if (e["slot"], e["offset"]) != (x["slot"], x["offset"]):
                report.findings.append(Diagnostic(
                    "UPGRADE_INCOMPATIBLE", ERROR,
                    f"{ns}: variable '{e['label']}' moved from slot {e['slot']} offset {e['offset']} to slot "
                    f"{x['slot']} offset {x['offset']}",
                    details=base))
            ctx = TERMINAL if i == len(oentries) - 1 else NON_TERMINAL
            for sev, msg, extra in cmp.compare(e["type"], x["type"], ctx, e["label"]):
                code = "UPGRADE_INCOMPATIBLE" if sev == ERROR else "UPGRADE_STRUCT_APPEND"
                report.findings.append(Diagnostic(code, sev, f"{ns}: {msg}", details={**base, **extra}))
        old_labels = {e["label"] for e in oentries}
        end = max((_end_byte(e, olay["types"]) for e in oentries), default=0)
        for x in nlay["entries"]:
            if x["label"] in old_labels:
                continue
            start = x["slot"] * 32 + x["offset"]
            if start < end:
                report.findings.append(Diagnostic(
                    "UPGRADE_INCOMPATIBLE", ERROR,
                    f"{ns}: new variable '{x['label']}' is placed at slot {x['slot']} offset {x['offset']}, "
                    f"inside existing storage; new variables may only be appended",
                    details={"namespace": ns, "label": x["label"], "old": None,
                             "new": _entry_view(x, nlay["types"])}))
    return report


def _relocated(ns: str, e: dict, types: dict, home: str, facet: dict) -> Diagnostic:
    x = next(y for y in facet["layout"]["entries"] if y["label"] == e["label"])
    return Diagnostic(
        "UPGRADE_INCOMPATIBLE", ERROR,
        f"variable '{e['label']}' moved from namespace {ns} to {home}; its existing data stays behind",
        details={"namespace": ns, "label": e["label"], "old": _entry_view(e, types),
                 "new": _entry_view(x, facet["layout"]["types"]), "newNamespace": home})


def check_cuts(old: Optional[dict], cuts: Iterable[FacetCut]) -> list[Diagnostic]:
    """Cuts that do not fit the old routing (Replace/Remove of an unknown selector, Add of a known one)."""
    routed = selector_map(old)
    core = {s["selector"] for s in (old or {}).get("diamondCore", {}).get("selectors", [])}
    out = []
    for cut in cuts:
        for sel in cut.selectors:
            problem = None
            if sel in core:
                problem = f"{cut.action_name} targets diamond core selector {sel}"
            elif cut.action in (REPLACE, REMOVE) and sel not in routed:
                problem = f"{cut.action_name} for {cut.facet_name} targets selector {sel}, which the old version does not route"
            elif cut.action == ADD and sel in routed:
                problem = f"Add for {cut.facet_name} targets selector {sel}, which is already routed"
            if problem:
                out.append(Diagnostic("UPGRADE_INVALID_CUT", ERROR, problem,
                                      details={"selector": sel, "facet": cut.facet_name, "action": cut.action_name}))
    return out


def validate_upgrade(old: dict, new: dict, cuts: Optional[Iterable[FacetCut]] = None) -> CompatibilityReport:
    """Storage findings plus routing checks on the new version (and on explicit cuts, if given)."""
    report = diff_layouts(old, new)
    sigs = signature_index(old, new)
    for sel, who in manifest_clashes(new).items():
        listing = ", ".join(f"{sig} [{facet}]" for facet, sig in who)
        report.findings.append(Diagnostic(
            "SEL_CLASH", ERROR, f"new version routes selector {sel} more than once: {listing}",
            details={"selector": sel, "entries": [{"facet": f, "signature": s} for f, s in who]}))
    if cuts is not None:
        report.findings.extend(check_cuts(old, cuts))
    removed = sorted(set(selector_map(old)) - set(selector_map(new)))
    if removed:
        report.findings.append(Diagnostic(
            "UPGRADE_REMOVES_FUNCTIONS", INFO,
            "functions removed by this upgrade: " + ", ".join(sigs.get(s, s) for s in removed),
            details={"selectors": removed}))
    return report
