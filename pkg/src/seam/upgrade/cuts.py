"""Facet cuts: the Add/Replace/Remove selector routings of a diamondCut."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from ..diagnostics import ClashInNew, InvalidCut
from .manifest import SelectorMap, manifest_clashes, ref_name, selector_map

ADD, REPLACE, REMOVE = 0, 1, 2
ACTION_NAMES = {ADD: "Add", REPLACE: "Replace", REMOVE: "Remove"}
ZERO_ADDRESS = "0x" + "00" * 20
PLACEHOLDER_RE = re.compile(r"@deploy:([A-Za-z_$][A-Za-z0-9_$]*)(?:@v([1-9][0-9]*))?")


def placeholder(facet_name: str, version: Optional[int] = None) -> str:
    return f"@deploy:{facet_name}" + (f"@v{version}" if version is not None else "")


def is_placeholder(address: str) -> bool:
    return PLACEHOLDER_RE.fullmatch(address) is not None


@dataclass(frozen=True)
class FacetCut:
    facet_name: str
    action: int
    selectors: tuple[str, ...]  # lowercase 0x-prefixed 4-byte hex, sorted, unique
    facet_address: str  # 0x-prefixed 20-byte hex or an @deploy placeholder
    facet_ref: Optional[str] = None

    def __post_init__(self):
        if self.action not in ACTION_NAMES:
            raise InvalidCut(f"unknown cut action {self.action}")
        sels = tuple(s.lower() for s in self.selectors)
        for s in sels:
            if not re.fullmatch(r"0x[0-9a-f]{8}", s):
                raise InvalidCut(f"malformed selector {s!r}")
        if len(set(sels)) != len(sels):
            raise InvalidCut(f"duplicate selector in cut for {self.facet_name}")
        object.__setattr__(self, "selectors", tuple(sorted(sels)))
        if self.action == REMOVE and self.facet_address != ZERO_ADDRESS:
            raise InvalidCut("Remove cuts must carry the zero address")

    @property
    def action_name(self) -> str:
        return ACTION_NAMES[self.action]

    def to_json(self) -> dict:
        return {
            "facetName": self.facet_name,
            "action": self.action,
            "actionName": self.action_name,
            "selectors": list(self.selectors),
            "facetAddress": self.facet_address,
            "facetRef": self.facet_ref,
        }

    @classmethod
    def from_json(cls, d: dict) -> "FacetCut":
        return cls(d["facetName"], d["action"], tuple(d["selectors"]), d["facetAddress"], d.get("facetRef"))


def apply_cuts(smap: SelectorMap, cuts: list[FacetCut]) -> SelectorMap:
    """Route changes exactly as diamondCut applies them; invalid cuts raise InvalidCut."""
    out = dict(smap)
    for cut in cuts:
        for sel in cut.selectors:
            if cut.action == ADD:
                if sel in out:
                    raise InvalidCut(f"Add of {sel}: selector already routed to {ref_name(out[sel])}")
                out[sel] = cut.facet_ref or cut.facet_name
            elif cut.action == REPLACE:
                if sel not in out:
                    raise InvalidCut(f"Replace of {sel}: selector is not routed")
                new = cut.facet_ref or cut.facet_name
                if out[sel] == new:
                    raise InvalidCut(f"Replace of {sel}: already routed to that facet")
                out[sel] = new
            else:
                if sel not in out:
                    raise InvalidCut(f"Remove of {sel}: selector is not routed")
                del out[sel]
    return out


def diff_maps(old: SelectorMap, new: SelectorMap, address_for: Callable[[str], str]) -> list[FacetCut]:
    """Cuts turning ``old`` into ``new``: Add, then Replace, then Remove; facets alphabetical."""
    add: dict[str, list[str]] = {}
    replace: dict[str, list[str]] = {}
    remove: dict[str, list[str]] = {}
    for sel, ref in new.items():
        if sel not in old:
            add.setdefault(ref, []).append(sel)
        elif old[sel] != ref:
            replace.setdefault(ref, []).append(sel)
    for sel, ref in old.items():
        if sel not in new:
            remove.setdefault(ref_name(ref), []).append(sel)
    cuts: list[FacetCut] = []
    for group, action in ((add, ADD), (replace, REPLACE)):
        for ref in sorted(group, key=lambda r: (ref_name(r), r)):
            cuts.append(FacetCut(ref_name(ref), action, tuple(group[ref]), address_for(ref), ref))
    for name in sorted(remove):
        cuts.append(FacetCut(name, REMOVE, tuple(remove[name]), ZERO_ADDRESS, None))
    return cuts


def diff_selectors(old: Optional[dict], new: dict) -> list[FacetCut]:
    """Cuts that move routing from ``old`` (None for genesis) to ``new``."""
    clashes = manifest_clashes(new)
    if clashes:
        sel, who = next(iter(clashes.items()))
        listing = ", ".join(f"{sig} [{facet}]" for facet, sig in who)
        raise ClashInNew(f"new manifest routes selector {sel} more than once: {listing}")
    return diff_maps(selector_map(old), selector_map(new), lambda ref: placeholder(ref_name(ref)))
