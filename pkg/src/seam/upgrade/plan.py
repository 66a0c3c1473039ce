"""diamondCut calldata and inert deployment plans.

Nothing here talks to a chain: a plan is a JSON document listing what to
deploy, the exact diamondCut calldata to send, and what the loupe should
report afterwards. Facet addresses that are only known at execution time are
written as ``@deploy:<Facet>`` placeholders; inside calldata they appear as
``{{@deploy:<Facet>}}`` in place of the 40 hex digits of the address.
"""

from __future__ import annotations

import re
from typing import Any, Iterable, Mapping, Optional, Sequence

from ..diagnostics import Diagnostic, OversizeSelectorList, SchemaError, UnresolvedPlaceholder
from ..hashing import keccak256
from ..schemas import validate
from ..security import DIAMOND_CUT_SIGNATURE, compute_selector, split_signature
from . import abi
from .cuts import ADD, REMOVE, ZERO_ADDRESS, FacetCut, is_placeholder, placeholder
from .manifest import facet_ref, selector_map

DIAMOND_CUT_SELECTOR = bytes.fromhex("1f931c1c")
DIAMOND_CUT_ARGS = ["(address,uint8,bytes4[])[]", "address", "bytes"]
DIAMOND_PLACEHOLDER = "@deploy:Diamond"
# The loupe stores selector positions as uint96; anything larger cannot be routed.
MAX_SELECTORS = (1 << 96) - 1

PLAN_SCHEMA_VERSION = 1
ROUTING_ONLY_NOTE = (
    "Reverting restores function routing only; storage contents written by later versions are left as they are."
)


def _address_word(address: str) -> str:
    if not re.fullmatch(r"0x[0-9a-fA-F]{40}", address):
        raise UnresolvedPlaceholder(f"facet address {address!r} is not a concrete 20-byte address")
    return address.lower()


def encode_diamond_cut(cuts: Sequence[FacetCut], init_address: str = ZERO_ADDRESS, init_calldata: bytes = b"") -> bytes:
    """Calldata of ``diamondCut(cuts, init, calldata)``; every address must already be concrete."""
    total = sum(len(c.selectors) for c in cuts)
    if total > MAX_SELECTORS:
        raise OversizeSelectorList(f"{total} selectors exceed what a diamond can route")
    payload = [
        (_address_word(c.facet_address), c.action, [bytes.fromhex(s[2:]) for s in c.selectors]) for c in cuts
    ]
    return DIAMOND_CUT_SELECTOR + abi.encode(DIAMOND_CUT_ARGS, [payload, _address_word(init_address), bytes(init_calldata)])


def decode_diamond_cut(data: bytes) -> tuple[list[tuple[str, int, tuple[str, ...]]], str, bytes]:
    """Inverse of :func:`encode_diamond_cut`: ([(address, action, selectors)], init, calldata)."""
    if data[:4] != DIAMOND_CUT_SELECTOR:
        raise abi.AbiError("calldata does not start with the diamondCut selector")
    raw_cuts, init, calldata = abi.decode(DIAMOND_CUT_ARGS, data[4:])
    cuts = [(addr, action, tuple("0x" + s.hex() for s in sels)) for addr, action, sels in raw_cuts]
    return cuts, init, calldata


def _sentinel(i: int) -> str:
    """A recognisable stand-in address for the i-th placeholder while encoding."""
    return "0x" + keccak256(b"seam.placeholder").hex()[:32] + f"{i:08x}"


def resolve_address(address: str, addresses: Optional[Mapping[str, str]]) -> str:
    """Concrete address for ``address`` if known: exact placeholder key first, then the bare facet name."""
    if not is_placeholder(address) or not addresses:
        return address
    if address in addresses:
        return addresses[address]
    name = address[len("@deploy:"):].split("@", 1)[0]
    unversioned = "@deploy:" + name
    if address == unversioned and name in addresses:
        return addresses[name]
    return address


def resolve_cuts(cuts: Iterable[FacetCut], addresses: Optional[Mapping[str, str]]) -> list[FacetCut]:
    return [
        FacetCut(c.facet_name, c.action, c.selectors, resolve_address(c.facet_address, addresses), c.facet_ref)
        for c in cuts
    ]


def render_calldata(cuts: Sequence[FacetCut], init_address: str = ZERO_ADDRESS, init_calldata: bytes = b"") -> str:
    """Lowercase hex calldata; unresolved placeholders appear as ``{{@deploy:...}}`` in their address slot."""
    names: list[str] = []
    for a in [c.facet_address for c in cuts] + [init_address]:
        if is_placeholder(a) and a not in names:
            names.append(a)
    sentinels = {p: _sentinel(i) for i, p in enumerate(names)}
    concrete = [FacetCut(c.facet_name, c.action, c.selectors, sentinels.get(c.facet_address, c.facet_address),
                         c.facet_ref) for c in cuts]
    text = "0x" + encode_diamond_cut(concrete, sentinels.get(init_address, init_address), init_calldata).hex()
    for p, s in sentinels.items():
        word = "0" * 24 + s[2:]
        marker = "0" * 24 + "{{" + p + "}}"
        # only whole, word-aligned occurrences are address slots
        body = text[2 + 8:]
        chunks = [body[i:i + 64] for i in range(0, len(body), 64)]
        chunks = [marker if c == word else c for c in chunks]
        text = text[:2 + 8] + "".join(chunks)
    return text


def calldata_bytes(text: str, addresses: Mapping[str, str]) -> bytes:
    """Turn rendered calldata back into bytes once every placeholder has an address."""
    def sub(m: re.Match) -> str:
        addr = resolve_address(m.group(1), addresses)
        if is_placeholder(addr):
            raise UnresolvedPlaceholder(f"no address given for {m.group(1)}")
        return _address_word(addr)[2:]

    filled = re.sub(r"\{\{(@deploy:[A-Za-z0-9_$@]+)\}\}", sub, text)
    return bytes.fromhex(filled[2:])


def _initializer(manifest: dict) -> Optional[tuple[str, str]]:
    """(facet name, signature) of the synthesized initializer, if the contract has one."""
    for f in manifest["facets"]:
        for s in f["selectors"]:
            name, _ = split_signature(s["signature"])
            if name == "initialize":
                return f["name"], s["signature"]
    return None


def init_call(manifest: dict, args: Optional[Sequence[Any]]) -> tuple[Optional[str], bytes, list[str]]:
    """(init facet name, init calldata, notes) for a genesis deployment."""
    found = _initializer(manifest)
    if found is None:
        return None, b"", []
    facet, sig = found
    _, arg_tuple = split_signature(sig)
    params = [str(c) for c in abi.parse_type(arg_tuple).components] if arg_tuple != "()" else []
    sel = compute_selector(sig)
    if not params:
        return facet, sel, []
    if args is None:
        return None, b"", [
            f"{sig} takes arguments; pass them with --init-args to complete the initialization call "
            f"(the cut below runs without it)"
        ]
    if len(args) != len(params):
        raise SchemaError(f"{sig} takes {len(params)} argument(s), --init-args has {len(args)}")
    try:
        return facet, sel + abi.encode(params, [_abi_value(p, a) for p, a in zip(params, args)]), []
    except abi.AbiError as exc:
        raise SchemaError(f"--init-args do not fit {sig}: {exc}") from None


def _abi_value(typ: str, value: Any) -> Any:
    """JSON values to encoder values: hex strings become bytes for bytes/bytesN; tuples/arrays recurse."""
    t = abi.parse_type(typ)
    return _coerce(t, value)


def _coerce(t: "abi.AbiType", value: Any) -> Any:
    if t.kind in ("bytes", "fixedbytes") and isinstance(value, str):
        if not re.fullmatch(r"0x([0-9a-fA-F]{2})*", value):
            raise abi.AbiError(f"expected 0x-prefixed hex for {t}, got {value!r}")
        return bytes.fromhex(value[2:])
    if t.kind in ("uint", "int") and isinstance(value, str):
        try:
            return int(value, 0)
        except ValueError:
            raise abi.AbiError(f"expected an integer for {t}, got {value!r}") from None
    if t.kind == "array" and isinstance(value, list):
        return [_coerce(t.elem, v) for v in value]
    if t.kind == "tuple" and isinstance(value, list):
        return tuple(_coerce(c, v) for c, v in zip(t.components, value))
    return value


def _verify_step(new: dict, refs_address: Mapping[str, Optional[str]], removed: list[str]) -> dict:
    facets = []
    for f in sorted(new["facets"], key=lambda f: f["name"]):
        ref = facet_ref(f)
        facets.append({
            "facet": f["name"],
            "facetRef": ref,
            "address": refs_address.get(ref),
            "functionSelectors": sorted(s["selector"] for s in f["selectors"]),
        })
    return {
        "kind": "verify",
        "loupe": {
            "facets": facets,
            "diamondCoreSelectors": sorted(s["selector"] for s in new["diamondCore"]["selectors"]),
            "unroutedSelectors": sorted(removed),
        },
    }


def emit_deployment_plan(
    old: Optional[dict],
    new: dict,
    cuts: Sequence[FacetCut],
    *,
    addresses: Optional[Mapping[str, str]] = None,
    init_args: Optional[Sequence[Any]] = None,
    known_addresses: Optional[Mapping[str, str]] = None,
    kind: str = "upgrade",
    version: Optional[int] = None,
    parent_version: Optional[int] = None,
    findings: Sequence[Diagnostic] = (),
    notes: Sequence[str] = (),
) -> dict:
    """Ordered, inert plan turning the routing of ``old`` (None at genesis) into that of ``new``.

    ``known_addresses`` maps facet refs that are already deployed to the placeholder or address that
    designates them (the changelog supplies these); refs deployed by this plan get ``@deploy:<Name>``.
    """
    genesis = old is None
    plan: dict = {
        "schemaVersion": PLAN_SCHEMA_VERSION,
        "kind": kind,
        "contractName": new["contractName"],
        "version": version if version is not None else new["version"],
        "parentVersion": parent_version if parent_version is not None or genesis else old["version"],
        "complete": True,
        "notes": list(notes),
        "findings": [f.to_json() for f in findings],
        "steps": [],
    }
    if kind == "revert":
        plan["notes"].append(ROUTING_ONLY_NOTE)
    if not cuts and not genesis:
        plan["notes"].append("no routing changes between the two versions; nothing to deploy or cut")
        return plan

    old_refs = set(selector_map(old).values())
    refs_address: dict[str, Optional[str]] = {}
    for ref in old_refs:
        refs_address[ref] = (known_addresses or {}).get(ref)
    steps: list[dict] = []
    deployed: list[str] = []
    for c in cuts:
        if c.action == REMOVE or c.facet_ref is None:
            continue
        if c.facet_ref in old_refs or c.facet_ref in deployed:
            continue
        if known_addresses and c.facet_ref in known_addresses:
            continue
        deployed.append(c.facet_ref)
        refs_address[c.facet_ref] = resolve_address(c.facet_address, addresses)
        steps.append({
            "kind": "deployFacet",
            "facet": c.facet_name,
            "facetRef": c.facet_ref,
            "source": f"facets/{c.facet_name}.sol",
            "address": c.facet_address,
        })
    for c in cuts:
        if c.facet_ref and c.facet_ref not in refs_address:
            refs_address[c.facet_ref] = resolve_address(c.facet_address, addresses)
    for f in new["facets"]:
        ref = facet_ref(f)
        if refs_address.get(ref) is None and ref in old_refs:
            refs_address[ref] = None
    diamond = resolve_address(DIAMOND_PLACEHOLDER, addresses)
    if genesis:
        steps.append({"kind": "deployDiamond", "source": "Diamond.sol", "address": DIAMOND_PLACEHOLDER})

    init_address, init_data = ZERO_ADDRESS, b""
    if genesis:
        init_facet, init_data, init_notes = init_call(new, init_args)
        plan["notes"].extend(init_notes)
        if init_notes:
            plan["complete"] = False
        if init_facet is not None:
            init_ref = next(facet_ref(f) for f in new["facets"] if f["name"] == init_facet)
            init_address = refs_address.get(init_ref) or placeholder(init_facet)
    resolved = resolve_cuts(cuts, addresses)
    init_address = resolve_address(init_address, addresses)
    if cuts or init_data:
        steps.append({
            "kind": "diamondCut",
            "target": diamond,
            "function": DIAMOND_CUT_SIGNATURE,
            "cuts": [c.to_json() for c in resolved],
            "init": init_address,
            "initCalldata": "0x" + init_data.hex(),
            "calldata": render_calldata(resolved, init_address, init_data),
        })
    removed = [s for c in cuts if c.action == REMOVE for s in c.selectors]
    steps.append(_verify_step(new, refs_address, removed))
    for i, s in enumerate(steps, 1):
        plan["steps"].append({"step": i, **s})
    return plan


def check_plan(plan: dict) -> None:
    validate(plan, "plan", "deployment plan")


def genesis_cut_count(plan: dict) -> int:
    """Number of Add cuts in a plan's diamondCut step (0 if there is none)."""
    for s in plan["steps"]:
        if s["kind"] == "diamondCut":
            return sum(1 for c in s["cuts"] if c["action"] == ADD)
    return 0
