"""Manifest builders for upgrade tests: real conversions plus synthetic routing-only variants."""

import copy
import random

from conftest import FIXTURES, TESTS

from seam.hashing import keccak256
from seam.layout import diamond_storage_slot, slot_hex
from seam.pipeline import convert
from seam.security import selector_hex


def converted(source: str, version: int = 1) -> dict:
    result = convert(source, version=version)
    assert result.ok, [d.message for d in result.diagnostics]
    return result.manifest


def library(version: int = 1) -> dict:
    return converted((TESTS / "corpus" / "library.sol").read_text(), version)


def fixture(name: str, version: int) -> dict:
    return converted((FIXTURES / name).read_text(), version)


def storage_manifest(decls: str, uses: str, version: int = 1) -> dict:
    """One facet named TouchFacet whose storage is ``decls``; ``uses`` is the body of touch()."""
    src = (
        "pragma solidity ^0.8.20;\ncontract C {\n"
        f"{decls}\n"
        f"    function touch() external {{ {uses} }}\n}}\n"
    )
    return converted(src, version)


_TEMPLATE = None


def synthetic(version: int, facets: dict) -> dict:
    """Manifest whose facets are ``{name: (signatures, build_tag)}``; all share the library layout."""
    global _TEMPLATE
    if _TEMPLATE is None:
        _TEMPLATE = library()
    m = copy.deepcopy(_TEMPLATE)
    m["version"] = version
    template = m["facets"][0]
    m["facets"] = []
    for name in sorted(facets):
        sigs, tag = facets[name]
        f = copy.deepcopy(template)
        ns = "seam.storage.v1." + name
        f["name"] = name
        f["storageNamespace"] = ns
        f["layout"]["namespace"] = ns
        f["baseSlotHex"] = slot_hex(diamond_storage_slot(ns))
        f["selectors"] = sorted(({"selector": selector_hex(s), "signature": s} for s in sigs),
                                key=lambda x: (x["selector"], x["signature"]))
        f["sourceHash"] = "0x" + keccak256(f"{name}:{tag}".encode()).hex()
        m["facets"].append(f)
    return m


SIGNATURE_POOL = [f"op{i}(uint256)" for i in range(30)]


def evolve(rng: random.Random, state: dict) -> dict:
    """One random development step over ``{name: (set of signatures, tag)}``."""
    state = {k: (set(v[0]), v[1]) for k, v in state.items()}
    used = set().union(*(s for s, _ in state.values())) if state else set()
    free = [s for s in SIGNATURE_POOL if s not in used]
    move = rng.choice(["add", "remove", "newFacet", "dropFacet", "moveFn", "rebuild"])
    names = sorted(state)
    if move == "add" and names and free:
        n = rng.choice(names)
        state[n] = (state[n][0] | {rng.choice(free)}, state[n][1] + 1)
    elif move == "remove" and names:
        n = rng.choice(names)
        if len(state[n][0]) > 1:
            state[n] = (state[n][0] - {sorted(state[n][0])[0]}, state[n][1] + 1)
    elif move == "newFacet" and free:
        name = f"F{rng.randint(0, 999)}Facet"
        if name not in state:
            state[name] = (set(rng.sample(free, min(len(free), rng.randint(1, 3)))), 0)
    elif move == "dropFacet" and len(names) > 1:
        del state[rng.choice(names)]
    elif move == "moveFn" and len(names) > 1:
        a, b = rng.sample(names, 2)
        if len(state[a][0]) > 1:
            sig = sorted(state[a][0])[-1]
            state[a] = (state[a][0] - {sig}, state[a][1] + 1)
            state[b] = (state[b][0] | {sig}, state[b][1] + 1)
    elif names:
        n = rng.choice(names)
        state[n] = (state[n][0], state[n][1] + 1)
    return state


def random_chain(seed: int, length: int) -> list[dict]:
    rng = random.Random(seed)
    state = {"CoreFacet": ({SIGNATURE_POOL[0], SIGNATURE_POOL[1]}, 0)}
    out = []
    for v in range(1, length + 1):
        out.append(synthetic(v, state))
        state = evolve(rng, state)
    return out
