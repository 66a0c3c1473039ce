import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
import solc_oracle
from conftest import CORPUS, GOLDEN_LAYOUTS, requires_solc
from Crypto.Hash import keccak as oracle
from helpers import layout_view

from seam.diagnostics import RecursiveStruct
from seam.frontend import load
from seam.frontend.types import elementary
from seam.layout import (
    array_data_slot,
    array_element_slot,
    diamond_storage_slot,
    encode_mapping_key,
    layout_fingerprint,
    mapping_value_slot,
    serialize_layout,
    slot_hex,
    unit_layout,
)


def _k(data: bytes) -> int:
    h = oracle.new(digest_bits=256)
    h.update(data)
    return int.from_bytes(h.digest(), "big")


def _contract(body: str, name: str = "C") -> str:
    return f"pragma solidity ^0.8.20;\ncontract {name} {{\n{body}\n}}\n"


def test_corpus_size():
    assert len(CORPUS) >= 10


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_layout_matches_reference_compiler_golden(path):
    golden = json.loads((GOLDEN_LAYOUTS / f"{path.stem}.json").read_text())
    ours = layout_view(path.read_text())
    assert ours["storage"] == golden["storage"]
    for label, struct in golden["structs"].items():
        assert ours["structs"][label] == struct


@requires_solc
def test_layout_matches_live_reference_compiler():
    for path in CORPUS:
        text = path.read_text()
        live = solc_oracle.storage_layout(text, load(text).name, path.name)
        ours = layout_view(text)
        assert ours["storage"] == live["storage"], path.name
        for label, struct in live["structs"].items():
            assert ours["structs"][label] == struct, (path.name, label)


@pytest.mark.parametrize("body,expected", [
    ("uint128 a; uint128 b; uint256 c;", [("a", 0, 0), ("b", 0, 16), ("c", 1, 0)]),
    ("uint8 a; uint256 b; uint8 c;", [("a", 0, 0), ("b", 1, 0), ("c", 2, 0)]),
    ("address a; bool b; uint64 c; uint8 d;", [("a", 0, 0), ("b", 0, 20), ("c", 0, 21), ("d", 0, 29)]),
    ("uint8 a; string s; uint8 b;", [("a", 0, 0), ("s", 1, 0), ("b", 2, 0)]),
    ("uint8 a; uint16[3] arr; uint8 b;", [("a", 0, 0), ("arr", 1, 0), ("b", 2, 0)]),
    ("uint8 a; mapping(uint256 => uint256) m; bytes31 b; bytes2 c;", [("a", 0, 0), ("m", 1, 0), ("b", 2, 0), ("c", 3, 0)]),
    ("uint256 constant K = 3; uint8 a;", [("a", 0, 0)]),
])
def test_packing_rules(body, expected):
    layout = unit_layout(load(_contract(body)))
    assert [(e.label, e.slot, e.offset) for e in layout.entries] == expected


def test_struct_and_fixed_array_of_structs_sizes():
    src = _contract("struct P { uint8 a; uint256 b; uint8 c; }\nP p; P[2] ps; uint8 tail;")
    layout = unit_layout(load(src))
    assert [(e.label, e.slot, e.num_slots) for e in layout.entries] == [("p", 0, 3), ("ps", 3, 6), ("tail", 9, 1)]


def test_enum_is_one_byte():
    src = _contract("enum E { A, B }\nE e; uint8 x;")
    layout = unit_layout(load(src))
    assert [(e.label, e.slot, e.offset) for e in layout.entries] == [("e", 0, 0), ("x", 0, 1)]


def test_recursive_struct_by_value_rejected():
    src = _contract("struct S { uint256 a; S[] kids; }\nstruct T { uint256 a; U u; }\nstruct U { T t; }\nT t;")
    with pytest.raises(RecursiveStruct):
        unit_layout(load(src))


def test_diamond_storage_slot_is_keccak_of_namespace():
    ns = "seam.storage.v1.BookFacet"
    assert int.from_bytes(diamond_storage_slot(ns), "big") == _k(ns.encode())
    assert slot_hex(diamond_storage_slot(ns)) == "0x" + f"{_k(ns.encode()):064x}"


def test_dynamic_array_and_mapping_slot_derivation():
    assert array_data_slot(3) == _k((3).to_bytes(32, "big"))
    assert array_element_slot(3, 2, 3) == _k((3).to_bytes(32, "big")) + 6
    key = encode_mapping_key(elementary("address"), "0x" + "ab" * 20)
    assert key == bytes(12) + bytes.fromhex("ab" * 20)
    assert mapping_value_slot(5, key) == _k(key + (5).to_bytes(32, "big")) % (1 << 256)


def test_fingerprint_tracks_struct_members():
    a = unit_layout(load(_contract("struct B { uint256 id; }\nB[] books;")))
    b = unit_layout(load(_contract("struct B { uint256 id; uint256 pages; }\nB[] books;")))
    assert layout_fingerprint(a) != layout_fingerprint(b)
    assert layout_fingerprint(a) == layout_fingerprint(unit_layout(load(_contract("struct B { uint256 id; }\nB[] books;"))))


def test_serialized_layout_is_json_stable(library_source):
    a = json.dumps(serialize_layout(unit_layout(load(library_source))), sort_keys=True)
    b = json.dumps(serialize_layout(unit_layout(load(library_source))), sort_keys=True)
    assert a == b
    doc = json.loads(a)
    assert doc["entries"][0]["label"] == "books"
    book = next(t for t in doc["types"].values() if "members" in t)
    assert [m["label"] for m in book["members"]] == ["title", "author", "id"]


_VALUE_TYPES = ["uint8", "uint16", "uint32", "uint64", "uint128", "uint256", "address", "bool", "bytes4", "bytes20",
                "bytes32", "int24", "string", "uint8[3]", "uint256[]", "mapping(uint256 => uint256)", "uint64[5]"]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(_VALUE_TYPES), min_size=1, max_size=12), st.sampled_from(_VALUE_TYPES))
def test_layout_never_overlaps_and_appends_are_monotone(types, extra):
    decls = "".join(f"{t} v{i};\n" for i, t in enumerate(types))
    before = unit_layout(load(_contract(decls))).entries
    occupied = set()
    for e in before:
        if e.num_slots == 1 and e.size_bytes < 32:
            assert e.offset + e.size_bytes <= 32  # never straddles a slot boundary
            cells = {(e.slot, b) for b in range(e.offset, e.offset + e.size_bytes)}
        else:
            assert e.offset == 0
            cells = {(s, b) for s in range(e.slot, e.slot + e.num_slots) for b in range(32)}
        assert not cells & occupied
        occupied |= cells
    after = unit_layout(load(_contract(decls + f"{extra} tail;\n"))).entries
    assert [(e.label, e.slot, e.offset) for e in after[:-1]] == [(e.label, e.slot, e.offset) for e in before]


def test_fingerprint_ignores_entry_order():
    layout = unit_layout(load(_contract("uint8 a; uint8 b; uint256 c;")))
    shuffled = type(layout)(layout.base_kind, layout.namespace, list(reversed(layout.entries)), layout.table)
    assert layout_fingerprint(shuffled) == layout_fingerprint(layout)
    renamed = type(layout)(layout.base_kind, layout.namespace,
                           [layout.entries[0].__class__("z", *[getattr(layout.entries[0], f) for f in
                                                              ("slot", "offset", "type", "num_slots", "size_bytes")])]
                           + layout.entries[1:], layout.table)
    assert layout_fingerprint(renamed) != layout_fingerprint(layout)
