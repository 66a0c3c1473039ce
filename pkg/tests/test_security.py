import pytest
from conftest import FIXTURES
from Crypto.Hash import keccak as oracle
from vectors import SELECTOR_VECTORS

from seam.diagnostics import MalformedSignature, UnsupportedUsage
from seam.facetizer import facetize
from seam.frontend import load
from seam.security import (
    DIAMOND_CORE_SIGNATURES,
    analyze,
    apply_array_to_mapping_transform,
    apply_selector_renames,
    build_selector_table,
    compute_selector,
    detect_collision_risks,
    detect_selector_clashes,
    is_canonical_signature,
    selector_hex,
    suggest_all_fixes,
    suggest_selector_fix,
)


def _oracle_selector(sig: str) -> str:
    h = oracle.new(digest_bits=256)
    h.update(sig.encode())
    return "0x" + h.hexdigest()[:8]


def _plan(src: str):
    return facetize(load(src))


def _contract(body: str, name: str = "C") -> str:
    return f"// SPDX-License-Identifier: MIT\npragma solidity ^0.8.20;\n\ncontract {name} {{\n{body}\n}}\n"


@pytest.mark.parametrize("sig,expected", SELECTOR_VECTORS)
def test_selector_vectors(sig, expected):
    assert selector_hex(sig) == expected
    assert _oracle_selector(sig) == expected


def test_selector_vector_count():
    assert len(SELECTOR_VECTORS) >= 20


@pytest.mark.parametrize("sig", [
    "transfer(address, uint256)", "transfer(uint,address)", "Transfer", "f(uint7)", "f(bytes33)",
    "f((uint256)", "f(uint256))", "1f()", "f(string memory)", "",
])
def test_malformed_signatures_rejected(sig):
    assert not is_canonical_signature(sig)
    with pytest.raises(MalformedSignature):
        compute_selector(sig)


@pytest.mark.parametrize("sig", ["f()", "g(uint8[3][],int256,bytes32)", "h((address,uint256)[],bool)", "_x$(bytes)"])
def test_canonical_signatures_accepted(sig):
    assert is_canonical_signature(sig)


def test_core_signatures_are_the_eip_2535_set():
    assert {selector_hex(s) for s in DIAMOND_CORE_SIGNATURES} == {
        "0x1f931c1c", "0x7a0ed627", "0xadfca15e", "0x52ef6b2c", "0xcdffacc6",
    }


def test_known_collision_reported_and_fixed():
    src = (FIXTURES / "clash.sol").read_text()
    table, diags = detect_selector_clashes(_plan(src))
    assert [d.code for d in diags] == ["SEL_CLASH"]
    assert diags[0].details["selector"] == "0x42966c68"
    assert diags[0].severity == "error"
    renames = suggest_selector_fix(diags[0], table)
    assert [(r.old_signature, r.new_signature, r.new_selector) for r in renames] == [
        ("collate_propagate_storage(bytes16)", "collate_propagate_storage_v2(bytes16)", "0xe63e3cec")
    ]
    fixed = apply_selector_renames(load(src), renames)
    _, after = detect_selector_clashes(facetize(fixed))
    assert after == []


def test_clash_with_diamond_core_renames_the_user_function():
    # facets() is part of the diamond core; a user function with that signature must move
    src = _contract("    uint256 n;\n    function facets() external view returns (uint256) { return n; }")
    table, diags = detect_selector_clashes(_plan(src))
    assert diags and diags[0].details["selector"] == "0x7a0ed627"
    renames = suggest_all_fixes(table)
    assert [r.new_signature for r in renames] == ["facets_v2()"]
    assert renames[0].new_selector == _oracle_selector("facets_v2()")


def test_getter_clash_renames_state_variable():
    # the generated getter collate_propagate_storage(bytes16) shares 0x42966c68 with burn(uint256)
    src = _contract(
        "    mapping(bytes16 => uint256) public collate_propagate_storage;\n"
        "    uint256 supply;\n"
        "    function burn(uint256 a) external { supply -= a; }\n"
        "    function tag(bytes16 k) external { collate_propagate_storage[k] = supply; }"
    )
    table, diags = detect_selector_clashes(_plan(src))
    assert len(diags) == 1
    fixed = apply_selector_renames(load(src), suggest_all_fixes(table))
    assert "collate_propagate_storage_v2" in {v.name for v in fixed.storage_vars()}
    sigs = build_selector_table(facetize(fixed)).signatures()
    assert "collate_propagate_storage_v2(bytes16)" in sigs and "burn(uint256)" in sigs


def test_clash_free_plan_has_no_diagnostics(library_source):
    table, diags = detect_selector_clashes(_plan(library_source))
    assert diags == [] and table.is_clash_free


def test_array_of_structs_flagged_with_mapping_suggestion(library_source):
    diags = detect_collision_risks(_plan(library_source))
    risk = [d for d in diags if d.code == "SLOT_ARRAY_OF_STRUCTS"]
    assert len(risk) == 1
    assert risk[0].severity == "warning"
    assert risk[0].suggestion["kind"] == "arrayToMapping"
    assert risk[0].suggestion["text"] == "replace with mapping(uint256 => Book) plus uint256 booksCount"
    assert risk[0].positions[0].line == 11


def test_nested_array_of_structs_flagged():
    src = _contract(
        "    struct P { uint256 a; uint256 b; }\n"
        "    mapping(address => P[]) byOwner;\n"
        "    function add(uint256 a) external { byOwner[msg.sender].push(P(a, a)); }"
    )
    diags = detect_collision_risks(_plan(src))
    risk = [d for d in diags if d.code == "SLOT_ARRAY_OF_STRUCTS"]
    assert len(risk) == 1 and risk[0].suggestion["kind"] == "restructure"


def test_nested_struct_followed_by_members_flagged():
    src = _contract(
        "    struct Inner { uint256 x; }\n"
        "    struct Outer { Inner inner; uint256 after; }\n"
        "    Outer o;\n"
        "    function set(uint256 v) external { o.after = v; }"
    )
    codes = [d.code for d in detect_collision_risks(_plan(src))]
    assert "SLOT_NESTED_STRUCT" in codes


def test_nested_struct_as_last_member_not_flagged():
    src = _contract(
        "    struct Inner { uint256 x; }\n"
        "    struct Outer { uint256 before; Inner inner; }\n"
        "    Outer o;\n"
        "    function set(uint256 v) external { o.before = v; }"
    )
    assert "SLOT_NESTED_STRUCT" not in [d.code for d in detect_collision_risks(_plan(src))]


def test_packed_tail_is_informational():
    src = _contract("    uint128 a;\n    function set(uint128 v) external { a = v; }")
    tail = [d for d in detect_collision_risks(_plan(src)) if d.code == "SLOT_PACKED_TAIL"]
    assert len(tail) == 1 and tail[0].severity == "info" and tail[0].details["freeBytes"] == 16


def test_array_to_mapping_transform_closes_the_warning(library_source):
    unit = load(library_source)
    before = build_selector_table(facetize(unit)).signatures()
    fixed = apply_array_to_mapping_transform(unit, "books")
    plan = facetize(fixed)
    _, diags = analyze(plan)
    assert "SLOT_ARRAY_OF_STRUCTS" not in [d.code for d in diags]
    assert build_selector_table(plan).signatures() == before
    names = {v.name for v in fixed.storage_vars()}
    assert {"books", "booksCount"} <= names


def test_array_to_mapping_handles_pop_and_delete():
    src = _contract(
        "    struct S { uint256 a; uint256 b; }\n"
        "    S[] items;\n"
        "    function add(uint256 a) external { items.push(S(a, a)); }\n"
        "    function drop() external { items.pop(); }\n"
        "    function clear(uint256 i) external { delete items[i]; }\n"
        "    function first() external view returns (uint256) { return items[0].a; }\n"
        "    function size() external view returns (uint256) { return items.length; }"
    )
    fixed = apply_array_to_mapping_transform(load(src), "items")
    _, diags = analyze(facetize(fixed))
    assert "SLOT_ARRAY_OF_STRUCTS" not in [d.code for d in diags]


def test_array_to_mapping_rejects_whole_array_use():
    src = _contract(
        "    struct S { uint256 a; }\n"
        "    S[] items;\n"
        "    function all() external view returns (S[] memory) { return items; }"
    )
    with pytest.raises(UnsupportedUsage):
        apply_array_to_mapping_transform(load(src), "items")
