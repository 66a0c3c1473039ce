import json
import os
import random

import pytest
from conftest import TESTS
from eth_abi import encode as oracle_encode
from manifests import fixture, library, random_chain, storage_manifest, synthetic

from seam.diagnostics import ClashInNew, ForkDetected, IrreversibleUpgrade, UnknownVersion, VersionGap
from seam.pipeline import convert
from seam.security import selector_hex
from seam.upgrade import (
    ADD,
    REMOVE,
    REPLACE,
    ZERO_ADDRESS,
    FacetCut,
    append_changelog,
    apply_cuts,
    diff_layouts,
    diff_selectors,
    emit_deployment_plan,
    empty_changelog,
    fold,
    load_changelog,
    make_entry,
    record_upgrade,
    revert_plan,
    save_changelog,
    selector_map,
    validate_upgrade,
    verify_changelog,
)
from seam.upgrade.changelog import entry_at, entry_cuts
from seam.upgrade.plan import check_plan, decode_diamond_cut

TS = "2023-11-14T22:13:20Z"


def _codes(report):
    return [f.code for f in report.findings]


# -- storage layout compatibility -------------------------------------------


def test_identical_manifests_are_compatible():
    report = diff_layouts(library(), library(2))
    assert report.verdict == "compatible" and report.findings == []


def test_struct_growth_inside_array_is_incompatible():
    report = validate_upgrade(library(), fixture("library_v2_pages.sol", 2))
    assert report.verdict == "incompatible"
    finding = report.findings[0]
    assert finding.code == "UPGRADE_INCOMPATIBLE"
    assert "Book" in finding.message and "books[i]" in finding.message
    assert finding.details["namespace"] == "seam.storage.v1.AddBookFacet"


def test_appending_a_variable_is_compatible():
    report = validate_upgrade(library(), fixture("library_v2_append.sol", 2))
    assert report.verdict == "compatible"


@pytest.mark.parametrize("old,new,uses,verdict", [
    ("uint256 a; uint256 c;", "uint256 a; uint256 b; uint256 c;", "a = 1;", "incompatible"),
    ("uint256 a; uint256 c;", "uint256 a;", "a = 1;", "incompatible"),
    ("uint256 a;", "uint128 a;", "a = 1;", "incompatible"),
    ("uint128 a;", "uint128 a; uint128 b;", "a = 1;", "compatible"),
    ("uint256 a;", "uint256 a; mapping(uint256 => uint256) m;", "a = 1;", "compatible"),
    ("mapping(address => uint256) m;", "mapping(uint256 => uint256) m;", "m;", "incompatible"),
    ("uint256[] xs;", "mapping(uint256 => uint256) xs;", "xs;", "incompatible"),
    ("uint256[3] xs;", "uint256[4] xs;", "xs;", "incompatible"),
    ("uint256[3] xs; uint256 b;", "uint256[4] xs; uint256 b;", "xs;", "incompatible"),
    ("enum E { A, B }\nE e;", "enum E { A, B, C }\nE e;", "e;", "compatible"),
    ("enum E { A, B }\nE e;", "enum E { B, A }\nE e;", "e;", "incompatible"),
    ("struct S { uint256 x; }\nS s;", "struct S { uint256 x; uint256 y; }\nS s;", "s;", "compatibleWithWarnings"),
    ("struct S { uint256 x; }\nS s; uint256 b;", "struct S { uint256 x; uint256 y; }\nS s; uint256 b;", "s;",
     "incompatible"),
    ("struct S { uint256 x; }\nmapping(uint256 => S) m;", "struct S { uint256 x; uint256 y; }\nmapping(uint256 => S) m;",
     "m;", "compatibleWithWarnings"),
    ("struct S { uint256 x; uint256 y; }\nS s;", "struct S { uint256 y; uint256 x; }\nS s;", "s;", "incompatible"),
])
def test_layout_rule_table(old, new, uses, verdict):
    report = diff_layouts(storage_manifest(old, uses), storage_manifest(new, uses, 2))
    assert report.verdict == verdict, [f.message for f in report.findings]


def test_relocated_variable_and_orphaned_namespace():
    old = _two_facets("a = 1;", "b = 2;")
    new = _two_facets("a = 1; b = 2;", "b = 3;", merge=True)
    report = diff_layouts(old, new)
    assert report.verdict == "incompatible"
    assert "UPGRADE_ORPHANED_NAMESPACE" in _codes(report)
    moved = [f for f in report.findings if f.code == "UPGRADE_INCOMPATIBLE"]
    assert moved and moved[0].details["label"] == "b"


def _two_facets(f_body: str, g_body: str, merge: bool = False) -> dict:
    src = (
        "pragma solidity ^0.8.20;\ncontract C {\n    uint256 a;\n    uint256 b;\n"
        f"    function f() external {{ {f_body} }}\n    function g() external {{ {g_body} }}\n}}\n"
    )
    m = convert(src, version=2 if merge else 1).manifest
    assert len(m["facets"]) == (1 if merge else 2)
    return m


def test_cut_validation():
    old = library()
    new = fixture("library_v3_function.sol", 2)
    bogus = FacetCut("AddBookFacet", REPLACE, ("0xdeadbeef",), "@deploy:AddBookFacet")
    report = validate_upgrade(old, new, [bogus])
    assert "UPGRADE_INVALID_CUT" in _codes(report) and report.verdict == "incompatible"
    core = FacetCut("AddBookFacet", REMOVE, ("0x1f931c1c",), ZERO_ADDRESS)
    assert "UPGRADE_INVALID_CUT" in _codes(validate_upgrade(old, new, [core]))
    assert validate_upgrade(old, new, diff_selectors(old, new)).verdict == "compatible"


def test_removing_functions_is_reported():
    old = synthetic(1, {"AFacet": (["x(uint256)", "y()"], 0)})
    new = synthetic(2, {"AFacet": (["x(uint256)"], 1)})
    report = validate_upgrade(old, new)
    assert report.verdict == "compatible" and "UPGRADE_REMOVES_FUNCTIONS" in _codes(report)


# -- selector diffs ---------------------------------------------------------


def test_unchanged_manifest_needs_no_cuts():
    assert diff_selectors(library(), library(2)) == []


def test_new_function_is_an_add_with_its_selector():
    old = fixture("library_v2_append.sol", 2)
    new = fixture("library_v3_function.sol", 3)
    cuts = diff_selectors(old, new)
    adds = [c for c in cuts if c.action == ADD]
    assert [c.selectors for c in adds] == [(selector_hex("getPageCount(uint256)"),)]
    assert adds[0].facet_address == "@deploy:AddBookFacet"
    # the facet's code changed, so the surviving selectors move to the new build
    assert [c.action for c in cuts] == [ADD, REPLACE]


def test_removed_facet_is_a_zero_address_remove():
    old = synthetic(1, {"AFacet": (["a()"], 0), "BFacet": (["b()", "c()"], 0)})
    new = synthetic(2, {"AFacet": (["a()"], 0)})
    cuts = diff_selectors(old, new)
    assert [(c.action, c.facet_address, c.selectors) for c in cuts] == [
        (REMOVE, ZERO_ADDRESS, tuple(sorted((selector_hex("b()"), selector_hex("c()")))))
    ]


def test_clashing_new_manifest_is_refused():
    new = synthetic(2, {"AFacet": (["burn(uint256)"], 0), "BFacet": (["collate_propagate_storage(bytes16)"], 0)})
    with pytest.raises(ClashInNew):
        diff_selectors(None, new)


@pytest.mark.parametrize("seed", range(40))
def test_diff_and_apply_are_inverse(seed):
    a, b = random_chain(seed, 2) if seed % 2 else random_chain(seed, 6)[::5]
    cuts = diff_selectors(a, b)
    assert apply_cuts(selector_map(a), cuts) == selector_map(b)
    assert apply_cuts(selector_map(b), diff_selectors(b, a)) == selector_map(a)


# -- deployment plans -------------------------------------------------------


def test_genesis_plan_steps():
    m = library()
    plan = emit_deployment_plan(None, m, diff_selectors(None, m))
    check_plan(plan)
    assert [s["kind"] for s in plan["steps"]] == ["deployFacet", "deployDiamond", "diamondCut", "verify"]
    assert [s["step"] for s in plan["steps"]] == [1, 2, 3, 4]
    cut = plan["steps"][2]
    assert cut["target"] == "@deploy:Diamond"
    assert "{{@deploy:AddBookFacet}}" in cut["calldata"] and cut["calldata"].startswith("0x1f931c1c")
    verify = plan["steps"][3]["loupe"]
    assert verify["facets"][0]["functionSelectors"] == sorted(s["selector"] for s in m["facets"][0]["selectors"])
    assert plan["complete"]


def test_plan_with_addresses_has_concrete_calldata():
    m = library()
    addr = "0x" + "12" * 20
    plan = emit_deployment_plan(None, m, diff_selectors(None, m), addresses={"AddBookFacet": addr})
    step = next(s for s in plan["steps"] if s["kind"] == "diamondCut")
    cuts, init, _ = decode_diamond_cut(bytes.fromhex(step["calldata"][2:]))
    assert cuts[0][0] == addr and init == ZERO_ADDRESS


def test_noop_upgrade_has_zero_steps():
    plan = emit_deployment_plan(library(), library(2), [])
    check_plan(plan)
    assert plan["steps"] == []
    assert any("nothing to deploy" in n for n in plan["notes"])


def test_removing_a_facet_deploys_nothing():
    old = synthetic(1, {"AFacet": (["a()"], 0), "BFacet": (["b()"], 0)})
    new = synthetic(2, {"AFacet": (["a()"], 0)})
    plan = emit_deployment_plan(old, new, diff_selectors(old, new))
    check_plan(plan)
    kinds = [s["kind"] for s in plan["steps"]]
    assert kinds == ["diamondCut", "verify"]
    assert len(plan["steps"][0]["cuts"]) == 1
    assert plan["steps"][1]["loupe"]["unroutedSelectors"] == [selector_hex("b()")]


_INIT_SRC = (
    "pragma solidity ^0.8.20;\ncontract Vault {\n    address owner;\n    uint256 fee;\n"
    "    constructor(address o, uint256 f) { owner = o; fee = f; }\n"
    "    function setFee(uint256 f) external { require(msg.sender == owner); fee = f; }\n}\n"
)


def test_genesis_initializer_needs_arguments():
    m = convert(_INIT_SRC).manifest
    plan = emit_deployment_plan(None, m, diff_selectors(None, m))
    assert plan["complete"] is False
    owner = "0x" + "aa" * 20
    plan = emit_deployment_plan(None, m, diff_selectors(None, m), init_args=[owner, "7"])
    step = next(s for s in plan["steps"] if s["kind"] == "diamondCut")
    expected = selector_hex("initialize(address,uint256)") + oracle_encode(["address", "uint256"], [owner, 7]).hex()
    assert step["initCalldata"] == expected
    assert step["init"] == "@deploy:SetFeeFacet" and plan["complete"]


# -- changelog --------------------------------------------------------------


def _log_with(*manifests):
    log = empty_changelog()
    prev = None
    for m in manifests:
        log, _ = record_upgrade(log, prev, m, timestamp=TS)
        prev = m
    return log


def test_first_entry_and_fold():
    m = library()
    log, cuts = record_upgrade(empty_changelog(), None, m, timestamp=TS)
    assert [e["version"] for e in log["entries"]] == [1]
    assert log["entries"][0]["parentVersion"] is None
    assert fold(log) == selector_map(m)
    assert verify_changelog(log) == []


def test_version_gap_refused():
    m = library(3)
    with pytest.raises(VersionGap):
        append_changelog(empty_changelog(), make_entry(3, None, [], m, timestamp=TS))


def test_fork_detected_on_stale_parent():
    v1, v2 = random_chain(1, 2)
    log = _log_with(v1)
    stale = make_entry(2, 1, diff_selectors(v1, v2), v2, parent_fingerprint="0x" + "00" * 32, timestamp=TS)
    with pytest.raises(ForkDetected):
        append_changelog(log, stale)
    with pytest.raises(ForkDetected):
        record_upgrade(log, synthetic(1, {"OtherFacet": (["z()"], 0)}), v2, timestamp=TS)


def test_genesis_bootstrap_from_existing_manifest():
    v1, v2 = random_chain(5, 2)
    log, _ = record_upgrade(empty_changelog(), v1, v2, timestamp=TS)
    assert [e["version"] for e in log["entries"]] == [1, 2]
    assert fold(log, 1) == selector_map(v1) and fold(log) == selector_map(v2)


def test_unknown_version():
    with pytest.raises(UnknownVersion):
        fold(_log_with(library()), 4)


def test_tampering_is_detected():
    chain = random_chain(9, 4)
    log = _log_with(*chain)
    assert verify_changelog(log) == []
    tampered = json.loads(json.dumps(log))
    tampered["entries"][1]["note"] = "edited"
    assert [d.code for d in verify_changelog(tampered)] == ["CHANGELOG_BROKEN"]
    reordered = json.loads(json.dumps(log))
    reordered["entries"][2]["cuts"] = []
    assert "CHANGELOG_BROKEN" in [d.code for d in verify_changelog(reordered)]


def test_timestamps_are_reproducible(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    log, _ = record_upgrade(empty_changelog(), None, library())
    assert log["entries"][0]["timestampUTC"] == TS


def test_save_and_load_round_trip(tmp_path):
    log = _log_with(*random_chain(2, 3))
    path = tmp_path / "changelog.json"
    save_changelog(log, path)
    assert load_changelog(path) == log
    assert os.listdir(tmp_path) == ["changelog.json"]
    assert load_changelog(tmp_path / "missing.json")["entries"] == []


def test_later_versions_reuse_earlier_deployments():
    chain = [synthetic(1, {"AFacet": (["a()"], 0)}),
             synthetic(2, {"AFacet": (["a()"], 0), "BFacet": (["b()"], 0)})]
    log = _log_with(*chain)
    cuts = entry_cuts(entry_at(log, 2))
    assert [(c.action, c.facet_address) for c in cuts] == [(ADD, "@deploy:BFacet")]


# -- reverts ----------------------------------------------------------------


def test_revert_of_an_added_function():
    v1, v2 = library(), fixture("library_v3_function.sol", 2)
    log = _log_with(v1, v2)
    cuts, plan = revert_plan(log, 1, v2)
    check_plan(plan)
    removes = [c for c in cuts if c.action == REMOVE]
    assert [c.selectors for c in removes] == [(selector_hex("getPageCount(uint256)"),)]
    replaces = [c for c in cuts if c.action == REPLACE]
    assert [c.facet_address for c in replaces] == ["@deploy:AddBookFacet@v1"]
    assert apply_cuts(fold(log), cuts) == fold(log, 1)
    assert plan["kind"] == "revert" and plan["revertTo"] == 1 and plan["version"] == 3
    assert not plan["irreversible"]
    assert [s["kind"] for s in plan["steps"]] == ["diamondCut", "verify"]  # nothing new to deploy


def test_revert_to_current_version_is_empty():
    chain = random_chain(4, 3)
    log = _log_with(*chain)
    cuts, plan = revert_plan(log, 3, chain[-1])
    assert cuts == [] and plan["steps"] == []


def test_revert_across_array_to_mapping_is_irreversible():
    source = (TESTS / "corpus" / "library.sol").read_text()
    fixed = convert(source, fixes=True, version=2)
    assert fixed.ok and fixed.transformed == ["books"]
    v1, v2 = library(), fixed.manifest
    log = _log_with(v1, v2)
    _, plan = revert_plan(log, 1, v2)
    assert plan["irreversible"] is True
    assert any(f["code"] == "UPGRADE_INCOMPATIBLE" for f in plan["findings"])
    with pytest.raises(IrreversibleUpgrade):
        revert_plan(log, 1, v2, strict=True)


@pytest.mark.parametrize("seed", range(30))
def test_changelog_algebra_on_random_chains(seed):
    rng = random.Random(seed)
    chain = random_chain(seed, rng.randint(1, 10))
    log = _log_with(*chain)
    assert verify_changelog(log) == []
    for m in chain:
        assert fold(log, m["version"]) == selector_map(m)
    k = rng.randint(1, len(chain))
    cuts, _ = revert_plan(log, k, chain[-1])
    state = apply_cuts(selector_map(chain[-1]), cuts)
    assert state == selector_map(chain[k - 1])
    for e in log["entries"][k:]:
        state = apply_cuts(state, entry_cuts(e))
    assert state == selector_map(chain[-1])


def test_revert_of_a_function_only_addition_is_pure_removal():
    v1 = synthetic(1, {"BookFacet": (["addBook(string,string,uint256)", "bookCount()"], 0)})
    v2 = synthetic(2, {"BookFacet": (["addBook(string,string,uint256)", "bookCount()"], 0),
                       "PagesFacet": (["getPageCount(uint256)"], 0)})
    log = _log_with(v1, v2)
    cuts, _ = revert_plan(log, 1, v2)
    assert [(c.action, c.facet_address, c.selectors) for c in cuts] == [
        (REMOVE, ZERO_ADDRESS, (selector_hex("getPageCount(uint256)"),))
    ]
