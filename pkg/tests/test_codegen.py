import json
import re

import pytest
import solc_oracle
from conftest import CORPUS, requires_solc
from contract_gen import generate

from seam.codegen import check_bundle, emit_manifest, generate_bundle, write_bundle
from seam.facetizer import facetize
from seam.frontend import load
from seam.layout import serialize_layout
from seam.schemas import is_valid
from seam.security import DIAMOND_CORE_SIGNATURES, compute_selector


def _bundle(src: str):
    return generate_bundle(facetize(load(src)))


def _contract(body: str, name: str = "C") -> str:
    return f"pragma solidity ^0.8.20;\ncontract {name} {{\n{body}\n}}\n"


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_corpus_bundle_reparses_cleanly(path):
    assert check_bundle(_bundle(path.read_text())) == []


def test_generated_contract_bundles_reparse_cleanly():
    for seed in range(40):
        assert check_bundle(_bundle(generate(seed).source)) == [], seed


@requires_solc
def test_bundles_compile_under_reference_compiler():
    sources = [p.read_text() for p in CORPUS] + [generate(seed).source for seed in range(5)]
    for text in sources:
        files = {k: v for k, v in _bundle(text).files().items() if k.endswith(".sol")}
        result = solc_oracle.compile_standard(files, outputs=("abi",))
        assert solc_oracle.errors(result) == [], [e["formattedMessage"] for e in solc_oracle.errors(result)]


@requires_solc
def test_compiled_diamond_exposes_exactly_the_core_interface(library_source):
    files = {k: v for k, v in _bundle(library_source).files().items() if k.endswith(".sol")}
    result = solc_oracle.compile_standard(files, outputs=("abi",))
    abi = result["contracts"]["Diamond.sol"]["Diamond"]["abi"]
    sigs = {f"{e['name']}({','.join(_abi_type(i) for i in e['inputs'])})" for e in abi if e["type"] == "function"}
    assert sigs == set(DIAMOND_CORE_SIGNATURES)


def _abi_type(param: dict) -> str:
    t = param["type"]
    if t.startswith("tuple"):
        return "(" + ",".join(_abi_type(c) for c in param["components"]) + ")" + t[len("tuple"):]
    return t


def test_diamond_routes_and_reverts_on_unknown_selector(library_source):
    diamond = _bundle(library_source).diamond_source
    assert "FunctionNotFound" in diamond
    assert "delegatecall" in diamond
    for sig in DIAMOND_CORE_SIGNATURES:
        assert f"0x{compute_selector(sig).hex()}" in diamond


def test_facet_uses_namespaced_storage(library_source):
    bundle = _bundle(library_source)
    lib = bundle.storage_lib_sources["AddBookFacet"]
    assert 'keccak256("seam.storage.v1.AddBookFacet")' in lib or "seam.storage.v1.AddBookFacet" in lib
    assert re.search(r"\.slot\s*:=", lib)


def test_manifest_is_schema_valid_and_sorted(library_source):
    manifest = _bundle(library_source).manifest
    assert is_valid(manifest, "manifest")
    assert [f["name"] for f in manifest["facets"]] == ["AddBookFacet"]
    sels = [s["selector"] for s in manifest["facets"][0]["selectors"]]
    assert sels == sorted(sels) and len(sels) == 3
    assert manifest["facets"][0]["sourceHash"].startswith("0x")


def test_manifest_layout_matches_serialized_layout(library_source):
    plan = facetize(load(library_source))
    manifest = emit_manifest(plan)
    assert manifest["facets"][0]["layout"] == serialize_layout(plan.facets[0].storage_layout)


def test_manifest_rejects_version_zero(library_source):
    with pytest.raises(ValueError):
        emit_manifest(facetize(load(library_source)), version=0)


@pytest.mark.parametrize("path", CORPUS[:4], ids=lambda p: p.stem)
def test_generation_is_deterministic(path):
    a = _bundle(path.read_text()).files()
    b = _bundle(path.read_text()).files()
    assert a == b


def test_shared_library_holds_helpers_used_by_two_facets():
    src = _contract(
        "    uint256 a;\n    uint256 b;\n"
        "    function f() external { a = _twice(1); }\n"
        "    function g() external { b = _twice(2); }\n"
        "    function _twice(uint256 v) internal pure returns (uint256) { return v * 2; }"
    )
    bundle = _bundle(src)
    assert bundle.shared_lib_source is not None and "_twice" in bundle.shared_lib_source
    assert check_bundle(bundle) == []


def test_write_bundle_layout(tmp_path, library_source):
    written = write_bundle(_bundle(library_source), tmp_path)
    rel = sorted(str(p.relative_to(tmp_path)) for p in written)
    assert "Diamond.sol" in rel and "facets/AddBookFacet.sol" in rel
    manifest = json.loads(next(p for p in written if p.suffix == ".json").read_text())
    assert manifest["contractName"] == "Library"
