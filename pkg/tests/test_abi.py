import random

import pytest
from eth_abi import encode as oracle_encode
from vectors import EMPTY_DIAMOND_CUT_HEX

from seam.diagnostics import UnresolvedPlaceholder
from seam.upgrade import abi
from seam.upgrade.cuts import ADD, REMOVE, REPLACE, ZERO_ADDRESS, FacetCut
from seam.upgrade.plan import (
    DIAMOND_CUT_ARGS,
    calldata_bytes,
    decode_diamond_cut,
    encode_diamond_cut,
    render_calldata,
)


def _random_cuts(rng: random.Random) -> tuple[list[FacetCut], str, bytes]:
    cuts = []
    for i in range(rng.randint(0, 5)):
        action = rng.choice([ADD, REPLACE, REMOVE])
        sels = sorted({"0x" + rng.randbytes(4).hex() for _ in range(rng.randint(0, 9))})
        addr = ZERO_ADDRESS if action == REMOVE else "0x" + rng.randbytes(20).hex()
        cuts.append(FacetCut(f"F{i}", action, tuple(sels), addr))
    init = rng.choice([ZERO_ADDRESS, "0x" + rng.randbytes(20).hex()])
    calldata = rng.randbytes(rng.choice([0, 4, 31, 32, 33, 68, 100]))
    return cuts, init, calldata


def _oracle(cuts, init, calldata) -> bytes:
    payload = [(c.facet_address, c.action, [bytes.fromhex(s[2:]) for s in c.selectors]) for c in cuts]
    return bytes.fromhex("1f931c1c") + oracle_encode(DIAMOND_CUT_ARGS, [payload, init, calldata])


def test_empty_cut_golden():
    data = encode_diamond_cut([])
    assert len(data) == 164
    assert "0x" + data.hex() == EMPTY_DIAMOND_CUT_HEX
    assert data == _oracle([], ZERO_ADDRESS, b"")


@pytest.mark.parametrize("seed", range(60))
def test_random_payloads_match_reference_encoder(seed):
    cuts, init, calldata = _random_cuts(random.Random(seed))
    data = encode_diamond_cut(cuts, init, calldata)
    assert data == _oracle(cuts, init, calldata)
    decoded, d_init, d_calldata = decode_diamond_cut(data)
    assert decoded == [(c.facet_address, c.action, c.selectors) for c in cuts]
    assert (d_init, d_calldata) == (init, calldata)


@pytest.mark.parametrize("types,values", [
    (["uint256", "bool", "address"], [2**256 - 1, True, "0x" + "11" * 20]),
    (["int8", "int256"], [-1, -(2**255)]),
    (["bytes", "string"], [b"\x00" * 33, "héllo"]),
    (["uint8[3]", "bytes32[]"], [[1, 2, 3], [b"\x01" * 32, b"\x02" * 32]]),
    (["(uint256,string)[]", "bytes4"], [[(1, "a"), (2, "bc")], b"\xde\xad\xbe\xef"]),
    (["string[2]", "uint16[][]"], [["x", "yy"], [[1], [], [2, 3]]]),
])
def test_general_types_match_reference_and_round_trip(types, values):
    ours = abi.encode(types, values)
    assert ours == oracle_encode(types, values)
    back = abi.decode(types, ours)
    assert abi.encode(types, back) == ours


@pytest.mark.parametrize("types,values", [
    (["uint8"], [256]),
    (["uint256"], [-1]),
    (["int8"], [128]),
    (["address"], ["0x1234"]),
    (["bytes4"], [b"\x00" * 5]),
    (["uint8[2]"], [[1, 2, 3]]),
])
def test_out_of_range_values_rejected(types, values):
    with pytest.raises(abi.AbiError):
        abi.encode(types, values)


@pytest.mark.parametrize("text", ["uint7", "bytes0", "bytes33", "(uint256", "foo", "uint256[x]"])
def test_bad_type_strings_rejected(text):
    with pytest.raises(abi.AbiError):
        abi.parse_type(text)


def test_truncated_data_rejected():
    data = encode_diamond_cut([FacetCut("A", ADD, ("0x12345678",), "0x" + "22" * 20)])
    with pytest.raises(abi.AbiError):
        decode_diamond_cut(data[:-40])
    with pytest.raises(abi.AbiError):
        decode_diamond_cut(b"\x00" * 4 + data[4:])


def test_placeholders_must_be_resolved_before_encoding():
    cut = FacetCut("BookFacet", ADD, ("0x12345678",), "@deploy:BookFacet")
    with pytest.raises(UnresolvedPlaceholder):
        encode_diamond_cut([cut])


def test_rendered_calldata_marks_placeholders_and_fills_back():
    cuts = [
        FacetCut("BookFacet", ADD, ("0x12345678", "0x9abcdef0"), "@deploy:BookFacet"),
        FacetCut("Old", REMOVE, ("0x0badf00d",), ZERO_ADDRESS),
    ]
    text = render_calldata(cuts)
    assert text.count("{{@deploy:BookFacet}}") == 1
    addr = "0x" + "ab" * 20
    filled = calldata_bytes(text, {"BookFacet": addr})
    concrete = [FacetCut("BookFacet", ADD, cuts[0].selectors, addr), cuts[1]]
    assert filled == encode_diamond_cut(concrete) == _oracle(concrete, ZERO_ADDRESS, b"")
    with pytest.raises(UnresolvedPlaceholder):
        calldata_bytes(text, {})
