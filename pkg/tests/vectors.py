"""Pinned selector vectors.

Values were computed once with pycryptodome's Keccak-256 (an implementation
independent of seam) and frozen here; tests also recompute them live.
"""

SELECTOR_VECTORS = [
    ("transfer(address,uint256)", "0xa9059cbb"),
    ("diamondCut((address,uint8,bytes4[])[],address,bytes)", "0x1f931c1c"),
    ("facets()", "0x7a0ed627"),
    ("facetFunctionSelectors(address)", "0xadfca15e"),
    ("facetAddresses()", "0x52ef6b2c"),
    ("facetAddress(bytes4)", "0xcdffacc6"),
    ("balanceOf(address)", "0x70a08231"),
    ("approve(address,uint256)", "0x095ea7b3"),
    ("transferFrom(address,address,uint256)", "0x23b872dd"),
    ("totalSupply()", "0x18160ddd"),
    ("allowance(address,address)", "0xdd62ed3e"),
    ("burn(uint256)", "0x42966c68"),
    ("collate_propagate_storage(bytes16)", "0x42966c68"),
    ("collate_propagate_storage_v2(bytes16)", "0xe63e3cec"),
    ("supportsInterface(bytes4)", "0x01ffc9a7"),
    ("owner()", "0x8da5cb5b"),
    ("transferOwnership(address)", "0xf2fde38b"),
    ("safeTransferFrom(address,address,uint256,bytes)", "0xb88d4fde"),
    ("setApprovalForAll(address,bool)", "0xa22cb465"),
    ("initialize()", "0x8129fc1c"),
    ("addBook(string,string,uint256)", "0x04266224"),
    ("getBook(uint256)", "0xe0ff5b8b"),
    ("bookCount()", "0xb905ad78"),
    ("multicall(bytes[])", "0xac9650d8"),
    ("execute((address,uint256,bytes)[])", "0x3f707e6b"),
    ("f(uint8[3][],int256,bytes32)", "0x12aa974f"),
]

# the empty diamondCut call: selector, three head words, two zero-length tails
EMPTY_DIAMOND_CUT_HEX = (
    "0x1f931c1c"
    "0000000000000000000000000000000000000000000000000000000000000060"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000080"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000000000000000000000000000000000000000000000"
)
