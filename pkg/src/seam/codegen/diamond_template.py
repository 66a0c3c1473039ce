"""Solidity source of the generated diamond proxy.

The diamond implements Add/Replace/Remove cuts with an owner guard, the four
loupe views, and a fallback that delegatecalls the facet registered for
``msg.sig``. Its own state lives in a dedicated diamond-storage namespace.
"""

DIAMOND_NAMESPACE = "seam.storage.v1.Diamond"

TEMPLATE = """\
// SPDX-License-Identifier: {license}
pragma solidity {pragma};

// {header}

contract Diamond {{
    enum FacetCutAction {{
        Add,
        Replace,
        Remove
    }}

    struct FacetCut {{
        address facetAddress;
        FacetCutAction action;
        bytes4[] functionSelectors;
    }}

    struct Facet {{
        address facetAddress;
        bytes4[] functionSelectors;
    }}

    struct FacetAddressAndPosition {{
        address facetAddress;
        uint96 selectorPosition;
    }}

    struct DiamondLayout {{
        mapping(bytes4 => FacetAddressAndPosition) facetOf;
        bytes4[] selectors;
        address owner;
    }}

    error FunctionNotFound(bytes4 selector);
    error NotContractOwner(address caller, address owner);
    error NoSelectorsInCut(address facetAddress);
    error ZeroFacetAddress(bytes4 selector);
    error NonZeroRemoveAddress(address facetAddress);
    error NoCodeAtAddress(address target);
    error SelectorAlreadyExists(bytes4 selector);
    error SelectorNotFound(bytes4 selector);
    error ReplaceWithSameFacet(bytes4 selector);
    error CoreSelectorImmutable(bytes4 selector);
    error InitWithoutAddress(uint256 calldataLength);
    error InitFailed(address init, bytes reason);

    event DiamondCut(FacetCut[] _diamondCut, address _init, bytes _calldata);

    bytes32 constant DIAMOND_POSITION = {position}; // keccak256("{namespace}")

    constructor() {{
        _layout().owner = msg.sender;
    }}

    function diamondCut(FacetCut[] calldata _diamondCut, address _init, bytes calldata _calldata) external {{
        DiamondLayout storage l = _layout();
        if (msg.sender != l.owner) {{
            revert NotContractOwner(msg.sender, l.owner);
        }}
        for (uint256 i = 0; i < _diamondCut.length; i++) {{
            FacetCut calldata cut = _diamondCut[i];
            if (cut.functionSelectors.length == 0) {{
                revert NoSelectorsInCut(cut.facetAddress);
            }}
            if (cut.action == FacetCutAction.Remove) {{
                if (cut.facetAddress != address(0)) {{
                    revert NonZeroRemoveAddress(cut.facetAddress);
                }}
            }} else if (cut.facetAddress.code.length == 0) {{
                revert NoCodeAtAddress(cut.facetAddress);
            }}
            for (uint256 j = 0; j < cut.functionSelectors.length; j++) {{
                bytes4 selector = cut.functionSelectors[j];
                if (_isCoreSelector(selector)) {{
                    revert CoreSelectorImmutable(selector);
                }}
                address current = l.facetOf[selector].facetAddress;
                if (cut.action == FacetCutAction.Add) {{
                    if (current != address(0)) {{
                        revert SelectorAlreadyExists(selector);
                    }}
                    l.facetOf[selector] = FacetAddressAndPosition(cut.facetAddress, uint96(l.selectors.length));
                    l.selectors.push(selector);
                }} else if (cut.action == FacetCutAction.Replace) {{
                    if (current == address(0)) {{
                        revert SelectorNotFound(selector);
                    }}
                    if (current == cut.facetAddress) {{
                        revert ReplaceWithSameFacet(selector);
                    }}
                    l.facetOf[selector].facetAddress = cut.facetAddress;
                }} else {{
                    if (current == address(0)) {{
                        revert SelectorNotFound(selector);
                    }}
                    uint256 position = l.facetOf[selector].selectorPosition;
                    uint256 lastPosition = l.selectors.length - 1;
                    if (position != lastPosition) {{
                        bytes4 lastSelector = l.selectors[lastPosition];
                        l.selectors[position] = lastSelector;
                        l.facetOf[lastSelector].selectorPosition = uint96(position);
                    }}
                    l.selectors.pop();
                    delete l.facetOf[selector];
                }}
            }}
        }}
        emit DiamondCut(_diamondCut, _init, _calldata);
        _initializeDiamondCut(_init, _calldata);
    }}

    function facets() external view returns (Facet[] memory) {{
        DiamondLayout storage l = _layout();
        uint256 n = l.selectors.length;
        Facet[] memory all = new Facet[](n);
        uint256[] memory counts = new uint256[](n);
        uint256 found = 0;
        for (uint256 i = 0; i < n; i++) {{
            bytes4 selector = l.selectors[i];
            address facet = l.facetOf[selector].facetAddress;
            uint256 k = 0;
            while (k < found && all[k].facetAddress != facet) {{
                k++;
            }}
            if (k == found) {{
                all[k].facetAddress = facet;
                all[k].functionSelectors = new bytes4[](n);
                found++;
            }}
            all[k].functionSelectors[counts[k]] = selector;
            counts[k]++;
        }}
        Facet[] memory result = new Facet[](found);
        for (uint256 k = 0; k < found; k++) {{
            bytes4[] memory selectors = new bytes4[](counts[k]);
            for (uint256 j = 0; j < counts[k]; j++) {{
                selectors[j] = all[k].functionSelectors[j];
            }}
            result[k] = Facet(all[k].facetAddress, selectors);
        }}
        return result;
    }}

    function facetFunctionSelectors(address _facet) external view returns (bytes4[] memory) {{
        DiamondLayout storage l = _layout();
        uint256 n = l.selectors.length;
        bytes4[] memory buffer = new bytes4[](n);
        uint256 count = 0;
        for (uint256 i = 0; i < n; i++) {{
            bytes4 selector = l.selectors[i];
            if (l.facetOf[selector].facetAddress == _facet) {{
                buffer[count] = selector;
                count++;
            }}
        }}
        bytes4[] memory result = new bytes4[](count);
        for (uint256 i = 0; i < count; i++) {{
            result[i] = buffer[i];
        }}
        return result;
    }}

    function facetAddresses() external view returns (address[] memory) {{
        DiamondLayout storage l = _layout();
        uint256 n = l.selectors.length;
        address[] memory buffer = new address[](n);
        uint256 count = 0;
        for (uint256 i = 0; i < n; i++) {{
            address facet = l.facetOf[l.selectors[i]].facetAddress;
            bool seen = false;
            for (uint256 k = 0; k < count; k++) {{
                if (buffer[k] == facet) {{
                    seen = true;
                    break;
                }}
            }}
            if (!seen) {{
                buffer[count] = facet;
                count++;
            }}
        }}
        address[] memory result = new address[](count);
        for (uint256 i = 0; i < count; i++) {{
            result[i] = buffer[i];
        }}
        return result;
    }}

    function facetAddress(bytes4 _functionSelector) external view returns (address) {{
        return _layout().facetOf[_functionSelector].facetAddress;
    }}

    fallback() external payable {{
        address facet = _layout().facetOf[msg.sig].facetAddress;
        if (facet == address(0)) {{
            revert FunctionNotFound(msg.sig);
        }}
        assembly {{
            calldatacopy(0, 0, calldatasize())
            let result := delegatecall(gas(), facet, 0, calldatasize(), 0, 0)
            returndatacopy(0, 0, returndatasize())
            switch result
            case 0 {{
                revert(0, returndatasize())
            }}
            default {{
                return(0, returndatasize())
            }}
        }}
    }}

    receive() external payable {{}}

    function _initializeDiamondCut(address _init, bytes calldata _calldata) internal {{
        if (_init == address(0)) {{
            if (_calldata.length != 0) {{
                revert InitWithoutAddress(_calldata.length);
            }}
            return;
        }}
        if (_init.code.length == 0) {{
            revert NoCodeAtAddress(_init);
        }}
        (bool ok, bytes memory reason) = _init.delegatecall(_calldata);
        if (!ok) {{
            if (reason.length > 0) {{
                assembly {{
                    revert(add(reason, 32), mload(reason))
                }}
            }}
            revert InitFailed(_init, reason);
        }}
    }}

    function _isCoreSelector(bytes4 selector) internal pure returns (bool) {{
        return {core_check};
    }}

    function _layout() internal pure returns (DiamondLayout storage l) {{
        bytes32 position = DIAMOND_POSITION;
        assembly {{
            l.slot := position
        }}
    }}
}}
"""
