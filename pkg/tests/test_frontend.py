import pytest
from conftest import CORPUS

from seam.codegen import print_unit
from seam.diagnostics import (
    DuplicateDeclaration,
    SourceSyntaxError,
    UnknownType,
    UnresolvedIdentifier,
    UnsupportedConstruct,
)
from seam.frontend import ast as A
from seam.frontend import load, parse
from seam.frontend.lexer import tokenize


@pytest.mark.parametrize("src,error,where", [
    ("contract A is B { }", UnsupportedConstruct, (1, 12)),
    ("contract A { function f() external { assembly { } } }", UnsupportedConstruct, (1, 38)),
    ("contract A { address o; modifier only() { _; } }", UnsupportedConstruct, (1, 25)),
    ("contract A {} contract B {}", UnsupportedConstruct, (1, 15)),
    ("contract A { function f( }", SourceSyntaxError, (1, 26)),
    ("contract A { function f() external { x = 1; } }", UnresolvedIdentifier, (1, 38)),
    ("contract A { uint a; uint a; }", DuplicateDeclaration, (1, 22)),
    ("contract A { Foo x; }", UnknownType, (1, 14)),
])
def test_rejections_carry_positions(src, error, where):
    with pytest.raises(error) as info:
        load(src)
    assert (info.value.pos.line, info.value.pos.column) == where
    diag = info.value.to_diagnostic()
    assert diag.severity == "error" and diag.positions[0].line == where[0]


def test_lexer_tracks_lines_and_skips_comments():
    toks = tokenize("// c\ncontract /* x\n y */ A {\n}")
    words = [(t.value, t.pos.line) for t in toks if t.value]
    assert words[:3] == [("contract", 2), ("A", 3), ("{", 3)]


def test_state_vars_functions_and_types(library_source):
    unit = load(library_source)
    assert unit.name == "Library"
    assert [v.name for v in unit.storage_vars()] == ["books"]
    assert [f.signature() for f in unit.functions if f.is_external] == [
        "addBook(string,string,uint256)", "getBook(uint256)", "bookCount()",
    ]
    add = next(f for f in unit.functions if f.name == "addBook")
    assert "books" in add.writes


def test_public_state_vars_get_synthesized_getters():
    unit = load("contract A { mapping(address => uint256[]) public balances; uint8 public constant D = 18; }")
    getters = {f.signature() for f in unit.external_functions() if f.synthesized}
    assert getters == {"balances(address,uint256)", "D()"}


def test_internal_call_effects_are_recorded():
    unit = load(
        "contract A { uint256 n; function f() external { g(); } function g() internal { n += 1; } }"
    )
    f = next(x for x in unit.functions if x.name == "f")
    g = next(x for x in unit.functions if x.name == "g")
    assert "g" in f.calls and "n" in g.writes


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_printer_round_trip_is_a_fixed_point(path):
    once = print_unit(load(path.read_text()))
    twice = print_unit(load(once))
    assert once == twice


def test_positions_on_nodes(library_source):
    unit = parse(library_source)
    missing = [n for n in A.walk(unit) if isinstance(n, (A.FuncDef, A.VarDecl, A.StructDef)) and n.pos is None]
    assert missing == []


def test_unicode_string_literals_accepted():
    unit = load('contract A { string s = "h\\u00e9llo"; function f() external view returns (string memory) { return s; } }')
    assert unit.storage_vars()[0].name == "s"
