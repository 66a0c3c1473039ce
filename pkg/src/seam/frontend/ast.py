"""AST node classes.

Nodes are plain dataclasses. Source positions and resolver annotations are
excluded from equality so that structural comparison (round-trip and
determinism checks) sees only the syntax.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, is_dataclass
from typing import Any, Callable, Iterator, Optional

from ..diagnostics import Pos


def _pos():
    return field(default=None, compare=False, repr=False, kw_only=True)


def _note(default_factory=None):
    if default_factory is None:
        return field(default=None, compare=False, repr=False, kw_only=True)
    return field(default_factory=default_factory, compare=False, repr=False, kw_only=True)


class Node:
    pos: Optional[Pos]

    def children(self) -> Iterator["Node"]:
        for f in fields(self):
            if not f.compare:
                continue
            value = getattr(self, f.name)
            if isinstance(value, Node):
                yield value
            elif isinstance(value, (list, tuple)):
                for item in value:
                    if isinstance(item, Node):
                        yield item


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal."""
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(list(cur.children())))


# -- type names ------------------------------------------------------------


@dataclass
class ElementaryType(Node):
    name: str
    payable: bool = False
    pos: Optional[Pos] = _pos()


@dataclass
class UserType(Node):
    path: tuple[str, ...]
    pos: Optional[Pos] = _pos()

    @property
    def name(self) -> str:
        return ".".join(self.path)


@dataclass
class ArrayType(Node):
    base: Node
    length: Optional[Node] = None
    pos: Optional[Pos] = _pos()


@dataclass
class MappingType(Node):
    key: Node
    value: Node
    pos: Optional[Pos] = _pos()


# -- expressions -----------------------------------------------------------


@dataclass
class Ident(Node):
    name: str
    pos: Optional[Pos] = _pos()
    # resolver annotation: ("state"|"local"|"function"|"struct"|"enum"|"event"|"error"|"builtin"|"import"|"constant", decl)
    binding: Any = _note()


@dataclass
class NumberLit(Node):
    value: str
    unit: Optional[str] = None
    pos: Optional[Pos] = _pos()


@dataclass
class StringLit(Node):
    value: str
    pos: Optional[Pos] = _pos()


@dataclass
class HexLit(Node):
    value: str
    pos: Optional[Pos] = _pos()


@dataclass
class BoolLit(Node):
    value: bool
    pos: Optional[Pos] = _pos()


@dataclass
class TypeExpr(Node):
    """A type used in expression position: ``uint256(x)``, ``abi.decode(d, (uint256))``."""

    type: Node
    pos: Optional[Pos] = _pos()


@dataclass
class Member(Node):
    expr: Node
    name: str
    pos: Optional[Pos] = _pos()


@dataclass
class Index(Node):
    expr: Node
    index: Optional[Node] = None
    pos: Optional[Pos] = _pos()


@dataclass
class Call(Node):
    callee: Node
    args: list[Node] = field(default_factory=list)
    names: Optional[list[str]] = None
    pos: Optional[Pos] = _pos()


@dataclass
class CallOptions(Node):
    expr: Node
    names: list[str]
    values: list[Node]
    pos: Optional[Pos] = _pos()


@dataclass
class Unary(Node):
    op: str
    operand: Node
    prefix: bool = True
    pos: Optional[Pos] = _pos()


@dataclass
class Binary(Node):
    op: str
    left: Node
    right: Node
    pos: Optional[Pos] = _pos()


@dataclass
class Assign(Node):
    op: str
    target: Node
    value: Node
    pos: Optional[Pos] = _pos()


@dataclass
class Conditional(Node):
    cond: Node
    then: Node
    else_: Node
    pos: Optional[Pos] = _pos()


@dataclass
class Tuple(Node):
    items: list[Optional[Node]]
    pos: Optional[Pos] = _pos()


@dataclass
class InlineArray(Node):
    items: list[Node]
    pos: Optional[Pos] = _pos()


@dataclass
class New(Node):
    type: Node
    pos: Optional[Pos] = _pos()


# -- declarations ----------------------------------------------------------


@dataclass
class VarDecl(Node):
    type: Node
    name: Optional[str]
    location: Optional[str] = None
    visibility: Optional[str] = None
    constant: bool = False
    immutable: bool = False
    indexed: bool = False
    value: Optional[Node] = None
    pos: Optional[Pos] = _pos()
    doc: Optional[str] = _note()
    tdesc: Any = _note()


@dataclass
class StructDef(Node):
    name: str
    members: list[VarDecl]
    pos: Optional[Pos] = _pos()


@dataclass
class EnumDef(Node):
    name: str
    values: list[str]
    pos: Optional[Pos] = _pos()


@dataclass
class EventDef(Node):
    name: str
    params: list[VarDecl]
    anonymous: bool = False
    pos: Optional[Pos] = _pos()


@dataclass
class ErrorDef(Node):
    name: str
    params: list[VarDecl]
    pos: Optional[Pos] = _pos()


# -- statements ------------------------------------------------------------


@dataclass
class Block(Node):
    stmts: list[Node]
    unchecked: bool = False
    pos: Optional[Pos] = _pos()


@dataclass
class VarDeclStmt(Node):
    decls: list[Optional[VarDecl]]
    value: Optional[Node] = None
    is_tuple: bool = False
    pos: Optional[Pos] = _pos()


@dataclass
class ExprStmt(Node):
    expr: Node
    pos: Optional[Pos] = _pos()


@dataclass
class If(Node):
    cond: Node
    then: Node
    else_: Optional[Node] = None
    pos: Optional[Pos] = _pos()


@dataclass
class For(Node):
    init: Optional[Node]
    cond: Optional[Node]
    post: Optional[Node]
    body: Node
    pos: Optional[Pos] = _pos()


@dataclass
class While(Node):
    cond: Node
    body: Node
    pos: Optional[Pos] = _pos()


@dataclass
class DoWhile(Node):
    body: Node
    cond: Node
    pos: Optional[Pos] = _pos()


@dataclass
class Return(Node):
    value: Optional[Node] = None
    pos: Optional[Pos] = _pos()


@dataclass
class Break(Node):
    pos: Optional[Pos] = _pos()


@dataclass
class Continue(Node):
    pos: Optional[Pos] = _pos()


@dataclass
class Emit(Node):
    call: Call
    pos: Optional[Pos] = _pos()


@dataclass
class RevertStmt(Node):
    """``revert CustomError(...)``; plain ``revert("msg")`` is an ordinary call."""

    call: Call
    pos: Optional[Pos] = _pos()


@dataclass
class Assembly(Node):
    lines: tuple[str, ...]
    flags: tuple[str, ...] = ()
    pos: Optional[Pos] = _pos()


# -- functions and units ---------------------------------------------------


@dataclass
class FuncDef(Node):
    kind: str  # function | constructor | fallback | receive
    name: str
    params: list[VarDecl]
    returns: list[VarDecl]
    visibility: str
    mutability: str
    body: Optional[Block]
    pos: Optional[Pos] = _pos()
    synthesized: bool = _note()
    getter_of: Optional[str] = _note()
    reads: set = _note(set)
    writes: set = _note(set)
    calls: set = _note(set)

    @property
    def is_external(self) -> bool:
        return self.kind == "function" and self.visibility in ("external", "public")

    def signature(self) -> str:
        from .types import canonical_param_list

        return f"{self.name}({canonical_param_list(self.params)})"


@dataclass
class ImportDirective(Node):
    path: str
    symbols: list[str] = field(default_factory=list)
    pos: Optional[Pos] = _pos()


@dataclass
class SourceUnit(Node):
    pragma: str
    kind: str
    name: str
    state_vars: list[VarDecl] = field(default_factory=list)
    structs: list[StructDef] = field(default_factory=list)
    enums: list[EnumDef] = field(default_factory=list)
    events: list[EventDef] = field(default_factory=list)
    errors: list[ErrorDef] = field(default_factory=list)
    functions: list[FuncDef] = field(default_factory=list)
    constructor: Optional[FuncDef] = None
    imports: list[ImportDirective] = field(default_factory=list)
    file_level: list[Node] = field(default_factory=list)
    pos: Optional[Pos] = _pos()
    license: Optional[str] = _note()
    # set by the resolver
    types: Any = _note()
    init_effects: Any = _note()

    @property
    def contract_name(self) -> str:
        return self.name

    def storage_vars(self) -> list[VarDecl]:
        return [v for v in self.state_vars if not v.constant and not v.immutable]

    def constants(self) -> list[VarDecl]:
        return [v for v in self.state_vars if v.constant]

    def declared_functions(self) -> list[FuncDef]:
        return [f for f in self.functions if not f.synthesized]

    def external_functions(self) -> list[FuncDef]:
        return [f for f in self.functions if f.is_external]

    def internal_functions(self) -> list[FuncDef]:
        return [f for f in self.functions if f.kind == "function" and not f.is_external]

    def find_struct(self, name: str) -> Optional[StructDef]:
        for s in self.structs:
            if s.name == name:
                return s
        for s in self.file_level:
            if isinstance(s, StructDef) and s.name == name:
                return s
        return None

    def find_enum(self, name: str) -> Optional[EnumDef]:
        for e in self.enums:
            if e.name == name:
                return e
        for e in self.file_level:
            if isinstance(e, EnumDef) and e.name == name:
                return e
        return None


def deep_copy(node: Any) -> Any:
    """Copy a subtree, preserving positions and notes."""
    if isinstance(node, list):
        return [deep_copy(x) for x in node]
    if isinstance(node, tuple):
        return tuple(deep_copy(x) for x in node)
    if isinstance(node, set):
        return set(node)
    if is_dataclass(node) and isinstance(node, Node):
        kwargs = {}
        for f in fields(node):
            value = getattr(node, f.name)
            if f.name in ("binding", "tdesc", "types"):
                kwargs[f.name] = value
            else:
                kwargs[f.name] = deep_copy(value)
        return type(node)(**kwargs)
    return node


def rewrite(node: Any, fn: Callable[[Node], Any]) -> Any:
    """Bottom-up rebuild of ``node``; ``fn`` maps each rebuilt node to its replacement.

    Inside statement lists ``fn`` may return a list, which is spliced in place;
    a list returned for a lone statement slot is wrapped in a ``Block``.
    Notes (bindings, resolved types, positions) are carried over unchanged.
    """
    if isinstance(node, list):
        out = []
        for item in node:
            new = rewrite(item, fn)
            if isinstance(new, list) and isinstance(item, Node):
                out.extend(new)
            else:
                out.append(new)
        return out
    if isinstance(node, tuple):
        return tuple(rewrite(x, fn) for x in node)
    if not (is_dataclass(node) and isinstance(node, Node)):
        return node
    kwargs = {}
    for f in fields(node):
        value = getattr(node, f.name)
        if not f.compare:
            kwargs[f.name] = value
            continue
        new = rewrite(value, fn)
        if isinstance(new, list) and isinstance(value, Node):
            new = Block(new, pos=value.pos)
        kwargs[f.name] = new
    return fn(type(node)(**kwargs))
