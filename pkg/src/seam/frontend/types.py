"""Canonical Solidity type descriptors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..diagnostics import RecursiveStruct, UnknownType
from . import ast as A

ELEMENTARY = "elementary"
FIXED_ARRAY = "fixedArray"
DYN_ARRAY = "dynArray"
MAPPING = "mapping"
STRUCT = "struct"
ENUM = "enum"


@dataclass(frozen=True)
class TypeDescriptor:
    kind: str
    canonical_name: str
    byte_size: int
    elem: Optional["TypeDescriptor"] = None
    key: Optional["TypeDescriptor"] = None
    value: Optional["TypeDescriptor"] = None
    struct_ref: Optional[str] = None
    enum_ref: Optional[str] = None
    length: Optional[int] = None
    payable: bool = False

    @property
    def is_packable(self) -> bool:
        return self.kind in (ELEMENTARY, ENUM) and self.byte_size < 32 and self.canonical_name not in ("string", "bytes")

    @property
    def is_value_type(self) -> bool:
        return self.kind in (ELEMENTARY, ENUM) and self.canonical_name not in ("string", "bytes")

    @property
    def is_dynamic_bytes(self) -> bool:
        return self.kind == ELEMENTARY and self.canonical_name in ("string", "bytes")

    def contains_struct_array(self) -> bool:
        """True when an array whose element is (an array of ...) a struct appears anywhere."""
        t = self
        if t.kind in (FIXED_ARRAY, DYN_ARRAY):
            inner = t.elem
            while inner.kind in (FIXED_ARRAY, DYN_ARRAY):
                inner = inner.elem
            if inner.kind == STRUCT:
                return True
            return False
        if t.kind == MAPPING:
            return t.value.contains_struct_array()
        return False

    def __str__(self) -> str:
        return self.canonical_name


def elementary_size(name: str) -> int:
    if name == "bool":
        return 1
    if name == "address":
        return 20
    if name in ("string", "bytes"):
        return 32
    if name.startswith("uint"):
        return int(name[4:]) // 8
    if name.startswith("int"):
        return int(name[3:]) // 8
    if name.startswith("bytes"):
        return int(name[5:])
    raise UnknownType(f"unknown elementary type '{name}'")


def elementary(name: str, payable: bool = False) -> TypeDescriptor:
    return TypeDescriptor(ELEMENTARY, name, elementary_size(name), payable=payable)


def eval_const_int(expr: A.Node, constants: dict[str, A.VarDecl]) -> int:
    """Evaluate an integer constant expression (array lengths, constant folding for layouts)."""
    if isinstance(expr, A.NumberLit):
        text = expr.value.replace("_", "")
        if text.lower().startswith("0x"):
            value = int(text, 16)
        elif "e" in text.lower() or "." in text:
            from decimal import Decimal

            d = Decimal(text)
            if d != d.to_integral_value():
                raise UnknownType(f"non-integer constant {expr.value}", expr.pos)
            value = int(d)
        else:
            value = int(text)
        mult = {None: 1, "wei": 1, "gwei": 10**9, "ether": 10**18, "seconds": 1, "minutes": 60,
                "hours": 3600, "days": 86400, "weeks": 604800}[expr.unit]
        return value * mult
    if isinstance(expr, A.Ident) and expr.name in constants and constants[expr.name].value is not None:
        return eval_const_int(constants[expr.name].value, constants)
    if isinstance(expr, A.Binary):
        a = eval_const_int(expr.left, constants)
        b = eval_const_int(expr.right, constants)
        ops = {"+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b, "/": lambda: a // b,
               "%": lambda: a % b, "**": lambda: a ** b, "<<": lambda: a << b, ">>": lambda: a >> b,
               "&": lambda: a & b, "|": lambda: a | b, "^": lambda: a ^ b}
        if expr.op in ops:
            return ops[expr.op]()
    if isinstance(expr, A.Call) and isinstance(expr.callee, A.TypeExpr) and len(expr.args) == 1:
        return eval_const_int(expr.args[0], constants)
    raise UnknownType("array length is not a constant integer expression", getattr(expr, "pos", None))


class TypeTable:
    """Resolves type-name nodes against a unit's structs, enums and constants."""

    def __init__(self, unit: A.SourceUnit, extra_structs=None, extra_enums=None, extra_constants=None):
        self.unit = unit
        self.structs: dict[str, A.StructDef] = {}
        self.enums: dict[str, A.EnumDef] = {}
        for s in list(extra_structs or []) + [n for n in unit.file_level if isinstance(n, A.StructDef)] + unit.structs:
            self.structs[s.name] = s
        for e in list(extra_enums or []) + [n for n in unit.file_level if isinstance(n, A.EnumDef)] + unit.enums:
            self.enums[e.name] = e
        self.constants = {v.name: v for v in extra_constants or []}
        self.constants.update({v.name: v for v in unit.file_level if isinstance(v, A.VarDecl)})
        self.constants.update({v.name: v for v in unit.state_vars if v.constant})
        self._canon_cache: dict[str, str] = {}

    def describe(self, node: A.Node) -> TypeDescriptor:
        if isinstance(node, A.ElementaryType):
            return elementary(node.name, node.payable)
        if isinstance(node, A.UserType):
            name = node.path[-1] if len(node.path) == 1 else node.name
            if name in self.structs:
                return TypeDescriptor(STRUCT, self.struct_canonical(name), 32, struct_ref=name)
            if name in self.enums:
                n = len(self.enums[name].values)
                size = 1 if n <= 256 else 2
                return TypeDescriptor(ENUM, f"uint{size * 8}", size, enum_ref=name)
            raise UnknownType(f"unknown type '{node.name}'", node.pos)
        if isinstance(node, A.ArrayType):
            elem = self.describe(node.base)
            if node.length is None:
                return TypeDescriptor(DYN_ARRAY, f"{elem.canonical_name}[]", 32, elem=elem)
            length = eval_const_int(node.length, self.constants)
            if length <= 0:
                raise UnknownType("array length must be positive", node.pos)
            return TypeDescriptor(FIXED_ARRAY, f"{elem.canonical_name}[{length}]", 32, elem=elem, length=length)
        if isinstance(node, A.MappingType):
            key = self.describe(node.key)
            if key.kind not in (ELEMENTARY, ENUM):
                raise UnknownType("mapping key must be an elementary or enum type", node.pos)
            value = self.describe(node.value)
            return TypeDescriptor(MAPPING, f"mapping({key.canonical_name}=>{value.canonical_name})", 32,
                                  key=key, value=value)
        raise UnknownType(f"cannot describe {type(node).__name__}", getattr(node, "pos", None))

    def struct_canonical(self, name: str, stack: tuple[str, ...] = ()) -> str:
        if name in self._canon_cache:
            return self._canon_cache[name]
        if name in stack:
            # recursion through a dynamic container; never valid in an ABI signature
            return f"struct {name}"
        parts = []
        for m in self.structs[name].members:
            parts.append(self._canonical_in(m.type, stack + (name,)))
        result = "(" + ",".join(parts) + ")"
        if not stack:
            self._canon_cache[name] = result
        return result

    def _canonical_in(self, node: A.Node, stack: tuple[str, ...]) -> str:
        if isinstance(node, A.UserType) and node.path[-1] in self.structs and len(node.path) == 1:
            return self.struct_canonical(node.path[-1], stack)
        if isinstance(node, A.ArrayType):
            inner = self._canonical_in(node.base, stack)
            if node.length is None:
                return inner + "[]"
            return f"{inner}[{eval_const_int(node.length, self.constants)}]"
        if isinstance(node, A.MappingType):
            return f"mapping({self._canonical_in(node.key, stack)}=>{self._canonical_in(node.value, stack)})"
        return self.describe(node).canonical_name

    def struct_members(self, name: str) -> list[tuple[str, TypeDescriptor]]:
        return [(m.name, self.describe(m.type)) for m in self.structs[name].members]

    def check_struct_recursion(self) -> None:
        """Raise RecursiveStruct when a struct contains itself by value (directly or via fixed arrays)."""
        state: dict[str, int] = {}

        def by_value_refs(node: A.Node) -> list[str]:
            if isinstance(node, A.UserType) and node.path[-1] in self.structs:
                return [node.path[-1]]
            if isinstance(node, A.ArrayType) and node.length is not None:
                return by_value_refs(node.base)
            return []

        def visit(name: str, chain: list[str]) -> None:
            if state.get(name) == 2:
                return
            if state.get(name) == 1:
                cycle = chain[chain.index(name):] + [name]
                raise RecursiveStruct(f"struct '{name}' contains itself by value ({' -> '.join(cycle)})",
                                      self.structs[name].pos)
            state[name] = 1
            for m in self.structs[name].members:
                for ref in by_value_refs(m.type):
                    visit(ref, chain + [name])
            state[name] = 2

        for name in self.structs:
            visit(name, [])


def canonical_param_list(params: list[A.VarDecl]) -> str:
    parts = []
    for p in params:
        if p.tdesc is None:
            raise UnknownType(f"parameter type not resolved: {p.name}", p.pos)
        if "struct " in p.tdesc.canonical_name or p.tdesc.kind == MAPPING:
            raise UnknownType(f"type of '{p.name}' cannot appear in an external signature", p.pos)
        parts.append(p.tdesc.canonical_name)
    return ",".join(parts)


def type_id(t: TypeDescriptor) -> str:
    """Stable identifier used in serialized layouts (modelled on solc's ``t_*`` ids)."""
    if t.kind == ELEMENTARY:
        return f"t_{t.canonical_name}" + ("_payable" if t.payable else "")
    if t.kind == ENUM:
        return f"t_enum({t.enum_ref})"
    if t.kind == STRUCT:
        return f"t_struct({t.struct_ref})"
    if t.kind == DYN_ARRAY:
        return f"t_array({type_id(t.elem)})dyn"
    if t.kind == FIXED_ARRAY:
        return f"t_array({type_id(t.elem)}){t.length}"
    if t.kind == MAPPING:
        return f"t_mapping({type_id(t.key)},{type_id(t.value)})"
    raise UnknownType(f"no id for kind {t.kind}")


def solc_label(t: TypeDescriptor, contract: Optional[str]) -> str:
    """The ``label`` solc prints for a type in its storage-layout output."""
    scope = f"{contract}." if contract else ""
    if t.kind == ELEMENTARY:
        return "address payable" if t.payable else t.canonical_name
    if t.kind == ENUM:
        return f"enum {scope}{t.enum_ref}"
    if t.kind == STRUCT:
        return f"struct {scope}{t.struct_ref}"
    if t.kind == DYN_ARRAY:
        return f"{solc_label(t.elem, contract)}[]"
    if t.kind == FIXED_ARRAY:
        return f"{solc_label(t.elem, contract)}[{t.length}]"
    if t.kind == MAPPING:
        return f"mapping({solc_label(t.key, contract)} => {solc_label(t.value, contract)})"
    raise UnknownType(f"no label for kind {t.kind}")
