"""Storage layout engine.

Implements the canonical Solidity storage rules: sequential slots from the
base, low-to-high packing of value types, whole-slot alignment for structs
and arrays, and keccak-derived positions for dynamic data. Diamond-storage
namespaces place a facet's struct at ``keccak256(namespace)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .diagnostics import EmptyNamespace, RecursiveStruct
from .frontend import ast as A
from .frontend.types import (
    DYN_ARRAY, ELEMENTARY, ENUM, FIXED_ARRAY, MAPPING, STRUCT, TypeDescriptor, TypeTable, type_id,
)
from .hashing import keccak256

CONTRACT_ROOT = "contractRoot"
DIAMOND_NAMESPACE = "diamondNamespace"
SLOT_BYTES = 32
_MOD = 1 << 256


@dataclass(frozen=True)
class LayoutEntry:
    label: str
    slot: int
    offset: int
    type: TypeDescriptor
    num_slots: int
    size_bytes: int


@dataclass
class StorageLayout:
    base_kind: str
    namespace: str
    entries: list[LayoutEntry]
    table: Optional[TypeTable] = field(default=None, repr=False, compare=False)

    @property
    def total_slots(self) -> int:
        if not self.entries:
            return 0
        last = self.entries[-1]
        return last.slot + last.num_slots

    def entry(self, label: str) -> LayoutEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)

    def to_json(self) -> dict:
        return serialize_layout(self)


class LayoutEngine:
    """Computes sizes and member layouts for the types of one type table."""

    def __init__(self, table: TypeTable):
        self.table = table
        self._struct_cache: dict[str, list[LayoutEntry]] = {}
        self._in_progress: set[str] = set()

    def value_size(self, t: TypeDescriptor) -> Optional[int]:
        """Byte size when ``t`` is stored in-place as a value type, else None."""
        if t.kind in (ELEMENTARY, ENUM) and not t.is_dynamic_bytes:
            return t.byte_size
        return None

    def num_slots(self, t: TypeDescriptor) -> int:
        if self.value_size(t) is not None:
            return 1
        if t.kind in (MAPPING, DYN_ARRAY) or t.is_dynamic_bytes:
            return 1
        if t.kind == STRUCT:
            members = self.struct_entries(t.struct_ref)
            return max(1, _end_slot(members))
        if t.kind == FIXED_ARRAY:
            size = self.value_size(t.elem)
            if size is not None:
                per_slot = SLOT_BYTES // size
                return -(-t.length // per_slot)
            return t.length * self.num_slots(t.elem)
        raise ValueError(f"unknown type kind {t.kind}")

    def size_bytes(self, t: TypeDescriptor) -> int:
        size = self.value_size(t)
        if size is not None:
            return size
        return SLOT_BYTES * self.num_slots(t)

    def struct_entries(self, name: str) -> list[LayoutEntry]:
        if name in self._struct_cache:
            return self._struct_cache[name]
        if name in self._in_progress:
            raise RecursiveStruct(f"struct '{name}' contains itself by value", self.table.structs[name].pos)
        if name not in self.table.structs:
            from .diagnostics import UnknownType

            raise UnknownType(f"unknown struct '{name}'")
        self._in_progress.add(name)
        try:
            members = [(m.name, m.tdesc or self.table.describe(m.type)) for m in self.table.structs[name].members]
            entries = self.place(members)
        finally:
            self._in_progress.discard(name)
        self._struct_cache[name] = entries
        return entries

    def place(self, items: Iterable[tuple[str, TypeDescriptor]]) -> list[LayoutEntry]:
        entries = []
        slot, offset = 0, 0
        for label, t in items:
            size = self.value_size(t)
            if size is not None:
                if offset + size > SLOT_BYTES:
                    slot += 1
                    offset = 0
                entries.append(LayoutEntry(label, slot, offset, t, 1, size))
                offset += size
            else:
                if offset > 0:
                    slot += 1
                    offset = 0
                n = self.num_slots(t)
                entries.append(LayoutEntry(label, slot, 0, t, n, SLOT_BYTES * n))
                slot += n
        return entries


def _end_slot(entries: list[LayoutEntry]) -> int:
    end = 0
    for e in entries:
        end = max(end, e.slot + e.num_slots)
    return end


def _table_for(vars: list[A.VarDecl], structs, enums=(), table: Optional[TypeTable] = None) -> TypeTable:
    if table is not None:
        return table
    unit = A.SourceUnit(pragma="", kind="contract", name="", structs=list(structs), enums=list(enums),
                        state_vars=[v for v in vars])
    t = TypeTable(unit)
    t.check_struct_recursion()
    return t


def compute_layout(
    vars: list[A.VarDecl],
    structs: Iterable[A.StructDef] = (),
    enums: Iterable[A.EnumDef] = (),
    *,
    table: Optional[TypeTable] = None,
    namespace: str = "",
) -> StorageLayout:
    """Lay out ``vars`` in declaration order. Constants take no storage."""
    table = _table_for(vars, structs, enums, table)
    engine = LayoutEngine(table)
    items = []
    for v in vars:
        if v.constant or v.immutable:
            continue
        items.append((v.name, v.tdesc or table.describe(v.type)))
    entries = engine.place(items)
    base_kind = DIAMOND_NAMESPACE if namespace else CONTRACT_ROOT
    return StorageLayout(base_kind, namespace, entries, table)


def unit_layout(unit: A.SourceUnit) -> StorageLayout:
    """Root layout of a resolved unit."""
    return compute_layout(unit.storage_vars(), table=unit.types)


def struct_size(def_: A.StructDef, structs: Iterable[A.StructDef] = (), enums: Iterable[A.EnumDef] = ()) -> int:
    """Whole slots a struct occupies in storage."""
    all_structs = {s.name: s for s in structs}
    all_structs[def_.name] = def_
    table = _table_for([], all_structs.values(), enums)
    return LayoutEngine(table).num_slots(table.describe(A.UserType((def_.name,))))


def diamond_storage_slot(namespace: str) -> bytes:
    if not namespace:
        raise EmptyNamespace("diamond storage namespace must be non-empty")
    try:
        data = namespace.encode("ascii")
    except UnicodeEncodeError:
        raise EmptyNamespace(f"namespace must be ASCII: {namespace!r}") from None
    return keccak256(data)


def slot_hex(value: bytes | int) -> str:
    if isinstance(value, int):
        value = value.to_bytes(32, "big")
    return "0x" + value.hex()


def _as_int(slot: bytes | int) -> int:
    return int.from_bytes(slot, "big") if isinstance(slot, (bytes, bytearray)) else slot


def absolute_slot(base: bytes | int, relative: int) -> int:
    return (_as_int(base) + relative) % _MOD


def array_data_slot(head_slot: bytes | int) -> int:
    """First slot of a dynamic array's data region."""
    return int.from_bytes(keccak256(_as_int(head_slot).to_bytes(32, "big")), "big")


def array_element_slot(head_slot: bytes | int, index: int, stride: int) -> int:
    return (array_data_slot(head_slot) + stride * index) % _MOD


def encode_mapping_key(t: TypeDescriptor, key) -> bytes:
    """Key bytes as hashed for mapping lookups: value types padded to 32 bytes, bytes/string raw."""
    if t.is_dynamic_bytes:
        return key.encode("utf-8") if isinstance(key, str) else bytes(key)
    name = t.canonical_name
    if name == "address":
        raw = bytes.fromhex(key[2:]) if isinstance(key, str) else bytes(key)
        return raw.rjust(32, b"\x00")
    if name == "bool":
        return int(bool(key)).to_bytes(32, "big")
    if name.startswith("bytes"):
        return bytes(key).ljust(32, b"\x00")
    if name.startswith("int"):
        return (key % _MOD).to_bytes(32, "big")
    return int(key).to_bytes(32, "big")


def mapping_value_slot(head_slot: bytes | int, key_bytes: bytes) -> int:
    return int.from_bytes(keccak256(key_bytes + _as_int(head_slot).to_bytes(32, "big")), "big")


# -- serialization and fingerprinting ---------------------------------------


def full_type_string(t: TypeDescriptor, table: Optional[TypeTable], _stack: tuple = ()) -> str:
    """Canonical type name with struct members spelled out, so member edits change it."""
    if t.kind == STRUCT:
        name = t.struct_ref
        if table is None or name not in table.structs or name in _stack:
            return f"struct {name}"
        inner = ";".join(
            f"{full_type_string(m.tdesc or table.describe(m.type), table, _stack + (name,))} {m.name}"
            for m in table.structs[name].members
        )
        return f"struct {name}{{{inner}}}"
    if t.kind == ENUM:
        n = len(table.enums[t.enum_ref].values) if table is not None and t.enum_ref in table.enums else 0
        return f"enum {t.enum_ref}({n})"
    if t.kind == DYN_ARRAY:
        return full_type_string(t.elem, table, _stack) + "[]"
    if t.kind == FIXED_ARRAY:
        return f"{full_type_string(t.elem, table, _stack)}[{t.length}]"
    if t.kind == MAPPING:
        return f"mapping({full_type_string(t.key, table, _stack)}=>{full_type_string(t.value, table, _stack)})"
    return t.canonical_name


def layout_fingerprint(layout: StorageLayout) -> bytes:
    parts = [layout.namespace]
    for e in sorted(layout.entries, key=lambda e: (e.slot, e.offset, e.label)):
        parts.append(f"{e.label}|{e.slot}|{e.offset}|{full_type_string(e.type, layout.table)}")
    return keccak256("\n".join(parts).encode("utf-8"))


def _encoding(t: TypeDescriptor) -> str:
    if t.kind == MAPPING:
        return "mapping"
    if t.kind == DYN_ARRAY:
        return "dynamic_array"
    if t.is_dynamic_bytes:
        return "bytes"
    return "inplace"


def serialize_layout(layout: StorageLayout) -> dict:
    """JSON form carried in manifests. Struct member layouts are included under ``types``."""
    engine = LayoutEngine(layout.table) if layout.table is not None else None
    types: dict[str, dict] = {}

    def visit(t: TypeDescriptor) -> str:
        tid = type_id(t)
        if tid in types:
            return tid
        info: dict = {
            "encoding": _encoding(t),
            "label": full_type_string(t, None),
            "numberOfBytes": str(engine.size_bytes(t) if engine else SLOT_BYTES),
        }
        types[tid] = info
        if t.kind == STRUCT and engine is not None and t.struct_ref in layout.table.structs:
            info["members"] = [_entry_json(m, visit) for m in engine.struct_entries(t.struct_ref)]
        elif t.kind == ENUM and layout.table is not None and t.enum_ref in layout.table.enums:
            info["values"] = list(layout.table.enums[t.enum_ref].values)
        elif t.kind in (DYN_ARRAY, FIXED_ARRAY):
            info["base"] = visit(t.elem)
        elif t.kind == MAPPING:
            info["key"] = visit(t.key)
            info["value"] = visit(t.value)
        return tid

    entries = [_entry_json(e, visit) for e in layout.entries]
    return {
        "baseKind": layout.base_kind,
        "namespace": layout.namespace,
        "entries": entries,
        "types": types,
    }


def _entry_json(e: LayoutEntry, visit) -> dict:
    return {
        "label": e.label,
        "slot": e.slot,
        "offset": e.offset,
        "type": visit(e.type),
        "numSlots": e.num_slots,
    }
