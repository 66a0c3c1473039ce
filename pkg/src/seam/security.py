"""Selector-clash and storage-collision analysis, with remediations.

Selector clashes are errors: the diamond would route one of the colliding
functions to the wrong facet. Storage patterns that make a later upgrade
unsafe (arrays of structs, structs embedded before other members, a
partially packed final slot) are warnings or notes, each with a suggested
fix. The array-of-structs fix can also be applied mechanically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .diagnostics import (
    ERROR, INFO, WARNING, Diagnostic, MalformedSignature, Unresolvable, UnsupportedUsage,
)
from .facetizer import FacetPlan, fn_key
from .frontend import ast as A
from .frontend.resolver import resolve
from .frontend.types import DYN_ARRAY, FIXED_ARRAY, MAPPING, STRUCT, TypeDescriptor, TypeTable
from .hashing import keccak256

USER_FACET = "userFacet"
DIAMOND_CORE = "diamondCore"
DIAMOND_NAME = "Diamond"

DIAMOND_CUT_SIGNATURE = "diamondCut((address,uint8,bytes4[])[],address,bytes)"
DIAMOND_CORE_SIGNATURES = (
    DIAMOND_CUT_SIGNATURE,
    "facets()",
    "facetFunctionSelectors(address)",
    "facetAddresses()",
    "facetAddress(bytes4)",
)
MAX_RENAME_SUFFIX = 9

# -- selectors --------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_SIZED = re.compile(r"(u?int)(\d+)|bytes(\d+)")
_PLAIN = {"address", "bool", "string", "bytes", "function"}


def _is_canonical_base(name: str) -> bool:
    if name in _PLAIN:
        return True
    m = _SIZED.fullmatch(name)
    if not m:
        return False
    if m.group(1):
        bits = m.group(2)
        return not bits.startswith("0") and 8 <= int(bits) <= 256 and int(bits) % 8 == 0
    n = m.group(3)
    return not n.startswith("0") and 1 <= int(n) <= 32


def _parse_type(s: str, i: int) -> int:
    """Consume one canonical type starting at ``i``; return the index after it or -1."""
    if i < len(s) and s[i] == "(":
        i = _parse_list(s, i)
        if i < 0:
            return -1
    else:
        m = re.compile(r"[a-z0-9]+").match(s, i)
        if not m or not _is_canonical_base(m.group(0)):
            return -1
        i = m.end()
    while i < len(s) and s[i] == "[":
        m = re.compile(r"\[(?:[1-9][0-9]*)?\]").match(s, i)
        if not m:
            return -1
        i = m.end()
    return i


def _parse_list(s: str, i: int) -> int:
    assert s[i] == "("
    i += 1
    if i < len(s) and s[i] == ")":
        return i + 1
    while True:
        i = _parse_type(s, i)
        if i < 0 or i >= len(s):
            return -1
        if s[i] == ")":
            return i + 1
        if s[i] != ",":
            return -1
        i += 1


def is_canonical_signature(sig: str) -> bool:
    m = _IDENT.match(sig)
    if not m or m.end() >= len(sig) or sig[m.end()] != "(":
        return False
    return _parse_list(sig, m.end()) == len(sig)


def compute_selector(signature: str) -> bytes:
    """First four bytes of keccak256 over the canonical signature."""
    if not isinstance(signature, str) or not signature.isascii() or not is_canonical_signature(signature):
        raise MalformedSignature(f"not a canonical function signature: {signature!r}")
    return keccak256(signature.encode("ascii"))[:4]


def selector_hex(signature_or_selector: str | bytes) -> str:
    sel = signature_or_selector if isinstance(signature_or_selector, bytes) else compute_selector(signature_or_selector)
    return "0x" + sel.hex()


def split_signature(sig: str) -> tuple[str, str]:
    """``"f(uint256)"`` → ``("f", "(uint256)")``."""
    i = sig.index("(")
    return sig[:i], sig[i:]


# -- selector table ---------------------------------------------------------


@dataclass(frozen=True)
class SelectorEntry:
    signature: str
    facet: str
    origin: str
    pos: Optional[A.Pos] = field(default=None, compare=False)


@dataclass
class SelectorTable:
    entries: dict[bytes, list[SelectorEntry]] = field(default_factory=dict)

    def add(self, signature: str, facet: str, origin: str = USER_FACET, pos=None) -> bytes:
        sel = compute_selector(signature)
        self.entries.setdefault(sel, []).append(SelectorEntry(signature, facet, origin, pos))
        return sel

    def clashes(self) -> dict[bytes, list[SelectorEntry]]:
        return {sel: es for sel, es in sorted(self.entries.items()) if len(es) > 1}

    @property
    def is_clash_free(self) -> bool:
        return not self.clashes()

    def signatures(self) -> set[str]:
        return {e.signature for es in self.entries.values() for e in es}

    def to_json(self) -> dict:
        return {
            "0x" + sel.hex(): [{"signature": e.signature, "facet": e.facet, "origin": e.origin} for e in es]
            for sel, es in sorted(self.entries.items())
        }


def core_table() -> SelectorTable:
    table = SelectorTable()
    for sig in DIAMOND_CORE_SIGNATURES:
        table.add(sig, DIAMOND_NAME, DIAMOND_CORE)
    return table


def build_selector_table(plan: FacetPlan) -> SelectorTable:
    table = core_table()
    for facet in plan.facets:
        for f in facet.selector_functions():
            table.add(f.signature(), facet.name, USER_FACET, f.pos)
    return table


def clash_diagnostics(table: SelectorTable) -> list[Diagnostic]:
    diags = []
    for sel, es in table.clashes().items():
        listing = ", ".join(f"{e.signature} [{e.facet}]" for e in es)
        d = Diagnostic(
            "SEL_CLASH", ERROR,
            f"selector 0x{sel.hex()} is shared by {listing}",
            [e.pos for e in es if e.pos is not None],
            details={
                "selector": "0x" + sel.hex(),
                "entries": [{"signature": e.signature, "facet": e.facet, "origin": e.origin} for e in es],
            },
        )
        diags.append(d)
    return diags


def detect_selector_clashes(plan: FacetPlan) -> tuple[SelectorTable, list[Diagnostic]]:
    """Build the table over user functions plus the diamond core; one SEL_CLASH per shared selector."""
    table = build_selector_table(plan)
    diags = clash_diagnostics(table)
    if diags:
        try:
            for d, s in zip(diags, suggest_all_fixes(table, per_clash=True)):
                d.suggestion = s
        except Unresolvable:
            pass
    return table, diags


# -- rename suggestions -----------------------------------------------------


@dataclass(frozen=True)
class RenameSuggestion:
    old_signature: str
    new_signature: str
    new_selector: str
    facet: str

    @property
    def old_name(self) -> str:
        return split_signature(self.old_signature)[0]

    @property
    def new_name(self) -> str:
        return split_signature(self.new_signature)[0]

    def to_json(self) -> dict:
        return {
            "oldSignature": self.old_signature,
            "newSignature": self.new_signature,
            "newSelector": self.new_selector,
            "facet": self.facet,
        }


def _renames_for(entries: list[SelectorEntry], used_selectors: set[bytes], used_sigs: set[str]) -> list[RenameSuggestion]:
    users = sorted((e for e in entries if e.origin == USER_FACET), key=lambda e: e.signature)
    has_core = any(e.origin == DIAMOND_CORE for e in entries)
    to_rename = users if has_core else users[1:]
    out = []
    for e in to_rename:
        name, args = split_signature(e.signature)
        for k in range(2, MAX_RENAME_SUFFIX + 1):
            sig = f"{name}_v{k}{args}"
            sel = compute_selector(sig)
            if sel not in used_selectors and sig not in used_sigs:
                used_selectors.add(sel)
                used_sigs.add(sig)
                out.append(RenameSuggestion(e.signature, sig, "0x" + sel.hex(), e.facet))
                break
        else:
            raise Unresolvable(f"no rename of {e.signature} up to suffix _v{MAX_RENAME_SUFFIX} avoids a clash", e.pos)
    return out


def suggest_selector_fix(clash: Diagnostic, table: SelectorTable) -> list[RenameSuggestion]:
    """Renames for one SEL_CLASH: later signatures (all user ones if the core is involved) get ``_vN``."""
    sel = bytes.fromhex(clash.details["selector"][2:])
    used = set(table.entries)
    sigs = table.signatures()
    return _renames_for(table.entries[sel], used, sigs)


def suggest_all_fixes(table: SelectorTable, per_clash: bool = False):
    """Renames resolving every clash, chosen so they also avoid each other."""
    used = set(table.entries)
    sigs = table.signatures()
    groups = [_renames_for(es, used, sigs) for _, es in table.clashes().items()]
    if per_clash:
        return [
            {
                "kind": "rename",
                "renames": [r.to_json() for r in g],
                "text": "; ".join(f"rename {r.old_signature} to {r.new_signature} (selector {r.new_selector})" for r in g),
            }
            for g in groups
        ]
    return [r for g in groups for r in g]


def apply_selector_renames(unit: A.SourceUnit, renames: Iterable[RenameSuggestion]) -> A.SourceUnit:
    """Rename the affected functions (or state variables, for generated getters) and their uses."""
    renames = list(renames)
    if not renames:
        return unit
    fn_renames: dict[int, str] = {}
    var_renames: dict[str, str] = {}
    taken = {v.name for v in unit.state_vars} | {f.name for f in unit.functions}
    for r in renames:
        target = next((f for f in unit.functions if f.is_external and f.signature() == r.old_signature), None)
        if target is None:
            if r.old_signature == "initialize()" or r.old_name == "initialize":
                raise UnsupportedUsage("the generated initialize() cannot be renamed; rename the clashing user function instead")
            raise UnsupportedUsage(f"no function with signature {r.old_signature}")
        if r.new_name in taken:
            raise UnsupportedUsage(f"cannot rename {r.old_signature}: '{r.new_name}' is already declared", target.pos)
        taken.add(r.new_name)
        if target.getter_of is not None:
            var_renames[target.getter_of] = r.new_name
        else:
            if sum(1 for f in unit.functions if f.name == target.name) > 1:
                raise UnsupportedUsage(f"cannot rename overloaded function '{target.name}' automatically", target.pos)
            fn_renames[id(target)] = r.new_name
    old_fn_names = {f.name: fn_renames[id(f)] for f in unit.functions if id(f) in fn_renames}

    def fix(node):
        if isinstance(node, A.Ident) and node.binding is not None:
            kind = node.binding[0]
            if kind == "state" and node.name in var_renames:
                return A.Ident(var_renames[node.name], pos=node.pos)
            if kind == "function" and node.name in old_fn_names:
                return A.Ident(old_fn_names[node.name], pos=node.pos)
        if isinstance(node, A.Member) and isinstance(node.expr, A.Ident) and node.expr.name == "this":
            if node.name in old_fn_names:
                return A.Member(node.expr, old_fn_names[node.name], pos=node.pos)
            if node.name in var_renames:
                return A.Member(node.expr, var_renames[node.name], pos=node.pos)
        if isinstance(node, A.VarDecl) and node.name in var_renames and node.visibility is not None \
                and any(v.name == node.name and v.pos == node.pos for v in unit.state_vars):
            copy = A.deep_copy(node)
            copy.name = var_renames[node.name]
            return copy
        if isinstance(node, A.FuncDef) and node.kind == "function" and node.name in old_fn_names:
            node.name = old_fn_names[node.name]
        return node

    work = A.deep_copy(unit)
    work.functions = [f for f in work.functions if not f.synthesized]
    return resolve(A.rewrite(work, fix))


# -- storage collision risks ------------------------------------------------


def _struct_by_value_members(t: TypeDescriptor) -> Optional[str]:
    """Struct name held by value in ``t`` (directly or inside fixed arrays)."""
    while t.kind == FIXED_ARRAY:
        t = t.elem
    return t.struct_ref if t.kind == STRUCT else None


def _has_struct_array(t: TypeDescriptor, table: TypeTable, seen: tuple = ()) -> bool:
    if t.contains_struct_array():
        return True
    if t.kind in (FIXED_ARRAY, DYN_ARRAY):
        return _has_struct_array(t.elem, table, seen)
    if t.kind == MAPPING:
        return _has_struct_array(t.value, table, seen)
    if t.kind == STRUCT and t.struct_ref in table.structs and t.struct_ref not in seen:
        return any(_has_struct_array(mt, table, seen + (t.struct_ref,)) for _, mt in table.struct_members(t.struct_ref))
    return False


def _reachable_structs(types: Iterable[TypeDescriptor], table: TypeTable) -> list[str]:
    out: list[str] = []

    def visit(t: TypeDescriptor) -> None:
        if t.kind in (FIXED_ARRAY, DYN_ARRAY):
            visit(t.elem)
        elif t.kind == MAPPING:
            visit(t.value)
        elif t.kind == STRUCT and t.struct_ref in table.structs and t.struct_ref not in out:
            out.append(t.struct_ref)
            for _, mt in table.struct_members(t.struct_ref):
                visit(mt)

    for t in types:
        visit(t)
    return out


def _elem_struct_name(t: TypeDescriptor) -> Optional[str]:
    inner = t.elem
    while inner is not None and inner.kind in (FIXED_ARRAY, DYN_ARRAY):
        inner = inner.elem
    return inner.struct_ref if inner is not None and inner.kind == STRUCT else None


def array_to_mapping_candidate(v: A.VarDecl) -> bool:
    t = v.tdesc
    return t is not None and t.kind == DYN_ARRAY and t.elem.kind == STRUCT


def detect_collision_risks(plan: FacetPlan) -> list[Diagnostic]:
    unit = plan.unit
    table: TypeTable = unit.types
    diags: list[Diagnostic] = []
    storage = unit.storage_vars()
    for v in storage:
        if not _has_struct_array(v.tdesc, table):
            continue
        elem = _elem_struct_name(v.tdesc) if v.tdesc.kind in (DYN_ARRAY, FIXED_ARRAY) else None
        if array_to_mapping_candidate(v):
            count = f"{v.name}Count"
            text = f"replace with mapping(uint256 => {elem}) plus uint256 {count}"
            suggestion = {"kind": "arrayToMapping", "variable": v.name, "element": elem,
                          "countVariable": count, "text": text}
        else:
            text = ("keep struct elements behind a mapping keyed by index, or freeze the struct's "
                    "member list; growing the struct shifts every later element")
            suggestion = {"kind": "restructure", "variable": v.name, "text": text}
        diags.append(Diagnostic(
            "SLOT_ARRAY_OF_STRUCTS", WARNING,
            f"state variable '{v.name}' stores structs in an array; adding a member to the struct "
            f"later moves every element after the first",
            [v.pos] if v.pos else [], suggestion, {"variable": v.name},
        ))
    for name in _reachable_structs((v.tdesc for v in storage), table):
        sdef = table.structs[name]
        members = sdef.members
        for i, m in enumerate(members[:-1]):
            inner = _struct_by_value_members(m.tdesc or table.describe(m.type))
            if inner is None:
                continue
            after = [x.name for x in members[i + 1:]]
            diags.append(Diagnostic(
                "SLOT_NESTED_STRUCT", WARNING,
                f"struct {name} embeds struct {inner} in member '{m.name}' ahead of "
                f"{', '.join(repr(a) for a in after)}; growing {inner} would shift them",
                [m.pos or sdef.pos] if (m.pos or sdef.pos) else [],
                {"kind": "restructure", "struct": name, "member": m.name,
                 "text": f"move '{m.name}' to the end of {name}, or hold {inner} through a mapping"},
                {"struct": name, "member": m.name, "inner": inner},
            ))
            break
    for facet in plan.facets:
        entries = facet.storage_layout.entries
        if not entries:
            continue
        last = entries[-1]
        if last.type.is_packable and last.offset + last.size_bytes < 32:
            free = 32 - last.offset - last.size_bytes
            decl = next((v for v in facet.owned_state_vars if v.name == last.label), None)
            diags.append(Diagnostic(
                "SLOT_PACKED_TAIL", INFO,
                f"the last slot of namespace {facet.storage_namespace} has {free} free byte(s) after "
                f"'{last.label}'; a small variable appended later will pack into it",
                [decl.pos] if decl is not None and decl.pos else [],
                {"kind": "note", "text": "append new variables deliberately; a packed append is "
                                         "layout-compatible but shares the slot"},
                {"namespace": facet.storage_namespace, "label": last.label, "freeBytes": free},
            ))
    return diags


# -- array → mapping --------------------------------------------------------


def _require(cond: A.Node, msg: str) -> A.ExprStmt:
    return A.ExprStmt(A.Call(A.Ident("require"), [cond, A.StringLit(msg)]))


def _side_effect_free(e: A.Node) -> bool:
    for n in A.walk(e):
        if isinstance(n, (A.Assign, A.Call, A.New)) or (isinstance(n, A.Unary) and n.op in ("++", "--", "delete")):
            return False
    return True


def apply_array_to_mapping_transform(unit: A.SourceUnit, var_name: str) -> A.SourceUnit:
    """Replace ``T[] v`` (T a struct) by ``mapping(uint256 => T) v`` plus ``uint256 vCount``.

    Returns a new resolved unit; ``unit`` is not modified. Raises
    UnsupportedUsage when the array is used in a way the rewrite cannot carry over.
    """
    decl = next((v for v in unit.storage_vars() if v.name == var_name), None)
    if decl is None:
        raise UnsupportedUsage(f"no state variable named '{var_name}'")
    if not array_to_mapping_candidate(decl):
        raise UnsupportedUsage(f"'{var_name}' is not a dynamic array of structs", decl.pos)
    count, at, push_fn = f"{var_name}Count", f"_{var_name}At", f"_{var_name}Push"
    declared = {v.name for v in unit.state_vars} | {f.name for f in unit.functions} | \
        {s.name for s in unit.structs} | {e.name for e in unit.enums}
    for n in (count, at, push_fn):
        if n in declared:
            raise UnsupportedUsage(f"cannot introduce '{n}': name already declared", decl.pos)

    def is_target(e: A.Node) -> bool:
        return isinstance(e, A.Ident) and e.name == var_name and e.binding is not None and e.binding[0] == "state"

    # every use must be v[i], v.length, v.push(...) or a statement-level v.pop()
    def check(node: A.Node, parent: Optional[A.Node], grand: Optional[A.Node]) -> None:
        if is_target(node):
            ok = (isinstance(parent, A.Index) and parent.expr is node and parent.index is not None) or \
                 (isinstance(parent, A.Member) and parent.name == "length") or \
                 (isinstance(parent, A.Member) and parent.name == "push" and isinstance(grand, A.Call)
                  and grand.callee is parent and len(grand.args) <= 1) or \
                 (isinstance(parent, A.Member) and parent.name == "pop" and isinstance(grand, A.Call)
                  and grand.callee is parent)
            if not ok:
                raise UnsupportedUsage(
                    f"'{var_name}' is used as a whole value here; the array-to-mapping rewrite cannot preserve it",
                    node.pos)
        for child in node.children():
            check(child, node, parent)

    fns = [f for f in unit.functions if not f.synthesized] + ([unit.constructor] if unit.constructor else [])
    for f in fns:
        if f.body is not None:
            check(f.body, None, None)

    uses_push_ref = False

    def count_ident() -> A.Ident:
        return A.Ident(count)

    def raw_index(i: A.Node) -> A.Index:
        return A.Index(A.Ident(var_name), i)

    def fix(node):
        nonlocal uses_push_ref
        if isinstance(node, A.ExprStmt):
            e = node.expr
            if isinstance(e, A.Call) and isinstance(e.callee, A.Member) and is_target(e.callee.expr):
                if e.callee.name == "push" and len(e.args) == 1:
                    return [
                        A.ExprStmt(A.Assign("=", raw_index(count_ident()), e.args[0]), pos=node.pos),
                        A.ExprStmt(A.Assign("+=", count_ident(), A.NumberLit("1")), pos=node.pos),
                    ]
                if e.callee.name == "pop":
                    return [
                        _require(A.Binary(">", count_ident(), A.NumberLit("0")), "pop from empty array"),
                        A.ExprStmt(A.Assign("-=", count_ident(), A.NumberLit("1")), pos=node.pos),
                        A.ExprStmt(A.Unary("delete", raw_index(count_ident())), pos=node.pos),
                    ]
            # whole-element writes: hoist the bounds check, keep direct indexing
            inner = e.operand if isinstance(e, A.Unary) and e.op == "delete" else \
                e.target if isinstance(e, A.Assign) else None
            if isinstance(inner, A.Call) and isinstance(inner.callee, A.Ident) and inner.callee.name == at:
                i = inner.args[0]
                if not _side_effect_free(i):
                    raise UnsupportedUsage(f"index into '{var_name}' has side effects in a whole-element write",
                                           node.pos)
                check_stmt = _require(A.Binary("<", A.deep_copy(i), count_ident()), "index out of bounds")
                if isinstance(e, A.Unary):
                    new = A.Unary("delete", raw_index(i), pos=e.pos)
                else:
                    new = A.Assign(e.op, raw_index(i), e.value, pos=e.pos)
                return [check_stmt, A.ExprStmt(new, pos=node.pos)]
            return node
        if isinstance(node, A.Member) and is_target(node.expr):
            if node.name == "length":
                return A.Ident(count, pos=node.pos)
            return node
        if isinstance(node, A.Call) and isinstance(node.callee, A.Member) and is_target(node.callee.expr):
            if node.callee.name == "push" and not node.args:
                uses_push_ref = True
                return A.Call(A.Ident(push_fn), [], pos=node.pos)
        if isinstance(node, A.Index) and is_target(node.expr):
            return A.Call(A.Ident(at), [node.index], pos=node.pos)
        return node

    work = A.deep_copy(unit)
    work.functions = [f for f in work.functions if not f.synthesized]
    work = A.rewrite(work, fix)

    # anything left over was not at statement level
    for f in work.functions + ([work.constructor] if work.constructor else []):
        for n in A.walk(f.body) if f.body is not None else ():
            if isinstance(n, A.Member) and is_target(n.expr) and n.name in ("push", "pop"):
                raise UnsupportedUsage(f"'{var_name}.{n.name}(...)' is only supported as a statement", n.pos)
            tgt = n.target if isinstance(n, A.Assign) else n.operand if isinstance(n, A.Unary) and n.op == "delete" else None
            targets = tgt.items if isinstance(tgt, A.Tuple) else [tgt]
            for t in targets:
                if isinstance(t, A.Call) and isinstance(t.callee, A.Ident) and t.callee.name == at:
                    raise UnsupportedUsage(f"whole-element write to '{var_name}' inside an expression", n.pos)

    elem_type = A.deep_copy(decl.type.base)
    new_decl = A.VarDecl(A.MappingType(A.ElementaryType("uint256"), elem_type), var_name,
                         visibility=decl.visibility, pos=decl.pos)
    new_decl.doc = decl.doc
    count_decl = A.VarDecl(A.ElementaryType("uint256"), count, visibility="internal", pos=decl.pos)
    idx = next(i for i, v in enumerate(work.state_vars) if v.name == var_name and not v.constant)
    work.state_vars[idx:idx + 1] = [new_decl, count_decl]

    i_param = A.VarDecl(A.ElementaryType("uint256"), "i")
    ret = A.VarDecl(A.deep_copy(elem_type), None, location="storage")
    helper = A.FuncDef("function", at, [i_param], [ret], "internal", "view", A.Block([
        _require(A.Binary("<", A.Ident("i"), count_ident()), "index out of bounds"),
        A.Return(raw_index(A.Ident("i"))),
    ]))
    work.functions.append(helper)
    if uses_push_ref:
        work.functions.append(A.FuncDef("function", push_fn, [], [A.VarDecl(A.deep_copy(elem_type), None, location="storage")],
                                        "internal", "nonpayable", A.Block([
                                            A.ExprStmt(A.Assign("+=", count_ident(), A.NumberLit("1"))),
                                            A.Return(raw_index(A.Binary("-", count_ident(), A.NumberLit("1")))),
                                        ])))
    return resolve(work)


def transformable_arrays(unit: A.SourceUnit) -> list[str]:
    return [v.name for v in unit.storage_vars() if array_to_mapping_candidate(v)]


def analyze(plan: FacetPlan) -> tuple[SelectorTable, list[Diagnostic]]:
    """Every security diagnostic for a plan: clashes first, then storage risks."""
    table, diags = detect_selector_clashes(plan)
    return table, diags + detect_collision_risks(plan)


__all__ = [
    "DIAMOND_CORE", "DIAMOND_CORE_SIGNATURES", "DIAMOND_CUT_SIGNATURE", "USER_FACET",
    "RenameSuggestion", "SelectorEntry", "SelectorTable", "analyze", "apply_array_to_mapping_transform",
    "apply_selector_renames", "build_selector_table", "clash_diagnostics", "compute_selector", "core_table",
    "detect_collision_risks", "detect_selector_clashes", "fn_key", "is_canonical_signature", "selector_hex",
    "suggest_all_fixes", "suggest_selector_fix", "transformable_arrays",
]
