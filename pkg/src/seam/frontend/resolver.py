"""Name resolution and per-function state-effect analysis."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..diagnostics import DuplicateDeclaration, UnknownType, UnresolvedIdentifier
from . import ast as A
from .types import STRUCT, TypeDescriptor, TypeTable

BUILTINS = frozenset({
    "msg", "block", "tx", "abi", "this", "require", "assert", "revert", "keccak256", "sha256",
    "ripemd160", "ecrecover", "addmod", "mulmod", "gasleft", "blockhash", "selfdestruct", "type",
    "payable", "blobhash",
})

READ, WRITE, READWRITE = "r", "w", "rw"


@dataclass
class Effects:
    reads: set = field(default_factory=set)
    writes: set = field(default_factory=set)
    calls: set = field(default_factory=set)


class _Scope:
    def __init__(self, parent: Optional["_Scope"] = None):
        self.parent = parent
        self.names: dict[str, A.VarDecl] = {}

    def lookup(self, name: str) -> Optional[A.VarDecl]:
        s: Optional[_Scope] = self
        while s is not None:
            if name in s.names:
                return s.names[name]
            s = s.parent
        return None


class Resolver:
    def __init__(self, unit: A.SourceUnit, imported: Optional[dict[str, A.Node]] = None):
        self.unit = unit
        imported = dict(imported or {})
        self.table = TypeTable(
            unit,
            extra_structs=[n for n in imported.values() if isinstance(n, A.StructDef)],
            extra_enums=[n for n in imported.values() if isinstance(n, A.EnumDef)],
            extra_constants=[n for n in imported.values() if isinstance(n, A.VarDecl) and n.constant],
        )
        self.imported_names = set(imported)
        for imp in unit.imports:
            self.imported_names.update(imp.symbols)
        self.imported_defs = imported
        self.contract_names: dict[str, tuple[str, object]] = {}

    # -- declarations ------------------------------------------------------

    def _declare(self, name: str, kind: str, decl, pos) -> None:
        if name in self.contract_names:
            prev_kind, _ = self.contract_names[name]
            if not (kind == "function" and prev_kind == "function"):
                raise DuplicateDeclaration(name, pos, f"already declared as {prev_kind}")
        self.contract_names[name] = (kind, decl)

    def collect(self) -> None:
        u = self.unit
        for n in u.file_level:
            if isinstance(n, A.StructDef):
                self._declare(n.name, "struct", n, n.pos)
            elif isinstance(n, A.EnumDef):
                self._declare(n.name, "enum", n, n.pos)
            elif isinstance(n, A.VarDecl):
                self._declare(n.name, "constant", n, n.pos)
        for s in u.structs:
            self._declare(s.name, "struct", s, s.pos)
        for e in u.enums:
            self._declare(e.name, "enum", e, e.pos)
        for ev in u.events:
            if ev.name in self.contract_names and self.contract_names[ev.name][0] == "event":
                continue  # event overloading
            self._declare(ev.name, "event", ev, ev.pos)
        for er in u.errors:
            self._declare(er.name, "error", er, er.pos)
        for v in u.state_vars:
            self._declare(v.name, "constant" if v.constant else "state", v, v.pos)
        for f in u.functions:
            if f.kind == "function":
                self._declare(f.name, "function", f, f.pos)
        for name in self.imported_names:
            if name not in self.contract_names:
                self.contract_names[name] = ("import", self.imported_defs.get(name))
        for s in list(self.table.structs.values()):
            seen = set()
            for m in s.members:
                if m.name in seen:
                    raise DuplicateDeclaration(m.name, m.pos, f"member of struct {s.name}")
                seen.add(m.name)
        for e in list(self.table.enums.values()):
            if len(set(e.values)) != len(e.values):
                raise DuplicateDeclaration(e.name, e.pos, "repeated enum value")

    def describe(self, node: A.Node) -> TypeDescriptor:
        try:
            return self.table.describe(node)
        except UnknownType:
            if isinstance(node, A.UserType) and node.path[0] in self.imported_names:
                name = node.name
                return TypeDescriptor(STRUCT, f"struct {name}", 32, struct_ref=name)
            if isinstance(node, A.ArrayType) or isinstance(node, A.MappingType):
                # retry children so opaque imported types nest correctly
                if isinstance(node, A.ArrayType):
                    elem = self.describe(node.base)
                    if node.length is None:
                        return TypeDescriptor("dynArray", f"{elem.canonical_name}[]", 32, elem=elem)
                    from .types import eval_const_int

                    n = eval_const_int(node.length, self.table.constants)
                    return TypeDescriptor("fixedArray", f"{elem.canonical_name}[{n}]", 32, elem=elem, length=n)
                key = self.describe(node.key)
                value = self.describe(node.value)
                return TypeDescriptor("mapping", f"mapping({key.canonical_name}=>{value.canonical_name})", 32,
                                      key=key, value=value)
            raise

    def annotate_types(self) -> None:
        u = self.unit
        self.table.check_struct_recursion()
        for s in self.table.structs.values():
            for m in s.members:
                m.tdesc = self.describe(m.type)
        for v in u.state_vars + [n for n in u.file_level if isinstance(n, A.VarDecl)]:
            v.tdesc = self.describe(v.type)
        for ev in u.events:
            for p in ev.params:
                p.tdesc = self.describe(p.type)
        for er in u.errors:
            for p in er.params:
                p.tdesc = self.describe(p.type)
        fns = list(u.functions) + ([u.constructor] if u.constructor else [])
        for f in fns:
            for p in f.params + f.returns:
                p.tdesc = self.describe(p.type)
        # overload check: identical parameter type lists
        seen: dict[tuple, A.FuncDef] = {}
        for f in u.functions:
            if f.kind != "function":
                continue
            key = (f.name, tuple(p.tdesc.canonical_name for p in f.params))
            if key in seen:
                raise DuplicateDeclaration(f.name, f.pos, "same parameter types")
            seen[key] = f

    # -- getters -----------------------------------------------------------

    def synthesize_getters(self) -> None:
        u = self.unit
        taken = set(self.contract_names)
        for v in u.state_vars:
            if v.visibility != "public":
                continue
            getter = self._make_getter(v, taken)
            u.functions.append(getter)

    def _make_getter(self, v: A.VarDecl, taken: set) -> A.FuncDef:
        params: list[A.VarDecl] = []
        expr: A.Node = A.Ident(v.name, pos=v.pos)
        t = v.tdesc
        tnode = v.type
        i = 0

        def arg_name(k: int) -> str:
            name = f"arg{k}"
            while name in taken:
                name = "_" + name
            return name

        while t.kind in ("mapping", "dynArray", "fixedArray"):
            name = arg_name(i)
            if t.kind == "mapping":
                ktype = A.deep_copy(tnode.key)
                loc = "memory" if t.key.is_dynamic_bytes else None
                pd = A.VarDecl(ktype, name, location=loc, pos=v.pos)
                pd.tdesc = t.key
                t, tnode = t.value, tnode.value
            else:
                pd = A.VarDecl(A.ElementaryType("uint256", pos=v.pos), name, pos=v.pos)
                from .types import elementary

                pd.tdesc = elementary("uint256")
                t, tnode = t.elem, tnode.base
            params.append(pd)
            expr = A.Index(expr, A.Ident(name, pos=v.pos), pos=v.pos)
            i += 1
        returns: list[A.VarDecl] = []
        if t.kind == STRUCT:
            sdef = self.table.structs[t.struct_ref]
            items = []
            for m in sdef.members:
                if m.tdesc.kind in ("mapping", "dynArray", "fixedArray"):
                    continue
                loc = "memory" if (m.tdesc.is_dynamic_bytes or m.tdesc.kind == STRUCT) else None
                rd = A.VarDecl(A.deep_copy(m.type), None, location=loc, pos=v.pos)
                rd.tdesc = m.tdesc
                returns.append(rd)
                items.append(A.Member(A.deep_copy(expr), m.name, pos=v.pos))
            value: A.Node = items[0] if len(items) == 1 else A.Tuple(items, pos=v.pos)
        else:
            loc = "memory" if t.is_dynamic_bytes else None
            rd = A.VarDecl(A.deep_copy(tnode), None, location=loc, pos=v.pos)
            rd.tdesc = t
            returns.append(rd)
            value = expr
        body = A.Block([A.Return(value, pos=v.pos)], pos=v.pos)
        f = A.FuncDef("function", v.name, params, returns, "external", "view", body, pos=v.pos)
        f.synthesized = True
        f.getter_of = v.name
        return f

    # -- bodies ------------------------------------------------------------

    def resolve_bodies(self) -> None:
        u = self.unit
        for f in u.functions + ([u.constructor] if u.constructor else []):
            eff = Effects()
            scope = _Scope()
            for p in f.params + f.returns:
                if p.name:
                    self._declare_local(scope, p)
            if f.body is not None:
                self._block(f.body, scope, eff, f)
            f.reads, f.writes, f.calls = eff.reads, eff.writes, eff.calls
        init = Effects()
        for v in u.state_vars:
            if v.value is not None:
                self._expr(v.value, _Scope(), init, READ)
                if not v.constant:
                    init.writes.add(v.name)
        for v in u.file_level:
            if isinstance(v, A.VarDecl) and v.value is not None:
                self._expr(v.value, _Scope(), Effects(), READ)
        u.init_effects = init

    def _declare_local(self, scope: _Scope, decl: A.VarDecl) -> None:
        name = decl.name
        if name in self.contract_names and self.contract_names[name][0] != "import":
            raise DuplicateDeclaration(name, decl.pos, f"shadows contract-level {self.contract_names[name][0]}")
        if name in self.imported_names:
            raise DuplicateDeclaration(name, decl.pos, "shadows an imported symbol")
        if name in scope.names:
            raise DuplicateDeclaration(name, decl.pos)
        if decl.tdesc is None:
            decl.tdesc = self.describe(decl.type)
        scope.names[name] = decl

    def _block(self, block: A.Block, scope: _Scope, eff: Effects, fn: A.FuncDef) -> None:
        inner = _Scope(scope)
        for stmt in block.stmts:
            self._stmt(stmt, inner, eff, fn)

    def _stmt(self, s: A.Node, scope: _Scope, eff: Effects, fn: A.FuncDef) -> None:
        if isinstance(s, A.Block):
            self._block(s, scope, eff, fn)
        elif isinstance(s, A.VarDeclStmt):
            if s.value is not None:
                self._expr(s.value, scope, eff, READ)
            for d in s.decls:
                if d is not None:
                    self._type_refs(d.type, scope)
                    self._declare_local(scope, d)
        elif isinstance(s, A.ExprStmt):
            self._expr(s.expr, scope, eff, READ)
        elif isinstance(s, A.If):
            self._expr(s.cond, scope, eff, READ)
            self._stmt_scoped(s.then, scope, eff, fn)
            if s.else_ is not None:
                self._stmt_scoped(s.else_, scope, eff, fn)
        elif isinstance(s, A.For):
            inner = _Scope(scope)
            if s.init is not None:
                self._stmt(s.init, inner, eff, fn)
            if s.cond is not None:
                self._expr(s.cond, inner, eff, READ)
            if s.post is not None:
                self._expr(s.post, inner, eff, READ)
            self._stmt_scoped(s.body, inner, eff, fn)
        elif isinstance(s, A.While):
            self._expr(s.cond, scope, eff, READ)
            self._stmt_scoped(s.body, scope, eff, fn)
        elif isinstance(s, A.DoWhile):
            self._stmt_scoped(s.body, scope, eff, fn)
            self._expr(s.cond, scope, eff, READ)
        elif isinstance(s, A.Return):
            if s.value is not None:
                self._expr(s.value, scope, eff, READ)
        elif isinstance(s, (A.Emit, A.RevertStmt)):
            self._expr(s.call, scope, eff, READ)
        elif isinstance(s, (A.Break, A.Continue, A.Assembly)):
            pass
        else:
            raise TypeError(f"unexpected statement {type(s).__name__}")

    def _stmt_scoped(self, s: A.Node, scope: _Scope, eff: Effects, fn: A.FuncDef) -> None:
        self._stmt(s, _Scope(scope), eff, fn)

    def _type_refs(self, t: A.Node, scope: _Scope) -> None:
        if isinstance(t, A.UserType):
            if t.path[0] not in self.contract_names and t.path[0] not in self.table.structs \
                    and t.path[0] not in self.table.enums:
                raise UnresolvedIdentifier(t.name, t.pos)
        elif isinstance(t, A.ArrayType):
            self._type_refs(t.base, scope)
        elif isinstance(t, A.MappingType):
            self._type_refs(t.key, scope)
            self._type_refs(t.value, scope)

    def _bind(self, ident: A.Ident, scope: _Scope) -> tuple:
        local = scope.lookup(ident.name)
        if local is not None:
            ident.binding = ("local", local)
        elif ident.name in self.contract_names:
            ident.binding = self.contract_names[ident.name]
        elif ident.name in BUILTINS:
            ident.binding = ("builtin", None)
        else:
            raise UnresolvedIdentifier(ident.name, ident.pos)
        return ident.binding

    def _record_state(self, ident: A.Ident, eff: Effects, mode: str) -> None:
        kind = ident.binding[0]
        if kind != "state":
            return
        if mode in (READ, READWRITE):
            eff.reads.add(ident.name)
        if mode in (WRITE, READWRITE):
            eff.writes.add(ident.name)

    def _expr(self, e: Optional[A.Node], scope: _Scope, eff: Effects, mode: str) -> None:
        if e is None:
            return
        if isinstance(e, A.Ident):
            binding = self._bind(e, scope)
            self._record_state(e, eff, mode)
            if binding[0] == "function":
                eff.calls.add(e.name)
        elif isinstance(e, (A.NumberLit, A.StringLit, A.HexLit, A.BoolLit)):
            pass
        elif isinstance(e, A.TypeExpr):
            self._type_refs(e.type, scope)
        elif isinstance(e, A.Member):
            if isinstance(e.expr, A.Ident) and e.expr.name == "this" and scope.lookup("this") is None:
                self._bind(e.expr, scope)
                if e.name in self.contract_names and self.contract_names[e.name][0] in ("function", "state"):
                    if self.contract_names[e.name][0] == "function":
                        eff.calls.add(e.name)
                    else:
                        eff.reads.add(e.name)  # external getter call through this
                return
            self._expr(e.expr, scope, eff, mode if mode != READ else READ)
        elif isinstance(e, A.Index):
            self._expr(e.expr, scope, eff, mode)
            self._expr(e.index, scope, eff, READ)
        elif isinstance(e, A.Call):
            callee = e.callee
            if isinstance(callee, A.Member) and callee.name in ("push", "pop") and self._state_rooted(callee.expr, scope):
                self._expr(callee.expr, scope, eff, WRITE)
            else:
                self._expr(callee, scope, eff, READ)
            for a in e.args:
                self._expr(a, scope, eff, READ)
        elif isinstance(e, A.CallOptions):
            self._expr(e.expr, scope, eff, READ)
            for v in e.values:
                self._expr(v, scope, eff, READ)
        elif isinstance(e, A.Unary):
            if e.op in ("++", "--"):
                self._expr(e.operand, scope, eff, READWRITE)
            elif e.op == "delete":
                self._expr(e.operand, scope, eff, WRITE)
            else:
                self._expr(e.operand, scope, eff, READ)
        elif isinstance(e, A.Binary):
            self._expr(e.left, scope, eff, READ)
            self._expr(e.right, scope, eff, READ)
        elif isinstance(e, A.Assign):
            self._expr(e.value, scope, eff, READ)
            self._lvalue(e.target, scope, eff, WRITE if e.op == "=" else READWRITE)
        elif isinstance(e, A.Conditional):
            self._expr(e.cond, scope, eff, READ)
            self._expr(e.then, scope, eff, mode)
            self._expr(e.else_, scope, eff, mode)
        elif isinstance(e, A.Tuple):
            for item in e.items:
                self._expr(item, scope, eff, mode)
        elif isinstance(e, A.InlineArray):
            for item in e.items:
                self._expr(item, scope, eff, READ)
        elif isinstance(e, A.New):
            self._type_refs(e.type, scope)
        else:
            raise TypeError(f"unexpected expression {type(e).__name__}")

    def _lvalue(self, e: A.Node, scope: _Scope, eff: Effects, mode: str) -> None:
        if isinstance(e, A.Tuple):
            for item in e.items:
                if item is not None:
                    self._lvalue(item, scope, eff, mode)
            return
        self._expr(e, scope, eff, mode)

    def _state_rooted(self, e: A.Node, scope: _Scope) -> bool:
        while isinstance(e, (A.Member, A.Index)):
            e = e.expr
        return isinstance(e, A.Ident) and scope.lookup(e.name) is None and \
            self.contract_names.get(e.name, ("",))[0] == "state"

    def run(self) -> A.SourceUnit:
        self.collect()
        self.annotate_types()
        self.synthesize_getters()
        self.resolve_bodies()
        self.unit.types = self.table
        return self.unit


def resolve(unit: A.SourceUnit, imported: Optional[dict[str, A.Node]] = None) -> A.SourceUnit:
    """Return a resolved copy of ``unit`` with bindings and reads/writes/calls populated.

    ``imported`` maps symbol names made available by imports to their
    definitions (structs/enums) when known; other imported names resolve
    as opaque symbols.
    """
    work = A.deep_copy(unit)
    work.functions = [f for f in work.functions if not f.synthesized]
    return Resolver(work, imported).run()


def transitive_calls(unit: A.SourceUnit, fn: A.FuncDef) -> set[str]:
    """Names of all functions reachable from ``fn`` via internal calls (excluding ``fn`` unless recursive)."""
    by_name: dict[str, list[A.FuncDef]] = {}
    for f in unit.functions:
        by_name.setdefault(f.name, []).append(f)
    seen: set[str] = set()
    stack = list(fn.calls)
    while stack:
        name = stack.pop()
        if name in seen:
            continue
        seen.add(name)
        for g in by_name.get(name, []):
            stack.extend(g.calls)
    return seen


def iter_functions(unit: A.SourceUnit) -> Iterable[A.FuncDef]:
    yield from unit.functions
    if unit.constructor is not None:
        yield unit.constructor
