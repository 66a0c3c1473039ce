"""Pretty-printer: AST back to Solidity text.

Style is fixed (4-space indent, one statement per line) so generated files
are stable for golden tests. Parentheses are inserted from operator
precedence only; the parser drops them, so parse(print(ast)) == ast.
"""

from __future__ import annotations

from typing import Optional

from ..frontend import ast as A
from ..frontend.parser import BINARY_PRECEDENCE, RIGHT_ASSOC

INDENT = "    "

_PREC_ASSIGN = 0
_PREC_COND = 0.5
_PREC_UNARY = 12
_PREC_POSTFIX = 13
_PREC_PRIMARY = 14


def type_str(t: A.Node) -> str:
    if isinstance(t, A.ElementaryType):
        return t.name + (" payable" if t.payable else "")
    if isinstance(t, A.UserType):
        return t.name
    if isinstance(t, A.ArrayType):
        length = "" if t.length is None else expr_str(t.length)
        return f"{type_str(t.base)}[{length}]"
    if isinstance(t, A.MappingType):
        return f"mapping({type_str(t.key)} => {type_str(t.value)})"
    raise TypeError(f"not a type node: {type(t).__name__}")


def _quote(s: str) -> str:
    out = []
    needs_unicode = False
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\x{ord(ch):02x}")
        else:
            if ord(ch) > 0x7F:
                needs_unicode = True
            out.append(ch)
    return ("unicode" if needs_unicode else "") + '"' + "".join(out) + '"'


def _prec(e: A.Node) -> float:
    if isinstance(e, A.Assign):
        return _PREC_ASSIGN
    if isinstance(e, A.Conditional):
        return _PREC_COND
    if isinstance(e, A.Binary):
        return BINARY_PRECEDENCE[e.op]
    if isinstance(e, A.Unary):
        return _PREC_UNARY if e.prefix else _PREC_POSTFIX
    if isinstance(e, (A.Member, A.Index, A.Call, A.CallOptions)):
        return _PREC_POSTFIX
    return _PREC_PRIMARY


def _sub(e: A.Node, required: float) -> str:
    s = expr_str(e)
    if _prec(e) < required:
        return f"({s})"
    return s


def expr_str(e: Optional[A.Node]) -> str:
    if e is None:
        return ""
    if isinstance(e, A.Ident):
        return e.name
    if isinstance(e, A.NumberLit):
        return e.value + (f" {e.unit}" if e.unit else "")
    if isinstance(e, A.StringLit):
        return _quote(e.value)
    if isinstance(e, A.HexLit):
        return f'hex"{e.value}"'
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.TypeExpr):
        return type_str(e.type)
    if isinstance(e, A.Member):
        return f"{_sub(e.expr, _PREC_POSTFIX)}.{e.name}"
    if isinstance(e, A.Index):
        return f"{_sub(e.expr, _PREC_POSTFIX)}[{expr_str(e.index)}]"
    if isinstance(e, A.Call):
        callee = _sub(e.callee, _PREC_POSTFIX)
        if e.names is not None:
            inner = ", ".join(f"{n}: {expr_str(a)}" for n, a in zip(e.names, e.args))
            return f"{callee}({{{inner}}})"
        return f"{callee}({', '.join(expr_str(a) for a in e.args)})"
    if isinstance(e, A.CallOptions):
        inner = ", ".join(f"{n}: {expr_str(v)}" for n, v in zip(e.names, e.values))
        return f"{_sub(e.expr, _PREC_POSTFIX)}{{{inner}}}"
    if isinstance(e, A.Unary):
        if not e.prefix:
            return f"{_sub(e.operand, _PREC_POSTFIX)}{e.op}"
        if e.op == "delete":
            return f"delete {_sub(e.operand, _PREC_UNARY)}"
        operand = _sub(e.operand, _PREC_UNARY)
        if isinstance(e.operand, A.Unary) and e.operand.prefix:
            operand = f"({expr_str(e.operand)})"
        return f"{e.op}{operand}"
    if isinstance(e, A.Binary):
        p = BINARY_PRECEDENCE[e.op]
        if e.op in RIGHT_ASSOC:
            left, right = _sub(e.left, p + 0.1), _sub(e.right, p)
        else:
            left, right = _sub(e.left, p), _sub(e.right, p + 0.1)
        return f"{left} {e.op} {right}"
    if isinstance(e, A.Assign):
        return f"{_sub(e.target, _PREC_COND)} {e.op} {_sub(e.value, _PREC_ASSIGN)}"
    if isinstance(e, A.Conditional):
        return f"{_sub(e.cond, 1)} ? {_sub(e.then, _PREC_ASSIGN)} : {_sub(e.else_, _PREC_ASSIGN)}"
    if isinstance(e, A.Tuple):
        return "(" + ", ".join(expr_str(i) if i is not None else "" for i in e.items) + ")"
    if isinstance(e, A.InlineArray):
        return "[" + ", ".join(expr_str(i) for i in e.items) + "]"
    if isinstance(e, A.New):
        return f"new {type_str(e.type)}"
    raise TypeError(f"not an expression: {type(e).__name__}")


def decl_str(d: A.VarDecl) -> str:
    parts = [type_str(d.type)]
    if d.location:
        parts.append(d.location)
    if d.indexed:
        parts.append("indexed")
    if d.name:
        parts.append(d.name)
    return " ".join(parts)


def state_var_str(v: A.VarDecl) -> str:
    parts = [type_str(v.type)]
    if v.visibility and v.visibility != "internal":
        parts.append(v.visibility)
    if v.constant:
        parts.append("constant")
    parts.append(v.name)
    text = " ".join(parts)
    if v.value is not None:
        text += f" = {expr_str(v.value)}"
    text += ";"
    if v.doc:
        text += f" // {v.doc}"
    return text


class Printer:
    def __init__(self):
        self.lines: list[str] = []
        self.level = 0

    def emit(self, text: str = "") -> None:
        self.lines.append(INDENT * self.level + text if text else "")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    # -- statements ------------------------------------------------------

    def simple_stmt(self, s: A.Node) -> str:
        """Statement text without trailing semicolon (for-loop headers)."""
        if isinstance(s, A.VarDeclStmt):
            if s.is_tuple:
                lhs = "(" + ", ".join(decl_str(d) if d is not None else "" for d in s.decls) + ")"
            else:
                lhs = decl_str(s.decls[0])
            if s.value is not None:
                return f"{lhs} = {expr_str(s.value)}"
            return lhs
        if isinstance(s, A.ExprStmt):
            return expr_str(s.expr)
        raise TypeError(f"not a simple statement: {type(s).__name__}")

    def block_body(self, b: A.Block) -> None:
        self.level += 1
        for s in b.stmts:
            self.stmt(s)
        self.level -= 1

    def stmt(self, s: A.Node) -> None:
        if isinstance(s, A.Block):
            self.emit("unchecked {" if s.unchecked else "{")
            self.block_body(s)
            self.emit("}")
        elif isinstance(s, (A.VarDeclStmt, A.ExprStmt)):
            self.emit(self.simple_stmt(s) + ";")
        elif isinstance(s, A.If):
            self._if(s, "if")
        elif isinstance(s, A.For):
            init = self.simple_stmt(s.init) if s.init is not None else ""
            cond = expr_str(s.cond) if s.cond is not None else ""
            post = expr_str(s.post) if s.post is not None else ""
            header = f"for ({init}; {cond}; {post})".replace("( ;", "(;").replace("; )", ";)")
            self._body(header, s.body)
        elif isinstance(s, A.While):
            self._body(f"while ({expr_str(s.cond)})", s.body)
        elif isinstance(s, A.DoWhile):
            if isinstance(s.body, A.Block) and not s.body.unchecked:
                self.emit("do {")
                self.block_body(s.body)
                self.emit(f"}} while ({expr_str(s.cond)});")
            else:
                self.emit("do")
                self.level += 1
                self.stmt(s.body)
                self.level -= 1
                self.emit(f"while ({expr_str(s.cond)});")
        elif isinstance(s, A.Return):
            self.emit("return;" if s.value is None else f"return {expr_str(s.value)};")
        elif isinstance(s, A.Break):
            self.emit("break;")
        elif isinstance(s, A.Continue):
            self.emit("continue;")
        elif isinstance(s, A.Emit):
            self.emit(f"emit {expr_str(s.call)};")
        elif isinstance(s, A.RevertStmt):
            self.emit(f"revert {expr_str(s.call)};")
        elif isinstance(s, A.Assembly):
            flags = ""
            if s.flags:
                flags = " (" + ", ".join(_quote(f) for f in s.flags) + ")"
            self.emit(f"assembly{flags} {{")
            depth = 1
            for line in s.lines:
                lead = len(line) - len(line.lstrip("}"))
                self.level += max(depth - lead, 0)
                self.emit(line)
                self.level -= max(depth - lead, 0)
                depth += line.count("{") - line.count("}")
            self.emit("}")
        else:
            raise TypeError(f"not a statement: {type(s).__name__}")

    def _body(self, header: str, body: A.Node) -> None:
        if isinstance(body, A.Block) and not body.unchecked:
            self.emit(header + " {")
            self.block_body(body)
            self.emit("}")
        else:
            self.emit(header)
            self.level += 1
            self.stmt(body)
            self.level -= 1

    def _if(self, s: A.If, keyword: str) -> None:
        header = f"{keyword} ({expr_str(s.cond)})"
        then_block = isinstance(s.then, A.Block) and not s.then.unchecked
        if not then_block:
            self._body(header, s.then)
            if s.else_ is not None:
                self._else(s.else_, closed=False)
            return
        self.emit(header + " {")
        self.block_body(s.then)
        if s.else_ is None:
            self.emit("}")
        else:
            self._else(s.else_, closed=True)

    def _else(self, e: A.Node, closed: bool) -> None:
        prefix = "} else" if closed else "else"
        if isinstance(e, A.If) and isinstance(e.then, A.Block) and not e.then.unchecked:
            self.emit(f"{prefix} if ({expr_str(e.cond)}) {{")
            self.block_body(e.then)
            if e.else_ is None:
                self.emit("}")
            else:
                self._else(e.else_, closed=True)
        elif isinstance(e, A.Block) and not e.unchecked:
            self.emit(prefix + " {")
            self.block_body(e)
            self.emit("}")
        else:
            if closed:
                self.emit("}")
            self._body("else", e)

    # -- members ---------------------------------------------------------

    def function(self, f: A.FuncDef) -> None:
        params = ", ".join(decl_str(p) for p in f.params)
        if f.kind == "constructor":
            header = f"constructor({params})"
        elif f.kind in ("fallback", "receive"):
            header = f"{f.kind}({params}) {f.visibility}"
        else:
            header = f"function {f.name}({params}) {f.visibility}"
        if f.mutability != "nonpayable":
            header += f" {f.mutability}"
        if f.returns:
            header += " returns (" + ", ".join(decl_str(r) for r in f.returns) + ")"
        body = f.body or A.Block([])
        if not body.stmts:
            self.emit(header + " {}")
            return
        self.emit(header + " {")
        self.block_body(body)
        self.emit("}")

    def struct(self, s: A.StructDef) -> None:
        self.emit(f"struct {s.name} {{")
        self.level += 1
        for m in s.members:
            self.emit(f"{type_str(m.type)} {m.name};")
        self.level -= 1
        self.emit("}")

    def enum(self, e: A.EnumDef) -> None:
        self.emit(f"enum {e.name} {{")
        self.level += 1
        for i, v in enumerate(e.values):
            self.emit(v + ("," if i < len(e.values) - 1 else ""))
        self.level -= 1
        self.emit("}")

    def event(self, e: A.EventDef) -> None:
        params = ", ".join(decl_str(p) for p in e.params)
        self.emit(f"event {e.name}({params}){' anonymous' if e.anonymous else ''};")

    def error(self, e: A.ErrorDef) -> None:
        self.emit(f"error {e.name}({', '.join(decl_str(p) for p in e.params)});")

    def unit(self, u: A.SourceUnit, license_: Optional[str] = None, header_comment: Optional[str] = None) -> None:
        self.emit(f"// SPDX-License-Identifier: {license_ or u.license or 'UNLICENSED'}")
        if u.pragma:
            self.emit(f"pragma solidity {u.pragma};")
        if header_comment:
            self.emit()
            for line in header_comment.splitlines():
                self.emit(f"// {line}".rstrip())
        if u.imports:
            self.emit()
            for imp in u.imports:
                if imp.symbols:
                    self.emit(f'import {{{", ".join(imp.symbols)}}} from {_quote(imp.path)};')
                else:
                    self.emit(f"import {_quote(imp.path)};")
        for n in u.file_level:
            self.emit()
            if isinstance(n, A.StructDef):
                self.struct(n)
            elif isinstance(n, A.EnumDef):
                self.enum(n)
            else:
                self.emit(state_var_str(n))
        self.emit()
        self.emit(f"{u.kind} {u.name} {{")
        self.level += 1
        sections: list[list] = []
        sections.append([("enum", e) for e in u.enums])
        sections.append([("struct", s) for s in u.structs])
        sections.append([("error", e) for e in u.errors])
        sections.append([("event", e) for e in u.events])
        sections.append([("var", v) for v in u.state_vars])
        members = []
        if u.constructor is not None:
            members.append(("function", u.constructor))
        members.extend(("function", f) for f in u.functions if not f.synthesized)
        first = True
        prev_kind = None
        for kind, node in [m for sec in sections for m in sec]:
            if not first and (kind in ("enum", "struct") or kind != prev_kind):
                self.emit()
            prev_kind = kind
            if kind == "enum":
                self.enum(node)
            elif kind == "struct":
                self.struct(node)
            elif kind == "error":
                self.error(node)
            elif kind == "event":
                self.event(node)
            else:
                self.emit(state_var_str(node))
            first = False
        for _, f in members:
            if not first:
                self.emit()
            self.function(f)
            first = False
        self.level -= 1
        self.emit("}")


def print_unit(unit: A.SourceUnit, license_: Optional[str] = None, header_comment: Optional[str] = None) -> str:
    p = Printer()
    p.unit(unit, license_, header_comment)
    return p.text()


def print_function(f: A.FuncDef, level: int = 0) -> str:
    p = Printer()
    p.level = level
    p.function(f)
    return p.text()
