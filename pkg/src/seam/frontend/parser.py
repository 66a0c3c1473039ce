"""Recursive-descent parser for the supported Solidity subset.

Two dialects share one grammar. The default accepts a single user contract.
``extended=True`` additionally accepts what the code generator emits:
imports, libraries, file-level structs/enums/constants, inline assembly
(kept as opaque text), and fallback/receive functions.
"""

from __future__ import annotations

import re
from typing import Optional

from ..diagnostics import Pos, SourceSyntaxError, UnsupportedConstruct
from . import ast as A
from .lexer import EOF, HEXSTRING, IDENT, NUMBER, OP, STRING, Token, tokenize

_INT_RE = re.compile(r"^(u?int)(\d*)$")
_BYTES_RE = re.compile(r"^bytes(\d+)$")
_FIXED_RE = re.compile(r"^u?fixed(\d+x\d+)?$")

NUMBER_UNITS = {"wei", "gwei", "ether", "seconds", "minutes", "hours", "days", "weeks"}
LOCATIONS = {"memory", "storage", "calldata"}
VISIBILITIES = {"public", "private", "internal", "external"}
MUTABILITIES = {"pure", "view", "payable"}

BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, ">": 4, "<=": 4, ">=": 4,
    "|": 5,
    "^": 6,
    "&": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
    "**": 11,
}
RIGHT_ASSOC = {"**"}
ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>="}


def normalize_elementary(name: str) -> Optional[str]:
    """Return the canonical spelling of an elementary type name, or None."""
    if name in ("address", "bool", "string", "bytes"):
        return name
    if name == "byte":
        return "bytes1"
    m = _INT_RE.match(name)
    if m:
        bits = m.group(2)
        if not bits:
            return m.group(1) + "256"
        b = int(bits)
        if 8 <= b <= 256 and b % 8 == 0 and bits == str(b):
            return name
        return None
    m = _BYTES_RE.match(name)
    if m:
        n = int(m.group(1))
        if 1 <= n <= 32 and m.group(1) == str(n):
            return name
    return None


def is_elementary_name(name: str) -> bool:
    return normalize_elementary(name) is not None


# words that begin an expression and are never a type name or a variable name
_EXPR_KEYWORDS = frozenset({"delete", "new", "true", "false", "type", "this", "super"})


class Parser:
    def __init__(self, text: str, extended: bool = False):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.extended = extended

    # -- token helpers ---------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        j = min(self.i + k, len(self.tokens) - 1)
        return self.tokens[j]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != EOF:
            self.i += 1
        return t

    def error(self, expected: tuple[str, ...], tok: Optional[Token] = None) -> SourceSyntaxError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == EOF else repr(tok.value)
        exp = ", ".join(expected)
        return SourceSyntaxError(f"expected {exp} but found {found}", tok.pos, expected)

    def expect_op(self, value: str) -> Token:
        if not self.tok.is_op(value):
            raise self.error((repr(value),))
        return self.advance()

    def accept_op(self, value: str) -> bool:
        if self.tok.is_op(value):
            self.advance()
            return True
        return False

    def expect_ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != IDENT:
            raise self.error((what,))
        return self.advance()

    def accept_kw(self, value: str) -> bool:
        if self.tok.is_ident(value):
            self.advance()
            return True
        return False

    def unsupported(self, construct: str, tok: Optional[Token] = None) -> UnsupportedConstruct:
        return UnsupportedConstruct(construct, (tok or self.tok).pos)

    # -- source unit -----------------------------------------------------

    def parse_source_unit(self) -> A.SourceUnit:
        pragma = ""
        imports: list[A.ImportDirective] = []
        file_level: list[A.Node] = []
        unit: Optional[A.SourceUnit] = None
        license_ = None
        m = re.search(r"SPDX-License-Identifier:\s*([^\s*]+)", self.text)
        if m:
            license_ = m.group(1)
        while self.tok.kind != EOF:
            t = self.tok
            if t.is_ident("pragma"):
                value = self.parse_pragma()
                if value is not None:
                    pragma = value
            elif t.is_ident("import"):
                if not self.extended:
                    raise self.unsupported("import")
                imports.append(self.parse_import())
            elif t.is_ident("contract", "library", "interface", "abstract"):
                if unit is not None:
                    raise self.unsupported("multiple contracts")
                unit = self.parse_contract()
            elif t.is_ident("struct", "enum") or (t.kind == IDENT and self._looks_like_constant()):
                if not self.extended:
                    raise self.unsupported("file-level declaration")
                if unit is not None:
                    raise self.unsupported("file-level declaration after contract")
                if t.is_ident("struct"):
                    file_level.append(self.parse_struct())
                elif t.is_ident("enum"):
                    file_level.append(self.parse_enum())
                else:
                    decl = self.parse_state_var()
                    file_level.append(decl)
            elif t.is_ident("function", "error", "event", "using", "type"):
                raise self.unsupported("file-level declaration")
            else:
                raise self.error(("pragma", "contract"))
        if unit is None:
            raise SourceSyntaxError("expected a contract definition", self.tok.pos, ("contract",))
        unit.pragma = pragma
        unit.imports = imports
        unit.file_level = file_level
        unit.license = license_
        return unit

    def _looks_like_constant(self) -> bool:
        j = self.i
        depth = 0
        while j < len(self.tokens):
            t = self.tokens[j]
            if t.is_op("(", "["):
                depth += 1
            elif t.is_op(")", "]"):
                depth -= 1
            elif t.is_op(";", "{") or t.kind == EOF:
                return False
            elif depth == 0 and t.is_ident("constant"):
                return True
            j += 1
        return False

    def parse_pragma(self) -> Optional[str]:
        self.advance()
        name = self.expect_ident("pragma name")
        start = self.tok.start
        while not self.tok.is_op(";"):
            if self.tok.kind == EOF:
                raise self.error(("';'",))
            self.advance()
        end = self.tok.start
        self.advance()
        if name.value != "solidity":
            if name.value == "abicoder" or name.value == "experimental":
                return None
            raise self.unsupported(f"pragma {name.value}", name)
        return " ".join(self.text[start:end].split())

    def parse_import(self) -> A.ImportDirective:
        pos = self.advance().pos
        symbols: list[str] = []
        if self.accept_op("{"):
            while True:
                symbols.append(self.expect_ident().value)
                if self.accept_kw("as"):
                    raise self.unsupported("import alias")
                if not self.accept_op(","):
                    break
            self.expect_op("}")
            if not self.accept_kw("from"):
                raise self.error(("from",))
        if self.tok.kind != STRING:
            raise self.error(("import path",))
        path = self.advance().value
        if self.tok.is_ident("as"):
            raise self.unsupported("import alias")
        self.expect_op(";")
        return A.ImportDirective(path, symbols, pos=pos)

    def parse_contract(self) -> A.SourceUnit:
        t = self.advance()
        if t.value == "abstract":
            raise self.unsupported("abstract contract", t)
        if t.value == "interface":
            raise self.unsupported("interface", t)
        if t.value == "library" and not self.extended:
            raise self.unsupported("library", t)
        name = self.expect_ident("contract name")
        if self.tok.is_ident("is"):
            raise self.unsupported("inheritance")
        self.expect_op("{")
        unit = A.SourceUnit(pragma="", kind=t.value, name=name.value, pos=t.pos)
        while not self.tok.is_op("}"):
            if self.tok.kind == EOF:
                raise self.error(("'}'",))
            self.parse_member(unit)
        self.advance()
        return unit

    def parse_member(self, unit: A.SourceUnit) -> None:
        t = self.tok
        if t.is_ident("struct"):
            unit.structs.append(self.parse_struct())
        elif t.is_ident("enum"):
            unit.enums.append(self.parse_enum())
        elif t.is_ident("event"):
            unit.events.append(self.parse_event())
        elif t.is_ident("error") and self.peek().kind == IDENT:
            unit.errors.append(self.parse_error_def())
        elif t.is_ident("function"):
            unit.functions.append(self.parse_function())
        elif t.is_ident("constructor"):
            if unit.constructor is not None:
                raise SourceSyntaxError("more than one constructor", t.pos, ())
            unit.constructor = self.parse_constructor()
        elif t.is_ident("fallback", "receive"):
            if not self.extended:
                raise self.unsupported(t.value)
            unit.functions.append(self.parse_special_function())
        elif t.is_ident("modifier"):
            raise self.unsupported("modifier")
        elif t.is_ident("using"):
            raise self.unsupported("using for")
        elif t.is_ident("type") and self.peek().kind == IDENT and self.peek(2).is_ident("is"):
            raise self.unsupported("user-defined value type")
        else:
            unit.state_vars.append(self.parse_state_var())

    def parse_struct(self) -> A.StructDef:
        pos = self.advance().pos
        name = self.expect_ident("struct name").value
        self.expect_op("{")
        members = []
        while not self.tok.is_op("}"):
            mpos = self.tok.pos
            typ = self.parse_type_name()
            mname = self.expect_ident("member name").value
            self.expect_op(";")
            members.append(A.VarDecl(typ, mname, pos=mpos))
        self.advance()
        if not members:
            raise SourceSyntaxError(f"struct '{name}' has no members", pos, ("member",))
        return A.StructDef(name, members, pos=pos)

    def parse_enum(self) -> A.EnumDef:
        pos = self.advance().pos
        name = self.expect_ident("enum name").value
        self.expect_op("{")
        values = []
        while not self.tok.is_op("}"):
            values.append(self.expect_ident("enum value").value)
            if not self.accept_op(","):
                break
        self.expect_op("}")
        if not values:
            raise SourceSyntaxError(f"enum '{name}' has no values", pos, ("enum value",))
        return A.EnumDef(name, values, pos=pos)

    def parse_event(self) -> A.EventDef:
        pos = self.advance().pos
        name = self.expect_ident("event name").value
        params = self.parse_param_list(allow_indexed=True)
        anonymous = self.accept_kw("anonymous")
        self.expect_op(";")
        return A.EventDef(name, params, anonymous, pos=pos)

    def parse_error_def(self) -> A.ErrorDef:
        pos = self.advance().pos
        name = self.expect_ident("error name").value
        params = self.parse_param_list()
        self.expect_op(";")
        return A.ErrorDef(name, params, pos=pos)

    def parse_state_var(self) -> A.VarDecl:
        pos = self.tok.pos
        typ = self.parse_type_name()
        visibility = None
        constant = immutable = False
        while True:
            t = self.tok
            if t.is_ident(*VISIBILITIES) and t.value != "external":
                if visibility is not None:
                    raise SourceSyntaxError("visibility already specified", t.pos, ())
                visibility = t.value
                self.advance()
            elif t.is_ident("constant"):
                constant = True
                self.advance()
            elif t.is_ident("immutable"):
                raise self.unsupported("immutable variable")
            elif t.is_ident("override"):
                raise self.unsupported("override")
            elif t.is_ident("transient"):
                raise self.unsupported("transient storage")
            else:
                break
        name = self.expect_ident("variable name").value
        value = None
        if self.accept_op("="):
            value = self.parse_expression()
        elif constant:
            raise self.error(("'='",))
        self.expect_op(";")
        return A.VarDecl(typ, name, visibility=visibility or "internal", constant=constant,
                         immutable=immutable, value=value, pos=pos)

    def parse_param_list(self, allow_indexed: bool = False, allow_location: bool = False) -> list[A.VarDecl]:
        self.expect_op("(")
        params: list[A.VarDecl] = []
        if self.accept_op(")"):
            return params
        while True:
            pos = self.tok.pos
            typ = self.parse_type_name()
            location = None
            indexed = False
            if self.tok.is_ident(*LOCATIONS):
                if not allow_location:
                    raise self.error(("parameter name",))
                location = self.advance().value
            if allow_indexed and self.accept_kw("indexed"):
                indexed = True
            name = None
            if self.tok.kind == IDENT:
                name = self.advance().value
            params.append(A.VarDecl(typ, name, location=location, indexed=indexed, pos=pos))
            if self.accept_op(")"):
                return params
            self.expect_op(",")

    def _parse_function_attrs(self, allow_visibility: set[str]):
        visibility = None
        mutability = "nonpayable"
        while True:
            t = self.tok
            if t.is_ident(*VISIBILITIES):
                if t.value not in allow_visibility:
                    raise SourceSyntaxError(f"visibility '{t.value}' not allowed here", t.pos, ())
                if visibility is not None:
                    raise SourceSyntaxError("visibility already specified", t.pos, ())
                visibility = t.value
                self.advance()
            elif t.is_ident(*MUTABILITIES):
                if mutability != "nonpayable":
                    raise SourceSyntaxError("mutability already specified", t.pos, ())
                mutability = t.value
                self.advance()
            elif t.is_ident("virtual"):
                raise self.unsupported("virtual function")
            elif t.is_ident("override"):
                raise self.unsupported("override")
            elif t.is_ident("constant"):
                raise SourceSyntaxError("'constant' is not a function mutability; use 'view'", t.pos, ())
            elif t.kind == IDENT and not t.is_ident("returns"):
                raise self.unsupported("modifier invocation")
            else:
                return visibility, mutability

    def parse_function(self) -> A.FuncDef:
        pos = self.advance().pos
        name_tok = self.expect_ident("function name")
        params = self.parse_param_list(allow_location=True)
        visibility, mutability = self._parse_function_attrs(VISIBILITIES)
        returns: list[A.VarDecl] = []
        if self.accept_kw("returns"):
            returns = self.parse_param_list(allow_location=True)
        if self.tok.is_op(";"):
            raise self.unsupported("unimplemented function")
        if visibility is None:
            raise SourceSyntaxError(f"function '{name_tok.value}' has no visibility", name_tok.pos,
                                    ("public", "external", "internal", "private"))
        body = self.parse_block()
        return A.FuncDef("function", name_tok.value, params, returns, visibility, mutability, body, pos=pos)

    def parse_constructor(self) -> A.FuncDef:
        pos = self.advance().pos
        params = self.parse_param_list(allow_location=True)
        visibility, mutability = self._parse_function_attrs({"public", "internal"})
        if mutability not in ("nonpayable", "payable"):
            raise SourceSyntaxError("constructor must be payable or non-payable", pos, ())
        if visibility == "internal":
            raise self.unsupported("internal constructor")
        body = self.parse_block()
        return A.FuncDef("constructor", "constructor", params, [], "public", mutability, body, pos=pos)

    def parse_special_function(self) -> A.FuncDef:
        t = self.advance()
        params = self.parse_param_list(allow_location=True)
        visibility, mutability = self._parse_function_attrs({"external"})
        if visibility != "external":
            raise SourceSyntaxError(f"{t.value} must be external", t.pos, ("external",))
        body = self.parse_block()
        return A.FuncDef(t.value, t.value, params, [], "external", mutability, body, pos=t.pos)

    # -- type names ------------------------------------------------------

    def parse_type_name(self) -> A.Node:
        t = self.tok
        if t.kind != IDENT:
            raise self.error(("type name",))
        if t.value == "mapping":
            typ = self.parse_mapping()
        elif t.value == "function":
            raise self.unsupported("function type")
        elif _FIXED_RE.match(t.value):
            raise self.unsupported("fixed-point type")
        elif t.value == "var":
            raise self.unsupported("var")
        else:
            canon = normalize_elementary(t.value)
            self.advance()
            if canon is not None:
                payable = False
                if canon == "address" and self.tok.is_ident("payable"):
                    self.advance()
                    payable = True
                typ = A.ElementaryType(canon, payable, pos=t.pos)
            else:
                path = [t.value]
                while self.tok.is_op(".") and self.peek().kind == IDENT:
                    self.advance()
                    path.append(self.advance().value)
                typ = A.UserType(tuple(path), pos=t.pos)
        while self.tok.is_op("["):
            lpos = self.advance().pos
            if self.accept_op("]"):
                typ = A.ArrayType(typ, None, pos=lpos)
            else:
                length = self.parse_expression()
                self.expect_op("]")
                typ = A.ArrayType(typ, length, pos=lpos)
        return typ

    def parse_mapping(self) -> A.MappingType:
        pos = self.advance().pos
        self.expect_op("(")
        kt = self.tok
        if kt.kind != IDENT:
            raise self.error(("mapping key type",))
        if kt.value == "mapping":
            raise SourceSyntaxError("mapping keys cannot be mappings", kt.pos, ())
        key = self.parse_type_name()
        if isinstance(key, A.ArrayType):
            raise SourceSyntaxError("mapping keys cannot be arrays", kt.pos, ())
        if self.tok.kind == IDENT:
            raise self.unsupported("named mapping parameter")
        self.expect_op("=>")
        value = self.parse_type_name()
        if self.tok.kind == IDENT:
            raise self.unsupported("named mapping parameter")
        self.expect_op(")")
        return A.MappingType(key, value, pos=pos)

    # -- statements ------------------------------------------------------

    def parse_block(self, unchecked: bool = False) -> A.Block:
        pos = self.expect_op("{").pos
        stmts = []
        while not self.tok.is_op("}"):
            if self.tok.kind == EOF:
                raise self.error(("'}'",))
            stmts.append(self.parse_statement())
        self.advance()
        return A.Block(stmts, unchecked, pos=pos)

    def parse_statement(self) -> A.Node:
        t = self.tok
        if t.is_op("{"):
            return self.parse_block()
        if t.kind == IDENT:
            v = t.value
            if v == "if":
                self.advance()
                self.expect_op("(")
                cond = self.parse_expression()
                self.expect_op(")")
                then = self.parse_statement()
                else_ = self.parse_statement() if self.accept_kw("else") else None
                return A.If(cond, then, else_, pos=t.pos)
            if v == "for":
                self.advance()
                self.expect_op("(")
                init = None if self.accept_op(";") else self.parse_simple_statement()
                cond = None
                if not self.tok.is_op(";"):
                    cond = self.parse_expression()
                self.expect_op(";")
                post = None
                if not self.tok.is_op(")"):
                    post = self.parse_expression()
                self.expect_op(")")
                body = self.parse_statement()
                return A.For(init, cond, post, body, pos=t.pos)
            if v == "while":
                self.advance()
                self.expect_op("(")
                cond = self.parse_expression()
                self.expect_op(")")
                return A.While(cond, self.parse_statement(), pos=t.pos)
            if v == "do":
                self.advance()
                body = self.parse_statement()
                if not self.accept_kw("while"):
                    raise self.error(("while",))
                self.expect_op("(")
                cond = self.parse_expression()
                self.expect_op(")")
                self.expect_op(";")
                return A.DoWhile(body, cond, pos=t.pos)
            if v == "return":
                self.advance()
                value = None if self.tok.is_op(";") else self.parse_expression()
                self.expect_op(";")
                return A.Return(value, pos=t.pos)
            if v == "break":
                self.advance()
                self.expect_op(";")
                return A.Break(pos=t.pos)
            if v == "continue":
                self.advance()
                self.expect_op(";")
                return A.Continue(pos=t.pos)
            if v == "emit":
                self.advance()
                call = self.parse_expression()
                if not isinstance(call, A.Call):
                    raise SourceSyntaxError("expected event invocation after 'emit'", t.pos, ("event call",))
                self.expect_op(";")
                return A.Emit(call, pos=t.pos)
            if v == "revert" and self.peek().kind == IDENT:
                self.advance()
                call = self.parse_expression()
                if not isinstance(call, A.Call):
                    raise SourceSyntaxError("expected error invocation after 'revert'", t.pos, ("error call",))
                self.expect_op(";")
                return A.RevertStmt(call, pos=t.pos)
            if v == "unchecked" and self.peek().is_op("{"):
                self.advance()
                return self.parse_block(unchecked=True)
            if v == "assembly":
                return self.parse_assembly()
            if v == "try":
                raise self.unsupported("try/catch")
            if v == "throw":
                raise self.unsupported("throw")
        stmt = self.parse_simple_statement()
        return stmt

    def parse_simple_statement(self) -> A.Node:
        """Variable declaration or expression statement, terminated by ';'."""
        t = self.tok
        decl = self._try_var_decl_stmt()
        if decl is not None:
            return decl
        expr = self.parse_expression()
        self.expect_op(";")
        return A.ExprStmt(expr, pos=t.pos)

    def _try_var_decl_stmt(self) -> Optional[A.Node]:
        start = self.i
        t = self.tok
        if t.is_op("("):
            try:
                return self._parse_tuple_decl()
            except (SourceSyntaxError, UnsupportedConstruct):
                self.i = start
                return None
        if t.kind != IDENT:
            return None
        if t.value in ("var",):
            raise self.unsupported("var")
        if t.value in _EXPR_KEYWORDS:
            return None
        try:
            typ = self.parse_type_name()
            location = None
            if self.tok.is_ident(*LOCATIONS):
                location = self.advance().value
            if self.tok.kind != IDENT or self.tok.value in _EXPR_KEYWORDS:
                raise self.error(("identifier",))
            name = self.advance()
            if not self.tok.is_op("=", ";"):
                raise self.error(("'='", "';'"))
        except (SourceSyntaxError, UnsupportedConstruct) as exc:
            self.i = start
            if isinstance(exc, UnsupportedConstruct) and exc.construct not in ("var",):
                # a type-shaped prefix that hit an unsupported construct is still an expression attempt
                return None
            return None
        decl = A.VarDecl(typ, name.value, location=location, pos=t.pos)
        value = None
        if self.accept_op("="):
            value = self.parse_expression()
        self.expect_op(";")
        return A.VarDeclStmt([decl], value, pos=t.pos)

    def _parse_tuple_decl(self) -> A.VarDeclStmt:
        pos = self.expect_op("(").pos
        decls: list[Optional[A.VarDecl]] = []
        while True:
            if self.tok.is_op(",", ")"):
                decls.append(None)
            else:
                dpos = self.tok.pos
                typ = self.parse_type_name()
                location = None
                if self.tok.is_ident(*LOCATIONS):
                    location = self.advance().value
                name = self.expect_ident()
                decls.append(A.VarDecl(typ, name.value, location=location, pos=dpos))
            if self.accept_op(")"):
                break
            self.expect_op(",")
        if all(d is None for d in decls):
            raise self.error(("declaration",))
        self.expect_op("=")
        value = self.parse_expression()
        self.expect_op(";")
        return A.VarDeclStmt(decls, value, is_tuple=True, pos=pos)

    def parse_assembly(self) -> A.Assembly:
        t = self.advance()
        if not self.extended:
            raise self.unsupported("inline assembly", t)
        flags: list[str] = []
        if self.tok.kind == STRING:
            flags.append(self.advance().value)
        if self.accept_op("("):
            while self.tok.kind == STRING:
                flags.append(self.advance().value)
                if not self.accept_op(","):
                    break
            self.expect_op(")")
        lbrace = self.expect_op("{")
        depth = 1
        while depth:
            tok = self.advance()
            if tok.kind == EOF:
                raise self.error(("'}'",), tok)
            if tok.is_op("{"):
                depth += 1
            elif tok.is_op("}"):
                depth -= 1
        rbrace = self.tokens[self.i - 1]
        raw = self.text[lbrace.end:rbrace.start]
        lines = tuple(line.strip() for line in raw.splitlines() if line.strip())
        return A.Assembly(lines, tuple(flags), pos=t.pos)

    # -- expressions -----------------------------------------------------

    def parse_expression(self) -> A.Node:
        return self.parse_assignment()

    def parse_assignment(self) -> A.Node:
        left = self.parse_conditional()
        if self.tok.kind == OP and self.tok.value in ASSIGN_OPS:
            op = self.advance()
            value = self.parse_assignment()
            return A.Assign(op.value, left, value, pos=op.pos)
        return left

    def parse_conditional(self) -> A.Node:
        cond = self.parse_binary(1)
        if self.tok.is_op("?"):
            q = self.advance()
            then = self.parse_assignment()
            self.expect_op(":")
            else_ = self.parse_assignment()
            return A.Conditional(cond, then, else_, pos=q.pos)
        return cond

    def parse_binary(self, min_prec: int) -> A.Node:
        left = self.parse_unary()
        while True:
            t = self.tok
            prec = BINARY_PRECEDENCE.get(t.value) if t.kind == OP else None
            if prec is None or prec < min_prec:
                return left
            self.advance()
            next_min = prec if t.value in RIGHT_ASSOC else prec + 1
            right = self.parse_binary(next_min)
            left = A.Binary(t.value, left, right, pos=t.pos)

    def parse_unary(self) -> A.Node:
        t = self.tok
        if t.is_op("!", "-", "~", "++", "--"):
            self.advance()
            return A.Unary(t.value, self.parse_unary(), True, pos=t.pos)
        if t.is_op("+"):
            raise SourceSyntaxError("unary '+' is not supported", t.pos, ())
        if t.is_ident("delete"):
            self.advance()
            return A.Unary("delete", self.parse_unary(), True, pos=t.pos)
        return self.parse_postfix()

    def parse_postfix(self) -> A.Node:
        expr = self.parse_primary()
        while True:
            t = self.tok
            if t.is_op("."):
                self.advance()
                name = self.tok
                if name.kind != IDENT:
                    raise self.error(("member name",))
                self.advance()
                expr = A.Member(expr, name.value, pos=t.pos)
            elif t.is_op("["):
                self.advance()
                if self.accept_op("]"):
                    expr = A.Index(expr, None, pos=t.pos)
                    continue
                index = self.parse_expression()
                if self.tok.is_op(":"):
                    raise self.unsupported("index range")
                self.expect_op("]")
                expr = A.Index(expr, index, pos=t.pos)
            elif t.is_op("("):
                expr = self.parse_call_args(expr)
            elif t.is_op("{") and isinstance(expr, (A.Member, A.Ident, A.New)) and self._is_call_options():
                self.advance()
                names, values = [], []
                while not self.tok.is_op("}"):
                    names.append(self.expect_ident().value)
                    self.expect_op(":")
                    values.append(self.parse_expression())
                    if not self.accept_op(","):
                        break
                self.expect_op("}")
                expr = A.CallOptions(expr, names, values, pos=t.pos)
            elif t.is_op("++", "--"):
                self.advance()
                expr = A.Unary(t.value, expr, False, pos=t.pos)
            else:
                return expr

    def _is_call_options(self) -> bool:
        return self.peek().kind == IDENT and self.peek(2).is_op(":")

    def parse_call_args(self, callee: A.Node) -> A.Call:
        pos = self.expect_op("(").pos
        args: list[A.Node] = []
        names: Optional[list[str]] = None
        if self.tok.is_op("{"):
            self.advance()
            names = []
            while not self.tok.is_op("}"):
                names.append(self.expect_ident().value)
                self.expect_op(":")
                args.append(self.parse_expression())
                if not self.accept_op(","):
                    break
            self.expect_op("}")
            self.expect_op(")")
            return A.Call(callee, args, names, pos=pos)
        if not self.accept_op(")"):
            while True:
                args.append(self.parse_expression())
                if self.accept_op(")"):
                    break
                self.expect_op(",")
        return A.Call(callee, args, None, pos=pos)

    def parse_primary(self) -> A.Node:
        t = self.tok
        if t.kind == NUMBER:
            self.advance()
            unit = None
            if self.tok.is_ident(*NUMBER_UNITS):
                unit = self.advance().value
            return A.NumberLit(t.value, unit, pos=t.pos)
        if t.kind == STRING:
            self.advance()
            value = t.value
            while self.tok.kind == STRING:
                value += self.advance().value
            return A.StringLit(value, pos=t.pos)
        if t.kind == HEXSTRING:
            self.advance()
            return A.HexLit(t.value, pos=t.pos)
        if t.is_op("("):
            self.advance()
            items: list[Optional[A.Node]] = []
            while True:
                if self.tok.is_op(",", ")"):
                    items.append(None)
                else:
                    items.append(self.parse_expression())
                if self.accept_op(")"):
                    break
                self.expect_op(",")
            if len(items) == 1 and items[0] is not None:
                return items[0]
            return A.Tuple(items, pos=t.pos)
        if t.is_op("["):
            self.advance()
            items2: list[A.Node] = []
            while not self.tok.is_op("]"):
                items2.append(self.parse_expression())
                if not self.accept_op(","):
                    break
            self.expect_op("]")
            return A.InlineArray(items2, pos=t.pos)
        if t.kind == IDENT:
            if t.value in ("true", "false"):
                self.advance()
                return A.BoolLit(t.value == "true", pos=t.pos)
            if t.value == "new":
                self.advance()
                return A.New(self.parse_type_name(), pos=t.pos)
            if t.value == "mapping":
                raise self.error(("expression",))
            if t.value == "function":
                raise self.unsupported("function type")
            if t.value == "super":
                raise self.unsupported("super")
            if t.value == "assembly":
                raise self.unsupported("inline assembly")
            if _FIXED_RE.match(t.value):
                raise self.unsupported("fixed-point type")
            canon = normalize_elementary(t.value)
            if canon is not None:
                self.advance()
                payable = False
                if canon == "address" and self.tok.is_ident("payable"):
                    self.advance()
                    payable = True
                return A.TypeExpr(A.ElementaryType(canon, payable, pos=t.pos), pos=t.pos)
            self.advance()
            return A.Ident(t.value, pos=t.pos)
        raise self.error(("expression",))


def parse(source_text: str, *, extended: bool = False) -> A.SourceUnit:
    """Parse one Solidity source file into a :class:`SourceUnit`.

    Raises :class:`SourceSyntaxError` for malformed input and
    :class:`UnsupportedConstruct` for valid Solidity outside the subset.
    """
    if isinstance(source_text, bytes):
        source_text = source_text.decode("utf-8")
    return Parser(source_text, extended=extended).parse_source_unit()
