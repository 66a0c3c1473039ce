"""Tokenizer for the supported Solidity subset."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..diagnostics import Pos, SourceSyntaxError

IDENT = "ident"
NUMBER = "number"
STRING = "string"
HEXSTRING = "hexstring"
OP = "op"
EOF = "eof"

_OPERATORS = sorted(
    [
        ">>=", "<<=", "**", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=",
        "/=", "%=", "|=", "&=", "^=", "<<", ">>", "=>", ":=",
        "+", "-", "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "~", "?", ":", ";", ",",
        ".", "(", ")", "{", "}", "[", "]",
    ],
    key=len,
    reverse=True,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<hexstr>hex(?:"[0-9a-fA-F_]*"|'[0-9a-fA-F_]*'))
  | (?P<ustr>unicode(?:"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*'))
  | (?P<str>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<hexnum>0[xX][0-9a-fA-F_]+)
  | (?P<num>(?:[0-9][0-9_]*(?:\.[0-9_]+)?|\.[0-9][0-9_]*)(?:[eE]-?[0-9]+)?)
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<op>"""
    + "|".join(re.escape(o) for o in _OPERATORS)
    + r")",
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    pos: Pos
    start: int
    end: int

    def is_op(self, *values: str) -> bool:
        return self.kind == OP and self.value in values

    def is_ident(self, *values: str) -> bool:
        return self.kind == IDENT and (not values or self.value in values)


def _unescape(body: str) -> str:
    out = []
    i = 0
    simple = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "0": "\0", "\n": ""}
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            if nxt == "x":
                out.append(chr(int(body[i + 2:i + 4], 16)))
                i += 4
                continue
            if nxt == "u":
                out.append(chr(int(body[i + 2:i + 6], 16)))
                i += 6
                continue
            out.append(simple.get(nxt, nxt))
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    i, n = 0, len(text)
    while i < n:
        m = _TOKEN_RE.match(text, i)
        if m is None:
            if text.startswith("/*", i):
                raise SourceSyntaxError("unterminated block comment", Pos(line, i - line_start + 1))
            raise SourceSyntaxError(f"unexpected character {text[i]!r}", Pos(line, i - line_start + 1))
        kind = m.lastgroup
        value = m.group()
        pos = Pos(line, i - line_start + 1)
        if kind == "ident":
            tokens.append(Token(IDENT, value, pos, i, m.end()))
        elif kind in ("num", "hexnum"):
            tokens.append(Token(NUMBER, value, pos, i, m.end()))
        elif kind == "str":
            tokens.append(Token(STRING, _unescape(value[1:-1]), pos, i, m.end()))
        elif kind == "ustr":
            tokens.append(Token(STRING, _unescape(value[8:-1]), pos, i, m.end()))
        elif kind == "hexstr":
            tokens.append(Token(HEXSTRING, value[4:-1].replace("_", ""), pos, i, m.end()))
        elif kind == "op":
            tokens.append(Token(OP, value, pos, i, m.end()))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = i + value.rindex("\n") + 1
        i = m.end()
    tokens.append(Token(EOF, "", Pos(line, n - line_start + 1), n, n))
    return tokens
