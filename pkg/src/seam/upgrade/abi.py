"""Contract ABI encoding and decoding (head/tail layout, 32-byte words).

Supports the types a diamondCut payload and an ``initialize`` call need:
``uintN``, ``intN``, ``address``, ``bool``, ``bytesN``, ``bytes``, ``string``,
fixed and dynamic arrays, and tuples.

Value conventions: integers as ``int``, addresses as ``0x``-prefixed hex
strings (decoded lowercase), ``bytesN``/``bytes`` as ``bytes``, strings as
``str``, arrays as lists and tuples as tuples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Optional, Sequence

WORD = 32


class AbiError(ValueError):
    pass


@dataclass(frozen=True)
class AbiType:
    kind: str  # uint | int | address | bool | fixedbytes | bytes | string | array | tuple
    size: int = 0  # bits for uint/int, bytes for fixedbytes
    elem: Optional["AbiType"] = None
    length: Optional[int] = None  # fixed array length; None = dynamic
    components: tuple["AbiType", ...] = ()

    @property
    def is_dynamic(self) -> bool:
        if self.kind in ("bytes", "string"):
            return True
        if self.kind == "array":
            return self.length is None or self.elem.is_dynamic
        if self.kind == "tuple":
            return any(c.is_dynamic for c in self.components)
        return False

    def head_size(self) -> int:
        if self.is_dynamic:
            return WORD
        if self.kind == "array":
            return self.length * self.elem.head_size()
        if self.kind == "tuple":
            return sum(c.head_size() for c in self.components)
        return WORD

    def __str__(self) -> str:
        if self.kind in ("uint", "int"):
            return f"{self.kind}{self.size}"
        if self.kind == "fixedbytes":
            return f"bytes{self.size}"
        if self.kind == "array":
            return f"{self.elem}[{'' if self.length is None else self.length}]"
        if self.kind == "tuple":
            return "(" + ",".join(str(c) for c in self.components) + ")"
        return self.kind


_BASE = re.compile(r"(uint|int)(\d*)|bytes(\d+)|address|bool|bytes|string")


def _split_top(s: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur or parts:
        parts.append(cur)
    return parts


def parse_type(text: str) -> AbiType:
    text = text.strip()
    m = re.fullmatch(r"(.*)\[(\d*)\]", text)
    if m and text.endswith("]"):
        # peel the outermost (last) array suffix
        depth = 0
        for i in range(len(text) - 1, -1, -1):
            if text[i] == "]":
                depth += 1
            elif text[i] == "[":
                depth -= 1
                if depth == 0:
                    inner, dim = text[:i], text[i + 1:-1]
                    break
        if dim and (not dim.isdigit() or int(dim) == 0):
            raise AbiError(f"bad array length in {text!r}")
        return AbiType("array", elem=parse_type(inner), length=int(dim) if dim else None)
    if text.startswith("(") and text.endswith(")"):
        inner = text[1:-1]
        return AbiType("tuple", components=tuple(parse_type(p) for p in _split_top(inner)) if inner else ())
    m = _BASE.fullmatch(text)
    if not m:
        raise AbiError(f"unsupported ABI type {text!r}")
    if m.group(1):
        bits = int(m.group(2) or 256)
        if bits % 8 or not 8 <= bits <= 256:
            raise AbiError(f"bad integer width in {text!r}")
        return AbiType(m.group(1), bits)
    if m.group(3):
        n = int(m.group(3))
        if not 1 <= n <= 32:
            raise AbiError(f"bad bytesN width in {text!r}")
        return AbiType("fixedbytes", n)
    return AbiType(text)


def _address_bytes(value: Any) -> bytes:
    if isinstance(value, (bytes, bytearray)):
        raw = bytes(value)
    elif isinstance(value, str) and re.fullmatch(r"0x[0-9a-fA-F]{40}", value):
        raw = bytes.fromhex(value[2:])
    else:
        raise AbiError(f"not an address: {value!r}")
    if len(raw) != 20:
        raise AbiError(f"address must be 20 bytes, got {len(raw)}")
    return raw


def _pad_right(b: bytes) -> bytes:
    return b + b"\x00" * (-len(b) % WORD)


def _encode_static(t: AbiType, v: Any) -> bytes:
    if t.kind == "uint":
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < (1 << t.size):
            raise AbiError(f"value {v!r} out of range for {t}")
        return v.to_bytes(WORD, "big")
    if t.kind == "int":
        if isinstance(v, bool) or not isinstance(v, int) or not -(1 << (t.size - 1)) <= v < (1 << (t.size - 1)):
            raise AbiError(f"value {v!r} out of range for {t}")
        return (v % (1 << 256)).to_bytes(WORD, "big")
    if t.kind == "address":
        return b"\x00" * 12 + _address_bytes(v)
    if t.kind == "bool":
        if not isinstance(v, bool):
            raise AbiError(f"not a bool: {v!r}")
        return (1 if v else 0).to_bytes(WORD, "big")
    if t.kind == "fixedbytes":
        if not isinstance(v, (bytes, bytearray)) or len(v) != t.size:
            raise AbiError(f"{t} needs exactly {t.size} bytes, got {v!r}")
        return bytes(v) + b"\x00" * (WORD - t.size)
    raise AbiError(f"{t} is not a static base type")


def _encode_sequence(types: Sequence[AbiType], values: Sequence[Any]) -> bytes:
    if len(types) != len(values):
        raise AbiError(f"expected {len(types)} values, got {len(values)}")
    heads: list[bytes] = []
    tails: list[bytes] = []
    head_len = sum(t.head_size() for t in types)
    tail_len = 0
    for t, v in zip(types, values):
        if t.is_dynamic:
            heads.append((head_len + tail_len).to_bytes(WORD, "big"))
            enc = encode_value(t, v)
            tails.append(enc)
            tail_len += len(enc)
        else:
            heads.append(encode_value(t, v))
    return b"".join(heads) + b"".join(tails)


def encode_value(t: AbiType, v: Any) -> bytes:
    if t.kind == "bytes":
        if not isinstance(v, (bytes, bytearray)):
            raise AbiError(f"bytes value expected, got {v!r}")
        return len(v).to_bytes(WORD, "big") + _pad_right(bytes(v))
    if t.kind == "string":
        if not isinstance(v, str):
            raise AbiError(f"string value expected, got {v!r}")
        raw = v.encode("utf-8")
        return len(raw).to_bytes(WORD, "big") + _pad_right(raw)
    if t.kind == "array":
        items = list(v)
        if t.length is not None and len(items) != t.length:
            raise AbiError(f"{t} needs {t.length} items, got {len(items)}")
        body = _encode_sequence([t.elem] * len(items), items)
        return body if t.length is not None else len(items).to_bytes(WORD, "big") + body
    if t.kind == "tuple":
        return _encode_sequence(list(t.components), list(v))
    return _encode_static(t, v)


def encode(types: Sequence[str | AbiType], values: Sequence[Any]) -> bytes:
    """ABI-encode ``values`` as the parameter tuple ``types``."""
    ts = [parse_type(t) if isinstance(t, str) else t for t in types]
    return _encode_sequence(ts, list(values))


# -- decoding ---------------------------------------------------------------


def _word(data: bytes, at: int) -> bytes:
    if at < 0 or at + WORD > len(data):
        raise AbiError(f"read past end of data at offset {at}")
    return data[at:at + WORD]


def _uint_at(data: bytes, at: int) -> int:
    return int.from_bytes(_word(data, at), "big")


def _decode_sequence(types: Sequence[AbiType], data: bytes, base: int) -> list:
    out = []
    pos = base
    for t in types:
        if t.is_dynamic:
            off = _uint_at(data, pos)
            out.append(decode_value(t, data, base + off))
            pos += WORD
        else:
            out.append(decode_value(t, data, pos))
            pos += t.head_size()
    return out


def decode_value(t: AbiType, data: bytes, at: int) -> Any:
    if t.kind in ("bytes", "string"):
        n = _uint_at(data, at)
        if at + WORD + n > len(data):
            raise AbiError("byte string runs past end of data")
        raw = data[at + WORD:at + WORD + n]
        return raw.decode("utf-8") if t.kind == "string" else raw
    if t.kind == "array":
        if t.length is None:
            n = _uint_at(data, at)
            if n > len(data):
                raise AbiError("array length exceeds data")
            return _decode_sequence([t.elem] * n, data, at + WORD)
        return _decode_sequence([t.elem] * t.length, data, at)
    if t.kind == "tuple":
        return tuple(_decode_sequence(list(t.components), data, at))
    w = _word(data, at)
    if t.kind == "uint":
        v = int.from_bytes(w, "big")
        if v >> t.size:
            raise AbiError(f"dirty high bits for {t}")
        return v
    if t.kind == "int":
        v = int.from_bytes(w, "big", signed=True)
        if not -(1 << (t.size - 1)) <= v < (1 << (t.size - 1)):
            raise AbiError(f"value out of range for {t}")
        return v
    if t.kind == "address":
        if any(w[:12]):
            raise AbiError("dirty high bytes in address")
        return "0x" + w[12:].hex()
    if t.kind == "bool":
        v = int.from_bytes(w, "big")
        if v > 1:
            raise AbiError("bool out of range")
        return v == 1
    if t.kind == "fixedbytes":
        if any(w[t.size:]):
            raise AbiError(f"dirty low bytes for {t}")
        return w[:t.size]
    raise AbiError(f"cannot decode {t}")


def decode(types: Sequence[str | AbiType], data: bytes) -> list:
    ts = [parse_type(t) if isinstance(t, str) else t for t in types]
    return _decode_sequence(ts, bytes(data), 0)
