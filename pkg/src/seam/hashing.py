"""Keccak-256 entry point.

The compiled kernel is used when it was built; otherwise, or when
``SEAM_PURE_PYTHON=1`` is set, the pure-Python implementation is used.
Both produce identical digests.
"""

import os

from . import _keccak_py

if os.environ.get("SEAM_PURE_PYTHON") == "1":
    _impl = _keccak_py.keccak256
    BACKEND = "python"
else:
    try:
        from ._keccak_ext import keccak256 as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _keccak_py.keccak256
        BACKEND = "python"


def keccak256(data: bytes) -> bytes:
    """Return the 32-byte Keccak-256 digest of ``data``."""
    return _impl(data)


def keccak256_hex(data: bytes) -> str:
    return "0x" + _impl(data).hex()
