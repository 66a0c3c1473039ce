import importlib
import os
import random

import pytest
from Crypto.Hash import keccak as oracle

from seam import _keccak_py, hashing

try:
    from seam import _keccak_ext
except ImportError:  # extension not built in this environment
    _keccak_ext = None

BACKENDS = [pytest.param(_keccak_py.keccak256, id="python")]
if _keccak_ext is not None:
    BACKENDS.append(pytest.param(_keccak_ext.keccak256, id="cython"))


def reference(data: bytes) -> bytes:
    h = oracle.new(digest_bits=256)
    h.update(data)
    return h.digest()


@pytest.mark.parametrize("impl", BACKENDS)
def test_empty_input_digest(impl):
    assert impl(b"").hex() == "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("length", [1, 31, 32, 33, 135, 136, 137, 271, 272, 273, 1000, 4096])
def test_rate_boundaries_match_oracle(impl, length):
    data = bytes((i * 7 + length) & 0xFF for i in range(length))
    assert impl(data) == reference(data)


@pytest.mark.parametrize("impl", BACKENDS)
def test_random_inputs_match_oracle(impl):
    rng = random.Random(2535)
    for _ in range(300):
        data = rng.randbytes(rng.randint(0, 700))
        assert impl(data) == reference(data)


@pytest.mark.parametrize("impl", BACKENDS)
def test_accepts_bytearray_and_memoryview(impl):
    data = b"seam.storage.v1.Diamond"
    assert impl(bytearray(data)) == impl(memoryview(data)) == reference(data)


@pytest.mark.skipif(_keccak_ext is None, reason="compiled kernel not built")
def test_backends_agree():
    rng = random.Random(7)
    for _ in range(200):
        data = rng.randbytes(rng.randint(0, 500))
        assert _keccak_ext.keccak256(data) == _keccak_py.keccak256(data)


def test_default_backend_prefers_compiled_kernel():
    expected = "cython" if _keccak_ext is not None else "python"
    assert hashing.BACKEND == expected
    assert hashing.keccak256_hex(b"") == "0x" + reference(b"").hex()


def test_pure_python_switch(monkeypatch):
    monkeypatch.setenv("SEAM_PURE_PYTHON", "1")
    try:
        forced = importlib.reload(hashing)
        assert forced.BACKEND == "python"
        assert forced.keccak256(b"abc") == reference(b"abc")
    finally:
        monkeypatch.delenv("SEAM_PURE_PYTHON")
        importlib.reload(hashing)
    assert os.environ.get("SEAM_PURE_PYTHON") is None


@pytest.mark.parametrize("impl", BACKENDS)
def test_rejects_text(impl):
    with pytest.raises(TypeError):
        impl("not bytes")
