# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Keccak-256 kernel. Same contract as ``seam._keccak_py.keccak256``."""

from libc.stdint cimport uint64_t, uint8_t
from libc.string cimport memset

cdef uint64_t[24] RC = [
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808AULL, 0x8000000080008000ULL,
    0x000000000000808BULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008AULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000AULL,
    0x000000008000808BULL, 0x800000000000008BULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800AULL, 0x800000008000000AULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
]

cdef int[25] ROT = [
    0, 1, 62, 28, 27,
    36, 44, 6, 55, 20,
    3, 10, 43, 25, 39,
    41, 45, 15, 21, 8,
    18, 2, 61, 56, 14,
]

DEF RATE = 136


cdef inline uint64_t rol(uint64_t v, int n) nogil:
    if n == 0:
        return v
    return (v << n) | (v >> (64 - n))


cdef void permute(uint64_t* a) nogil:
    cdef uint64_t c[5]
    cdef uint64_t d[5]
    cdef uint64_t b[25]
    cdef int rnd, x, y
    for rnd in range(24):
        for x in range(5):
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20]
        for x in range(5):
            d[x] = c[(x + 4) % 5] ^ rol(c[(x + 1) % 5], 1)
        for x in range(25):
            a[x] ^= d[x % 5]
        for x in range(5):
            for y in range(5):
                b[y + 5 * ((2 * x + 3 * y) % 5)] = rol(a[x + 5 * y], ROT[x + 5 * y])
        for y in range(0, 25, 5):
            for x in range(5):
                a[y + x] = b[y + x] ^ ((~b[y + (x + 1) % 5]) & b[y + (x + 2) % 5])
        a[0] ^= RC[rnd]


cdef inline uint64_t load64(const uint8_t* p) nogil:
    cdef uint64_t v = 0
    cdef int i
    for i in range(8):
        v |= (<uint64_t>p[i]) << (8 * i)
    return v


def keccak256(data):
    cdef const uint8_t[:] view = memoryview(bytes(data)).cast("B")
    cdef Py_ssize_t n = view.shape[0]
    cdef Py_ssize_t off = 0
    cdef uint64_t state[25]
    cdef uint8_t block[RATE]
    cdef Py_ssize_t i, rem
    memset(state, 0, sizeof(state))
    with nogil:
        while n - off >= RATE:
            for i in range(RATE // 8):
                state[i] ^= load64(&view[off + 8 * i])
            permute(state)
            off += RATE
        rem = n - off
        memset(block, 0, RATE)
        for i in range(rem):
            block[i] = view[off + i]
        block[rem] ^= 0x01
        block[RATE - 1] ^= 0x80
        for i in range(RATE // 8):
            state[i] ^= load64(&block[8 * i])
        permute(state)
    out = bytearray(32)
    for i in range(4):
        for rem in range(8):
            out[8 * i + rem] = (state[i] >> (8 * rem)) & 0xFF
    return bytes(out)
