"""Keccak-256 (the pre-NIST padding variant used for EVM addresses).

Pure-Python sponge over Keccak-f[1600]. The permutation and sponge are the
same as SHA3-256 except for the domain padding byte (0x01 here, 0x06 for
SHA3), which lets the test suite validate this code against hashlib's
sha3_256 as an independent oracle.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1

_ROUND_CONSTANTS = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

# rotation offsets indexed [x][y] on the 5x5 lane grid
_ROTATIONS = (
    (0, 36, 3, 41, 18),
    (1, 44, 10, 45, 2),
    (62, 6, 43, 15, 61),
    (28, 55, 25, 21, 56),
    (27, 20, 39, 8, 14),
)

_RATE = 136  # bytes, for 256-bit output


def _rotl(value: int, shift: int) -> int:
    return ((value << shift) | (value >> (64 - shift))) & _MASK


def _keccak_f(lanes: list[int]) -> None:
    # lanes laid out as index x + 5*y
    for rc in _ROUND_CONSTANTS:
        # theta
        c = [lanes[x] ^ lanes[x + 5] ^ lanes[x + 10] ^ lanes[x + 15] ^ lanes[x + 20] for x in range(5)]
        for x in range(5):
            d = c[(x - 1) % 5] ^ _rotl(c[(x + 1) % 5], 1)
            for y in range(0, 25, 5):
                lanes[x + y] ^= d
        # rho + pi
        b = [0] * 25
        for x in range(5):
            for y in range(5):
                b[y + 5 * ((2 * x + 3 * y) % 5)] = _rotl(lanes[x + 5 * y], _ROTATIONS[x][y])
        # chi
        for y in range(0, 25, 5):
            row = b[y:y + 5]
            for x in range(5):
                lanes[x + y] = row[x] ^ ((~row[(x + 1) % 5]) & row[(x + 2) % 5] & _MASK)
        # iota
        lanes[0] ^= rc


def _sponge_256(data: bytes, domain_pad: int) -> bytes:
    padded = bytearray(data)
    pad_len = _RATE - (len(padded) % _RATE)
    padded += bytes(pad_len)
    padded[len(data)] ^= domain_pad
    padded[-1] ^= 0x80

    lanes = [0] * 25
    for block_start in range(0, len(padded), _RATE):
        block = padded[block_start:block_start + _RATE]
        for i in range(_RATE // 8):
            lanes[i] ^= int.from_bytes(block[8 * i:8 * i + 8], "little")
        _keccak_f(lanes)

    out = bytearray()
    for i in range(4):  # 32 bytes fit inside the first rate block
        out += lanes[i].to_bytes(8, "little")
    return bytes(out)


def keccak256(data: bytes) -> bytes:
    return _sponge_256(data, 0x01)


def sha3_256(data: bytes) -> bytes:
    """NIST-padded variant; exists only so tests can diff against hashlib."""
    return _sponge_256(data, 0x06)
