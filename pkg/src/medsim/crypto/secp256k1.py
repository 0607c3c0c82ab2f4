"""secp256k1 ECDSA with deterministic nonces and public-key recovery.

No package on the mirror provides recoverable secp256k1 signatures, so the
curve arithmetic lives here: Jacobian coordinates, a fixed 4-bit window for
the generator, RFC 6979 nonce derivation (signatures must be deterministic
for replayable scenarios) and low-s normalisation.
"""

from __future__ import annotations

import hashlib
import hmac

P = 2**256 - 2**32 - 977
N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8

# Jacobian point: (X, Y, Z) with x = X/Z^2, y = Y/Z^3; Z == 0 marks infinity.
_INF = (0, 1, 0)


def _jacobian_double(p):
    x, y, z = p
    if not y or not z:
        return _INF
    ysq = (y * y) % P
    s = (4 * x * ysq) % P
    m = (3 * x * x) % P  # a == 0 for this curve
    nx = (m * m - 2 * s) % P
    ny = (m * (s - nx) - 8 * ysq * ysq) % P
    nz = (2 * y * z) % P
    return nx, ny, nz


def _jacobian_add(p, q):
    if not p[2]:
        return q
    if not q[2]:
        return p
    x1, y1, z1 = p
    x2, y2, z2 = q
    z1sq = (z1 * z1) % P
    z2sq = (z2 * z2) % P
    u1 = (x1 * z2sq) % P
    u2 = (x2 * z1sq) % P
    s1 = (y1 * z2sq * z2) % P
    s2 = (y2 * z1sq * z1) % P
    if u1 == u2:
        if s1 != s2:
            return _INF
        return _jacobian_double(p)
    h = (u2 - u1) % P
    r = (s2 - s1) % P
    hsq = (h * h) % P
    hcu = (hsq * h) % P
    v = (u1 * hsq) % P
    nx = (r * r - hcu - 2 * v) % P
    ny = (r * (v - nx) - s1 * hcu) % P
    nz = (h * z1 * z2) % P
    return nx, ny, nz


def _to_affine(p):
    x, y, z = p
    if not z:
        raise ValueError("point at infinity has no affine form")
    zinv = pow(z, P - 2, P)
    zinv2 = (zinv * zinv) % P
    return (x * zinv2) % P, (y * zinv2 * zinv) % P


def _from_affine(point):
    return point[0], point[1], 1


def _scalar_mult_jac(k: int, point) -> tuple:
    k %= N
    if k == 0 or not point[2]:
        return _INF
    # 4-bit fixed window
    window = [_INF, point]
    for _ in range(14):
        window.append(_jacobian_add(window[-1], point))
    acc = _INF
    for shift in range(252, -4, -4):
        if acc[2]:
            acc = _jacobian_double(acc)
            acc = _jacobian_double(acc)
            acc = _jacobian_double(acc)
            acc = _jacobian_double(acc)
        digit = (k >> shift) & 0xF
        if digit:
            acc = _jacobian_add(acc, window[digit])
    return acc


_G_JAC = _from_affine((GX, GY))


def is_on_curve(point: tuple[int, int]) -> bool:
    x, y = point
    if not (0 <= x < P and 0 <= y < P):
        return False
    return (y * y - x * x * x - 7) % P == 0


def scalar_mult(k: int, point: tuple[int, int] | None = None) -> tuple[int, int]:
    """k * point in affine coordinates; point defaults to the generator."""
    jac = _G_JAC if point is None else _from_affine(point)
    return _to_affine(_scalar_mult_jac(k, jac))


def public_key(secret: int) -> tuple[int, int]:
    if not 1 <= secret < N:
        raise ValueError("secret scalar out of range")
    return scalar_mult(secret)


def _int_from_digest(digest: bytes) -> int:
    return int.from_bytes(digest, "big")  # 256-bit hash, no truncation needed


def _rfc6979_nonces(secret: int, digest: bytes):
    """Deterministic k candidates per RFC 6979 with HMAC-SHA256."""
    x = secret.to_bytes(32, "big")
    h1 = _int_from_digest(digest) % N
    bits2octets = h1.to_bytes(32, "big")
    v = b"\x01" * 32
    k = b"\x00" * 32
    k = hmac.new(k, v + b"\x00" + x + bits2octets, hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    k = hmac.new(k, v + b"\x01" + x + bits2octets, hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    while True:
        v = hmac.new(k, v, hashlib.sha256).digest()
        candidate = _int_from_digest(v)
        if 1 <= candidate < N:
            yield candidate
        k = hmac.new(k, v + b"\x00", hashlib.sha256).digest()
        v = hmac.new(k, v, hashlib.sha256).digest()


def sign_digest(secret: int, digest: bytes) -> tuple[int, int, int]:
    """Sign a 32-byte digest; returns (r, s, recovery_id) with low-s."""
    if len(digest) != 32:
        raise ValueError("digest must be 32 bytes")
    if not 1 <= secret < N:
        raise ValueError("secret scalar out of range")
    z = _int_from_digest(digest) % N
    for k in _rfc6979_nonces(secret, digest):
        rx, ry = scalar_mult(k)
        r = rx % N
        if r == 0:
            continue  # next RFC 6979 candidate; effectively unreachable
        s = (pow(k, N - 2, N) * (z + r * secret)) % N
        if s == 0:
            continue
        recovery_id = (2 if rx >= N else 0) | (ry & 1)
        if s > N // 2:
            s = N - s
            recovery_id ^= 1
        return r, s, recovery_id
    raise AssertionError("unreachable")


def verify_digest(pub: tuple[int, int], digest: bytes, r: int, s: int) -> bool:
    if not (1 <= r < N and 1 <= s < N):
        return False
    if not is_on_curve(pub):
        return False
    z = _int_from_digest(digest) % N
    w = pow(s, N - 2, N)
    u1 = (z * w) % N
    u2 = (r * w) % N
    point = _jacobian_add(_scalar_mult_jac(u1, _G_JAC), _scalar_mult_jac(u2, _from_affine(pub)))
    if not point[2]:
        return False
    x, _ = _to_affine(point)
    return x % N == r


def recover_public_key(digest: bytes, r: int, s: int, recovery_id: int) -> tuple[int, int]:
    """Recover the signing public key; raises ValueError if unrecoverable."""
    if not (1 <= r < N and 1 <= s < N):
        raise ValueError("signature scalars out of range")
    if recovery_id not in (0, 1, 2, 3):
        raise ValueError("recovery id out of range")
    x = r + N * (recovery_id >> 1)
    if x >= P:
        raise ValueError("recovery x coordinate exceeds field")
    alpha = (pow(x, 3, P) + 7) % P
    y = pow(alpha, (P + 1) // 4, P)  # P % 4 == 3
    if (y * y) % P != alpha:
        raise ValueError("point not on curve")
    if (y & 1) != (recovery_id & 1):
        y = P - y
    z = _int_from_digest(digest) % N
    r_inv = pow(r, N - 2, N)
    big_r = _from_affine((x, y))
    # Q = r^-1 (s*R - z*G)
    point = _jacobian_add(
        _scalar_mult_jac((s * r_inv) % N, big_r),
        _scalar_mult_jac((-z * r_inv) % N, _G_JAC),
    )
    if not point[2]:
        raise ValueError("recovered point at infinity")
    pub = _to_affine(point)
    if not is_on_curve(pub):
        raise ValueError("recovered point not on curve")
    return pub
