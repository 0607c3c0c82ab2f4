"""Independent textbook implementations used as cross-check oracles in tests.

Everything here is deliberately naive (affine coordinates, direct formulas)
and shares no code with the implementations under test.
"""

from medsim.crypto.secp256k1 import GX, GY, N, P

G = (GX, GY)


def affine_add(p, q):
    if p is None:
        return q
    if q is None:
        return p
    (x1, y1), (x2, y2) = p, q
    if x1 == x2 and (y1 + y2) % P == 0:
        return None
    if p == q:
        lam = (3 * x1 * x1) * pow(2 * y1, P - 2, P) % P
    else:
        lam = (y2 - y1) * pow(x2 - x1, P - 2, P) % P
    x3 = (lam * lam - x1 - x2) % P
    return x3, (lam * (x1 - x3) - y1) % P


def affine_mult(k, point):
    result = None
    addend = point
    while k:
        if k & 1:
            result = affine_add(result, addend)
        addend = affine_add(addend, addend)
        k >>= 1
    return result


def recover(digest: bytes, r: int, s: int, recovery_id: int):
    """Textbook ECDSA public-key recovery."""
    x = r + N * (recovery_id >> 1)
    alpha = (pow(x, 3, P) + 7) % P
    y = pow(alpha, (P + 1) // 4, P)
    if (y & 1) != (recovery_id & 1):
        y = P - y
    z = int.from_bytes(digest, "big") % N
    r_inv = pow(r, N - 2, N)
    sr = affine_mult(s * r_inv % N, (x, y))
    zg = affine_mult((-z * r_inv) % N, G)
    return affine_add(sr, zg)
