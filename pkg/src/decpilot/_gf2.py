"""Small GF(2) and GF(2^m) linear-algebra helpers."""
from __future__ import annotations

import numpy as np

# Primitive polynomials, bit i = coefficient of x^i.
PRIMITIVE_POLYS = {
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
}


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2). Returns (matrix, pivot columns)."""
    m = (np.asarray(a, dtype=np.uint8) & 1).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        hit = np.nonzero(m[:, c])[0]
        hit = hit[hit != r]
        if hit.size:
            m[hit] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray) -> int:
    return len(rref(a)[1])


def inv(a: np.ndarray) -> np.ndarray:
    """Inverse of a square GF(2) matrix; raises ValueError if singular."""
    a = np.asarray(a, dtype=np.uint8) & 1
    k = a.shape[0]
    aug = np.concatenate([a, np.eye(k, dtype=np.uint8)], axis=1)
    red, piv = rref(aug)
    if piv[:k] != list(range(k)):
        raise ValueError("matrix is singular over GF(2)")
    return red[:, k:].copy()


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64) % 2).astype(np.uint8)


def row_basis(a: np.ndarray) -> np.ndarray:
    """Linearly independent rows spanning the same row space."""
    red, piv = rref(a)
    return red[: len(piv)].copy()


class GF2m:
    """Log/antilog arithmetic in GF(2^m)."""

    def __init__(self, m: int):
        if m not in PRIMITIVE_POLYS:
            raise ValueError(f"no primitive polynomial tabulated for m={m}")
        self.m = m
        self.q = 1 << m
        poly = PRIMITIVE_POLYS[m]
        self.exp = np.zeros(2 * self.q, dtype=np.int64)
        self.log = np.zeros(self.q, dtype=np.int64)
        v = 1
        for i in range(self.q - 1):
            self.exp[i] = v
            self.log[v] = i
            v <<= 1
            if v & self.q:
                v ^= poly
        self.exp[self.q - 1 : 2 * self.q] = self.exp[: self.q + 1]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def alpha_pow(self, i: int) -> int:
        return int(self.exp[i % (self.q - 1)])

    def minimal_poly(self, i: int) -> list[int]:
        """Binary coefficients (low degree first) of the minimal polynomial of alpha^i."""
        n = self.q - 1
        coset = []
        e = i % n
        while e not in coset:
            coset.append(e)
            e = (2 * e) % n
        poly = [1]  # coefficients in GF(2^m), low degree first
        for e in coset:
            root = self.alpha_pow(e)
            nxt = [0] * (len(poly) + 1)
            for d, c in enumerate(poly):
                nxt[d + 1] ^= c
                nxt[d] ^= self.mul(c, root)
            poly = nxt
        if any(c not in (0, 1) for c in poly):
            raise AssertionError("minimal polynomial not binary")
        return poly


def poly_mul_gf2(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] ^= y
    return out
