"""CRC attachment and linear block codes (extended Hamming / eBCH, product codes).

Bit vectors are ``numpy.uint8`` arrays of 0/1. Systematic component codes put
the information bits first, followed by the parity bits; product codes are
laid out row-major in an ``n x n`` array whose top-left ``k x k`` block holds
the information bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Literal

import numpy as np

from . import _gf2
from .errors import ParameterDomainError, ShapeError


def as_bits(v) -> np.ndarray:
    return np.asarray(v, dtype=np.uint8).ravel() & 1


# --------------------------------------------------------------------------- CRC


@dataclass(frozen=True)
class CrcSpec:
    """Cyclic redundancy check in normal (MSB-first) form.

    ``poly`` holds the generator coefficients below the implicit leading
    ``x^width`` term, e.g. ``0x385`` for ``x^11+x^9+x^8+x^7+x^2+1``.
    """

    width: int
    poly: int
    init: int = 0
    xorout: int = 0

    def __post_init__(self):
        if self.width < 1:
            raise ParameterDomainError("CRC width must be positive")
        if not 0 <= self.poly < (1 << self.width):
            raise ParameterDomainError("CRC polynomial must fit below x^width")
        if not self.poly & 1:
            raise ParameterDomainError("CRC polynomial must have a nonzero constant term")

    @property
    def full_poly(self) -> int:
        return (1 << self.width) | self.poly

    @property
    def koopman(self) -> int:
        """The same polynomial in Koopman's notation (implicit +1, explicit top bit)."""
        return self.full_poly >> 1


# (x + 1)(x^10 + x^3 + 1): the primitive factor has period 1023 and x + 1 catches
# every odd-weight error, so Hamming distance 4 holds for up to 1012 data bits.
CRC11 = CrcSpec(width=11, poly=0x41B)
CRC24 = CrcSpec(width=24, poly=0x864CFB)


def crc_remainder_reference(bits, spec: CrcSpec) -> np.ndarray:
    """Bit-serial long division; slow, used as the oracle for :func:`crc_bits`."""
    reg = spec.init
    top = 1 << (spec.width - 1)
    mask = (1 << spec.width) - 1
    for b in as_bits(bits):
        fb = ((reg & top) != 0) ^ bool(b)
        reg = (reg << 1) & mask
        if fb:
            reg ^= spec.poly
    reg ^= spec.xorout
    return np.array([(reg >> (spec.width - 1 - i)) & 1 for i in range(spec.width)], dtype=np.uint8)


@lru_cache(maxsize=64)
def _crc_affine(spec: CrcSpec, length: int) -> tuple[np.ndarray, np.ndarray]:
    # The checksum is affine in the data: crc(u) = u @ P + crc(0).
    offset = crc_remainder_reference(np.zeros(length, np.uint8), spec)
    mask = (1 << spec.width) - 1
    residues = []
    r = spec.poly  # x^width mod g
    for _ in range(length):
        residues.append(r)
        r = ((r << 1) & mask) ^ (spec.poly if r >> (spec.width - 1) else 0)
    shifts = np.arange(spec.width - 1, -1, -1)
    # message bit i carries x^(length-1-i) * x^width
    p = ((np.array(residues[::-1], dtype=np.int64)[:, None] >> shifts) & 1).astype(np.uint8)
    return p, offset


def crc_bits(bits, spec: CrcSpec) -> np.ndarray:
    u = as_bits(bits)
    p, offset = _crc_affine(spec, u.size)
    return ((u.astype(np.int64) @ p) % 2).astype(np.uint8) ^ offset


def crc_append(bits, spec: CrcSpec) -> np.ndarray:
    u = as_bits(bits)
    return np.concatenate([u, crc_bits(u, spec)])


def crc_check(bits, spec: CrcSpec) -> bool:
    v = as_bits(bits)
    if v.size <= spec.width:
        raise ShapeError(f"CRC check needs more than {spec.width} bits, got {v.size}")
    return bool(np.array_equal(crc_bits(v[: -spec.width], spec), v[-spec.width :]))


# ------------------------------------------------------------------- block codes


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """A binary linear block code.

    For ``structure == "product"`` the matrices are derived lazily from the
    component code; encoding and decoding work on rows and columns instead.
    """

    n: int
    k: int
    systematic: bool
    info_positions: np.ndarray
    structure: Literal["single", "product"] = "single"
    component: "CodeSpec | None" = None
    name: str = ""
    _generator: np.ndarray | None = field(default=None, repr=False)
    _parity_check: np.ndarray | None = field(default=None, repr=False)
    # k x k GF(2) matrix mapping c[info_positions] back to u (identity if systematic)
    info_transform: np.ndarray | None = field(default=None, repr=False)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @cached_property
    def generator(self) -> np.ndarray:
        if self._generator is not None:
            return self._generator
        g1 = self.component.generator
        return np.kron(g1, g1).astype(np.uint8)

    @cached_property
    def parity_check(self) -> np.ndarray:
        if self._parity_check is not None:
            return self._parity_check
        h1 = self.component.parity_check
        eye = np.eye(self.component.n, dtype=np.uint8)
        stacked = np.concatenate([np.kron(eye, h1), np.kron(h1, eye)]).astype(np.uint8)
        return _gf2.row_basis(stacked)

    @cached_property
    def column_syndromes(self) -> np.ndarray:
        """Integer syndrome of each single-bit error (single codes with n-k <= 62)."""
        h = self.parity_check
        if h.shape[0] > 62:
            raise ParameterDomainError("syndromes wider than 62 bits are not packed")
        weights = 1 << np.arange(h.shape[0], dtype=np.int64)
        return (h.astype(np.int64) * weights[:, None]).sum(axis=0)

    def syndrome(self, word) -> np.ndarray:
        return ((self.parity_check.astype(np.int64) @ as_bits(word).astype(np.int64)) % 2).astype(np.uint8)

    def is_codeword(self, word) -> bool:
        w = as_bits(word)
        if self.structure == "product":
            c = self.component
            arr = w.reshape(c.n, c.n).astype(np.int64)
            h = c.parity_check.astype(np.int64)
            return not ((arr @ h.T) % 2).any() and not ((arr.T @ h.T) % 2).any()
        return not self.syndrome(w).any()


def _systematic_code(parity: np.ndarray, name: str) -> CodeSpec:
    """Build ``G = [I | P]`` and ``H = [P^T | I]`` from a k x (n-k) parity block."""
    k, r = parity.shape
    g = np.concatenate([np.eye(k, dtype=np.uint8), parity], axis=1)
    h = np.concatenate([parity.T, np.eye(r, dtype=np.uint8)], axis=1)
    return CodeSpec(
        n=k + r,
        k=k,
        systematic=True,
        info_positions=np.arange(k),
        name=name,
        _generator=g,
        _parity_check=h,
        info_transform=np.eye(k, dtype=np.uint8),
    )


def _extend_with_parity(parity: np.ndarray) -> np.ndarray:
    """Append an overall-parity column to the parity block of ``[I | P]``."""
    overall = (1 + parity.sum(axis=1)) % 2
    return np.concatenate([parity, overall[:, None].astype(np.uint8)], axis=1)


def make_extended_hamming(m: int) -> CodeSpec:
    """Systematic ``[2^m, 2^m - m - 1, 4]`` extended Hamming code."""
    if m < 3:
        raise ParameterDomainError("extended Hamming codes need m >= 3")
    n0 = (1 << m) - 1
    cols = [v for v in range(1, n0 + 1) if v & (v - 1)]  # non-unit syndromes
    parity = np.array([[(v >> (m - 1 - b)) & 1 for b in range(m)] for v in cols], dtype=np.uint8)
    code = _systematic_code(_extend_with_parity(parity), f"eHamming[{n0 + 1},{len(cols)}]")
    return code


def make_ebch(m: int, t: int = 2) -> CodeSpec:
    """Systematic extended narrow-sense primitive BCH code of length ``2^m``.

    ``t=1`` gives the extended Hamming parameters; ``t=2`` gives the
    distance-6 codes such as ``[64,51]`` and ``[128,113]``.
    """
    if m < 3 or t < 1:
        raise ParameterDomainError("eBCH needs m >= 3 and t >= 1")
    field_ = _gf2.GF2m(m)
    n0 = (1 << m) - 1
    gpoly = [1]
    seen: set[tuple[int, ...]] = set()
    for i in range(1, 2 * t, 2):
        mp = tuple(field_.minimal_poly(i))
        if mp not in seen:
            seen.add(mp)
            gpoly = _gf2.poly_mul_gf2(gpoly, list(mp))
    r = len(gpoly) - 1
    k = n0 - r
    if k <= 0:
        raise ParameterDomainError(f"no BCH code with m={m}, t={t}")
    # Systematic cyclic encoding: parity of x^(n-1-i) mod g for info bit i.
    parity = np.zeros((k, r), dtype=np.uint8)
    gint = sum(c << d for d, c in enumerate(gpoly))
    for i in range(k):
        rem = 1 << (n0 - 1 - i)
        for d in range(rem.bit_length() - 1, r - 1, -1):
            if (rem >> d) & 1:
                rem ^= gint << (d - r)
        # parity bits written highest degree first
        parity[i] = [(rem >> (r - 1 - j)) & 1 for j in range(r)]
    return _systematic_code(_extend_with_parity(parity), f"eBCH[{n0 + 1},{k}]")


def make_product(component: CodeSpec) -> CodeSpec:
    """Two-dimensional product code of a systematic single component."""
    if component.structure != "single":
        raise ParameterDomainError("product components must be single codes")
    if not component.systematic:
        raise ParameterDomainError("product components must be systematic")
    n, k = component.n, component.k
    pos = (np.arange(k)[:, None] * n + np.arange(k)[None, :]).ravel()
    return CodeSpec(
        n=n * n,
        k=k * k,
        systematic=True,
        info_positions=pos,
        structure="product",
        component=component,
        name=f"{component.name or 'code'}^2",
        info_transform=None,
    )


def encode(u, code: CodeSpec) -> np.ndarray:
    u = as_bits(u)
    if u.size != code.k:
        raise ShapeError(f"expected {code.k} information bits, got {u.size}")
    if code.structure == "product":
        c = code.component
        g = c.generator.astype(np.int64)
        rows = (u.reshape(c.k, c.k).astype(np.int64) @ g) % 2
        return ((g.T @ rows) % 2).astype(np.uint8).ravel()
    return ((u.astype(np.int64) @ code.generator.astype(np.int64)) % 2).astype(np.uint8)


def extract_info(codeword, code: CodeSpec) -> np.ndarray:
    """Recover the information bits from a (nominally valid) codeword."""
    c = as_bits(codeword)
    if c.size != code.n:
        raise ShapeError(f"expected {code.n} code bits, got {c.size}")
    head = c[code.info_positions]
    if code.systematic:
        return head.copy()
    return ((head.astype(np.int64) @ code.info_transform.astype(np.int64)) % 2).astype(np.uint8)


def random_invertible(k: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        a = rng.integers(0, 2, size=(k, k), dtype=np.uint8)
        if _gf2.rank(a) == k:
            return a


def make_nonsystematic(code: CodeSpec, rng: np.random.Generator, transform: np.ndarray | None = None) -> CodeSpec:
    """Same codebook, scrambled message-to-codeword map ``u -> u A G``."""
    if not code.systematic or code.structure != "single":
        raise ParameterDomainError("make_nonsystematic needs a systematic single code")
    a = random_invertible(code.k, rng) if transform is None else (np.asarray(transform, np.uint8) & 1)
    # c[info] = u A for a systematic G, so u = c[info] A^-1
    a_inv = _gf2.inv(a)
    return CodeSpec(
        n=code.n,
        k=code.k,
        systematic=False,
        info_positions=code.info_positions,
        name=f"{code.name}-nonsys",
        _generator=_gf2.matmul(a, code.generator),
        _parity_check=code.parity_check,
        info_transform=a_inv,
    )


def codebook(code: CodeSpec) -> np.ndarray:
    """All 2^k codewords in message order (small codes only)."""
    if code.k > 16:
        raise ParameterDomainError("codebook enumeration limited to k <= 16")
    msgs = ((np.arange(1 << code.k)[:, None] >> np.arange(code.k - 1, -1, -1)) & 1).astype(np.int64)
    return ((msgs @ code.generator.astype(np.int64)) % 2).astype(np.uint8)
