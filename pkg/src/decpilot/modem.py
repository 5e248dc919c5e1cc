"""Gray-mapped BPSK / 4-QAM / 16-QAM with exact or max-log LLR demapping."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .errors import ParameterDomainError, ShapeError
from .fec import as_bits


@dataclass(frozen=True, eq=False)
class Constellation:
    order: int
    points: np.ndarray  # complex, indexed by label value
    bit_labels: np.ndarray  # (order, bits_per_symbol), MSB first

    @property
    def bits_per_symbol(self) -> int:
        return self.bit_labels.shape[1]

    def label_sets(self, bit: int) -> tuple[np.ndarray, np.ndarray]:
        """Point indices whose label has 0 (resp. 1) at position ``bit``."""
        col = self.bit_labels[:, bit]
        return np.flatnonzero(col == 0), np.flatnonzero(col == 1)


@dataclass
class SoftSymbolInfo:
    llrs: np.ndarray  # (num_symbols, bits_per_symbol); positive favours bit 0
    symbol_reliability: np.ndarray  # min |LLR| per symbol

    @property
    def bit_llrs(self) -> np.ndarray:
        return self.llrs.ravel()


_PAM4 = {(0, 0): 3.0, (0, 1): 1.0, (1, 1): -1.0, (1, 0): -3.0}


@lru_cache(maxsize=None)
def make_constellation(order: int) -> Constellation:
    if order not in (2, 4, 16):
        raise ParameterDomainError(f"unsupported modulation order {order}")
    m = order.bit_length() - 1
    labels = ((np.arange(order)[:, None] >> np.arange(m - 1, -1, -1)) & 1).astype(np.uint8)
    if order == 2:
        points = 1.0 - 2.0 * labels[:, 0]
    elif order == 4:
        points = ((1.0 - 2.0 * labels[:, 0]) + 1j * (1.0 - 2.0 * labels[:, 1])) / np.sqrt(2.0)
    else:
        i = np.array([_PAM4[tuple(b)] for b in labels[:, :2]])
        q = np.array([_PAM4[tuple(b)] for b in labels[:, 2:]])
        points = (i + 1j * q) / np.sqrt(10.0)
    return Constellation(order, np.asarray(points, dtype=complex), labels)


def modulate(bits, constellation: Constellation) -> np.ndarray:
    b = as_bits(bits)
    m = constellation.bits_per_symbol
    if b.size % m:
        raise ShapeError(f"{b.size} bits do not fill {m}-bit symbols")
    idx = b.reshape(-1, m).astype(np.int64) @ (1 << np.arange(m - 1, -1, -1))
    return constellation.points[idx]


def compute_llrs(y_eq, effective_var, constellation: Constellation, max_log: bool = False) -> SoftSymbolInfo:
    """Per-bit LLRs ``ln sum_{x in X0} exp(-|y-x|^2/s2) - ln sum_{x in X1} exp(...)``."""
    y = np.atleast_1d(np.asarray(y_eq, dtype=complex))
    var = np.broadcast_to(np.asarray(effective_var, dtype=float), y.shape)
    if np.any(var <= 0) or not np.all(np.isfinite(var)):
        raise ParameterDomainError("effective variance must be positive and finite")
    metric = -np.abs(y[:, None] - constellation.points[None, :]) ** 2 / var[:, None]
    m = constellation.bits_per_symbol
    llrs = np.empty((y.size, m))
    for j in range(m):
        s0, s1 = constellation.label_sets(j)
        if max_log:
            llrs[:, j] = metric[:, s0].max(axis=1) - metric[:, s1].max(axis=1)
        else:
            llrs[:, j] = logsumexp(metric[:, s0], axis=1) - logsumexp(metric[:, s1], axis=1)
    return SoftSymbolInfo(llrs, np.abs(llrs).min(axis=1))


def hard_decision(y_eq, constellation: Constellation) -> np.ndarray:
    """Label bits of the nearest point; ties go to the lowest label index."""
    y = np.atleast_1d(np.asarray(y_eq, dtype=complex))
    d = np.abs(y[:, None] - constellation.points[None, :]) ** 2
    return constellation.bit_labels[np.argmin(d, axis=1)].ravel()
