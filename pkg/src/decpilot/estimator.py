"""Least-squares channel estimation and MMSE equalization."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import toeplitz

from .errors import EstimationError, ShapeError

SOURCE_KINDS = ("designated", "decoder", "crc_gated", "demodulator", "free", "thresholded-partial", "weighted_iq", "min_delta")


@dataclass(frozen=True)
class ChannelEstimateRecord:
    estimate: np.ndarray
    source_block: int
    source_kind: str = "designated"


def convolution_matrix(x: np.ndarray, num_taps: int) -> np.ndarray:
    """``N x L`` matrix with ``X[n, l] = x[n - l]`` (zero before the block)."""
    first_row = np.zeros(num_taps, dtype=complex)
    first_row[0] = x[0]
    return toeplitz(x, first_row)


def estimate_ls(x_pilot, y, num_taps: int = 1, per_subcarrier: bool = False) -> np.ndarray:
    """LS channel estimate from a known (or assumed) transmitted block."""
    x = np.asarray(x_pilot, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.size != y.size:
        raise ShapeError(f"pilot has {x.size} symbols, received block {y.size}")
    if per_subcarrier:
        if np.any(x == 0):
            raise EstimationError("zero pilot on a subcarrier")
        return y / x
    if num_taps == 1:
        energy = np.vdot(x, x).real
        if energy <= 0:
            raise EstimationError("pilot block has no energy")
        return np.array([np.vdot(x, y) / energy])
    if x.size < 2 * num_taps:
        raise EstimationError(f"block of {x.size} symbols too short for {num_taps} taps")
    a = convolution_matrix(x, num_taps)
    gram = a.conj().T @ a
    if np.linalg.cond(gram) > 1e12:
        raise EstimationError("singular normal equations (degenerate pilot)")
    return np.linalg.solve(gram, a.conj().T @ y)


def mmse_equalize(y, estimate, noise_var: float, per_subcarrier: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """MMSE equalizer output and the effective per-symbol noise variance.

    Scalar form ``conj(F) y / (|F|^2 + s2)`` with variance ``s2 / (|F|^2 + s2)``
    for a single tap or per subcarrier; block linear MMSE with the banded
    convolution matrix otherwise.
    """
    y = np.asarray(y, dtype=complex).ravel()
    f = np.asarray(estimate, dtype=complex).ravel()
    if per_subcarrier or f.size == 1:
        if per_subcarrier and f.size != y.size:
            raise ShapeError(f"{f.size} subcarrier estimates for {y.size} samples")
        gain = np.abs(f) ** 2
        denom = gain + noise_var
        safe = np.where(denom > 0, denom, 1.0)
        y_eq = np.where(denom > 0, np.conj(f) * y / safe, 0.0)
        eff = np.where(denom > 0, noise_var / safe, 1.0)
        eff = np.broadcast_to(eff, y.shape).astype(float)
        return y_eq.astype(complex), eff.copy()
    n = y.size
    col = np.zeros(n, dtype=complex)
    col[: f.size] = f
    row = np.zeros(n, dtype=complex)
    row[0] = f[0]
    h = toeplitz(col, row)
    a = h.conj().T @ h + noise_var * np.eye(n)
    a_inv = np.linalg.inv(a)
    y_eq = a_inv @ (h.conj().T @ y)
    eff = noise_var * np.real(np.diag(a_inv))
    return y_eq, eff


def estimation_error_stats(estimates: Sequence, truth: Sequence) -> float:
    """Sample variance of ``F - F_hat`` over blocks, averaged across taps.

    Accepts arrays, :class:`ChannelEstimateRecord` or channel states.
    """
    if len(estimates) != len(truth):
        raise ShapeError(f"{len(estimates)} estimates for {len(truth)} channel states")
    if len(estimates) < 2:
        return 0.0
    est = np.array([np.asarray(getattr(e, "estimate", e), dtype=complex).ravel() for e in estimates])
    tru = np.array([np.asarray(getattr(t, "taps", t), dtype=complex).ravel() for t in truth])
    if est.shape != tru.shape:
        raise ShapeError("estimate and truth tap counts differ")
    err = tru - est
    return float(np.mean(np.var(err, axis=0, ddof=1)))
