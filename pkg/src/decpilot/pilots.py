"""Pilot policies: what, after each received block, refreshes the channel estimate.

A policy sees the block it just demodulated and decoded and may return a new
:class:`ChannelEstimateRecord`; the estimate is used from the next block on.
Nothing is re-equalized, so every policy stays single-pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decoder import DecodeOutcome
from .errors import ConfigError
from .estimator import ChannelEstimateRecord, estimate_ls
from .modem import Constellation, SoftSymbolInfo, hard_decision, modulate

POLICY_KINDS = ("designated_only", "demodulator", "decoder", "crc_gated", "threshold", "weighted_iq", "min_delta", "free")
LIST_POLICIES = ("weighted_iq", "min_delta")


@dataclass(frozen=True)
class PilotPolicy:
    kind: str
    training_interval: int = 100
    tau: float | None = None
    # Test-only: gate on true correctness instead of the CRC.
    genie_crc: bool = False

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"unknown pilot policy {self.kind!r}")
        if self.training_interval < 2:
            raise ConfigError("training interval must be at least 2 blocks")
        if self.kind == "threshold":
            if self.tau is None or not self.tau >= 0:
                raise ConfigError("threshold policy needs tau >= 0")

    @property
    def label(self) -> str:
        if self.kind == "threshold":
            return f"threshold(tau={self.tau:g})"
        return self.kind


@dataclass
class BlockContext:
    block_index: int
    y: np.ndarray
    constellation: Constellation
    previous: ChannelEstimateRecord | None
    # transmitted symbols: the known pilot on training blocks, genie data for `free`
    true_x: np.ndarray | None = None
    y_eq: np.ndarray | None = None
    decode: DecodeOutcome | None = None
    soft: SoftSymbolInfo | None = None
    num_taps: int = 1
    per_subcarrier: bool = False
    true_codeword: np.ndarray | None = None


def schedule_is_training(block_index: int, training_interval: int) -> bool:
    return block_index % training_interval == 0


def _estimate(ctx: BlockContext, x: np.ndarray) -> np.ndarray:
    return estimate_ls(x, ctx.y, ctx.num_taps, per_subcarrier=ctx.per_subcarrier)


def _record(ctx: BlockContext, est: np.ndarray, kind: str) -> ChannelEstimateRecord:
    return ChannelEstimateRecord(np.asarray(est, dtype=complex), ctx.block_index, kind)


def _need_decode(ctx: BlockContext, policy: PilotPolicy) -> DecodeOutcome:
    if ctx.decode is None:
        raise ConfigError(f"{policy.kind} policy needs a decoder outcome")
    return ctx.decode


def policy_update(policy: PilotPolicy, ctx: BlockContext) -> ChannelEstimateRecord | None:
    """Return the estimate to hold from the next block on, or ``None`` to keep the current one."""
    const = ctx.constellation
    if schedule_is_training(ctx.block_index, policy.training_interval):
        return _record(ctx, _estimate(ctx, ctx.true_x), "designated")

    kind = policy.kind
    if kind == "designated_only":
        return None
    if kind == "free":
        return _record(ctx, _estimate(ctx, ctx.true_x), "free")
    if kind == "demodulator":
        x_hat = modulate(hard_decision(ctx.y_eq, const), const)
        return _record(ctx, _estimate(ctx, x_hat), "demodulator")
    if kind == "threshold" and not ctx.per_subcarrier:
        raise ConfigError("reliability-thresholded pilots need per-subcarrier (OFDM) estimation")

    dec = _need_decode(ctx, policy)
    if kind == "decoder":
        return _record(ctx, _estimate(ctx, modulate(dec.codeword, const)), "decoder")
    if kind == "crc_gated":
        if policy.genie_crc:
            ok = ctx.true_codeword is not None and np.array_equal(dec.codeword, ctx.true_codeword)
        else:
            if dec.crc_pass is None:
                raise ConfigError("crc_gated policy needs a CRC")
            ok = dec.crc_pass
        if not ok:
            return None
        return _record(ctx, _estimate(ctx, modulate(dec.codeword, const)), "crc_gated")
    if kind == "threshold":
        if ctx.soft is None:
            raise ConfigError("threshold policy needs per-symbol reliabilities")
        mask = ctx.soft.symbol_reliability >= policy.tau
        if not mask.any():
            return None
        x_hat = modulate(dec.codeword, const)
        est = np.array(ctx.previous.estimate, dtype=complex, copy=True)
        est[mask] = ctx.y[mask] / x_hat[mask]
        return _record(ctx, est, "thresholded-partial")
    if not dec.candidates:
        raise ConfigError(f"{kind} policy needs a candidate list")
    if kind == "weighted_iq":
        probs = np.array([p for _, p in dec.candidates])
        streams = np.array([modulate(c, const) for c, _ in dec.candidates])
        pilot = (probs[:, None] * streams).sum(axis=0) / probs.sum()
        return _record(ctx, _estimate(ctx, pilot), "weighted_iq")
    if kind == "min_delta":
        prev = np.asarray(ctx.previous.estimate, dtype=complex)
        best, best_dist = None, math.inf
        for cw, _ in dec.candidates:
            est = _estimate(ctx, modulate(cw, const))
            dist = float(np.linalg.norm(est - prev))
            if dist < best_dist:
                best, best_dist = est, dist
        return _record(ctx, best, "min_delta")
    raise ConfigError(f"unhandled policy {kind!r}")
