"""Closed-form rate, entropy and covariance bounds for stale channel estimates.

Differential entropies are in nats internally; rates and capacities are
reported in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError

LN2 = math.log(2.0)


@dataclass(frozen=True)
class BoundInputs:
    source_entropy_hx: float = 1.0  # bits per symbol
    sigma_x_sq: float = 1.0
    sigma_n_sq: float = 1.0
    sigma_f_sq: float = 1.0
    sigma_e_sq: float = 0.0
    fbar_gain: float = 1.0
    seq_len: int = 1

    def __post_init__(self):
        for name in ("sigma_x_sq", "sigma_n_sq", "sigma_f_sq", "sigma_e_sq", "fbar_gain"):
            if getattr(self, name) < 0:
                raise ParameterDomainError(f"{name} must be non-negative")
        if self.source_entropy_hx <= 0:
            raise ParameterDomainError("source entropy must be positive")
        if self.seq_len < 1:
            raise ParameterDomainError("seq_len must be >= 1")


def error_state_variance(state: int, sigma_e_sq: float, sigma_f_sq: float, cov_f_fbar: float = 0.0) -> float:
    """Channel-estimation error variance in the fresh (1), ageing (2) or stale (3) regime."""
    if state == 1:
        return sigma_e_sq
    if state == 2:
        if not 0.0 <= cov_f_fbar <= sigma_f_sq:
            raise ParameterDomainError("covariance must lie in [0, sigma_f_sq]")
        return 2.0 * sigma_f_sq - 2.0 * cov_f_fbar
    if state == 3:
        return 2.0 * sigma_f_sq
    raise ParameterDomainError(f"state must be 1, 2 or 3, got {state}")


def gauss_markov_cov(beta: float, sigma_f_sq: float, lag: int) -> float:
    if lag < 0:
        raise ParameterDomainError("lag must be non-negative")
    return beta**lag * sigma_f_sq


def hxy_upper_bound(inputs: BoundInputs, sigma_ftilde_sq: float) -> float:
    """Upper bound on h(X|Y) in nats for diagonal covariances."""
    if sigma_ftilde_sq < 0:
        raise ParameterDomainError("error variance must be non-negative")
    if inputs.sigma_x_sq <= 0:
        raise ParameterDomainError("source variance must be positive")
    k = inputs.seq_len
    noise = sigma_ftilde_sq * inputs.sigma_x_sq + inputs.sigma_n_sq
    if noise == 0:
        if inputs.fbar_gain > 0:
            return -math.inf
        arg = 1.0 / inputs.sigma_x_sq
    else:
        arg = 1.0 / inputs.sigma_x_sq + inputs.fbar_gain / noise
    if arg <= 0:
        raise ParameterDomainError("determinant argument must be positive")
    return k * math.log(2 * math.pi * math.e) - 0.5 * k * math.log(arg)


def capacity_bound(inputs: BoundInputs, state: int, cov_f_fbar: float = 0.0) -> float:
    """Rate bound ``H(X) - H(X|Y)`` in bits per symbol, floored at zero."""
    sft = error_state_variance(state, inputs.sigma_e_sq, inputs.sigma_f_sq, cov_f_fbar)
    hxy_bits = max(0.0, hxy_upper_bound(inputs, sft)) / LN2 / inputs.seq_len
    return max(0.0, inputs.source_entropy_hx - hxy_bits)


def capacity_curves(snr_db, sigma_f_sq: float = 1.0, sigma_x_sq: float = 1.0, pilot_symbols: int = 512, hx: float = 1.0):
    """States 1 and 3 over an SNR grid; State 1 uses the LS error ``s2_N / sum|x|^2``."""
    rows = []
    for snr in np.atleast_1d(snr_db):
        sn = sigma_x_sq / 10.0 ** (snr / 10.0)
        inputs = BoundInputs(
            source_entropy_hx=hx,
            sigma_x_sq=sigma_x_sq,
            sigma_n_sq=sn,
            sigma_f_sq=sigma_f_sq,
            sigma_e_sq=sn / (pilot_symbols * sigma_x_sq),
            fbar_gain=sigma_f_sq,
        )
        rows.append((float(snr), capacity_bound(inputs, 1), capacity_bound(inputs, 3)))
    return rows


def prob_correct(n: int, r_code: float, hx: float, hxy: float) -> float:
    """``(1 - 2^{n(R - H(X))})^{2^{n H(X|Y)}}`` evaluated in the log domain."""
    if r_code <= 0 or hx <= 0 or hxy < 0:
        raise ParameterDomainError("need r_code > 0, hx > 0, hxy >= 0")
    if r_code >= hx:
        return 0.0
    a = n * (r_code - hx)
    # log2(-ln(1 - 2^a)), which tends to a once 2^a underflows
    log2_neg_ln = math.log2(-math.log1p(-(2.0**a))) if a > -1000 else a
    e = n * hxy + log2_neg_ln
    if e > 1000:
        return 0.0
    return min(1.0, max(0.0, math.exp(-(2.0**e))))


def effective_rate(bler: float, t_i_blocks: int, k: int, n: int) -> float:
    """Correct information bits per transmitted coded bit."""
    if not 0.0 <= bler <= 1.0:
        raise ParameterDomainError("bler must lie in [0, 1]")
    if t_i_blocks < 2:
        raise ParameterDomainError("training interval must be >= 2")
    return (1.0 - bler) * ((t_i_blocks - 1) / t_i_blocks) * (k / n)


def rate_bound_check(r_code: float, t_i_blocks: int, mod_order: int, hx: float, hxy: float) -> bool:
    lhs = r_code * (1.0 - 1.0 / t_i_blocks) * math.log2(mod_order)
    return lhs < hx - hxy


def bit_error_bounds(p_c: float, n: int) -> tuple[float, float]:
    if not 0.0 <= p_c <= 1.0 or n < 1:
        raise ParameterDomainError("need p_c in [0, 1] and n >= 1")
    return (1.0 - p_c) / n, 1.0 - p_c


def covariance_with_pilots(beta: float, sigma_f_sq: float, i: int, i_m: int, t_i: int, p_c: float, gated: bool) -> float:
    """Covariance between the channel and its held estimate under periodic refreshes.

    With gating, successful decodes refresh on average every ``ceil(1/p_c)``
    blocks, capped by the designated interval.
    """
    if i < i_m or i_m < 0:
        raise ParameterDomainError("need i >= i_m >= 0")
    if t_i < 2:
        raise ParameterDomainError("training interval must be >= 2")
    period = t_i
    if gated and p_c > 0:
        period = min(t_i, math.ceil(1.0 / p_c))
    return gauss_markov_cov(beta, sigma_f_sq, (i - i_m) % period)
