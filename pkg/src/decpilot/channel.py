"""Block-fading auto-regressive Rayleigh channels with AWGN.

Every tap follows ``g <- beta * g + z`` with ``z ~ CN(0, (1 - beta^2) * var)``,
so the stationary tap variance ``sigma_f_sq * profile^2`` is preserved. The
channel is stepped once per block (one codeword, or one OFDM symbol) and held
constant over it. ``decorrelation_interval`` is counted in channel steps.

``taps`` may carry leading batch dimensions; the last axis indexes taps
(or subcarriers). This lets many independent chains run at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterDomainError, ShapeError


@dataclass(frozen=True)
class FadingProcessParams:
    sigma_f_sq: float = 1.0
    phi: float = 0.5
    decorrelation_interval: float = 1.0
    delay_profile: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "delay_profile", tuple(float(v) for v in self.delay_profile))
        if not 0.0 < self.phi < 1.0:
            raise ParameterDomainError(f"phi must lie in (0, 1), got {self.phi}")
        if not self.decorrelation_interval > 0:
            raise ParameterDomainError("decorrelation_interval must be positive")
        if not self.sigma_f_sq > 0:
            raise ParameterDomainError("sigma_f_sq must be positive")
        prof = self.delay_profile
        if not prof or prof[0] != 1.0 or any(v < 0 for v in prof):
            raise ParameterDomainError("delay profile must start at 1 with non-negative entries")

    @property
    def num_taps(self) -> int:
        return len(self.delay_profile)

    @classmethod
    def per_subcarrier(cls, num_subcarriers: int, **kw) -> "FadingProcessParams":
        """Independent unit-weight taps, one per OFDM subcarrier."""
        return cls(delay_profile=(1.0,) * num_subcarriers, **kw)

    def tap_variances(self) -> np.ndarray:
        return self.sigma_f_sq * np.square(self.delay_profile)


@dataclass(frozen=True)
class ChannelState:
    taps: np.ndarray
    block_index: int = 0
    ofdm: bool = False
    # convolution overhang of the previous block (multi-tap only)
    tail: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex), repr=False)


def complex_normal(rng: np.random.Generator, shape, var) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with total variance ``var``."""
    scale = np.sqrt(np.asarray(var, dtype=float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def derive_beta(params: FadingProcessParams) -> float:
    return params.phi ** (1.0 / params.decorrelation_interval)


def init_channel(params: FadingProcessParams, rng: np.random.Generator, ofdm: bool = False, batch: tuple[int, ...] = ()) -> ChannelState:
    shape = tuple(batch) + (params.num_taps,)
    taps = complex_normal(rng, shape, params.tap_variances())
    tail = np.zeros(0 if ofdm else params.num_taps - 1, dtype=complex)
    return ChannelState(taps=taps, block_index=0, ofdm=ofdm, tail=tail)


def step_channel(state: ChannelState, beta: float, params: FadingProcessParams, rng: np.random.Generator) -> ChannelState:
    if not 0.0 <= beta <= 1.0:
        raise ParameterDomainError(f"beta must lie in [0, 1], got {beta}")
    innov_var = (1.0 - beta * beta) * params.tap_variances()
    taps = beta * state.taps + complex_normal(rng, state.taps.shape, innov_var)
    return replace(state, taps=taps, block_index=state.block_index + 1)


def apply_channel(x, state: ChannelState, noise_var: float, rng: np.random.Generator) -> tuple[np.ndarray, ChannelState]:
    """Pass one block through the held channel and add noise.

    Returns the received block and the state carrying the ISI overhang into
    the next block.
    """
    if noise_var < 0:
        raise ParameterDomainError("noise_var must be non-negative")
    x = np.asarray(x, dtype=complex).ravel()
    taps = state.taps
    if taps.ndim != 1:
        raise ShapeError("apply_channel works on a single chain")
    if state.ofdm:
        if taps.size != x.size:
            raise ShapeError(f"{x.size} symbols for {taps.size} subcarriers")
        y = taps * x
    elif taps.size == 1:
        y = taps[0] * x
    else:
        if x.size < taps.size:
            raise ShapeError("block shorter than the channel memory")
        full = np.convolve(x, taps)
        full[: state.tail.size] += state.tail
        y = full[: x.size]
        state = replace(state, tail=full[x.size :].copy())
    if noise_var > 0:
        y = y + complex_normal(rng, x.size, noise_var)
    return y, state


def ebn0_to_noise_var(ebn0_db: float, code_rate: float, bits_per_symbol: int) -> float:
    """Complex noise variance for unit-energy symbols at a given Eb/N0."""
    return 1.0 / (code_rate * bits_per_symbol * 10.0 ** (ebn0_db / 10.0))


def noise_var_to_ebn0(noise_var: float, code_rate: float, bits_per_symbol: int) -> float:
    return -10.0 * math.log10(noise_var * code_rate * bits_per_symbol)
