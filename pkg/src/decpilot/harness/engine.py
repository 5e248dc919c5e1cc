"""Monte Carlo link simulation: one (policy, Eb/N0) point at a time.

Every point draws its channel, noise and data from substreams keyed on
``(seed, ebn0_db)`` only, so all policies at a point see the same
realizations. Data payloads are drawn on every block, training or not, to
keep the streams aligned.
"""
from __future__ import annotations

import hashlib
import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Sequence

import numpy as np

from .. import analysis
from ..channel import apply_channel, derive_beta, ebn0_to_noise_var, init_channel, step_channel
from ..decoder import decode
from ..estimator import ChannelEstimateRecord, estimation_error_stats, mmse_equalize
from ..fec import crc_append, encode
from ..modem import compute_llrs, modulate
from ..pilots import BlockContext, PilotPolicy, policy_update, schedule_is_training
from .config import LinkConfig
from .results import MetricRecord

log = logging.getLogger(__name__)

MIN_ERROR_EVENTS = 100
# floor on the equalized noise variance so LLRs stay finite as noise -> 0
_MIN_EFF_VAR = 1e-12


def point_streams(seed: int, ebn0_db: float) -> dict[str, np.random.Generator]:
    key = zlib.crc32(repr(float(ebn0_db)).encode())
    channel, noise, data = np.random.SeedSequence([seed, key]).spawn(3)
    return {
        "channel": np.random.default_rng(channel),
        "noise": np.random.default_rng(noise),
        "data": np.random.default_rng(data),
    }


def pilot_codeword(config: LinkConfig) -> np.ndarray:
    """The designated training block: a fixed random codeword per seed."""
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x9117]))
    payload = rng.integers(0, 2, config.info_bits, dtype=np.uint8)
    info = crc_append(payload, config.crc) if config.crc else payload
    return encode(info, config.code_spec)


def run_point(config: LinkConfig, policy: PilotPolicy, ebn0_db: float) -> MetricRecord:
    policy = config.with_policy(policy)
    code, const, crc = config.code_spec, config.constellation, config.crc
    t_i = config.training_interval
    k_info = config.info_bits
    ofdm = config.ofdm
    params = config.fading
    beta = derive_beta(params)
    noise_var = ebn0_to_noise_var(ebn0_db, code.rate, const.bits_per_symbol)
    dec_cfg = config.decoder
    streams = point_streams(config.seed, ebn0_db)
    pilot_cw = pilot_codeword(config)
    num_taps = 1 if ofdm else params.num_taps

    state = init_channel(params, streams["channel"], ofdm=ofdm)
    held: ChannelEstimateRecord | None = None
    digest = hashlib.sha256()
    truths, estimates = [], []
    blocks_run = data_blocks = bit_errors = block_errors = 0
    crc_accepts = updates = cw_errors = cw_bit_errors = abandoned = 0
    per_block: list[int] = []

    for b in range(config.blocks_per_point):
        if b:
            state = step_channel(state, beta, params, streams["channel"])
        digest.update(state.taps.tobytes())
        payload = streams["data"].integers(0, 2, k_info, dtype=np.uint8)
        training = schedule_is_training(b, t_i)
        if training:
            cw = pilot_cw
        else:
            cw = encode(crc_append(payload, crc) if crc else payload, code)
        x = modulate(cw, const)
        y, state = apply_channel(x, state, noise_var, streams["noise"])
        measured = b >= t_i
        if measured:
            blocks_run += 1
            truths.append(state.taps.copy())
            estimates.append(held.estimate)

        ctx = BlockContext(b, y, const, held, true_x=x, num_taps=num_taps, per_subcarrier=ofdm, true_codeword=cw)
        if not training:
            y_eq, eff = mmse_equalize(y, held.estimate, noise_var, per_subcarrier=ofdm)
            soft = compute_llrs(y_eq, np.maximum(eff, _MIN_EFF_VAR), const, max_log=dec_cfg.max_log)
            dec = decode(
                soft.bit_llrs,
                code,
                kind=dec_cfg.kind,
                list_size=dec_cfg.list_size,
                max_queries=dec_cfg.max_queries,
                iterations=dec_cfg.iterations,
                crc=crc,
            )
            ctx.y_eq, ctx.soft, ctx.decode = y_eq, soft, dec
            if measured:
                data_blocks += 1
                errs = int(np.count_nonzero(dec.info_bits[:k_info] != payload))
                per_block.append(errs)
                bit_errors += errs
                block_errors += errs > 0
                cw_diff = int(np.count_nonzero(dec.codeword != cw))
                cw_bit_errors += cw_diff
                cw_errors += cw_diff > 0
                crc_accepts += bool(dec.crc_pass)
                abandoned += dec.abandoned

        update = policy_update(policy, ctx)
        if update is not None:
            held = update
            if measured and not training:
                updates += 1

    ber = bit_errors / (data_blocks * k_info) if data_blocks else 0.0
    bler = block_errors / data_blocks if data_blocks else 0.0
    if bit_errors < MIN_ERROR_EVENTS:
        log.warning(
            "%s at %g dB: only %d bit errors; BER estimate is unreliable", policy.label, ebn0_db, bit_errors
        )
    return MetricRecord(
        policy=policy.label,
        ebn0_db=float(ebn0_db),
        ber=float(ber),
        bler=float(bler),
        effective_rate=analysis.effective_rate(bler, t_i, k_info, code.n),
        est_error_variance=estimation_error_stats(estimates, truths),
        blocks_run=blocks_run,
        bit_errors=bit_errors,
        block_errors=block_errors,
        crc_accept_rate=(crc_accepts / data_blocks if data_blocks else 0.0) if crc else float("nan"),
        data_blocks=data_blocks,
        info_bits_per_block=k_info,
        pilot_updates=updates,
        codeword_errors=cw_errors,
        codeword_bit_errors=cw_bit_errors,
        n=code.n,
        abandoned=abandoned,
        realization_checksum=digest.hexdigest(),
        block_bit_errors=per_block,
    )


def _run_job(args) -> MetricRecord:
    config, policy, ebn0 = args
    return run_point(config, policy, ebn0)


def run_sweep(config: LinkConfig, jobs: int = 1) -> list[MetricRecord]:
    """All policies at every Eb/N0 point, policy-major, in config order."""
    config.validate()
    tasks = [(config, p, e) for p in config.policies for e in config.ebn0_db]
    if jobs <= 1 or len(tasks) == 1:
        return [_run_job(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map() yields in submission order whatever the completion order
        return list(pool.map(_run_job, tasks))


def rate_sweep(
    config: LinkConfig, intervals: Sequence[int], ebn0_db: float | None = None, jobs: int = 1
) -> list[tuple[int, MetricRecord]]:
    """Effective rate versus training interval at one Eb/N0 point."""
    ebn0 = config.ebn0_db[0] if ebn0_db is None else float(ebn0_db)
    rows = []
    for t in intervals:
        sub = replace(config, training_interval=int(t), ebn0_db=(ebn0,))
        sub = replace(sub, policies=tuple(sub.with_policy(p) for p in sub.policies)).validate()
        rows.extend((int(t), r) for r in run_sweep(sub, jobs=jobs))
    return rows
