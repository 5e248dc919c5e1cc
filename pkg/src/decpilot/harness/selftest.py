"""Fast oracle checks runnable from an installed package (no pytest needed)."""
from __future__ import annotations

import itertools
import math
from typing import Callable

import numpy as np

from .. import analysis, channel, decoder, estimator, fec, modem


def _code_algebra() -> bool:
    codes = [fec.make_extended_hamming(m) for m in (3, 4, 5)] + [fec.make_ebch(6), fec.make_ebch(7)]
    for c in codes:
        if ((c.generator.astype(int) @ c.parity_check.T.astype(int)) % 2).any():
            return False
    book = fec.codebook(fec.make_extended_hamming(3))
    return int(book[1:].sum(axis=1).min()) == 4


def _grand_vs_exhaustive() -> bool:
    code = fec.make_extended_hamming(3)
    book = fec.codebook(code)
    for bits in itertools.product((0, 1), repeat=code.n):
        y = np.array(bits, dtype=np.uint8)
        out = decoder.grand_hard(y, code)
        dist = (book ^ y).sum(axis=1)
        if (out.codeword ^ y).sum() != dist.min():
            return False
    return True


def _crc_reference() -> bool:
    rng = np.random.default_rng(0)
    for length in (12, 40, 665):
        u = rng.integers(0, 2, length, dtype=np.uint8)
        if not np.array_equal(fec.crc_bits(u, fec.CRC11), fec.crc_remainder_reference(u, fec.CRC11)):
            return False
    return True


def _hand_values() -> bool:
    y_eq, _ = estimator.mmse_equalize(np.array([4.0]), np.array([2.0]), 1.0)
    llr = modem.compute_llrs(np.array([0.5]), 1.0, modem.make_constellation(2)).bit_llrs[0]
    beta = channel.derive_beta(channel.FadingProcessParams(phi=0.5, decorrelation_interval=25_000))
    return (
        math.isclose(y_eq[0].real, 1.6, abs_tol=1e-9)
        and math.isclose(llr, 2.0, abs_tol=1e-9)
        and math.isclose(beta, 2 ** (-1 / 25_000), rel_tol=1e-12)
        and math.isclose(analysis.prob_correct(100, 0.5, 1.0, 0.0), 1 - 2.0**-50, rel_tol=1e-12)
    )


CHECKS: dict[str, Callable[[], bool]] = {
    "code algebra": _code_algebra,
    "hard GRAND = minimum distance on [8,4]": _grand_vs_exhaustive,
    "CRC matches bit-serial reference": _crc_reference,
    "equalizer / LLR / beta hand values": _hand_values,
}


def run(verbose: bool = True) -> bool:
    ok = True
    for name, fn in CHECKS.items():
        passed = bool(fn())
        ok &= passed
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
