import numpy as np
import pytest

from decpilot.channel import ChannelState, apply_channel
from decpilot.errors import EstimationError, ShapeError
from decpilot.estimator import (
    ChannelEstimateRecord,
    convolution_matrix,
    estimate_ls,
    estimation_error_stats,
    mmse_equalize,
)
from decpilot.modem import make_constellation, modulate


def qpsk(n, seed=0):
    rng = np.random.default_rng(seed)
    return modulate(rng.integers(0, 2, 2 * n), make_constellation(4))


class TestLeastSquares:
    def test_single_tap_noiseless(self):
        x = qpsk(64)
        f = 0.3 - 1.1j
        assert estimate_ls(x, f * x)[0] == pytest.approx(f)

    def test_multi_tap_noiseless(self):
        x = qpsk(128, 1)
        taps = np.array([1.0, 0.5j, -0.25])
        y = np.convolve(x, taps)[: x.size]
        assert np.allclose(estimate_ls(x, y, num_taps=3), taps)

    def test_per_subcarrier(self):
        x = qpsk(16, 2)
        f = np.exp(1j * np.arange(16))
        assert np.allclose(estimate_ls(x, f * x, per_subcarrier=True), f)

    def test_error_variance_matches_theory(self):
        # var(F - F_hat) = s2 / sum |x|^2
        rng = np.random.default_rng(3)
        x = qpsk(32, 3)
        s2 = 0.5
        est = [
            estimate_ls(x, apply_channel(x, ChannelState(np.array([1.0 + 0j])), s2, rng)[0])[0] for _ in range(20_000)
        ]
        assert np.var(est) == pytest.approx(s2 / 32, rel=0.05)

    def test_zero_energy(self):
        with pytest.raises(EstimationError):
            estimate_ls(np.zeros(8), np.ones(8))

    def test_zero_subcarrier_pilot(self):
        x = np.ones(4, complex)
        x[2] = 0
        with pytest.raises(EstimationError):
            estimate_ls(x, np.ones(4), per_subcarrier=True)

    def test_block_too_short(self):
        with pytest.raises(EstimationError):
            estimate_ls(np.ones(5), np.ones(5), num_taps=3)

    def test_degenerate_pilot(self):
        x = np.zeros(16, complex)
        x[-1] = 1
        with pytest.raises(EstimationError):
            estimate_ls(x, x, num_taps=2)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            estimate_ls(np.ones(4), np.ones(5))

    def test_convolution_matrix(self):
        a = convolution_matrix(np.array([1, 2, 3], complex), 2)
        assert np.array_equal(a, [[1, 0], [2, 1], [3, 2]])


class TestMmse:
    def test_hand_value(self):
        y_eq, eff = mmse_equalize(np.array([4.0]), np.array([2.0]), 1.0)
        assert abs(y_eq[0] - 1.6) <= 1e-9
        assert eff[0] == pytest.approx(0.2)

    def test_zero_estimate(self):
        y_eq, eff = mmse_equalize(np.ones(3), np.array([0.0]), 0.0)
        assert np.array_equal(y_eq, np.zeros(3)) and np.array_equal(eff, np.ones(3))

    def test_per_subcarrier_shape(self):
        with pytest.raises(ShapeError):
            mmse_equalize(np.ones(4), np.ones(3), 0.1, per_subcarrier=True)

    def test_multi_tap_recovers_symbols_at_high_snr(self):
        x = qpsk(64, 4)
        taps = np.array([1.0, 0.5, 0.25])
        y = np.convolve(x, taps)[: x.size]
        y_eq, eff = mmse_equalize(y, taps, 1e-6)
        assert np.allclose(y_eq, x, atol=1e-3)
        assert np.all(eff < 1e-4)

    def test_single_tap_matches_block_form(self):
        rng = np.random.default_rng(5)
        y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        f = np.array([0.7 - 0.2j])
        scalar, _ = mmse_equalize(y, f, 0.3)
        assert np.allclose(scalar, np.conj(f[0]) * y / (abs(f[0]) ** 2 + 0.3))


class TestErrorStats:
    def test_known_values(self):
        truth = [np.array([1.0]), np.array([2.0]), np.array([3.0])]
        est = [np.array([1.0]), np.array([1.0]), np.array([1.0])]
        # errors 0, 1, 2 -> sample variance 1
        assert estimation_error_stats(est, truth) == pytest.approx(1.0)

    def test_records_and_states(self):
        truth = [ChannelState(np.array([1.0 + 0j])), ChannelState(np.array([0.0 + 0j]))]
        est = [ChannelEstimateRecord(np.array([0.0 + 0j]), 0), ChannelEstimateRecord(np.array([0.0 + 0j]), 1)]
        assert estimation_error_stats(est, truth) == pytest.approx(0.5)

    def test_fewer_than_two(self):
        assert estimation_error_stats([np.ones(1)], [np.ones(1)]) == 0.0

    def test_mismatch(self):
        with pytest.raises(ShapeError):
            estimation_error_stats([np.ones(1)], [])
