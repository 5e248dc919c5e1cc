import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decpilot.decoder import decode, decode_product, grand_hard, grand_hard_reference, grand_soft_list
from decpilot.errors import ParameterDomainError, ShapeError
from decpilot.fec import CRC11, codebook, crc_append, encode, make_ebch, make_extended_hamming, make_product

H8 = make_extended_hamming(3)
H16 = make_extended_hamming(4)


class TestHardGrand:
    def test_equals_minimum_distance_on_all_inputs(self):
        book = codebook(H8)
        for bits in itertools.product((0, 1), repeat=8):
            y = np.array(bits, dtype=np.uint8)
            out = grand_hard(y, H8)
            dist = (book ^ y).sum(axis=1)
            assert H8.is_codeword(out.codeword)
            assert int((out.codeword ^ y).sum()) == dist.min()
            if (dist == dist.min()).sum() == 1:
                assert np.array_equal(out.codeword, book[dist.argmin()])

    def test_table_matches_guess_loop(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            y = rng.integers(0, 2, 16, dtype=np.uint8)
            out = grand_hard(y, H16)
            ref, q = grand_hard_reference(y, H16)
            assert np.array_equal(out.codeword, ref)
            assert out.queries_used == q

    def test_abandonment(self):
        y = np.zeros(16, np.uint8)
        y[[0, 5]] = 1  # weight-2 error needs more than 1 + 16 queries
        out = grand_hard(y, H16, max_queries=10)
        ref, q = grand_hard_reference(y, H16, max_queries=10)
        assert out.abandoned and ref is None and q == 10
        assert np.array_equal(out.codeword, y)
        assert out.queries_used == 10

    def test_codeword_needs_one_query(self):
        c = encode(np.ones(11, np.uint8), H16)
        out = grand_hard(c, H16)
        assert out.queries_used == 1 and not out.abandoned

    def test_crc_status(self):
        code = make_ebch(6, 2)
        u = crc_append(np.random.default_rng(1).integers(0, 2, 40, dtype=np.uint8), CRC11)
        c = encode(u, code)
        c[3] ^= 1
        out = grand_hard(c, code, crc=CRC11)
        assert out.crc_pass is True
        assert np.array_equal(out.info_bits, u)
        assert grand_hard(c, code).crc_pass is None

    def test_bad_inputs(self):
        with pytest.raises(ShapeError):
            grand_hard(np.zeros(7, np.uint8), H8)
        with pytest.raises(ParameterDomainError):
            grand_hard(np.zeros(8, np.uint8), H8, max_queries=0)


def soft_ml(llrs, book):
    hard = (llrs < 0).astype(np.uint8)
    costs = ((book ^ hard) * np.abs(llrs)).sum(axis=1)
    return costs


class TestSoftGrand:
    def test_costs_non_decreasing_on_random_vectors(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            llrs = rng.normal(0, 2, 16)
            out = grand_soft_list(llrs, H16, list_size=4)
            assert all(a <= b for a, b in zip(out.costs, out.costs[1:]))

    def test_candidates_are_distinct_codewords_with_exact_costs(self):
        rng = np.random.default_rng(3)
        book = codebook(H16)
        for _ in range(200):
            llrs = rng.normal(0, 2, 16)
            out = grand_soft_list(llrs, H16, list_size=5)
            hard = (llrs < 0).astype(np.uint8)
            seen = set()
            for (cw, p), cost in zip(out.candidates, out.costs):
                assert H16.is_codeword(cw)
                assert cost == pytest.approx(float(np.abs(llrs)[cw != hard].sum()))
                seen.add(cw.tobytes())
            assert len(seen) == len(out.candidates) == 5
            # the list is exactly the cheapest five codewords
            assert np.allclose(sorted(soft_ml(llrs, book))[:5], out.costs)

    def test_first_candidate_is_soft_ml(self):
        rng = np.random.default_rng(4)
        book = codebook(H8)
        for _ in range(300):
            llrs = rng.normal(0.5, 1.5, 8)
            out = grand_soft_list(llrs, H8)
            assert out.costs[0] == pytest.approx(soft_ml(llrs, book).min())

    @settings(max_examples=40)
    @given(st.lists(st.floats(-20, 20, allow_nan=False), min_size=8, max_size=8), st.integers(1, 6))
    def test_probabilities(self, llrs, list_size):
        out = grand_soft_list(np.array(llrs), H8, list_size=list_size)
        probs = [p for _, p in out.candidates]
        assert len(probs) == list_size
        assert sum(probs) == pytest.approx(1.0)
        assert all(a >= b - 1e-12 for a, b in zip(probs, probs[1:]))

    def test_abandonment_returns_hard_word(self):
        llrs = np.array([1.0, -1, 1, 1, 1, 1, 1, -1, 1, 1, 1, 1, 1, 1, 1, 1])
        hard = (llrs < 0).astype(np.uint8)
        assert not H16.is_codeword(hard)
        out = grand_soft_list(llrs, H16, max_queries=2)
        assert out.abandoned
        assert np.array_equal(out.codeword, hard)
        assert out.candidates[0][1] == 1.0

    def test_agrees_with_hard_on_single_error(self):
        c = encode(np.array([1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1], np.uint8), H16)
        llrs = np.where(c == 0, 4.0, -4.0)
        llrs[6] = -llrs[6] * 0.25
        assert np.array_equal(grand_soft_list(llrs, H16).codeword, c)
        assert np.array_equal(grand_hard((llrs < 0).astype(np.uint8), H16).codeword, c)


class TestProduct:
    P8 = make_product(H8)
    P32 = make_product(make_extended_hamming(5))

    def test_clean_word(self):
        u = np.random.default_rng(5).integers(0, 2, self.P32.k, dtype=np.uint8)
        c = encode(u, self.P32)
        out = decode_product(c, self.P32)
        assert np.array_equal(out.info_bits, u) and not out.abandoned

    def test_scattered_errors_corrected(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            u = rng.integers(0, 2, self.P32.k, dtype=np.uint8)
            c = encode(u, self.P32)
            y = c.copy()
            # one error in each of several distinct rows and columns
            rows = rng.choice(32, 6, replace=False)
            cols = rng.choice(32, 6, replace=False)
            y[rows * 32 + cols] ^= 1
            out = decode_product(y, self.P32)
            assert np.array_equal(out.codeword, c)

    def test_llr_input(self):
        c = encode(np.ones(16, np.uint8), self.P8)
        llrs = np.where(c == 0, 3.0, -3.0)
        llrs[[0, 9, 18]] *= -1
        out = decode(llrs, self.P8)
        assert np.array_equal(out.codeword, c)

    def test_abandoned_means_not_a_codeword(self):
        rng = np.random.default_rng(7)
        y = rng.integers(0, 2, 64, dtype=np.uint8)
        assert decode_product(y, self.P8, iterations=0).abandoned
        for _ in range(50):
            y = rng.integers(0, 2, 64, dtype=np.uint8)
            out = decode_product(y, self.P8, iterations=2)
            assert out.abandoned == (not self.P8.is_codeword(out.codeword))

    def test_rejects_single_code(self):
        with pytest.raises(ParameterDomainError):
            decode_product(np.zeros(8, np.uint8), H8)


def test_dispatch():
    llrs = np.full(16, 2.0)
    assert decode(llrs, H16, kind="hard").queries_used == 1
    assert len(decode(llrs, H16, kind="soft", list_size=3).candidates) == 3
    with pytest.raises(ParameterDomainError):
        decode(llrs, H16, kind="bogus")
