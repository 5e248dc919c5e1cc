import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decpilot import _gf2
from decpilot.errors import ParameterDomainError, ShapeError
from decpilot.fec import (
    CRC11,
    CRC24,
    CrcSpec,
    codebook,
    crc_append,
    crc_bits,
    crc_check,
    crc_remainder_reference,
    encode,
    extract_info,
    make_ebch,
    make_extended_hamming,
    make_nonsystematic,
    make_product,
)

CHECK_STRING = b"123456789"


def bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_int(bits) -> int:
    return int("".join(map(str, bits)), 2)


# ----------------------------------------------------------------------------- CRC


class TestCrc:
    def test_crc24_openpgp_check_value(self):
        spec = CrcSpec(24, 0x864CFB, init=0xB704CE)
        assert bits_to_int(crc_bits(bytes_to_bits(CHECK_STRING), spec)) == 0x21CF02

    def test_crc11_flexray_check_value(self):
        spec = CrcSpec(11, 0x385, init=0x01A)
        assert bits_to_int(crc_bits(bytes_to_bits(CHECK_STRING), spec)) == 0x5A3

    @settings(max_examples=50)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=300), st.integers(0, 2047), st.integers(0, 2047))
    def test_matches_bit_serial_reference(self, bits, init, xorout):
        spec = CrcSpec(11, 0x385, init=init, xorout=xorout)
        assert np.array_equal(crc_bits(bits, spec), crc_remainder_reference(bits, spec))

    def test_append_then_check(self):
        rng = np.random.default_rng(0)
        for spec in (CRC11, CRC24):
            u = rng.integers(0, 2, 100, dtype=np.uint8)
            v = crc_append(u, spec)
            assert v.size == 100 + spec.width
            assert crc_check(v, spec)
            v[17] ^= 1
            assert not crc_check(v, spec)

    def test_check_too_short(self):
        with pytest.raises(ShapeError):
            crc_check(np.zeros(11, np.uint8), CRC11)

    @pytest.mark.parametrize("kw", [dict(width=0, poly=1), dict(width=4, poly=0x10), dict(width=4, poly=0x2)])
    def test_invalid_spec(self, kw):
        with pytest.raises(ParameterDomainError):
            CrcSpec(**kw)

    def test_koopman_notation(self):
        assert CrcSpec(11, 0x385).koopman == 0x5C2
        assert CRC11.koopman == 0x60D

    def test_crc11_primitive_factor_has_full_period(self):
        # x^10 + x^3 + 1 has order 1023 over GF(2)
        g, r, order = 0x409, 1, 0
        while True:
            r <<= 1
            if r >> 10:
                r ^= g
            order += 1
            if r == 1:
                break
        assert order == 1023

    @staticmethod
    def _min_undetected_weight(spec: CrcSpec, data_len: int) -> int:
        """Smallest error weight (<= 3) that goes undetected in a codeword of the given data length.

        Uses residues r[d] = x^d mod g: weight 2 fails iff r[d] = 1 for some
        0 < d < N, weight 3 iff r[a] ^ r[b] = 1 for some 0 < a < b < N.
        """
        n = data_len + spec.width
        mask = (1 << spec.width) - 1
        res = [1]
        for _ in range(1, n):
            r = res[-1] << 1
            if r >> spec.width:
                r = (r & mask) ^ spec.poly
            res.append(r)
        if 1 in res[1:]:
            return 2
        last = {}
        for d in range(1, n):
            last[res[d]] = d
        for a in range(1, n):
            b = last.get(res[a] ^ 1)
            if b is not None and b > a:
                return 3
        return 4

    @pytest.mark.parametrize("data_len", [40, 102, 665, 1012])
    def test_crc11_hamming_distance_four(self, data_len):
        assert self._min_undetected_weight(CRC11, data_len) >= 4

    def test_crc11_distance_drops_beyond_limit(self):
        assert self._min_undetected_weight(CRC11, 1013) == 2

    def test_flexray_polynomial_is_short_range_only(self):
        # period 31: fine for a 20-bit header, useless for long payloads
        assert self._min_undetected_weight(CrcSpec(11, 0x385), 20) >= 4
        assert self._min_undetected_weight(CrcSpec(11, 0x385), 40) == 2

    def test_weight_search_agrees_with_brute_force(self):
        spec = CrcSpec(4, 0x3)  # x^4 + x + 1, primitive: period 15
        for data_len in (3, 11, 12):
            n = data_len + spec.width
            brute = 4
            for w in (1, 2, 3):
                for pos in itertools.combinations(range(n), w):
                    e = np.zeros(n, np.uint8)
                    e[list(pos)] = 1
                    if crc_bits(e[:data_len], spec).tolist() == e[data_len:].tolist():
                        brute = min(brute, w)
            assert self._min_undetected_weight(spec, data_len) == brute


# ------------------------------------------------------------------------- codes

ALL_CODES = [
    ("eHamming8", lambda: make_extended_hamming(3), 8, 4),
    ("eHamming16", lambda: make_extended_hamming(4), 16, 11),
    ("eHamming32", lambda: make_extended_hamming(5), 32, 26),
    ("eHamming64", lambda: make_extended_hamming(6), 64, 57),
    ("eHamming128", lambda: make_extended_hamming(7), 128, 120),
    ("eBCH32", lambda: make_ebch(5, 2), 32, 21),
    ("eBCH64", lambda: make_ebch(6, 2), 64, 51),
    ("eBCH128", lambda: make_ebch(7, 2), 128, 113),
]


@pytest.mark.parametrize("name,make,n,k", ALL_CODES, ids=[c[0] for c in ALL_CODES])
def test_parameters_and_orthogonality(name, make, n, k):
    code = make()
    assert (code.n, code.k) == (n, k)
    g, h = code.generator, code.parity_check
    assert g.shape == (k, n) and h.shape == (n - k, n)
    assert not _gf2.matmul(g, h.T).any()
    assert _gf2.rank(g) == k and _gf2.rank(h) == n - k


def test_hamming8_minimum_distance_exhaustive():
    book = codebook(make_extended_hamming(3))
    weights = book.sum(axis=1)
    assert weights[0] == 0
    assert weights[1:].min() == 4
    assert len({tuple(c) for c in book}) == 16


@pytest.mark.parametrize("m", [5, 6, 7])
def test_ebch_distance_at_least_six(m):
    # all error patterns of weight <= 2 have distinct nonzero syndromes -> d >= 5;
    # the overall parity bit makes every weight even -> d >= 6
    code = make_ebch(m, 2)
    cols = code.column_syndromes
    syn = set(int(c) for c in cols)
    assert 0 not in syn and len(syn) == code.n
    pairs = {int(cols[i] ^ cols[j]) for i, j in itertools.combinations(range(code.n), 2)}
    assert 0 not in pairs
    assert len(pairs) == code.n * (code.n - 1) // 2
    assert not pairs & syn
    assert np.all(code.generator.sum(axis=1) % 2 == 0)


def test_ebch_t1_matches_extended_hamming_parameters():
    a, b = make_ebch(5, 1), make_extended_hamming(5)
    assert (a.n, a.k) == (b.n, b.k)


class TestProduct:
    def test_membership_rows_and_columns(self):
        comp = make_extended_hamming(3)
        prod = make_product(comp)
        rng = np.random.default_rng(0)
        h = comp.parity_check.astype(int)
        for _ in range(1000):
            u = rng.integers(0, 2, prod.k, dtype=np.uint8)
            c = encode(u, prod).reshape(8, 8).astype(int)
            assert not ((c @ h.T) % 2).any()
            assert not ((c.T @ h.T) % 2).any()
            assert np.array_equal(extract_info(c.ravel(), prod), u)

    def test_dimensions(self):
        prod = make_product(make_extended_hamming(5))
        assert (prod.n, prod.k) == (1024, 676)
        big = make_product(make_extended_hamming(6))
        assert (big.n, big.k) == (4096, 3249)

    def test_matrices_match_kron_construction(self):
        prod = make_product(make_extended_hamming(3))
        g, h = prod.generator, prod.parity_check
        assert g.shape == (16, 64)
        assert h.shape[0] == 64 - 16
        assert not _gf2.matmul(g, h.T).any()
        rng = np.random.default_rng(1)
        u = rng.integers(0, 2, 16, dtype=np.uint8)
        assert np.array_equal(encode(u, prod), _gf2.matmul(u[None, :], g).ravel())

    def test_rejects_product_of_product(self):
        with pytest.raises(ParameterDomainError):
            make_product(make_product(make_extended_hamming(3)))


class TestEncode:
    @settings(max_examples=30)
    @given(st.data())
    def test_round_trip(self, data):
        code = data.draw(st.sampled_from([make_extended_hamming(4), make_ebch(6, 2)]))
        u = np.array(data.draw(st.lists(st.integers(0, 1), min_size=code.k, max_size=code.k)), dtype=np.uint8)
        c = encode(u, code)
        assert code.is_codeword(c)
        assert np.array_equal(extract_info(c, code), u)
        assert np.array_equal(c[: code.k], u)  # systematic, info first

    def test_wrong_length(self):
        with pytest.raises(ShapeError):
            encode(np.zeros(3, np.uint8), make_extended_hamming(3))
        with pytest.raises(ShapeError):
            extract_info(np.zeros(7, np.uint8), make_extended_hamming(3))


class TestNonSystematic:
    def test_same_codebook_different_map(self):
        base = make_extended_hamming(3)
        ns = make_nonsystematic(base, np.random.default_rng(3))
        a = {tuple(c) for c in codebook(base)}
        b = {tuple(c) for c in codebook(ns)}
        assert a == b
        assert not np.array_equal(codebook(base), codebook(ns))

    def test_extract_recovers_message(self):
        ns = make_nonsystematic(make_ebch(6, 2), np.random.default_rng(4))
        rng = np.random.default_rng(5)
        for _ in range(50):
            u = rng.integers(0, 2, ns.k, dtype=np.uint8)
            c = encode(u, ns)
            assert ns.is_codeword(c)
            assert np.array_equal(extract_info(c, ns), u)

    def test_single_code_error_spreads(self):
        # one wrong codeword (a neighbour) scrambles several message bits
        ns = make_nonsystematic(make_ebch(6, 2), np.random.default_rng(6))
        u = np.zeros(ns.k, np.uint8)
        u[0] = 1
        c = encode(u, ns)
        assert extract_info(c, ns).sum() == 1
        assert c[: ns.k].sum() > 1

    def test_singular_transform(self):
        with pytest.raises(ValueError):
            make_nonsystematic(make_extended_hamming(3), np.random.default_rng(0), transform=np.zeros((4, 4)))

    def test_codebook_limit(self):
        with pytest.raises(ParameterDomainError):
            codebook(make_ebch(6, 2))
