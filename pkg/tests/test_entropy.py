import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mocapcodec import StreamError, entropy_decode, entropy_encode
from mocapcodec.entropy import zigzag_decode, zigzag_encode

I64 = np.iinfo(np.int64)


class TestZigzag:
    def test_interleaving_order(self):
        vals = np.array([0, -1, 1, -2, 2, -3], dtype=np.int64)
        assert zigzag_encode(vals).tolist() == [0, 1, 2, 3, 4, 5]

    def test_extremes(self):
        vals = np.array([I64.min, I64.max, 0], dtype=np.int64)
        assert np.array_equal(zigzag_decode(zigzag_encode(vals)), vals)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(min_value=I64.min, max_value=I64.max), max_size=50))
    def test_roundtrip_property(self, values):
        vals = np.array(values, dtype=np.int64)
        assert np.array_equal(zigzag_decode(zigzag_encode(vals)), vals)


@pytest.mark.parametrize("backend", ["raw", "arithmetic"])
class TestRoundTrip:
    def test_empty_sequence(self, backend):
        blob = entropy_encode([], backend)
        assert entropy_decode(blob).size == 0
        assert len(blob) < 12  # header plus checksum only

    def test_known_small_values(self, backend):
        vals = [0, 1, -1, 127, -128, 300, -70000, 2**40, -(2**40)]
        assert entropy_decode(entropy_encode(vals, backend)).tolist() == vals

    def test_extreme_values(self, backend):
        vals = [I64.min, I64.max, I64.min + 1, I64.max - 1]
        assert entropy_decode(entropy_encode(vals, backend)).tolist() == vals

    def test_hundred_thousand_random(self, backend):
        rng = np.random.default_rng(7)
        magnitudes = rng.choice([3, 8, 16, 32, 62], size=100_000)
        vals = rng.integers(-(2**62), 2**62, size=100_000) >> (62 - magnitudes)
        blob = entropy_encode(vals, backend)
        assert np.array_equal(entropy_decode(blob), vals)

    def test_deterministic(self, backend):
        rng = np.random.default_rng(3)
        vals = rng.integers(-1000, 1000, size=500)
        assert entropy_encode(vals, backend) == entropy_encode(vals, backend)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(min_value=I64.min, max_value=I64.max), max_size=80))
    def test_roundtrip_property(self, backend, values):
        got = entropy_decode(entropy_encode(values, backend))
        assert got.tolist() == values


class TestCompression:
    def test_zeros_compress_hard(self):
        zeros = np.zeros(10_000, dtype=np.int64)
        raw = entropy_encode(zeros, "raw")
        arith = entropy_encode(zeros, "arithmetic")
        assert len(arith) < 0.05 * len(raw)

    def test_skewed_data_beats_raw(self):
        rng = np.random.default_rng(11)
        vals = rng.geometric(0.3, size=20_000) - 1
        assert len(entropy_encode(vals, "arithmetic")) < len(entropy_encode(vals, "raw"))


class TestCorruption:
    def test_checksum_catches_bit_flips(self):
        blob = bytearray(entropy_encode([5, -9, 1000], "arithmetic"))
        for pos in range(len(blob)):
            corrupted = bytearray(blob)
            corrupted[pos] ^= 0x40
            with pytest.raises(StreamError):
                entropy_decode(bytes(corrupted))

    def test_truncation_detected(self):
        blob = entropy_encode(list(range(100)), "raw")
        for cut in (0, 3, len(blob) // 2, len(blob) - 1):
            with pytest.raises(StreamError):
                entropy_decode(blob[:cut])

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            entropy_encode([1], "huffman")

    def test_values_wider_than_int64_rejected(self):
        with pytest.raises(OverflowError):
            entropy_encode([2**63], "raw")
