import numpy as np
import pytest

from mocapcodec import StreamError
from mocapcodec.container import ClipEntry, pack_stream, parse_stream


def small_stream(**overrides):
    fields = dict(
        n=2,
        f=10,
        f_used=8,
        frame_rate=120.0,
        k=3,
        clips=[ClipEntry(4, 2, 1, 0), ClipEntry(4, 2, 1, 1)],
        bases=[np.arange(18, dtype=np.int16).reshape(6, 3), np.ones((6, 3), np.int16)],
        payload=b"payload-bytes",
        backend="arithmetic",
        database_mode=True,
    )
    fields.update(overrides)
    return pack_stream(**fields)


class TestRoundTrip:
    def test_fields_survive(self):
        parsed = parse_stream(small_stream())
        assert (parsed.n, parsed.f, parsed.f_used) == (2, 10, 8)
        assert parsed.frame_rate == 120.0
        assert parsed.k == 3
        assert parsed.backend == "arithmetic"
        assert parsed.database_mode
        assert parsed.N == 2 and parsed.K == 2
        assert parsed.clips[1] == ClipEntry(4, 2, 1, 1)
        assert np.array_equal(parsed.bases[0], np.arange(18).reshape(6, 3))
        assert parsed.payload == b"payload-bytes"

    def test_absent_frame_rate(self):
        parsed = parse_stream(small_stream(frame_rate=None))
        assert parsed.frame_rate is None

    def test_raw_single_basis(self):
        stream = small_stream(
            backend="raw",
            database_mode=False,
            bases=[np.zeros((6, 3), np.int16)],
            clips=[ClipEntry(4, 2, 1, 0), ClipEntry(4, 2, 1, 0)],
        )
        parsed = parse_stream(stream)
        assert parsed.backend == "raw"
        assert not parsed.database_mode
        assert parsed.K == 1


class TestValidation:
    def test_corrupt_byte_reports_checksum(self):
        stream = bytearray(small_stream())
        stream[10] ^= 0xFF
        with pytest.raises(StreamError, match="checksum"):
            parse_stream(bytes(stream))

    def test_bad_magic(self):
        stream = bytearray(small_stream())
        stream[:4] = b"XXXX"
        # fix up the checksum so the magic check itself is exercised
        import struct
        import zlib

        stream[-4:] = struct.pack("<I", zlib.crc32(bytes(stream[:-4])))
        with pytest.raises(StreamError, match="magic"):
            parse_stream(bytes(stream))

    def test_bad_version(self):
        stream = bytearray(small_stream())
        stream[4] = 99
        import struct
        import zlib

        stream[-4:] = struct.pack("<I", zlib.crc32(bytes(stream[:-4])))
        with pytest.raises(StreamError, match="version"):
            parse_stream(bytes(stream))

    def test_truncation(self):
        stream = small_stream()
        for cut in (0, 3, 20, len(stream) - 1):
            with pytest.raises(StreamError):
                parse_stream(stream[:cut])

    def test_trailing_garbage(self):
        with pytest.raises(StreamError):
            parse_stream(small_stream() + b"extra")

    def test_pack_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            small_stream(bases=[np.zeros((5, 3), np.int16)])
        with pytest.raises(ValueError):
            small_stream(clips=[ClipEntry(4, 2, 1, 7), ClipEntry(4, 2, 1, 0)])

    def test_fuzzed_bytes_raise_only_stream_errors(self, rng):
        for trial in range(300):
            size = int(rng.integers(0, 200))
            blob = rng.integers(0, 256, size=size, dtype=np.uint8).tobytes()
            with pytest.raises(StreamError):
                parse_stream(blob)

    def test_mutated_valid_streams_never_crash(self, rng):
        base = small_stream()
        for trial in range(300):
            mutated = bytearray(base)
            for _ in range(int(rng.integers(1, 4))):
                mutated[int(rng.integers(0, len(mutated)))] = int(rng.integers(0, 256))
            try:
                parse_stream(bytes(mutated))
            except StreamError:
                pass  # structured rejection is the contract
