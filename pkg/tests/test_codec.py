import math
import random
import struct

import numpy as np
import pytest

from ctsw.codec import (
    HEADER_SIZE,
    MAGIC,
    BadMagic,
    ContainerHeader,
    FormatError,
    TruncatedPayload,
    UnsupportedVariant,
    bits_to_bytes,
    bytes_to_bits,
    compress,
    compress_reference,
    decompress,
    decompress_reference,
    model_log_prob_of,
    payload_bits,
)
from ctsw.model import ModelConfig, Variant


def sample(rng, n):
    kind = rng.randrange(4)
    if kind == 0:
        return bytes(rng.randrange(256) for _ in range(n))
    if kind == 1:
        return bytes(rng.choice(b"ab") for _ in range(n))
    if kind == 2:
        words = [b"switch", b"tree", b"context", b" ", b"\n", b"weight"]
        out = b""
        while len(out) < n:
            out += rng.choice(words)
        return out[:n]
    return bytes((i * 7 + i // 13) & 0xFF for i in range(n))


def test_header_layout():
    h = ContainerHeader(Variant.CTS_STAR, 160, 123456789)
    raw = h.pack()
    assert len(raw) == HEADER_SIZE == 15
    assert raw[:4] == MAGIC
    assert raw[4] == 2
    assert struct.unpack("<H", raw[5:7])[0] == 160
    assert struct.unpack("<Q", raw[7:15])[0] == 123456789
    assert ContainerHeader.unpack(raw) == h


def test_empty_input_is_header_only():
    out = compress(b"", variant=Variant.CTS, depth=48)
    assert len(out) == HEADER_SIZE
    assert ContainerHeader.unpack(out).original_len == 0
    assert decompress(out) == b""


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("depth", [0, 1, 8, 48])
def test_round_trip(variant, depth):
    rng = random.Random(depth * 10 + variant)
    for n in (1, 2, 17, 300, 3000):
        data = sample(rng, n)
        packed = compress(data, variant=variant, depth=depth)
        header = ContainerHeader.unpack(packed)
        assert (header.variant, header.depth, header.original_len) == (variant, depth, n)
        assert decompress(packed) == data


def test_round_trip_100k_cts_depth8():
    rng = np.random.default_rng(5)
    noise = rng.integers(0, 256, 50_000, dtype=np.uint8).tobytes()
    text = (b"the quick brown fox jumps over the lazy dog. " * 1200)[:50_000]
    data = noise[:25_000] + text + noise[25_000:]
    assert decompress(compress(data, variant=Variant.CTS, depth=8)) == data


@pytest.mark.parametrize("variant", list(Variant))
def test_fast_path_matches_reference(variant):
    rng = random.Random(int(variant))
    cfg = ModelConfig.for_variant(variant, 12)
    for n in (1, 5, 200):
        data = sample(rng, n)
        fast = compress(data, cfg)
        assert compress_reference(data, cfg) == fast
        assert decompress_reference(fast) == data


@pytest.mark.parametrize("variant", list(Variant))
def test_payload_close_to_model_probability(variant):
    data = (b"to be or not to be, that is the question; " * 40)[:1500]
    cfg = ModelConfig.for_variant(variant, 16)
    packed = compress(data, cfg)
    ideal = -model_log_prob_of(data, cfg)
    gap = payload_bits(packed) - ideal
    # at most 7 bits of byte padding plus the two flush bits
    assert 0 <= gap <= 2 + 7


def test_bad_magic():
    packed = compress(b"hello", variant=Variant.CTS, depth=8)
    with pytest.raises(BadMagic):
        decompress(b"XXXX" + packed[4:])
    with pytest.raises(BadMagic):
        decompress(b"nope")


def test_unsupported_variant():
    packed = bytearray(compress(b"hello", variant=Variant.CTS, depth=8))
    packed[4] = 7
    with pytest.raises(UnsupportedVariant):
        decompress(bytes(packed))


def test_truncation_is_an_error_not_a_crash():
    data = bytes(random.Random(3).randrange(256) for _ in range(2000))
    packed = compress(data, variant=Variant.CTS, depth=8)
    for cut in (0, 1, 14, HEADER_SIZE, HEADER_SIZE + 1, len(packed) // 2, len(packed) - 1):
        with pytest.raises(FormatError):
            decompress(packed[:cut])
    with pytest.raises(TruncatedPayload):
        decompress(packed[: len(packed) - 5])


def test_nonstandard_config_rejected():
    with pytest.raises(ValueError):
        compress(b"abc", ModelConfig(8, Variant.CTS, count_scale=0.9))


def test_bit_helpers():
    data = bytes(range(256))
    assert bits_to_bytes(bytes_to_bits(data)) == data
    assert bytes_to_bits(b"\x80") == [1, 0, 0, 0, 0, 0, 0, 0]


def test_deterministic_output():
    data = sample(random.Random(8), 5000)
    assert compress(data, variant=Variant.CTS_STAR, depth=48) == compress(data, variant=Variant.CTS_STAR, depth=48)


def test_depth_zero_never_expands_much():
    data = bytes(random.Random(2).randrange(256) for _ in range(20_000))
    for variant in Variant:
        packed = compress(data, variant=variant, depth=0)
        assert 8 * len(packed) / len(data) <= 8.1
