"""Container format and the byte <-> bit pipeline.

Layout (all integers little-endian)::

    magic         4 bytes   b"CTS1"
    variant       1 byte    0 = CTW, 1 = CTS, 2 = CTS*
    depth         2 bytes   context depth D in bits
    original_len  8 bytes   number of input bytes
    payload       ...       arithmetic-coded bits, MSB first

Bytes are fed to the model MSB first. The model history starts as D zero
bits on both sides, so every input bit is coded. CTW and CTS use one tree
over the flat bit stream; CTS* codes each byte as 8 binary decisions, each
with its own tree selected by the bits of the byte already coded.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .coder import TruncatedStream, decode_bits, encode_bits
from .model import ModelConfig, NodePool, Variant, make_model

MAGIC = b"CTS1"
HEADER = struct.Struct("<4sBHQ")
HEADER_SIZE = HEADER.size


class FormatError(Exception):
    """Base class for malformed containers."""


class BadMagic(FormatError):
    pass


class UnsupportedVariant(FormatError):
    pass


class TruncatedPayload(FormatError):
    pass


@dataclass(frozen=True)
class ContainerHeader:
    variant: Variant
    depth: int
    original_len: int

    def pack(self) -> bytes:
        return HEADER.pack(MAGIC, int(self.variant), self.depth, self.original_len)

    @classmethod
    def unpack(cls, data: bytes) -> "ContainerHeader":
        if len(data) < HEADER_SIZE:
            if not MAGIC.startswith(bytes(data[:4])):
                raise BadMagic("not a CTS1 container")
            raise TruncatedPayload("container shorter than its header")
        magic, variant, depth, length = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise BadMagic(f"bad magic {magic!r}")
        try:
            variant = Variant(variant)
        except ValueError:
            raise UnsupportedVariant(f"unsupported variant byte {variant}") from None
        return cls(variant, depth, length)

    def config(self) -> ModelConfig:
        return ModelConfig.for_variant(self.variant, self.depth)


def _as_config(config: ModelConfig | None, variant, depth) -> ModelConfig:
    if config is not None:
        return config
    return ModelConfig.for_variant(variant, depth)


class _Stream:
    """Pool, history and per-tree counters shared by the compiled drivers."""

    def __init__(self, config: ModelConfig, expected_bytes: int):
        self.config = config
        self.n_trees = 255 if config.byte_decomposed else 1
        depth = config.depth
        self.pool = NodePool(min(8 * (depth + 1) * expected_bytes + self.n_trees, 1 << 20) + 1024)
        self.share = config.initial_share()
        for _ in range(self.n_trees):
            self.pool.add_root(self.share)
        self.hist = np.zeros(max(depth, 1), dtype=np.int64)
        self.seen = np.zeros(self.n_trees, dtype=np.int64)
        self.coder = np.zeros(4, dtype=np.int64)

    def ensure_nodes(self) -> None:
        self.pool.reserve(8 * (self.config.depth + 1) + 1)


def compress(data: bytes, config: ModelConfig | None = None, *, variant=Variant.CTS, depth: int = 48) -> bytes:
    """Compress ``data`` into a self-describing container."""
    config = _as_config(config, variant, depth)
    if config != ModelConfig.for_variant(config.variant, config.depth):
        raise ValueError("the container only records variant and depth; use a standard configuration")
    header = ContainerHeader(config.variant, config.depth, len(data)).pack()
    if not data:
        return header
    src = np.frombuffer(bytes(data), dtype=np.uint8)
    st = _Stream(config, len(src))
    st.coder[K.HIGH] = K.FULL
    out = np.zeros(len(src) + len(src) // 8 + 256, dtype=np.uint8)
    i = 0
    while True:
        i = K.encode_stream(src, i, st.pool.child, st.pool.cnt, st.pool.nf, st.pool.meta, st.hist,
                            st.seen, st.coder, out, config.depth, config.is_switching,
                            config.byte_decomposed, config.count_scale, st.share)
        if i >= len(src):
            break
        st.ensure_nodes()
        need = (int(st.pool.meta[K.BITPOS]) + int(st.coder[K.PENDING])) // 8 + 128
        if need >= len(out):
            out = np.concatenate([out, np.zeros(max(len(out) // 2, need - len(out) + 128), np.uint8)])
    if (int(st.pool.meta[K.BITPOS]) + int(st.coder[K.PENDING])) // 8 + 8 >= len(out):
        out = np.concatenate([out, np.zeros(int(st.coder[K.PENDING]) // 8 + 16, np.uint8)])
    K.finish_encoder(st.coder, out, st.pool.meta)
    nbits = int(st.pool.meta[K.BITPOS])
    return header + out[: (nbits + 7) // 8].tobytes()


def decompress(stream: bytes) -> bytes:
    header = ContainerHeader.unpack(stream)
    config = header.config()
    if header.original_len == 0:
        return b""
    payload = np.frombuffer(bytes(stream[HEADER_SIZE:]), dtype=np.uint8)
    if payload.size == 0:
        raise TruncatedPayload("empty payload for non-empty input")
    st = _Stream(config, header.original_len)
    meta = st.pool.meta
    K.start_decoder(st.coder, payload, meta)
    out = np.zeros(header.original_len, dtype=np.uint8)
    i = 0
    while True:
        i = K.decode_stream(payload, out, i, st.pool.child, st.pool.cnt, st.pool.nf, meta, st.hist,
                            st.seen, st.coder, config.depth, config.is_switching,
                            config.byte_decomposed, config.count_scale, st.share)
        if i >= len(out):
            break
        st.ensure_nodes()
        meta = st.pool.meta
    written = int(meta[K.SHIFTS]) + 2
    if written > 8 * payload.size:
        raise TruncatedPayload(f"payload has {8 * payload.size} bits, {written} were coded")
    return out.tobytes()


def payload_bits(stream: bytes) -> int:
    return 8 * (len(stream) - HEADER_SIZE)


# ------------------------------------------------------------------ slow path


def bytes_to_bits(data: bytes) -> list[int]:
    return [(byte >> (7 - k)) & 1 for byte in data for k in range(8)]


def bits_to_bytes(bits) -> bytes:
    out = bytearray()
    for i in range(0, len(bits), 8):
        byte = 0
        for bit in bits[i : i + 8]:
            byte = (byte << 1) | bit
        out.append(byte)
    return bytes(out)


def compress_reference(data: bytes, config: ModelConfig) -> bytes:
    """Bit-at-a-time compression through the public model and coder APIs.

    Produces the same container as :func:`compress`; much slower.
    """
    header = ContainerHeader(config.variant, config.depth, len(data)).pack()
    if not data:
        return header
    return header + encode_bits(make_model(config), bytes_to_bits(data))


def decompress_reference(stream: bytes) -> bytes:
    header = ContainerHeader.unpack(stream)
    if header.original_len == 0:
        return b""
    try:
        bits = decode_bits(make_model(header.config()), bytes(stream[HEADER_SIZE:]), 8 * header.original_len)
    except TruncatedStream as exc:
        raise TruncatedPayload(str(exc)) from exc
    return bits_to_bytes(bits)


def model_log_prob_of(data: bytes, config: ModelConfig) -> float:
    """log2 probability the codec's model assigns to ``data``."""
    model = make_model(config)
    if not config.byte_decomposed:
        model.update_bits(np.array(bytes_to_bits(data), dtype=np.int64))
        return model.log_prob()
    for bit in bytes_to_bits(data):
        model.update(bit)
    return model.log_prob()
