"""Binary arithmetic coder with 32-bit registers and MSB-first output.

Carries are resolved by counting straddle ("pending") bits. The interval for
a 1 is the lower part of the current range. Given the same sequence of
probabilities, encoder and decoder move through identical (low, high) states.
"""

from __future__ import annotations

import math

PRECISION = 32
FULL = (1 << PRECISION) - 1
HALF = 1 << (PRECISION - 1)
QUARTER = 1 << (PRECISION - 2)
THREE_QUARTERS = HALF + QUARTER
P_MIN = 2.0**-20
P_MAX = 1.0 - 2.0**-20


class CodingError(Exception):
    pass


class TruncatedStream(CodingError):
    """The payload ended before every coded bit could be recovered."""


def clamp_probability(p_one: float) -> float:
    if not math.isfinite(p_one):
        raise ValueError(f"probability must be finite, got {p_one!r}")
    return min(max(p_one, P_MIN), P_MAX)


class BitWriter:
    def __init__(self):
        self.buf = bytearray()
        self.nbits = 0

    def write(self, bit: int) -> None:
        if self.nbits & 7 == 0:
            self.buf.append(0)
        if bit:
            self.buf[-1] |= 0x80 >> (self.nbits & 7)
        self.nbits += 1

    def getvalue(self) -> bytes:
        return bytes(self.buf)


class BitReader:
    """MSB-first reader that yields zeros past the end of the data."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def read(self) -> int:
        pos = self.pos
        self.pos += 1
        if pos >> 3 >= len(self.data):
            return 0
        return (self.data[pos >> 3] >> (7 - (pos & 7))) & 1


class ArithmeticEncoder:
    def __init__(self):
        self.low = 0
        self.high = FULL
        self.pending_bits = 0
        self.sink = BitWriter()
        self._finished = False

    def _emit(self, bit: int) -> None:
        self.sink.write(bit)
        for _ in range(self.pending_bits):
            self.sink.write(1 - bit)
        self.pending_bits = 0

    def encode_bit(self, p_one: float, bit: int) -> None:
        if self._finished:
            raise CodingError("encoder already finalized")
        span = self.high - self.low + 1
        split = int(span * clamp_probability(p_one))
        if bit:
            self.high = self.low + split - 1
        else:
            self.low += split
        while True:
            if self.high < HALF:
                self._emit(0)
            elif self.low >= HALF:
                self._emit(1)
                self.low -= HALF
                self.high -= HALF
            elif self.low >= QUARTER and self.high < THREE_QUARTERS:
                self.pending_bits += 1
                self.low -= QUARTER
                self.high -= QUARTER
            else:
                break
            self.low <<= 1
            self.high = (self.high << 1) | 1

    def finalize(self) -> bytes:
        """Flush two disambiguating bits plus any pending ones."""
        if not self._finished:
            self.pending_bits += 1
            self._emit(0 if self.low < QUARTER else 1)
            self._finished = True
        return self.sink.getvalue()

    @property
    def bit_length(self) -> int:
        return self.sink.nbits


class ArithmeticDecoder:
    """Mirror of :class:`ArithmeticEncoder`.

    The number of symbols must be known to the caller. Call :meth:`finish`
    after the last symbol to check that the payload really contained every
    bit the encoder wrote.
    """

    def __init__(self, data: bytes):
        self.source = BitReader(data)
        self.low = 0
        self.high = FULL
        self.shifts = 0
        self.value = 0
        for _ in range(PRECISION):
            self.value = (self.value << 1) | self.source.read()

    def decode_bit(self, p_one: float) -> int:
        span = self.high - self.low + 1
        split = int(span * clamp_probability(p_one))
        if self.value < self.low + split:
            bit = 1
            self.high = self.low + split - 1
        else:
            bit = 0
            self.low += split
        while True:
            if self.high < HALF:
                pass
            elif self.low >= HALF:
                self.low -= HALF
                self.high -= HALF
                self.value -= HALF
            elif self.low >= QUARTER and self.high < THREE_QUARTERS:
                self.low -= QUARTER
                self.high -= QUARTER
                self.value -= QUARTER
            else:
                break
            self.low <<= 1
            self.high = (self.high << 1) | 1
            self.value = (self.value << 1) | self.source.read()
            self.shifts += 1
        return bit

    def encoded_bit_length(self) -> int:
        """Bits the encoder had written once finalized, inferred from the
        decoder's own renormalisations."""
        return self.shifts + 2

    def finish(self) -> None:
        if self.encoded_bit_length() > 8 * len(self.source.data):
            raise TruncatedStream(
                f"payload holds {8 * len(self.source.data)} bits, "
                f"encoder wrote {self.encoded_bit_length()}"
            )


def encode_bits(model, bits) -> bytes:
    """Code ``bits`` with any model exposing ``predict(1)`` and ``update(bit)``."""
    enc = ArithmeticEncoder()
    for bit in bits:
        enc.encode_bit(model.predict(1), bit)
        model.update(bit)
    return enc.finalize()


def decode_bits(model, data: bytes, count: int) -> list[int]:
    dec = ArithmeticDecoder(data)
    out = []
    for _ in range(count):
        bit = dec.decode_bit(model.predict(1))
        model.update(bit)
        out.append(bit)
    dec.finish()
    return out
