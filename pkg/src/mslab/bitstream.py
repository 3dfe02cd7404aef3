"""Length-prefixed bit sequences shared by every codec.

Wire format: a little-endian u32 holding the bit length, followed by the
payload packed MSB-first and zero-padded to a byte boundary.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class Bitstream:
    nbits: int
    payload: bytes

    def __post_init__(self):
        if self.nbits < 0:
            raise ValueError("negative bit length")
        if len(self.payload) != (self.nbits + 7) // 8:
            raise ValueError("payload size does not match bit length")
        spare = 8 * len(self.payload) - self.nbits
        if spare and self.payload[-1] & ((1 << spare) - 1):
            raise ValueError("padding bits must be zero")

    @classmethod
    def from_bits(cls, bits: Iterable[int] | str) -> "Bitstream":
        if isinstance(bits, str):
            if set(bits) - {"0", "1"}:
                raise ValueError("bit string may only contain 0 and 1")
            bits = [c == "1" for c in bits]
        buf = bytearray()
        n = 0
        acc = 0
        for b in bits:
            acc = (acc << 1) | (1 if b else 0)
            n += 1
            if n % 8 == 0:
                buf.append(acc)
                acc = 0
        if n % 8:
            buf.append(acc << (8 - n % 8))
        return cls(n, bytes(buf))

    @classmethod
    def from_int(cls, value: int, width: int) -> "Bitstream":
        if value < 0 or (width < value.bit_length()):
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls.from_bits(format(value, f"0{width}b") if width else "")

    def bits(self) -> list[int]:
        out = []
        for i in range(self.nbits):
            out.append((self.payload[i >> 3] >> (7 - (i & 7))) & 1)
        return out

    def to_str(self) -> str:
        return "".join(map(str, self.bits()))

    def to_int(self) -> int:
        return int(self.to_str(), 2) if self.nbits else 0

    def __len__(self) -> int:
        return self.nbits

    def __add__(self, other: "Bitstream") -> "Bitstream":
        return Bitstream.from_bits(self.bits() + other.bits())

    def to_bytes(self) -> bytes:
        return struct.pack("<I", self.nbits) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "Bitstream":
        if len(data) < 4:
            raise ValueError("stream shorter than its 4-byte header")
        (nbits,) = struct.unpack("<I", data[:4])
        payload = bytes(data[4:])
        if len(payload) != (nbits + 7) // 8:
            raise ValueError("payload size does not match header")
        return cls(nbits, payload)


class BitReader:
    def __init__(self, stream: Bitstream | Iterable[int]):
        self._bits = stream.bits() if isinstance(stream, Bitstream) else list(stream)
        self.pos = 0

    def remaining(self) -> int:
        return len(self._bits) - self.pos

    def read(self) -> int:
        if self.pos >= len(self._bits):
            raise ValueError("unexpected end of stream")
        b = self._bits[self.pos]
        self.pos += 1
        return b

    def read_int(self, width: int) -> int:
        v = 0
        for _ in range(width):
            v = (v << 1) | self.read()
        return v


def elias_gamma(n: int) -> list[int]:
    if n < 1:
        raise ValueError("Elias codes need a positive integer")
    body = [int(c) for c in bin(n)[2:]]
    return [0] * (len(body) - 1) + body


def elias_delta(n: int) -> list[int]:
    if n < 1:
        raise ValueError("Elias codes need a positive integer")
    body = bin(n)[2:]
    return elias_gamma(len(body)) + [int(c) for c in body[1:]]


def read_elias_gamma(reader: BitReader) -> int:
    zeros = 0
    while reader.read() == 0:
        zeros += 1
        if zeros > 64:
            raise ValueError("malformed Elias gamma code")
    return (1 << zeros) | reader.read_int(zeros)


def read_elias_delta(reader: BitReader) -> int:
    length = read_elias_gamma(reader)
    return (1 << (length - 1)) | reader.read_int(length - 1)
