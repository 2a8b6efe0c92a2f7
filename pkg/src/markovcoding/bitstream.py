"""Exact bit-level I/O: an immutable bit string plus MSB-first writer/reader.

Widths are caller-specified, so the reader must be driven by the same layout
logic that drove the writer; there is no self-delimiting framing.
"""

from __future__ import annotations


class MalformedBitstreamError(ValueError):
    """Raised when a read runs past the end of the available bits."""


class Bits:
    """Immutable bit string, MSB-first inside bytes."""

    __slots__ = ("_buf", "_nbits")

    def __init__(self, buf: bytes = b"", nbits: int = 0):
        if nbits < 0 or nbits > 8 * len(buf):
            raise ValueError(f"nbits={nbits} inconsistent with buffer of {len(buf)} bytes")
        # trailing bits of the last byte must be zero padding
        self._buf = bytes(buf)
        self._nbits = nbits

    @classmethod
    def from01(cls, s: str) -> "Bits":
        """Build from a text string of '0'/'1' characters."""
        n = len(s)
        val = int(s, 2) if n else 0
        pad = (-n) % 8
        val <<= pad
        return cls(val.to_bytes((n + pad) // 8, "big"), n)

    def to01(self) -> str:
        """Render as a '0'/'1' text string."""
        if self._nbits == 0:
            return ""
        total = int.from_bytes(self._buf, "big") >> (8 * len(self._buf) - self._nbits)
        return format(total, f"0{self._nbits}b")

    def __len__(self) -> int:
        return self._nbits

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Bits):
            return NotImplemented
        return self._nbits == other._nbits and self._buf == other._buf

    def __hash__(self) -> int:
        return hash((self._buf, self._nbits))

    def __repr__(self) -> str:
        if self._nbits <= 64:
            return f"Bits('{self.to01()}')"
        return f"Bits(<{self._nbits} bits>)"


class BitWriter:
    """Accumulates unsigned integers of explicit widths into a Bits value."""

    def __init__(self):
        self._parts: list[tuple[int, int]] = []  # (value, width)
        self._nbits = 0

    def __len__(self) -> int:
        return self._nbits

    def write_uint(self, value: int, width: int) -> None:
        if width < 0:
            raise ValueError(f"negative width {width}")
        if value < 0 or (value >> width if width else value):
            raise ValueError(f"value {value} does not fit in {width} bits")
        if width == 0:
            return
        self._parts.append((value, width))
        self._nbits += width

    def getbits(self) -> Bits:
        # balanced fold keeps big-int concatenation near linear in total size
        parts = list(self._parts)
        if not parts:
            return Bits()
        while len(parts) > 1:
            merged = []
            for i in range(0, len(parts) - 1, 2):
                (v1, w1), (v2, w2) = parts[i], parts[i + 1]
                merged.append(((v1 << w2) | v2, w1 + w2))
            if len(parts) % 2:
                merged.append(parts[-1])
            parts = merged
        val, nbits = parts[0]
        pad = (-nbits) % 8
        return Bits((val << pad).to_bytes((nbits + pad) // 8, "big"), nbits)


class BitReader:
    """Sequential MSB-first reader over a Bits value."""

    def __init__(self, bits: Bits):
        self._buf = bits._buf
        self._nbits = len(bits)
        self._pos = 0

    @property
    def remaining(self) -> int:
        return self._nbits - self._pos

    def read_uint(self, width: int) -> int:
        if width < 0:
            raise ValueError(f"negative width {width}")
        if width == 0:
            return 0
        if self._pos + width > self._nbits:
            raise MalformedBitstreamError(
                f"requested {width} bits with only {self.remaining} remaining"
            )
        start_byte = self._pos // 8
        end_byte = (self._pos + width + 7) // 8
        chunk = int.from_bytes(self._buf[start_byte:end_byte], "big")
        drop = 8 * (end_byte - start_byte) - (self._pos % 8) - width
        self._pos += width
        return (chunk >> drop) & ((1 << width) - 1)
