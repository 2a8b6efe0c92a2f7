"""Two-party Markovian protocols over single-bit memory.

A protocol is a pair of length-n lists of transmission functions. On a clean
(noiseless) execution the parties alternate:

    a_bits[i] = alice_fns[i](b_bits[i-1])    (b_bits[-1] taken as x0)
    b_bits[i] = bob_fns[i](a_bits[i])

Only four single-bit transmission functions exist: identity, negation, and the
two constants. The constants are "stuck" positions; the code table is chosen so
the high bit of the 2-bit code is the stuck flag and the low bit is the XOR
offset (linear case) or the constant value (stuck case).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bitstream import BitReader, Bits, BitWriter


class TransmissionFunction(enum.IntEnum):
    """The four single-bit transmission functions."""

    Mu1 = 0  # y -> y
    Mu2 = 1  # y -> y xor 1
    Mu3 = 2  # y -> 0
    Mu4 = 3  # y -> 1


def apply(f: TransmissionFunction, y: int) -> int:
    """Evaluate a transmission function on one input bit."""
    if y not in (0, 1):
        raise ValueError(f"input bit must be 0 or 1, got {y}")
    code = int(f)
    if code >= 2:
        return code & 1
    return y ^ (code & 1)


def is_linear(f: TransmissionFunction) -> bool:
    """True for the identity and negation, false for the stuck constants."""
    return int(f) < 2


def codes_of(fns) -> np.ndarray:
    """2-bit codes of a function list as a uint8 array."""
    return np.asarray([int(f) for f in fns], dtype=np.uint8)


def funcs_from_codes(codes) -> tuple[TransmissionFunction, ...]:
    """Inverse of codes_of."""
    return tuple(TransmissionFunction(int(c)) for c in codes)


def apply_codes(codes: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized apply: codes and y broadcast elementwise."""
    codes = np.asarray(codes, dtype=np.uint8)
    y = np.asarray(y, dtype=np.uint8)
    linear = codes < 2
    return ((codes & 1) ^ (y & linear)).astype(np.uint8)


@dataclass(frozen=True)
class MarkovianProtocol:
    """One transmission function per position for each party."""

    n: int
    alice_fns: tuple[TransmissionFunction, ...]
    bob_fns: tuple[TransmissionFunction, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError(f"n must be positive, got {self.n}")
        if len(self.alice_fns) != self.n or len(self.bob_fns) != self.n:
            raise ValueError(
                f"function lists must have length n={self.n}, got "
                f"{len(self.alice_fns)} and {len(self.bob_fns)}"
            )
        object.__setattr__(self, "alice_fns", tuple(TransmissionFunction(f) for f in self.alice_fns))
        object.__setattr__(self, "bob_fns", tuple(TransmissionFunction(f) for f in self.bob_fns))

    def alice_codes(self) -> np.ndarray:
        return codes_of(self.alice_fns)

    def bob_codes(self) -> np.ndarray:
        return codes_of(self.bob_fns)


@dataclass(frozen=True)
class Transcript:
    """The n bits sent by each party, position-aligned."""

    a_bits: np.ndarray
    b_bits: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a_bits, dtype=np.uint8)
        b = np.asarray(self.b_bits, dtype=np.uint8)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("transcript halves must be 1-d arrays of equal length")
        for arr in (a, b):
            if arr.size and arr.max() > 1:
                raise ValueError("transcript bits must be 0 or 1")
        object.__setattr__(self, "a_bits", a)
        object.__setattr__(self, "b_bits", b)

    @property
    def n(self) -> int:
        return int(self.a_bits.size)

    def __eq__(self, other):
        if not isinstance(other, Transcript):
            return NotImplemented
        return np.array_equal(self.a_bits, other.a_bits) and np.array_equal(
            self.b_bits, other.b_bits
        )


def clean_transcript(proto: MarkovianProtocol, x0: int = 0) -> Transcript:
    """Noiseless execution of the protocol starting from the x0 convention."""
    if x0 not in (0, 1):
        raise ValueError(f"x0 must be 0 or 1, got {x0}")
    ca = proto.alice_codes()
    cb = proto.bob_codes()
    n = proto.n
    a = np.empty(n, dtype=np.uint8)
    b = np.empty(n, dtype=np.uint8)
    prev = x0
    for i in range(n):
        fa = int(ca[i])
        ai = (fa & 1) if fa >= 2 else prev ^ (fa & 1)
        fb = int(cb[i])
        bi = (fb & 1) if fb >= 2 else ai ^ (fb & 1)
        a[i] = ai
        b[i] = bi
        prev = bi
    return Transcript(a_bits=a, b_bits=b)


def random_protocol(n: int, stuck_prob: float, seed: int) -> MarkovianProtocol:
    """Draw each position stuck with probability stuck_prob, uniform within its class."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if not (0.0 <= stuck_prob <= 1.0):
        raise ValueError(f"stuck_prob must lie in [0, 1], got {stuck_prob}")
    rng = np.random.default_rng(seed)

    def draw() -> tuple[TransmissionFunction, ...]:
        stuck = rng.random(n) < stuck_prob
        low = rng.integers(0, 2, size=n, dtype=np.uint8)
        codes = np.where(stuck, 2 + low, low).astype(np.uint8)
        return funcs_from_codes(codes)

    alice = draw()
    bob = draw()
    return MarkovianProtocol(n=n, alice_fns=alice, bob_fns=bob)


def pack_functions(fns) -> Bits:
    """Pack a function list into 2 bits per entry (high bit = stuck flag)."""
    w = BitWriter()
    for f in fns:
        w.write_uint(int(TransmissionFunction(f)), 2)
    return w.getbits()


def unpack_functions(bits: Bits) -> tuple[TransmissionFunction, ...]:
    """Inverse of pack_functions."""
    if len(bits) % 2 != 0:
        raise ValueError(f"packed function string must have even length, got {len(bits)}")
    r = BitReader(bits)
    return tuple(TransmissionFunction(r.read_uint(2)) for _ in range(len(bits) // 2))


# --- protocol file format -----------------------------------------------------
# header line `n=<int>`, then one line per party of n characters from {1,2,3,4}
# giving the 1-based mu index at each position (Alice first).

def write_protocol(proto: MarkovianProtocol, path) -> None:
    lines = [
        f"n={proto.n}",
        "".join(str(int(f) + 1) for f in proto.alice_fns),
        "".join(str(int(f) + 1) for f in proto.bob_fns),
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_protocol(path) -> MarkovianProtocol:
    raw = Path(path).read_text().splitlines()
    lines = [ln.strip() for ln in raw if ln.strip()]
    if len(lines) != 3 or not lines[0].startswith("n="):
        raise ValueError("protocol file must have a n=<int> header and two function lines")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise ValueError(f"bad protocol header: {lines[0]!r}") from None

    def parse(line: str) -> tuple[TransmissionFunction, ...]:
        if len(line) != n or any(c not in "1234" for c in line):
            raise ValueError(f"function line must be {n} characters from 1234, got {line!r}")
        return tuple(TransmissionFunction(int(c) - 1) for c in line)

    return MarkovianProtocol(n=n, alice_fns=parse(lines[1]), bob_fns=parse(lines[2]))
