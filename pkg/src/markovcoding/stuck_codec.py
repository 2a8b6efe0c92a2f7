"""Compression of first-stuck-position descriptions against shared error patterns.

Both parties see the error indicator z (length n). The ones of z split it into
segments (1, 0^(k-1)) terminated by the next one; the trailing run after the
last error is the residual segment. A segment starting at z-index i with length
k covers stuck-flag positions phi[i + j] for j = 0..k-1, so terminated segments
only ever touch phi[0..n-2] and len(phi) >= n - 1 suffices; the residual's
window is clipped to the available flags.

Per segment the encoder describes the offset of the first stuck position inside
the window, or k for "none". Classes k <= K use a two-part code: a counter
header (N_{k,l} for l < k; N_k and N_{k,k} are inferred from z) followed by the
exact enumerative index of the offset sequence inside its type class. Classes
k > K spend ceil(log2(k+1)) bits per segment, and the residual offset goes out
verbatim. The decoder shares z and K only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitstream import BitReader, Bits, BitWriter, MalformedBitstreamError
from .rates import entropy

_MASS_TOL = 1e-12


class NoSegmentsError(ValueError):
    """Raised when an empirical distribution is requested for an empty class."""


class DegenerateSpectrumError(ValueError):
    """Raised when a spectrum with sum(m * a_m) != 1 is used where mass 1 is required."""


def _ceil_log2(v: int) -> int:
    # ceil(log2(v)) for v >= 1
    return (v - 1).bit_length()


@dataclass(frozen=True)
class Segment:
    """One parsed segment of z: start index, length, first stuck offset (k = none)."""

    start: int
    length: int
    first_stuck_offset: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"segment length must be >= 1, got {self.length}")
        if not (0 <= self.first_stuck_offset <= self.length):
            raise ValueError(
                f"offset {self.first_stuck_offset} outside [0, {self.length}]"
            )


@dataclass(frozen=True)
class SegmentStats:
    """Counters N_{k,l} and totals N_k over the terminated segments of one z."""

    counters: dict[tuple[int, int], int]
    totals: dict[int, int]
    n: int

    def __post_init__(self):
        for k, total in self.totals.items():
            by_l = sum(self.counters.get((k, l), 0) for l in range(k + 1))
            if by_l != total:
                raise ValueError(f"counters for k={k} sum to {by_l}, not N_k={total}")

    def count(self, k: int, l: int) -> int:
        return self.counters.get((k, l), 0)

    def total(self, k: int) -> int:
        return self.totals.get(k, 0)


@dataclass(frozen=True)
class SpectrumVector:
    """Gap-length fractions a_m of a stuck-flag sequence, m = 1..len(a)."""

    a: np.ndarray
    n: int

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=float)
        if arr.ndim != 1:
            raise ValueError("spectrum must be one-dimensional")
        if arr.size and arr.min() < 0:
            raise ValueError(f"spectrum entries must be nonnegative, min={arr.min()}")
        object.__setattr__(self, "a", arr)

    @property
    def mass(self) -> float:
        m = np.arange(1, self.a.size + 1, dtype=float)
        return float(np.dot(m, self.a))

    @property
    def degenerate(self) -> bool:
        return abs(self.mass - 1.0) > _MASS_TOL

    def normalized(self) -> "SpectrumVector":
        mass = self.mass
        if mass <= 0:
            raise DegenerateSpectrumError("cannot normalize a zero-mass spectrum")
        return SpectrumVector(a=self.a / mass, n=self.n)


@dataclass(frozen=True)
class DescriptionLength:
    """Bits per z-position split into its three components."""

    s1: float
    w_over_n: float
    s2: float
    total: float

    def __post_init__(self):
        for name in ("s1", "w_over_n", "s2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if abs(self.total - (self.s1 + self.w_over_n + self.s2)) > 1e-9:
            raise ValueError("total must equal s1 + w_over_n + s2")


def _as_bits(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError(f"{name} entries must be 0 or 1")
    return arr


def _check_lengths(z: np.ndarray, phi: np.ndarray) -> None:
    if phi.size < z.size - 1:
        raise ValueError(
            f"stuck flags too short: len(phi)={phi.size} < len(z)-1={z.size - 1}"
        )


def segment_list(z, phi) -> tuple[list[Segment], Segment | None]:
    """Terminated segments in occurrence order, plus the residual (None if z = 0)."""
    z = _as_bits(z, "z")
    phi = _as_bits(phi, "phi")
    _check_lengths(z, phi)
    ones = np.flatnonzero(z)
    if ones.size == 0:
        return [], None
    phi_ones = np.flatnonzero(phi)

    def first_offset(start: int, window: int) -> int:
        idx = np.searchsorted(phi_ones, start, side="left")
        if idx < phi_ones.size and phi_ones[idx] < start + window:
            return int(phi_ones[idx] - start)
        return -1

    segments = []
    starts = ones[:-1]
    lengths = np.diff(ones)
    for start, k in zip(starts.tolist(), lengths.tolist()):
        off = first_offset(start, k)
        segments.append(Segment(start, k, off if off >= 0 else k))
    last = int(ones[-1])
    k_last = int(z.size - last)
    window = min(k_last, int(phi.size) - last)
    off = first_offset(last, window) if window > 0 else -1
    residual = Segment(last, k_last, off if off >= 0 else k_last)
    return segments, residual


def parse_segments(z, phi) -> SegmentStats:
    """Count N_{k,l} over the terminated segments of z against phi."""
    z = _as_bits(z, "z")
    segments, _ = segment_list(z, phi)
    counters: dict[tuple[int, int], int] = {}
    totals: dict[int, int] = {}
    for seg in segments:
        key = (seg.length, seg.first_stuck_offset)
        counters[key] = counters.get(key, 0) + 1
        totals[seg.length] = totals.get(seg.length, 0) + 1
    return SegmentStats(counters=counters, totals=totals, n=int(z.size))


def empirical_dist(stats: SegmentStats, k: int) -> np.ndarray:
    """pi_k = (N_{k,0}, ..., N_{k,k}) / N_k."""
    n_k = stats.total(k)
    if n_k == 0:
        raise NoSegmentsError(f"no segments of length k={k}")
    return np.array([stats.count(k, l) / n_k for l in range(k + 1)], dtype=float)


def spectrum(phi) -> SpectrumVector:
    """Gap-length fractions of phi, with a virtual one just before position 0."""
    phi = _as_bits(phi, "phi")
    n = int(phi.size)
    a = np.zeros(n, dtype=float)
    ones = np.flatnonzero(phi)
    if ones.size:
        pos = ones + 1  # 1-based positions; virtual one sits at position 0
        prev = np.concatenate(([0], pos[:-1]))
        gaps = pos - prev
        vals, counts = np.unique(gaps, return_counts=True)
        a[vals - 1] = counts / n
    return SpectrumVector(a=a, n=n)


def _suffix_sums(a: np.ndarray) -> np.ndarray:
    # out[l] = sum_{m > l} a_m, for l = 0..len(a)
    out = np.zeros(a.size + 1, dtype=float)
    out[:-1] = np.cumsum(a[::-1])[::-1]
    return out


def pi_bar(a: SpectrumVector, k: int) -> np.ndarray:
    """Expected offset distribution (pi-bar) of a length-k segment under spectrum a."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if abs(a.mass - 1.0) > _MASS_TOL:
        raise DegenerateSpectrumError(f"spectrum mass {a.mass} != 1")
    arr = a.a
    suff = _suffix_sums(arr)
    out = np.empty(k + 1, dtype=float)
    out[:k] = suff[np.minimum(np.arange(k), arr.size)]
    m = np.arange(1, arr.size + 1, dtype=float)
    tail = arr[k:]
    out[k] = float(np.dot(tail, m[k:] - k)) if arr.size > k else 0.0
    return out


def expected_counters(n: int, p: float, a: SpectrumVector, k: int) -> tuple[np.ndarray, float]:
    """(E N_{k,l} for l = 0..k, E N_k) for i.i.d. Bernoulli(p) errors."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    base = n * p * p * (1.0 - p) ** (k - 1)
    return base * pi_bar(a, k), base


def l_bar(a: SpectrumVector, p: float, K: int) -> float:
    """Expected per-position class-entropy cost: sum_{k<=K} p^2 (1-p)^(k-1) H(pi_bar_k)."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    total = 0.0
    for k in range(1, K + 1):
        total += p * p * (1.0 - p) ** (k - 1) * entropy(pi_bar(a, k))
    return total


def kn_schedule(n: int, p: float, beta: float = 0.2) -> int:
    """Truncation depth floor(beta ln n / -ln(1-p)), clamped to at least 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not (0.0 < beta < 1.0):
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    return max(int(beta * math.log(n) / -math.log1p(-p)), 1)


def _header_bits(stats: SegmentStats, K: int) -> int:
    return sum(k * _ceil_log2(stats.total(k) + 1) for k in range(1, K + 1))


def description_length(stats: SegmentStats, K: int) -> DescriptionLength:
    """Per-position description cost split into S1 + W/n + S2."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    n = stats.n
    s1 = 0.0
    s2 = 0.0
    for k, n_k in sorted(stats.totals.items()):
        if n_k == 0:
            continue
        if k <= K:
            s1 += n_k / n * entropy(empirical_dist(stats, k))
        else:
            s2 += n_k / n * _ceil_log2(k + 1)
    w = _header_bits(stats, K)
    assert w <= K * (K + 3) // 2 * _ceil_log2(n + 1)
    return DescriptionLength(s1=s1, w_over_n=w / n, s2=s2, total=s1 + w / n + s2)


# --- enumerative coding of a sequence within its type class -------------------

def _multinomial(counts: list[int]) -> int:
    total = sum(counts)
    out = 1
    rest = total
    for c in counts:
        out *= math.comb(rest, c)
        rest -= c
    return out


def _rank_sequence(seq: list[int], counts: list[int]) -> int:
    counts = list(counts)
    remaining = sum(counts)
    size = _multinomial(counts)
    rank = 0
    for s in seq:
        for t in range(s):
            if counts[t]:
                rank += size * counts[t] // remaining
        size = size * counts[s] // remaining
        counts[s] -= 1
        remaining -= 1
    return rank


def _unrank_sequence(rank: int, counts: list[int]) -> list[int]:
    counts = list(counts)
    remaining = sum(counts)
    size = _multinomial(counts)
    if not (0 <= rank < max(size, 1)):
        raise MalformedBitstreamError(f"rank {rank} outside type class of size {size}")
    out = []
    for _ in range(remaining):
        for t in range(len(counts)):
            if not counts[t]:
                continue
            block = size * counts[t] // remaining
            if rank < block:
                out.append(t)
                size = block
                counts[t] -= 1
                remaining -= 1
                break
            rank -= block
        else:
            raise MalformedBitstreamError("rank exhausted the type class")
    return out


def encode(z, phi, K: int) -> Bits:
    """Describe all first-stuck offsets of (z, phi) against side information z."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    z = _as_bits(z, "z")
    segments, residual = segment_list(z, phi)
    by_class: dict[int, list[int]] = {}
    for seg in segments:
        by_class.setdefault(seg.length, []).append(seg.first_stuck_offset)
    w = BitWriter()
    for k in range(1, K + 1):
        offsets = by_class.get(k, [])
        width = _ceil_log2(len(offsets) + 1)
        for l in range(k):
            w.write_uint(sum(1 for o in offsets if o == l), width)
    for k in sorted(by_class):
        if k > K:
            continue
        offsets = by_class[k]
        counts = [sum(1 for o in offsets if o == l) for l in range(k + 1)]
        w.write_uint(_rank_sequence(offsets, counts), _ceil_log2(_multinomial(counts)))
    for seg in segments:
        if seg.length > K:
            w.write_uint(seg.first_stuck_offset, _ceil_log2(seg.length + 1))
    if residual is not None:
        w.write_uint(residual.first_stuck_offset, _ceil_log2(residual.length + 1))
    return w.getbits()


def decode_with_residual(code: Bits, z, K: int) -> tuple[list[int], int | None]:
    """Recover terminated-segment offsets (occurrence order) and the residual offset."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    z = _as_bits(z, "z")
    ones = np.flatnonzero(z)
    lengths = np.diff(ones).tolist() if ones.size else []
    class_sizes: dict[int, int] = {}
    for k in lengths:
        class_sizes[k] = class_sizes.get(k, 0) + 1
    r = BitReader(code)
    class_counts: dict[int, list[int]] = {}
    for k in range(1, K + 1):
        n_k = class_sizes.get(k, 0)
        width = _ceil_log2(n_k + 1)
        head = [r.read_uint(width) for _ in range(k)]
        last = n_k - sum(head)
        if last < 0:
            raise MalformedBitstreamError(f"counters for k={k} exceed N_k={n_k}")
        class_counts[k] = head + [last]
    class_offsets: dict[int, list[int]] = {}
    for k in sorted(class_sizes):
        if k > K:
            continue
        counts = class_counts[k]
        rank = r.read_uint(_ceil_log2(_multinomial(counts)))
        class_offsets[k] = _unrank_sequence(rank, counts)
    queues = {k: iter(v) for k, v in class_offsets.items()}
    offsets = []
    for k in lengths:
        k = int(k)
        if k <= K:
            offsets.append(next(queues[k]))
        else:
            val = r.read_uint(_ceil_log2(k + 1))
            if val > k:
                raise MalformedBitstreamError(f"offset {val} exceeds segment length {k}")
            offsets.append(val)
    residual = None
    if ones.size:
        k_last = int(z.size - ones[-1])
        residual = r.read_uint(_ceil_log2(k_last + 1))
        if residual > k_last:
            raise MalformedBitstreamError(
                f"residual offset {residual} exceeds length {k_last}"
            )
    if r.remaining:
        raise MalformedBitstreamError(f"{r.remaining} unread bits after decoding")
    return offsets, residual


def decode(code: Bits, z, K: int) -> list[int]:
    """First-stuck offsets of the terminated segments, in occurrence order."""
    return decode_with_residual(code, z, K)[0]
