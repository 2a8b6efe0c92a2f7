"""Binary symmetric channel noise and idealized reliable-transfer oracles.

Noise is reproducible: a run seed plus a small stream id expands through
SeedSequence spawn keys, so the two noise directions (and any auxiliary draws)
come from provably independent substreams of the same named generator.

The oracles do not implement real channel codes. They deliver their payload
intact and charge the asymptotic number of channel uses (limit form, real
valued); an optional failure probability exercises the error path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .rates import binary_entropy

STREAM_NOISE_A = 0
STREAM_NOISE_B = 1
STREAM_ORACLE = 2


class OracleFailureError(RuntimeError):
    """An idealized transfer was flagged as failed by the failure knob."""


def substream(seed: int, stream_id: int) -> np.random.Generator:
    """Independent generator for (seed, stream_id), stable across runs."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream_id,))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class NoisePair:
    """One error vector per direction, i.i.d. Bernoulli(eps) each."""

    z_a: np.ndarray
    z_b: np.ndarray
    eps: float
    seed: int

    def __post_init__(self):
        a = np.asarray(self.z_a, dtype=np.uint8)
        b = np.asarray(self.z_b, dtype=np.uint8)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("noise vectors must be 1-d and of equal length")
        object.__setattr__(self, "z_a", a)
        object.__setattr__(self, "z_b", b)

    @property
    def n(self) -> int:
        return int(self.z_a.size)


def sample_noise(n: int, eps: float, seed: int) -> NoisePair:
    """Draw the two directions from independent substreams of the seed."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if not (0.0 <= eps <= 1.0):
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    z_a = (substream(seed, STREAM_NOISE_A).random(n) < eps).astype(np.uint8)
    z_b = (substream(seed, STREAM_NOISE_B).random(n) < eps).astype(np.uint8)
    return NoisePair(z_a=z_a, z_b=z_b, eps=eps, seed=seed)


def transmit_bsc(x, z) -> np.ndarray:
    """Elementwise XOR of payload and error vector."""
    xa = np.asarray(x, dtype=np.uint8)
    za = np.asarray(z, dtype=np.uint8)
    if xa.shape != za.shape:
        raise ValueError(f"length mismatch: {xa.shape} vs {za.shape}")
    return xa ^ za


def oracle_code_cost(bits: float, eps: float) -> float:
    """Channel uses to push `bits` through a capacity-achieving code."""
    if bits < 0:
        raise ValueError(f"bits must be nonnegative, got {bits}")
    if not (0.0 <= eps < 0.5):
        raise ValueError(f"eps must lie in [0, 1/2), got {eps}")
    return bits / (1.0 - binary_entropy(eps))


def oracle_slepian_wolf_cost(n: int, eps: float) -> float:
    """Channel uses to sync one length-n Bernoulli(eps) error vector."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if not (0.0 <= eps < 0.5):
        raise ValueError(f"eps must lie in [0, 1/2), got {eps}")
    h = binary_entropy(eps)
    return n * h / (1.0 - h)


def oracle_deliver(payload, rng: np.random.Generator | None = None,
                   failure_prob: float = 0.0):
    """Return the payload unchanged, or raise if the failure knob fires."""
    if not (0.0 <= failure_prob <= 1.0):
        raise ValueError(f"failure_prob must lie in [0, 1], got {failure_prob}")
    if failure_prob > 0.0:
        if rng is None:
            raise ValueError("failure_prob > 0 requires an rng")
        if rng.random() < failure_prob:
            raise OracleFailureError("idealized transfer failed")
    return payload


@dataclass
class CostLedger:
    """Single-writer channel-use accounting for one simulation run."""

    clean_bits: int
    entries: list[tuple[str, float]] = field(default_factory=list)

    def __post_init__(self):
        if self.clean_bits < 0:
            raise ValueError(f"clean_bits must be nonnegative, got {self.clean_bits}")

    def charge(self, label: str, uses: float) -> None:
        if uses < 0:
            raise ValueError(f"channel uses must be nonnegative, got {uses}")
        self.entries.append((label, float(uses)))

    @property
    def channel_uses(self) -> float:
        return float(sum(uses for _, uses in self.entries))

    @property
    def rate(self) -> float:
        total = self.channel_uses
        if total <= 0:
            raise ValueError("rate undefined: no channel uses recorded")
        return self.clean_bits / total

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label", "channel_uses"])
            for label, uses in self.entries:
                writer.writerow([label, repr(uses)])
