"""End-to-end simulations of the two reliable-interaction schemes.

Scheme 1 never runs the protocol over the noisy channel: Alice ships her packed
transmission functions through the coding oracle, Bob simulates the clean
transcript locally and feeds his half back.

Scheme 2 runs the protocol once over the noisy channel, then repairs. After the
noise vectors are exchanged, each party knows where transmissions were hit but
not how errors propagated through the counterpart's functions. Propagation is
captured by the difference process D between the noisy and clean runs:

    D_a[i] = 0 if Alice is stuck at i else D_b[i-1] ^ z_b[i-1]
    D_b[i] = 0 if Bob  is stuck at i else D_a[i]   ^ z_a[i]

(z_b[-1] = 0, D_b[-1] = 0). Whoever knows both noise vectors, their own stuck
positions, and the counterpart's stuck positions can replay D and cancel it.
The counterpart's stuck flags only matter until the first one after each fresh
error, so each party describes, per segment of the relevant combined error
indicator, just the first stuck offset; the codec compresses those.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    STREAM_ORACLE,
    CostLedger,
    NoisePair,
    OracleFailureError,
    oracle_code_cost,
    oracle_deliver,
    oracle_slepian_wolf_cost,
    sample_noise,
    substream,
    transmit_bsc,
)
from .protocol import (
    MarkovianProtocol,
    Transcript,
    apply_codes,
    clean_transcript,
    pack_functions,
    unpack_functions,
)
from .stuck_codec import decode_with_residual, encode


class InconsistentStuckValueError(RuntimeError):
    """A reconstructed stuck constant contradicts the conveyed value."""


@dataclass(frozen=True)
class SimulationResult:
    """Outcome of one simulated run, with exact channel-use accounting."""

    recovered_by_alice: Transcript
    recovered_by_bob: Transcript
    ledger: CostLedger
    success: bool
    scheme: int
    n: int
    eps: float
    K: int | None
    seed: int | None
    stuck_bits_ab: int = 0
    stuck_bits_ba: int = 0

    def report_row(self) -> dict:
        return {
            "scheme": self.scheme,
            "n": self.n,
            "eps": self.eps,
            "K": "" if self.K is None else self.K,
            "seed": "" if self.seed is None else self.seed,
            "success": self.success,
            "channel_uses": self.ledger.channel_uses,
            "rate": self.ledger.rate if self.ledger.channel_uses > 0 else "",
            "stuck_bits_ab": self.stuck_bits_ab,
            "stuck_bits_ba": self.stuck_bits_ba,
        }


def extract_stuck_indicator(fns) -> np.ndarray:
    """phi[i] = 1 iff position i's transmission function is constant."""
    return np.asarray([1 if int(f) >= 2 else 0 for f in fns], dtype=np.uint8)


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"schemes require n >= 2, got n={n}")


def noisy_run(proto: MarkovianProtocol, noise: NoisePair, x0: int = 0) -> Transcript:
    """Run the protocol over the noisy channel, errors injected between steps."""
    if noise.n != proto.n:
        raise ValueError(f"noise length {noise.n} != protocol length {proto.n}")
    if x0 not in (0, 1):
        raise ValueError(f"x0 must be 0 or 1, got {x0}")
    ca = proto.alice_codes()
    cb = proto.bob_codes()
    za = noise.z_a
    zb = noise.z_b
    n = proto.n
    xa = np.empty(n, dtype=np.uint8)
    xb = np.empty(n, dtype=np.uint8)
    prev = x0
    for i in range(n):
        fa = int(ca[i])
        ai = (fa & 1) if fa >= 2 else prev ^ (fa & 1)
        fb = int(cb[i])
        ya = ai ^ int(za[i])
        bi = (fb & 1) if fb >= 2 else ya ^ (fb & 1)
        xa[i] = ai
        xb[i] = bi
        prev = bi ^ int(zb[i])
    return Transcript(a_bits=xa, b_bits=xb)


def combined_error_indicator(z_a, z_b, direction: str) -> np.ndarray:
    """Positions whose reconstruction is hit by fresh noise, per direction.

    "b_to_a": errors entering Bob's transmissions, z[i] = z_b[i-1] | z_a[i].
    "a_to_b": errors entering Alice's transmissions, z[i] = z_a[i-1] | z_b[i-1].
    """
    za = np.asarray(z_a, dtype=np.uint8)
    zb = np.asarray(z_b, dtype=np.uint8)
    if za.shape != zb.shape:
        raise ValueError("noise vectors must have equal length")
    shift_a = np.concatenate(([0], za[:-1])).astype(np.uint8)
    shift_b = np.concatenate(([0], zb[:-1])).astype(np.uint8)
    if direction == "b_to_a":
        return shift_b | za
    if direction == "a_to_b":
        return shift_a | shift_b
    raise ValueError(f"direction must be b_to_a or a_to_b, got {direction!r}")


def stuck_mask_from_offsets(z, offsets: list[int], residual: int | None) -> np.ndarray:
    """Rebuild the conveyed-stuck-position mask from decoded per-segment offsets."""
    z = np.asarray(z, dtype=np.uint8)
    mask = np.zeros(z.size, dtype=np.uint8)
    ones = np.flatnonzero(z)
    lengths = np.diff(ones)
    if len(offsets) != lengths.size:
        raise ValueError(f"{len(offsets)} offsets for {lengths.size} segments")
    for start, k, off in zip(ones[:-1].tolist(), lengths.tolist(), offsets):
        if off < k:
            mask[start + off] = 1
    if ones.size:
        k_last = int(z.size - ones[-1])
        if residual is None:
            raise ValueError("residual offset required when z has errors")
        if residual < k_last:
            mask[ones[-1] + residual] = 1
    return mask


def _d_process(phi_a, phi_b, z_a, z_b) -> tuple[np.ndarray, np.ndarray]:
    n = len(z_a)
    d_a = np.empty(n, dtype=np.uint8)
    d_b = np.empty(n, dtype=np.uint8)
    db_prev = 0
    zb_prev = 0
    for i in range(n):
        da = 0 if phi_a[i] else db_prev ^ zb_prev
        db = 0 if phi_b[i] else da ^ int(z_a[i])
        d_a[i] = da
        d_b[i] = db
        db_prev = db
        zb_prev = int(z_b[i])
    return d_a, d_b


def correct_transcript(y, z_a, z_b, stuck_info, own_stuck, side: str,
                       stuck_values=None) -> np.ndarray:
    """Cancel propagated noise out of the received half of a noisy run.

    y is the receiving party's view of the counterpart's transmissions. The
    difference process is replayed with the party's own stuck flags exact and
    the counterpart's represented by stuck_info, the conveyed-first-stuck mask,
    which suffices because the difference dies at the first stuck position
    after each error and stays dead until the next one. side names the
    reconstructing party ("alice" recovers Bob's half). When stuck_values is
    given, reconstructed constants at conveyed positions are checked against it.
    """
    y = np.asarray(y, dtype=np.uint8)
    za = np.asarray(z_a, dtype=np.uint8)
    zb = np.asarray(z_b, dtype=np.uint8)
    info = np.asarray(stuck_info, dtype=np.uint8)
    own = np.asarray(own_stuck, dtype=np.uint8)
    if not (y.shape == za.shape == zb.shape == info.shape == own.shape):
        raise ValueError("all inputs must have equal length")
    if side == "alice":
        d_a, d_b = _d_process(own, info, za, zb)
        xhat = y ^ zb ^ d_b
    elif side == "bob":
        d_a, d_b = _d_process(info, own, za, zb)
        xhat = y ^ za ^ d_a
    else:
        raise ValueError(f"side must be alice or bob, got {side!r}")
    if stuck_values is not None:
        vals = np.asarray(stuck_values, dtype=np.uint8)
        if vals.shape != y.shape:
            raise ValueError("stuck_values must have the same length as y")
        conveyed = np.flatnonzero(info)
        bad = conveyed[xhat[conveyed] != vals[conveyed]]
        if bad.size:
            raise InconsistentStuckValueError(
                f"stuck value mismatch at position {int(bad[0])}"
            )
    return xhat


def simulate_scheme2(proto: MarkovianProtocol, noise: NoisePair, K: int,
                     x0: int = 0, seed: int | None = None,
                     failure_prob: float = 0.0) -> SimulationResult:
    """Scheme 2 on explicit noise: noisy run, noise exchange, stuck repair."""
    _check_n(proto.n)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    n = proto.n
    eps = noise.eps
    ledger = CostLedger(clean_bits=2 * n)
    rng = substream(seed, STREAM_ORACLE) if seed is not None else None

    sent = noisy_run(proto, noise, x0=x0)
    ledger.charge("interaction", 2 * n)
    y_a = transmit_bsc(sent.a_bits, noise.z_a)  # Bob's view of Alice's half
    y_b = transmit_bsc(sent.b_bits, noise.z_b)  # Alice's view of Bob's half

    phi_a = extract_stuck_indicator(proto.alice_fns)
    phi_b = extract_stuck_indicator(proto.bob_fns)
    z_ab = combined_error_indicator(noise.z_a, noise.z_b, "a_to_b")
    z_ba = combined_error_indicator(noise.z_a, noise.z_b, "b_to_a")

    code_ab = encode(z_ab, phi_a, K)
    code_ba = encode(z_ba, phi_b, K)

    failed = False
    try:
        oracle_deliver(noise.z_a, rng, failure_prob)
        ledger.charge("slepian_wolf_za", oracle_slepian_wolf_cost(n, eps))
        oracle_deliver(noise.z_a, rng, failure_prob)
        ledger.charge("feedback_za", oracle_slepian_wolf_cost(n, eps))
        oracle_deliver(noise.z_b, rng, failure_prob)
        ledger.charge("slepian_wolf_zb", oracle_slepian_wolf_cost(n, eps))
        oracle_deliver(noise.z_b, rng, failure_prob)
        ledger.charge("feedback_zb", oracle_slepian_wolf_cost(n, eps))
        oracle_deliver(code_ba, rng, failure_prob)
        ledger.charge("stuck_b_to_a", oracle_code_cost(len(code_ba), eps))
        oracle_deliver(code_ab, rng, failure_prob)
        ledger.charge("stuck_a_to_b", oracle_code_cost(len(code_ab), eps))
    except OracleFailureError:
        failed = True

    if failed:
        # repair impossible; both parties keep their uncorrected views
        rec_alice = Transcript(a_bits=sent.a_bits, b_bits=y_b)
        rec_bob = Transcript(a_bits=y_a, b_bits=sent.b_bits)
    else:
        offs_ba, res_ba = decode_with_residual(code_ba, z_ba, K)
        mask_b = stuck_mask_from_offsets(z_ba, offs_ba, res_ba)
        xb_hat = correct_transcript(y_b, noise.z_a, noise.z_b, mask_b, phi_a, "alice")
        xa_from_b = apply_codes(
            proto.alice_codes(), np.concatenate(([x0], xb_hat[:-1])).astype(np.uint8)
        )
        rec_alice = Transcript(a_bits=xa_from_b, b_bits=xb_hat)

        offs_ab, res_ab = decode_with_residual(code_ab, z_ab, K)
        mask_a = stuck_mask_from_offsets(z_ab, offs_ab, res_ab)
        xa_hat = correct_transcript(y_a, noise.z_a, noise.z_b, mask_a, phi_b, "bob")
        xb_from_a = apply_codes(proto.bob_codes(), xa_hat)
        rec_bob = Transcript(a_bits=xa_hat, b_bits=xb_from_a)

    clean = clean_transcript(proto, x0=x0)
    success = rec_alice == clean and rec_bob == clean
    return SimulationResult(
        recovered_by_alice=rec_alice,
        recovered_by_bob=rec_bob,
        ledger=ledger,
        success=success,
        scheme=2,
        n=n,
        eps=eps,
        K=K,
        seed=seed,
        stuck_bits_ab=len(code_ab),
        stuck_bits_ba=len(code_ba),
    )


def run_scheme2(proto: MarkovianProtocol, eps: float, K: int, seed: int,
                x0: int = 0, failure_prob: float = 0.0) -> SimulationResult:
    """Scheme 2 with noise sampled from the seed's substreams."""
    _check_n(proto.n)
    if not (0.0 <= eps < 0.5):
        raise ValueError(f"eps must lie in [0, 1/2), got {eps}")
    noise = sample_noise(proto.n, eps, seed)
    return simulate_scheme2(proto, noise, K, x0=x0, seed=seed,
                            failure_prob=failure_prob)


def run_scheme1(proto: MarkovianProtocol, eps: float, seed: int,
                x0: int = 0, failure_prob: float = 0.0) -> SimulationResult:
    """Scheme 1: ship Alice's functions, simulate cleanly, feed Bob's half back."""
    _check_n(proto.n)
    if not (0.0 <= eps < 0.5):
        raise ValueError(f"eps must lie in [0, 1/2), got {eps}")
    n = proto.n
    ledger = CostLedger(clean_bits=2 * n)
    rng = substream(seed, STREAM_ORACLE) if seed is not None else None

    packed = pack_functions(proto.alice_fns)
    failed = False
    bob_view: Transcript | None = None
    try:
        delivered = oracle_deliver(packed, rng, failure_prob)
        ledger.charge("function_transfer", oracle_code_cost(len(packed), eps))
        alice_fns = unpack_functions(delivered)
        bob_view = clean_transcript(
            MarkovianProtocol(n=n, alice_fns=alice_fns, bob_fns=proto.bob_fns), x0=x0
        )
        oracle_deliver(bob_view.b_bits, rng, failure_prob)
        ledger.charge("transcript_feedback", oracle_code_cost(n, eps))
    except OracleFailureError:
        failed = True

    if failed:
        zeros = np.zeros(n, dtype=np.uint8)
        rec_alice = Transcript(a_bits=zeros, b_bits=zeros)
        rec_bob = bob_view if bob_view is not None else Transcript(a_bits=zeros, b_bits=zeros)
    else:
        rec_bob = bob_view
        xa = apply_codes(
            proto.alice_codes(),
            np.concatenate(([x0], rec_bob.b_bits[:-1])).astype(np.uint8),
        )
        rec_alice = Transcript(a_bits=xa, b_bits=rec_bob.b_bits)

    clean = clean_transcript(proto, x0=x0)
    success = rec_alice == clean and rec_bob == clean
    return SimulationResult(
        recovered_by_alice=rec_alice,
        recovered_by_bob=rec_bob,
        ledger=ledger,
        success=success,
        scheme=1,
        n=n,
        eps=eps,
        K=None,
        seed=seed,
    )
