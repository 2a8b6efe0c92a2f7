"""Tests for transmission functions, transcripts, and protocol serialization."""

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from markovcoding.bitstream import Bits
from markovcoding.channel import NoisePair, transmit_bsc
from markovcoding.protocol import (
    MarkovianProtocol,
    Transcript,
    TransmissionFunction,
    apply,
    apply_codes,
    clean_transcript,
    codes_of,
    funcs_from_codes,
    is_linear,
    pack_functions,
    random_protocol,
    read_protocol,
    unpack_functions,
    write_protocol,
)
from markovcoding.schemes import noisy_run

Mu1, Mu2, Mu3, Mu4 = (TransmissionFunction.Mu1, TransmissionFunction.Mu2,
                      TransmissionFunction.Mu3, TransmissionFunction.Mu4)

_TRUTH_TABLE = {
    (Mu1, 0): 0, (Mu1, 1): 1,
    (Mu2, 0): 1, (Mu2, 1): 0,
    (Mu3, 0): 0, (Mu3, 1): 0,
    (Mu4, 0): 1, (Mu4, 1): 1,
}

_funcs = st.sampled_from([Mu1, Mu2, Mu3, Mu4])


class TestApply:
    """The four-function truth table, scalar and vectorized."""

    def test_xor_one_flips(self):
        assert apply(Mu2, 1) == 0

    def test_constant_zero_ignores_input(self):
        assert apply(Mu3, 1) == 0

    def test_identity(self):
        assert apply(Mu1, 0) == 0

    def test_full_truth_table(self):
        for (f, y), want in _TRUTH_TABLE.items():
            assert apply(f, y) == want

    def test_vectorized_matches_scalar(self):
        for f in (Mu1, Mu2, Mu3, Mu4):
            codes = codes_of([f, f])
            got = apply_codes(codes, np.array([0, 1], dtype=np.uint8))
            assert got.tolist() == [apply(f, 0), apply(f, 1)]


class TestIsLinear:
    """Linearity flags: XOR maps are linear, constants are stuck."""

    def test_identity_is_linear(self):
        assert is_linear(Mu1)

    def test_flip_is_linear(self):
        assert is_linear(Mu2)

    def test_constants_are_stuck(self):
        assert not is_linear(Mu3)
        assert not is_linear(Mu4)


class TestCleanTranscript:
    """Noiseless recursion traces."""

    def test_all_constant_zero(self):
        proto = MarkovianProtocol(3, (Mu3,) * 3, (Mu3,) * 3)
        for x0 in (0, 1):
            t = clean_transcript(proto, x0)
            assert t.a_bits.tolist() == [0, 0, 0]
            assert t.b_bits.tolist() == [0, 0, 0]

    def test_alternating_flip_trace(self):
        proto = MarkovianProtocol(2, (Mu2, Mu2), (Mu1, Mu1))
        t = clean_transcript(proto, 0)
        assert t.a_bits.tolist() == [1, 0]
        assert t.b_bits.tolist() == [1, 0]

    def test_single_step_trace(self):
        proto = MarkovianProtocol(1, (Mu1,), (Mu4,))
        t = clean_transcript(proto, 1)
        assert t.a_bits.tolist() == [1]
        assert t.b_bits.tolist() == [1]

    def test_deterministic(self):
        proto = random_protocol(40, 0.4, seed=11)
        assert clean_transcript(proto) == clean_transcript(proto)

    def test_linear_prefix_cancels_cumulative_noise(self):
        # with both parties linear, the noisy-run views differ from the clean
        # transcript by running XORs of the channel errors
        n = 64
        proto = random_protocol(n, 0.0, seed=3)
        rng = np.random.default_rng(5)
        z_a = rng.integers(0, 2, n).astype(np.uint8)
        z_b = rng.integers(0, 2, n).astype(np.uint8)
        sent = noisy_run(proto, NoisePair(z_a, z_b, 0.1, 0))
        clean = clean_transcript(proto)
        y_a = transmit_bsc(sent.a_bits, z_a)
        y_b = transmit_bsc(sent.b_bits, z_b)
        cum_a = np.bitwise_xor.accumulate(z_a)
        cum_b = np.bitwise_xor.accumulate(z_b)
        cum_b_prev = np.concatenate(([0], cum_b[:-1])).astype(np.uint8)
        assert np.array_equal(clean.b_bits, y_b ^ cum_a ^ cum_b)
        assert np.array_equal(clean.a_bits, y_a ^ cum_a ^ cum_b_prev)


class TestRandomProtocol:
    """Seeded generation with the requested stuck fraction."""

    def test_zero_stuck_prob_all_linear(self):
        proto = random_protocol(50, 0.0, seed=0)
        assert all(is_linear(f) for f in proto.alice_fns + proto.bob_fns)

    def test_unit_stuck_prob_none_linear(self):
        proto = random_protocol(50, 1.0, seed=0)
        assert not any(is_linear(f) for f in proto.alice_fns + proto.bob_fns)

    def test_stuck_fraction_concentrates(self):
        proto = random_protocol(10**5, 0.3, seed=123)
        fraction = np.mean([not is_linear(f)
                            for f in proto.alice_fns + proto.bob_fns])
        assert abs(fraction - 0.3) < 0.01

    def test_reproducible(self):
        a = random_protocol(30, 0.5, seed=9)
        b = random_protocol(30, 0.5, seed=9)
        assert a.alice_fns == b.alice_fns and a.bob_fns == b.bob_fns

    def test_seed_changes_draw(self):
        a = random_protocol(30, 0.5, seed=1)
        b = random_protocol(30, 0.5, seed=2)
        assert a.alice_fns != b.alice_fns or a.bob_fns != b.bob_fns


class TestPackFunctions:
    """Two-bit-per-function packing and its inverse."""

    def test_code_table(self):
        assert pack_functions([Mu1, Mu4]) == Bits.from01("0011")

    def test_empty(self):
        assert pack_functions([]) == Bits.from01("")

    def test_length_is_two_per_function(self):
        fns = [Mu2] * 17
        assert len(pack_functions(fns)) == 34

    def test_round_trip_exhaustive_short_lists(self):
        for n in range(7):
            for fns in itertools.product((Mu1, Mu2, Mu3, Mu4), repeat=n):
                assert unpack_functions(pack_functions(fns)) == fns

    @given(st.lists(_funcs, max_size=40))
    def test_round_trip_random(self, fns):
        assert unpack_functions(pack_functions(tuple(fns))) == tuple(fns)


class TestProtocolValidation:
    """Container invariants for protocols and transcripts."""

    def test_rejects_wrong_function_count(self):
        with pytest.raises(ValueError):
            MarkovianProtocol(2, (Mu1,), (Mu1, Mu2))

    def test_rejects_mismatched_transcript_halves(self):
        with pytest.raises(ValueError):
            Transcript(np.array([0, 1], dtype=np.uint8),
                       np.array([0], dtype=np.uint8))

    def test_codes_round_trip(self):
        fns = (Mu3, Mu1, Mu4, Mu2)
        assert funcs_from_codes(codes_of(fns)) == fns


class TestProtocolFile:
    """One-header-two-lines file format."""

    def test_round_trip(self, tmp_path):
        proto = random_protocol(25, 0.5, seed=42)
        path = tmp_path / "proto.txt"
        write_protocol(proto, path)
        assert read_protocol(path) == proto

    def test_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("m=3\n123\n123\n")
        with pytest.raises(ValueError):
            read_protocol(path)

    def test_rejects_bad_symbol(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("n=3\n125\n123\n")
        with pytest.raises(ValueError):
            read_protocol(path)

    def test_rejects_wrong_line_length(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("n=3\n12\n123\n")
        with pytest.raises(ValueError):
            read_protocol(path)
