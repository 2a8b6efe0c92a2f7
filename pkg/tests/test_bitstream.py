"""Tests for the exact bit-level writer, reader, and immutable bit string."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from markovcoding.bitstream import BitReader, Bits, BitWriter, MalformedBitstreamError

_fields = st.lists(
    st.integers(min_value=1, max_value=24).flatmap(
        lambda w: st.tuples(st.integers(min_value=0, max_value=(1 << w) - 1),
                            st.just(w))
    ),
    max_size=30,
)


class TestBits:
    """Text round trips, equality, and length of the immutable bit string."""

    def test_text_round_trip(self):
        for s in ("", "0", "1", "10110", "0" * 9, "1" * 17):
            assert Bits.from01(s).to01() == s

    def test_length_counts_bits_exactly(self):
        assert len(Bits.from01("10110")) == 5

    def test_equality_includes_length(self):
        assert Bits.from01("10") != Bits.from01("100")
        assert Bits.from01("101") == Bits.from01("101")

    def test_hashable(self):
        assert len({Bits.from01("1"), Bits.from01("1"), Bits.from01("0")}) == 2

    def test_rejects_inconsistent_sizes(self):
        with pytest.raises(ValueError):
            Bits(b"\x00", 9)


class TestBitWriter:
    """MSB-first accumulation of fixed-width unsigned integers."""

    def test_msb_first_layout(self):
        w = BitWriter()
        w.write_uint(0b101, 3)
        assert w.getbits() == Bits.from01("101")

    def test_concatenation_order(self):
        w = BitWriter()
        w.write_uint(0b1, 1)
        w.write_uint(0b00, 2)
        w.write_uint(0b11, 2)
        assert w.getbits() == Bits.from01("10011")

    def test_zero_width_is_a_no_op(self):
        w = BitWriter()
        w.write_uint(0, 0)
        assert len(w) == 0 and w.getbits() == Bits()

    def test_rejects_overflow(self):
        w = BitWriter()
        with pytest.raises(ValueError):
            w.write_uint(4, 2)

    def test_rejects_negative_value(self):
        w = BitWriter()
        with pytest.raises(ValueError):
            w.write_uint(-1, 2)


class TestBitReader:
    """Sequential decoding mirrors the written layout."""

    def test_reads_back_written_fields(self):
        w = BitWriter()
        w.write_uint(5, 3)
        w.write_uint(0, 4)
        w.write_uint(1023, 10)
        r = BitReader(w.getbits())
        assert (r.read_uint(3), r.read_uint(4), r.read_uint(10)) == (5, 0, 1023)
        assert r.remaining == 0

    def test_zero_width_read(self):
        r = BitReader(Bits.from01("1"))
        assert r.read_uint(0) == 0
        assert r.remaining == 1

    def test_overrun_raises(self):
        r = BitReader(Bits.from01("101"))
        with pytest.raises(MalformedBitstreamError):
            r.read_uint(4)

    @given(_fields)
    def test_round_trip_any_field_sequence(self, fields):
        w = BitWriter()
        for value, width in fields:
            w.write_uint(value, width)
        bits = w.getbits()
        assert len(bits) == sum(width for _, width in fields)
        r = BitReader(bits)
        for value, width in fields:
            assert r.read_uint(width) == value
        assert r.remaining == 0
