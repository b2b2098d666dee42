import pytest

from recordkit.bits import Bits


def test_pack_and_index():
    b = Bits.from_iterable([1, 0, 1, 1])
    assert b.value == 0b1101
    assert len(b) == 4
    assert [b[i] for i in range(4)] == [1, 0, 1, 1]
    assert list(b) == [1, 0, 1, 1]
    assert b.to01() == "1011"


def test_from_str_roundtrip():
    b = Bits.from_str("0110")
    assert b.to01() == "0110"
    assert Bits.coerce("0110") == b
    assert Bits.coerce(b) is b


def test_ops():
    a = Bits.from_str("1100")
    b = Bits.from_str("1010")
    assert (a ^ b).to01() == "0110"
    assert (a & b).to01() == "1000"
    assert (a | b).to01() == "1110"
    assert (~a).to01() == "0011"
    assert a.count() == 2
    assert a.fraction() == 0.5


def test_accuracy():
    a = Bits.from_str("1111")
    assert a.accuracy("1111") == 1.0
    assert a.accuracy("0000") == 0.0
    assert a.accuracy("1100") == 0.5


def test_length_mismatch():
    with pytest.raises(ValueError):
        Bits.from_str("11") ^ Bits.from_str("111")


def test_bad_bits():
    with pytest.raises(ValueError):
        Bits.from_iterable([0, 2])
    with pytest.raises(ValueError):
        Bits(4, 2)  # value wider than declared
    with pytest.raises(ValueError):
        Bits(0, -1)


def test_zeros_ones():
    assert Bits.zeros(5).count() == 0
    assert Bits.ones(5).count() == 5
    assert Bits.ones(0).n == 0
