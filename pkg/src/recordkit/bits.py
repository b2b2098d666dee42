"""Packed bit vectors.

A ``Bits`` value holds a fixed-length 0/1 sequence inside a single Python
integer, with index i stored at bit position i. Every stream type in this
package (simulation traces, leak taps, reconstruction guesses) uses this
representation so that bitwise logic and counting run word-parallel over
arbitrary lengths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Bits:
    value: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative bit count")
        if self.value < 0 or self.value >> self.n:
            raise ValueError("value does not fit in %d bits" % self.n)

    @classmethod
    def from_iterable(cls, bits: Iterable[int]) -> "Bits":
        value = 0
        n = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError("bit sequence contains %r" % (b,))
            value |= b << n
            n += 1
        return cls(value, n)

    @classmethod
    def from_str(cls, text: str) -> "Bits":
        """Parse '0101...'; the leftmost character is index 0."""
        return cls.from_iterable(int(c) for c in text)

    @classmethod
    def coerce(cls, obj) -> "Bits":
        if isinstance(obj, Bits):
            return obj
        if isinstance(obj, str):
            return cls.from_str(obj)
        return cls.from_iterable(obj)

    @classmethod
    def zeros(cls, n: int) -> "Bits":
        return cls(0, n)

    @classmethod
    def ones(cls, n: int) -> "Bits":
        return cls((1 << n) - 1, n)

    @property
    def mask(self) -> int:
        return (1 << self.n) - 1

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __iter__(self) -> Iterator[int]:
        v = self.value
        for _ in range(self.n):
            yield v & 1
            v >>= 1

    def _same_len(self, other: "Bits") -> None:
        if self.n != other.n:
            raise ValueError("length mismatch: %d vs %d" % (self.n, other.n))

    def __xor__(self, other: "Bits") -> "Bits":
        self._same_len(other)
        return Bits(self.value ^ other.value, self.n)

    def __and__(self, other: "Bits") -> "Bits":
        self._same_len(other)
        return Bits(self.value & other.value, self.n)

    def __or__(self, other: "Bits") -> "Bits":
        self._same_len(other)
        return Bits(self.value | other.value, self.n)

    def __invert__(self) -> "Bits":
        return Bits(~self.value & self.mask, self.n)

    def count(self) -> int:
        return self.value.bit_count()

    def fraction(self) -> float:
        if self.n == 0:
            raise ValueError("empty bit vector")
        return self.count() / self.n

    def accuracy(self, other) -> float:
        """Fraction of positions where both vectors agree."""
        other = Bits.coerce(other)
        self._same_len(other)
        if self.n == 0:
            raise ValueError("empty bit vector")
        return 1.0 - (self.value ^ other.value).bit_count() / self.n

    def to01(self) -> str:
        return "".join(str(b) for b in self)
