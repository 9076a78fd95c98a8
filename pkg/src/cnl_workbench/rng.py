"""Portable pseudo-random generator.

Golden tests require byte-identical corpora and splits across platforms and
Python versions, so all randomness in this package flows through an explicit
64-bit linear congruential generator rather than ``random.Random``.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_MULTIPLIER = 6364136223846793005
_INCREMENT = 1442695040888963407
_MASK = (1 << 64) - 1

T = TypeVar("T")


class Lcg:
    """64-bit LCG (state = state * m + c mod 2^64), seeded directly."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state * _MULTIPLIER + _INCREMENT) & _MASK
        return self._state

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange bound must be positive")
        return self.next_u64() % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.randrange(hi - lo + 1)

    def random(self) -> float:
        return self.next_u64() / float(1 << 64)

    def choice(self, items: Sequence[T]) -> T:
        if not items:
            raise ValueError("choice from empty sequence")
        return items[self.randrange(len(items))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, high index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items: Sequence[T], n: int) -> list[T]:
        """n items without replacement, in draw order."""
        if n > len(items):
            raise ValueError("sample larger than population")
        pool = list(items)
        self.shuffle(pool)
        return pool[:n]


def fold_tokens(seed: int, tokens: Sequence[str]) -> int:
    """Stable 64-bit hash of a token sequence (FNV-1a), mixed with a seed.

    Python's builtin ``hash`` is salted per process; this one is not.
    """
    h = 0xCBF29CE484222325 ^ (seed & _MASK)
    for tok in tokens:
        for b in tok.encode("utf-8"):
            h ^= b
            h = (h * 0x100000001B3) & _MASK
        h ^= 0x1F
        h = (h * 0x100000001B3) & _MASK
    return h
