"""Card-deck primitives: hands, deals, exact counting and a seedable generator.

Hands are sorted tuples of card ids. Probabilities are
:class:`fractions.Fraction` values; nothing on a verification path touches
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Iterator

Hand = tuple[int, ...]
Rational = Fraction

MASK64 = (1 << 64) - 1


class ParameterError(ValueError):
    """Raised when inputs violate an operation's preconditions."""


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ParameterError(f"binomial needs nonnegative arguments, got ({n}, {k})")
    if k > n:
        return 0
    return comb(n, k)


def hand(cards: Iterable[int]) -> Hand:
    """Canonical form of a card collection; rejects duplicates."""
    h = tuple(sorted(cards))
    if len(set(h)) != len(h):
        raise ParameterError(f"hand has repeated cards: {h}")
    return h


def enumerate_k_subsets(n: int, k: int) -> Iterator[Hand]:
    """All k-subsets of ``range(n)`` in lexicographic order."""
    if k < 0 or k > n:
        raise ParameterError(f"need 0 <= k <= n, got n={n}, k={k}")
    return combinations(range(n), k)


def to_mask(cards: Iterable[int]) -> int:
    m = 0
    for x in cards:
        m |= 1 << x
    return m


def from_mask(mask: int) -> Hand:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class SplitMix64:
    """Counter-based 64-bit generator.

    State transition: ``state += 0x9E3779B97F4A7C15 (mod 2**64)``; the output
    is the state passed through the fixed splitmix64 finalizer. Two generators
    built from the same seed produce identical streams.
    """

    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection sampling."""
        if bound <= 0:
            raise ParameterError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items):
        return items[self.below(len(items))]


@dataclass(frozen=True)
class Deal:
    alice: Hand
    bob: Hand
    cathy: Hand

    def __post_init__(self):
        hands = (self.alice, self.bob, self.cathy)
        if any(len(h) < 1 for h in hands):
            raise ParameterError("every player needs at least one card")
        cards = [x for h in hands for x in h]
        n = len(cards)
        if sorted(cards) != list(range(n)):
            raise ParameterError("hands must partition the deck {0, ..., n-1}")
        if any(tuple(sorted(h)) != h for h in hands):
            raise ParameterError("hands must be sorted")

    @property
    def n(self) -> int:
        return len(self.alice) + len(self.bob) + len(self.cathy)


def check_deal_sizes(n: int, a: int, b: int, c: int) -> None:
    if min(a, b, c) < 1:
        raise ParameterError(f"hand sizes must be >= 1, got ({a}, {b}, {c})")
    if a + b + c != n:
        raise ParameterError(f"a + b + c = {a + b + c} differs from n = {n}")


def random_deal(n: int, a: int, b: int, c: int, seed: int) -> Deal:
    """Uniform (a, b, c)-deal of ``range(n)``, fully determined by ``seed``."""
    check_deal_sizes(n, a, b, c)
    deck = list(range(n))
    SplitMix64(seed).shuffle(deck)
    return Deal(hand(deck[:a]), hand(deck[a:a + b]), hand(deck[a + b:]))
