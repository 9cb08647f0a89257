"""SplitMix64 pseudo-random generator.

SplitMix64 (Steele, Lea, Flood 2014) is fully specified by three constants and
is trivial to port, so every implementation of the generator can reproduce a
program from its seed. Reference outputs are listed in ``docs/rng.md``.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed of the ``index``-th program of a campaign rooted at ``master``."""
    return mix64((master + (index + 1) * GOLDEN_GAMMA) & MASK64)


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def below(self, n: int) -> int:
        """Integer in ``[0, n)`` via the multiply-shift reduction."""
        if n <= 0:
            raise ValueError("below() needs n > 0")
        return (self.next_u64() * n) >> 64

    def randint(self, lo: int, hi: int) -> int:
        """Integer in the closed range ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def chance(self, p: float) -> bool:
        return self.random() < p

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.below(len(seq))]

    def weighted_index(self, weights: Sequence[float]) -> int:
        """Index drawn proportionally to ``weights`` (renormalized)."""
        total = float(sum(weights))
        if not total > 0:
            raise ValueError("weighted_index() needs at least one positive weight")
        r = self.random() * total
        acc = 0.0
        last = 0
        for i, w in enumerate(weights):
            if w <= 0:
                continue
            acc += w
            last = i
            if r < acc:
                return i
        # float round-off can leave r == total
        return last
