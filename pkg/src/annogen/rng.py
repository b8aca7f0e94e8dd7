"""splitmix64: the only source of randomness in the package."""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64(x: int) -> int:
    """First output of a generator seeded with ``x``."""
    return mix64((x + GOLDEN) & MASK64)


class SeededRng:
    def __init__(self, seed: int = 0) -> None:
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def split(self, ordinal: int) -> "SeededRng":
        """Independent stream for a sub-task, derived from the current state."""
        return SeededRng(self.state ^ splitmix64(ordinal))

    def below(self, n: int) -> int:
        """Uniform integer in [0, n); n may be as large as 2**64."""
        if n <= 0:
            raise ValueError("n must be positive")
        if n > 1 << 64:
            raise ValueError("n exceeds 2**64")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next()
            if x < limit:
                return x % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.below(hi - lo + 1)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next() >> 11) * (1.0 / (1 << 53))

    def uniform_open(self, lo: float, hi: float, attempts: int = 64):
        """Float strictly between lo and hi, or None if none was found."""
        for _ in range(attempts):
            u = self.random()
            x = lo * (1.0 - u) + hi * u
            if lo < x < hi:
                return x
        return None

    def coin(self) -> bool:
        return bool(self.next() >> 63)

    def choice(self, seq):
        return seq[self.below(len(seq))]
