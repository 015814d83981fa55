"""Deterministic 64-bit PRNG for sampling and synthetic data.

The harness needs runs to reproduce bit-for-bit from a seed, independent of
interpreter or numpy version, so the generator is spelled out here rather
than delegated: a splitmix64 expander turns one u64 seed into the state of a
xoshiro256++ stream (public-domain algorithms by Blackman and Vigna). Only
within-implementation determinism is promised.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state, returning (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256(object):
    """xoshiro256++ stream seeded through splitmix64."""

    def __init__(self, seed: int):
        state = seed & _MASK
        words = []
        for _ in range(4):
            state, word = splitmix64(state)
            words.append(word)
        if not any(words):  # the all-zero state is a fixed point
            words[0] = 1
        self._s = words
        self._spare_gaussian = None

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[0] + s[3]) & _MASK, 23) + s[0]) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """A double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, n: int) -> int:
        """An unbiased integer in [0, n), by rejection."""
        if n <= 0:
            raise ValueError(f"below() needs a positive bound, got {n}")
        bound = ((1 << 64) // n) * n
        while True:
            x = self.next_u64()
            if x < bound:
                return x % n

    def gaussian(self) -> float:
        """A standard normal draw (Box-Muller, pairs cached)."""
        if self._spare_gaussian is not None:
            value = self._spare_gaussian
            self._spare_gaussian = None
            return value
        u1 = self.uniform()
        while u1 == 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_gaussian = radius * math.sin(theta)
        return radius * math.cos(theta)

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct integers from [0, n), by partial Fisher-Yates shuffle."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n} items")
        pool = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
