"""Pinned portable pseudo-random generator for synthetic sampling.

The stream is xoshiro256** (Blackman & Vigna), seeded by four successive
outputs of splitmix64 applied to the 64-bit seed.  Both algorithms are
fully specified here so an implementation in any language can reproduce
the exact draws:

  splitmix64(state): state += 0x9E3779B97F4A7C15; z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
    return z ^ (z >> 31)

  xoshiro256** step: result = rotl(s1 * 5, 7) * 9; t = s1 << 17;
    s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)

A uniform double in [0, 1) takes the top 53 bits: (result >> 11) * 2**-53.
"""

from __future__ import annotations

__all__ = ["Xoshiro256"]

_MASK = (1 << 64) - 1


def _splitmix64(state: int):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


class Xoshiro256:
    """xoshiro256** with splitmix64 seeding."""

    def __init__(self, seed: int):
        state = seed & _MASK
        words = []
        for _ in range(4):
            state, word = _splitmix64(state)
            words.append(word)
        self._s = words

    def next_uint64(self) -> int:
        s0, s1, s2, s3 = self._s
        x = (s1 * 5) & _MASK
        result = (((x << 7) | (x >> 57)) & _MASK) * 9 & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        self._s = [s0, s1, s2, s3]
        return result

    def next_float(self) -> float:
        return (self.next_uint64() >> 11) * 1.1102230246251565e-16  # 2**-53

    def floats(self, count: int) -> list[float]:
        """A batch of uniforms; one tight loop keeps pure-Python cost low."""
        s0, s1, s2, s3 = self._s
        scale = 1.1102230246251565e-16
        out = []
        append = out.append
        for _ in range(count):
            x = (s1 * 5) & _MASK
            result = (((x << 7) | (x >> 57)) & _MASK) * 9 & _MASK
            t = (s1 << 17) & _MASK
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
            append((result >> 11) * scale)
        self._s = [s0, s1, s2, s3]
        return out
