"""Deterministic PRNG primitives for the toy encoders.

SplitMix64 plus Box-Muller gives bit-reproducible streams with no global
state, so identical seeds produce identical embeddings across processes
and platforms. numpy's Generator is used elsewhere (sampling, synthetic
data); this module exists for the encoder test vectors, which must be
derivable from the written-down recurrence alone.
"""

from __future__ import annotations

import math
import struct

_MASK64 = (1 << 64) - 1

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


class SplitMix64:
    """SplitMix64 stream; first output for seed 0 is 0xE220A8397B1DCDAF."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64
        self._spare_gauss: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform draw in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_gauss(self) -> float:
        """Standard normal via Box-Muller; draws two uniforms per pair."""
        if self._spare_gauss is not None:
            z = self._spare_gauss
            self._spare_gauss = None
            return z
        # u1 in (0, 1] so log(u1) is finite
        u1 = ((self.next_u64() >> 11) + 1) * 2.0**-53
        u2 = self.next_float()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_gauss = r * math.sin(theta)
        return r * math.cos(theta)

    def gauss_vector(self, n: int) -> list[float]:
        return [self.next_gauss() for _ in range(n)]


def fnv1a64(data: bytes) -> int:
    """FNV-1a hash of a byte string, 64-bit variant."""
    h = FNV_OFFSET_BASIS
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & _MASK64
    return h


def text_stream_seed(seed: int, text: str) -> int:
    """Derive a per-prompt stream seed: FNV-1a over (seed LE64 || utf-8 text)."""
    return fnv1a64(struct.pack("<Q", seed & _MASK64) + text.encode("utf-8"))
