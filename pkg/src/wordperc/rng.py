"""Counter-based random number streams.

Reproducibility contract (bit-exact, cross-platform, documented in the
README): a stream is identified by (master_seed, stream_id), both 64-bit.

    base   = mix64(master_seed XOR (GOLDEN * stream_id mod 2^64))
    raw(i) = mix64((base + GOLDEN * (i + 1)) mod 2^64)          i = 0, 1, ...
    u53(i) = (raw(i) >> 11) * 2^-53                             in [0, 1)
    bernoulli(p, i) = u53(i) < p

mix64 is the SplitMix64 finalizer. Distinct (master_seed, stream_id)
pairs give streams that are independent for testing purposes; identical
pairs reproduce identical bit sequences. Trials of a Monte Carlo run own
stream_ids 0..trials-1 so they parallelize without shared state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 2.0 ** -53


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    x &= MASK64
    x ^= x >> 30
    x = (x * _MIX1) & MASK64
    x ^= x >> 27
    x = (x * _MIX2) & MASK64
    x ^= x >> 31
    return x


@dataclass(frozen=True)
class RngStream:
    """Stateless counter-based stream; all draws are pure in (seed, id, i)."""

    master_seed: int
    stream_id: int = 0

    @property
    def base(self) -> int:
        return mix64(self.master_seed ^ ((GOLDEN * self.stream_id) & MASK64))

    def raw(self, i: int) -> int:
        """The i-th 64-bit word of the stream."""
        return mix64((self.base + GOLDEN * (i + 1)) & MASK64)

    def uniform(self, i: int) -> float:
        """The i-th uniform draw in [0, 1), using 53 bits."""
        return (self.raw(i) >> 11) * _INV53

    def bernoulli(self, p: float, i: int) -> bool:
        return self.uniform(i) < p

    def raw_block(self, start: int, count: int) -> np.ndarray:
        """Vectorized raw(start..start+count-1); bit-identical to raw()."""
        base = np.uint64(self.base)
        idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            x = base + idx * np.uint64(GOLDEN)
            x ^= x >> np.uint64(30)
            x *= np.uint64(_MIX1)
            x ^= x >> np.uint64(27)
            x *= np.uint64(_MIX2)
            x ^= x >> np.uint64(31)
        return x

    def uniform_block(self, start: int, count: int) -> np.ndarray:
        return (self.raw_block(start, count) >> np.uint64(11)).astype(np.float64) * _INV53

    def substream(self, stream_id: int) -> "RngStream":
        """Derived stream under the same master seed."""
        return RngStream(self.master_seed, stream_id)

    # -- convenience draws used by samplers ---------------------------------

    def randint_below(self, n: int, i: int) -> int:
        """Uniform integer in [0, n) from draw i (multiply-shift, n < 2^53)."""
        return int(self.uniform(i) * n)

    def choose_subset(self, items, size: int, i0: int = 0):
        """Deterministic partial Fisher-Yates sample of `size` items."""
        pool = list(items)
        n = len(pool)
        if size > n:
            raise ValueError("sample larger than population")
        for j in range(size):
            k = j + self.randint_below(n - j, i0 + j)
            pool[j], pool[k] = pool[k], pool[j]
        return pool[:size]
