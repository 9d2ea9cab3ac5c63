"""Site percolation configurations on finite regions.

A Configuration stores one bit per region point, packed LSB-first into
64-bit words by point rank (first coordinate fastest). Sampling consumes
one uniform per site in rank order, so identical (region, p, master_seed,
stream_id) give identical bytes on every platform.

Binary file format (.wpc): magic "WPC1", u32 version=1, u32 dim,
dim x (i64 lo, i64 hi), f64 p, u64 master_seed, u64 stream_id, then
ceil(volume/64) little-endian u64 words of bits. For configurations
without sampling provenance p is written as NaN and the seeds as 0.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError
from .geometry import Region
from .rng import RngStream

MAX_ENUM_SITES = 25


@dataclass(frozen=True)
class Provenance:
    p: float
    master_seed: int
    stream_id: int


@dataclass(frozen=True)
class Configuration:
    """Immutable 0/1 coloring of a region."""

    region: Region
    words: tuple[int, ...]  # packed bits, 64 per word, LSB first
    provenance: Provenance | None = None

    def __post_init__(self):
        need = (self.region.volume + 63) // 64
        if len(self.words) != need:
            raise DomainError("bit count does not match region volume")

    def bit(self, rank: int) -> int:
        return (self.words[rank >> 6] >> (rank & 63)) & 1

    def bit_at(self, pt) -> int:
        return self.bit(self.region.rank(pt))

    def bools(self) -> np.ndarray:
        """Rank-ordered boolean array of the coloring (cached, read-only)."""
        cached = getattr(self, "_bools", None)
        if cached is None:
            raw = np.array(self.words, dtype=np.uint64)
            cached = np.unpackbits(raw.view(np.uint8), bitorder="little")[
                : self.region.volume
            ].astype(bool)
            cached.setflags(write=False)
            object.__setattr__(self, "_bools", cached)
        return cached

    def ones_count(self) -> int:
        return int(self.bools().sum())

    @classmethod
    def from_bools(cls, region: Region, bits: np.ndarray, provenance=None):
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (region.volume,):
            raise DomainError("bit array shape mismatch")
        padded = np.packbits(bits, bitorder="little")
        padded = np.pad(padded, (0, (-len(padded)) % 8))
        words = tuple(int(w) for w in padded.view(np.uint64))
        return cls(region, words, provenance)

    @classmethod
    def from_bits(cls, region: Region, bits, provenance=None):
        return cls.from_bools(region, np.fromiter(bits, dtype=bool, count=region.volume), provenance)


def sample(region: Region, p: float, rng: RngStream) -> Configuration:
    """Bernoulli(p) product sample; site i uses the stream's draw i."""
    if not 0.0 <= p <= 1.0:
        raise DomainError("p must lie in [0, 1]")
    u = rng.uniform_block(0, region.volume)
    return Configuration.from_bools(
        region, u < p, Provenance(p, rng.master_seed, rng.stream_id)
    )


def enumerate_configs(region: Region):
    """All 2^|region| configurations, in bit-rank order of their codes."""
    vol = region.volume
    if vol > MAX_ENUM_SITES:
        raise CapacityError(f"enumerate_configs capped at {MAX_ENUM_SITES} sites")
    n_words = (vol + 63) // 64
    for code in range(1 << vol):
        words = tuple((code >> (64 * w)) & ((1 << 64) - 1) for w in range(n_words))
        yield Configuration(region, words)


def flip_colors(cfg: Configuration) -> Configuration:
    """Complement every site; derived configs carry no provenance."""
    vol = cfg.region.volume
    out = []
    remaining = vol
    for w in cfg.words:
        take = min(64, remaining)
        out.append(w ^ ((1 << take) - 1))
        remaining -= take
    return Configuration(cfg.region, tuple(out), None)


_MAGIC = b"WPC1"


def write_wpc(cfg: Configuration, path: str):
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<I", 1))
        f.write(struct.pack("<I", cfg.region.dim))
        for lo, hi in cfg.region.intervals:
            f.write(struct.pack("<qq", lo, hi))
        if cfg.provenance is None:
            f.write(struct.pack("<dQQ", math.nan, 0, 0))
        else:
            f.write(
                struct.pack(
                    "<dQQ",
                    cfg.provenance.p,
                    cfg.provenance.master_seed,
                    cfg.provenance.stream_id,
                )
            )
        for w in cfg.words:
            f.write(struct.pack("<Q", w))


def read_wpc(path: str) -> Configuration:
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise DomainError(f"{path}: not a WPC1 file")
        (version,) = struct.unpack("<I", f.read(4))
        if version != 1:
            raise DomainError(f"{path}: unsupported version {version}")
        (dim,) = struct.unpack("<I", f.read(4))
        intervals = tuple(struct.unpack("<qq", f.read(16)) for _ in range(dim))
        region = Region(intervals)
        p, seed, stream = struct.unpack("<dQQ", f.read(24))
        n_words = (region.volume + 63) // 64
        words = tuple(struct.unpack("<Q", f.read(8))[0] for _ in range(n_words))
        prov = None if math.isnan(p) else Provenance(p, seed, stream)
        return Configuration(region, words, prov)
