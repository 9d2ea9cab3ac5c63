"""Independent brute-force implementations for small instances.

These are deliberately written against the definitions (explicit path
enumeration over point tuples) and share no machinery with the search
module, so they can act as oracles for it.
"""

from __future__ import annotations

from .config import Configuration
from .geometry import Region, neighbors
from .search import SourceSet, _letters


def saw_reach_bruteforce(
    cfg: Configuration, sources: SourceSet, max_index: int, allowed=None
) -> set:
    """All (vertex, index) pairs reachable along self-avoiding paths.

    Plain recursive enumeration; exponential, for oracle use only.
    """
    region = cfg.region
    ok = (lambda p: True) if allowed is None else (lambda p: p in allowed)
    reached = set()

    def extend(v, t, letters, seen):
        reached.add((v, t))
        if t == max_index:
            return
        for u in neighbors(v, region):
            if u in seen or not ok(u):
                continue
            if cfg.bit_at(u) != letters[t + 1]:
                continue
            seen.add(u)
            extend(u, t + 1, letters, seen)
            seen.remove(u)

    for v, t0, wid in sources.entries:
        if t0 > max_index or not ok(v):
            continue
        letters = _letters(sources.words[wid], max_index)
        if cfg.bit_at(v) != letters[t0]:
            continue
        extend(v, t0, letters, {v})
    return reached


def connected_bruteforce(cfg: Configuration, S, region: Region | None = None) -> set:
    """1-connected set via explicit simple-path enumeration."""
    region = region or cfg.region
    reached = set()

    def walk(v, seen):
        reached.add(v)
        for u in neighbors(v, region):
            if u not in seen and cfg.bit_at(u) == 1:
                seen.add(u)
                walk(u, seen)
                seen.remove(u)

    for x in S:
        if cfg.bit_at(x) == 1:
            walk(x, {x})
    return reached


def event_probability_exhaustive(region: Region, p: float, event) -> float:
    """Exact P_p(event) by summing over all configurations of the region."""
    from .config import enumerate_configs

    total = 0.0
    vol = region.volume
    for cfg in enumerate_configs(region):
        ones = cfg.ones_count()
        weight = (p**ones) * ((1 - p) ** (vol - ones))
        if event(cfg):
            total += weight
    return total
