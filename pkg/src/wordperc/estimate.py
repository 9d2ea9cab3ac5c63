"""Monte Carlo estimates with Wilson score intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

Z95 = 1.959963984540054  # two-sided 95% normal quantile


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval; well-behaved at 0/0% and 100%."""
    if trials < 1:
        raise DomainError("wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise DomainError("successes out of range")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    margin = (z / denom) * math.sqrt(
        phat * (1 - phat) / trials + z * z / (4 * trials * trials)
    )
    # the bounds are exactly 0 / 1 at the empirical extremes
    lo = 0.0 if successes == 0 else max(0.0, center - margin)
    hi = 1.0 if successes == trials else min(1.0, center + margin)
    return lo, hi


@dataclass(frozen=True)
class Estimate:
    """A Bernoulli-event estimate over independent trials."""

    successes: int
    trials: int
    wall_time_s: float = 0.0
    seed_range: tuple[int, int] | None = None
    label: str = ""

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise DomainError("successes must lie in [0, trials]")

    @property
    def point(self) -> float:
        return self.successes / self.trials

    @property
    def wilson95(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials)

    def covers(self, theta: float) -> bool:
        lo, hi = self.wilson95
        return lo <= theta <= hi

    def to_dict(self) -> dict:
        lo, hi = self.wilson95
        out = {
            "successes": self.successes,
            "trials": self.trials,
            "estimate": self.point,
            "wilson95": [lo, hi],
        }
        if self.label:
            out["label"] = self.label
        if self.seed_range is not None:
            out["stream_ids"] = list(self.seed_range)
        return out


def binomial_tail_geq(n: int, p: float, s: int) -> float:
    """P(Bin(n, p) >= s), exact; benchmark for small window events."""
    if s <= 0:
        return 1.0
    if s > n:
        return 0.0
    return sum(
        math.comb(n, k) * (p**k) * ((1 - p) ** (n - k)) for k in range(s, n + 1)
    )
