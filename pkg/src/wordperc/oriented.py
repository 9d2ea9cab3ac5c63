"""Oriented site percolation on the planar graph and on the macro slab.

Planar graph: vertices {(x, y): x even, x/2 + y even}, oriented edges
u -> u + (2, +-1).  Slab graph: the macro vertex set of the geometry
module, edges u -> u + (2, +-1, +-1).

Window sets (slab): with V the macro vertex set,

    B_n = V n ((n, 2n) x (-2n, 2n) x (0, h))
    L_n = V n ({cL} x [-n, n] x (0, h))      cL = smallest even column > n
    R_n = V n ({cR} x [-n, n] x (0, h))      cR = 2n - 2

The defining column indices n+1 and 2n-1 hold no macro vertices when
their parity is odd, so the columns snap to the nearest even column
inside the box; thin windows B_{n,m} / L_{n,m} / R_{n,m} shrink the
y-extent to (-2m, 2m) and [-m, m].

Reach convention: a vertex transmits only if it is itself open (site
percolation reads every path vertex, endpoints included).  Exploration
sequences instead treat their start set as externally infected - they
never query S - so the oracle equivalence against reach uses
seeded=True, under which sources transmit unconditionally and the reach
set collects vertices at the end of paths with at least one edge.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .estimate import binomial_tail_geq, wilson_interval
from .geometry import is_macro_vertex
from .rng import RngStream

PlanarVertex = tuple[int, int]
SlabVertex = tuple[int, int, int]


def is_planar_vertex(v) -> bool:
    x, y = v
    return x % 2 == 0 and (x // 2 + y) % 2 == 0


def planar_out(v):
    x, y = v
    return ((x + 2, y - 1), (x + 2, y + 1))


def slab_out(v):
    x, y, z = v
    return (
        (x + 2, y - 1, z - 1),
        (x + 2, y - 1, z + 1),
        (x + 2, y + 1, z - 1),
        (x + 2, y + 1, z + 1),
    )


def planar_rect(x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> tuple[PlanarVertex, ...]:
    """Planar vertices in [x_lo, x_hi] x [y_lo, y_hi], sorted."""
    out = []
    for x in range(x_lo + (x_lo % 2), x_hi + 1, 2):
        par = (x // 2) % 2
        y0 = y_lo + ((par - y_lo) % 2)
        for y in range(y0, y_hi + 1, 2):
            out.append((x, y))
    return tuple(out)


def slab_rect(x_rng, y_rng, h: int) -> tuple[SlabVertex, ...]:
    """Macro vertices with x in [x_rng], y in [y_rng], 0 < z < h, sorted."""
    out = []
    for x in range(x_rng[0] + (x_rng[0] % 2), x_rng[1] + 1, 2):
        par = (x // 2) % 2
        y0 = y_rng[0] + ((par - y_rng[0]) % 2)
        for y in range(y0, y_rng[1] + 1, 2):
            z0 = 1 + ((par - 1) % 2)
            for z in range(z0, h, 2):
                out.append((x, y, z))
    return tuple(out)


def snap_left_column(n: int) -> int:
    return n + 1 if (n + 1) % 2 == 0 else n + 2


def snap_right_column(n: int) -> int:
    return 2 * n - 2


@dataclass(frozen=True)
class SlabWindows:
    """The exploration window with its left and right target columns."""

    n: int
    h: int
    m: float | None  # None for the full window, else the thin half-width
    B: tuple[SlabVertex, ...]
    L: tuple[SlabVertex, ...]
    R: tuple[SlabVertex, ...]

    @property
    def B_set(self):
        return frozenset(self.B)


def slab_windows(n: int, h: int) -> SlabWindows:
    if n < 3 or h < 2:
        raise DomainError("slab windows need n >= 3, h >= 2")
    cL, cR = snap_left_column(n), snap_right_column(n)
    B = slab_rect((n + 1, 2 * n - 1), (-2 * n + 1, 2 * n - 1), h)
    L = slab_rect((cL, cL), (-n, n), h)
    R = slab_rect((cR, cR), (-n, n), h)
    return SlabWindows(n, h, None, B, L, R)


def slab_windows_thin(n: int, h: int, m) -> SlabWindows:
    if n < 3 or h < 2:
        raise DomainError("slab windows need n >= 3, h >= 2")
    mm = int(math.ceil(m))
    cL, cR = snap_left_column(n), snap_right_column(n)
    B = slab_rect((n + 1, 2 * n - 1), (-2 * mm + 1, 2 * mm - 1), h)
    L = slab_rect((cL, cL), (-mm, mm), h)
    R = slab_rect((cR, cR), (-mm, mm), h)
    return SlabWindows(n, h, mm, B, L, R)


class OrientedConfig:
    """Open/closed assignment on a finite window of an oriented graph."""

    def __init__(self, kind: str, vertices, open_bits, gamma=None, provenance=None, h=None):
        if kind not in ("planar", "slab"):
            raise DomainError(f"unknown oriented graph kind {kind!r}")
        self.kind = kind
        self.h = h
        self.vertices = tuple(sorted(tuple(v) for v in vertices))
        check = is_planar_vertex if kind == "planar" else (lambda v: is_macro_vertex(v, h))
        for v in self.vertices:
            if not check(v):
                raise DomainError(f"{v} is not a vertex of the {kind} graph")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.open = np.asarray(open_bits, dtype=bool)
        if self.open.shape != (len(self.vertices),):
            raise DomainError("open-bit array shape mismatch")
        self.gamma = gamma
        self.provenance = provenance

    def out_neighbors(self, v):
        return planar_out(v) if self.kind == "planar" else slab_out(v)

    def is_open(self, v) -> bool:
        return bool(self.open[self.index[v]])


def sample_oriented(kind, vertices, gamma, rng: RngStream, h=None) -> OrientedConfig:
    """Each vertex open with probability gamma; bits consumed in sorted
    vertex order."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError("gamma must lie in [0, 1]")
    verts = tuple(sorted(tuple(v) for v in vertices))
    u = rng.uniform_block(0, len(verts))
    return OrientedConfig(
        kind, verts, u < gamma, gamma, (rng.master_seed, rng.stream_id), h=h
    )


def oriented_reach(cfg: OrientedConfig, sources, target=None, seeded=False) -> set:
    """Vertices reachable from the sources along open oriented paths.

    seeded=False: every path vertex including the source must be open;
    a source itself is reached when open (zero-edge path).
    seeded=True: sources transmit unconditionally and are not themselves
    reported; reached means at the end of a path with >= 1 edge whose
    vertices after the source are all open.
    """
    reached = set()
    frontier = []
    src = [tuple(s) for s in sources]
    for s in src:
        if s not in cfg.index:
            raise DomainError(f"source {s} outside the window")
    if seeded:
        frontier = list(src)
    else:
        for s in src:
            if cfg.is_open(s) and s not in reached:
                reached.add(s)
                frontier.append(s)
    while frontier:
        v = frontier.pop()
        for w in cfg.out_neighbors(v):
            if w in cfg.index and cfg.is_open(w) and w not in reached:
                reached.add(w)
                frontier.append(w)
    if target is not None:
        reached &= set(map(tuple, target))
    return reached


def xi_column_reach(cfg: OrientedConfig, A, n: int) -> set[int]:
    """The set of y in [-n, n] with an open oriented path from A to
    (5n, y); n must be even so the target column holds vertices."""
    if n % 2:
        raise DomainError("xi_column_reach needs even n")
    for a in A:
        if a[0] != 0:
            raise DomainError("A must lie on the column x = 0")
    reached = oriented_reach(cfg, A)
    return {y for (x, y) in ((v[0], v[1]) for v in reached) if x == 5 * n and -n <= y <= n}


@dataclass(frozen=True)
class ExplorationState:
    """Final state of an exploration sequence with its decision trace."""

    S: frozenset
    U: frozenset
    V: frozenset
    trace: tuple  # ((vertex, verdict), ...) in query order

    def queried_vertices(self):
        return [z for z, _ in self.trace]

    def no_vertex_queried_twice(self) -> bool:
        qs = self.queried_vertices()
        return len(qs) == len(set(qs))


def explore(S, window, decision, kind="slab") -> ExplorationState:
    """Run the one-vertex-at-a-time exploration to fixation.

    At each step the minimum vertex of the out-boundary of U inside the
    window and outside V is queried; an open verdict joins U, a closed
    one joins V.  S itself is never queried.
    """
    out = planar_out if kind == "planar" else slab_out
    window_set = window if isinstance(window, (set, frozenset)) else frozenset(window)
    U = {tuple(s) for s in S}
    S_frozen = frozenset(U)
    V: set = set()
    heap = []
    in_cand = set()

    def push_out_of(v):
        for w in out(v):
            if w in window_set and w not in U and w not in V and w not in in_cand:
                in_cand.add(w)
                heapq.heappush(heap, w)

    for s in U:
        push_out_of(s)
    trace = []
    while heap:
        z = heapq.heappop(heap)
        in_cand.discard(z)
        if z in U or z in V:
            continue
        verdict = bool(decision(z))
        trace.append((z, verdict))
        if verdict:
            U.add(z)
            push_out_of(z)
        else:
            V.add(z)
    return ExplorationState(S_frozen, frozenset(U), frozenset(V), tuple(trace))


def forward_cone(S, window, kind="slab") -> set:
    """All window vertices reachable from S ignoring openness."""
    out = planar_out if kind == "planar" else slab_out
    window_set = window if isinstance(window, (set, frozenset)) else frozenset(window)
    seen = set()
    stack = [tuple(s) for s in S]
    while stack:
        v = stack.pop()
        for w in out(v):
            if w in window_set and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def sample_seed_set(vertices, density: float, rng: RngStream, counter0: int = 0):
    """Deterministic random subset of ceil(density * |vertices|) vertices."""
    k = max(1, math.ceil(density * len(vertices)))
    return sorted(rng.choose_subset(sorted(vertices), k, counter0))


def crossing_stat(
    trials: int,
    n: int,
    h: int,
    gamma: float,
    delta: float,
    master_seed: int,
    thin: bool = False,
    seed_sampler=None,
) -> dict:
    """Monte Carlo frequency of the right-column crossing event.

    Full windows: the event is |U_inf n R_n| >= |R_n| / 1000.  Thin
    windows (B_{n, n/h}): the event is N > n / 20, with N the number of
    right-column vertices reached.  Reports a Wilson 95% interval.
    """
    win = slab_windows_thin(n, h, n / h) if thin else slab_windows(n, h)
    if not win.L:
        raise DomainError("left column is empty; increase n")
    Rset = set(win.R)
    threshold = (n / 20.0) if thin else (len(win.R) / 1000.0)
    order = tuple(sorted(win.B))
    pos = {v: i for i, v in enumerate(order)}
    successes = 0
    for t in range(trials):
        seed_stream = RngStream(master_seed, 2 * t)
        bit_stream = RngStream(master_seed, 2 * t + 1)
        if seed_sampler is None:
            S = sample_seed_set(win.L, delta, seed_stream)
        else:
            S = seed_sampler(seed_stream, win.L)
        bits = bit_stream.uniform_block(0, len(order)) < gamma
        state = explore(S, win.B_set, lambda z: bits[pos[z]])
        hit = len(state.U & Rset)
        ok = hit > threshold if thin else hit >= threshold
        successes += ok
    lo, hi = wilson_interval(successes, trials)
    return {
        "kind": "crossing",
        "window": "thin" if thin else "full",
        "n": n,
        "h": h,
        "gamma": gamma,
        "delta": delta,
        "trials": trials,
        "successes": successes,
        "frequency": successes / trials,
        "wilson95": [lo, hi],
        "threshold": threshold,
        "right_column_size": len(win.R),
    }


def planar_window_for_xi(n: int, y_margin: int | None = None):
    """Window holding every path relevant to column-5n reach queries."""
    Y = n + (5 * n) // 2 + 2 if y_margin is None else y_margin
    return planar_rect(0, 5 * n, -Y, Y)


def domination_probe(
    gamma: float,
    delta: float,
    n: int,
    trials: int,
    master_seed: int,
    thresholds=None,
) -> dict:
    """Statistical probe of the product-1/2 domination heuristic.

    For random S of density delta on the left column, estimates the
    increasing events {|xi^S_5n n W| >= s} against the exact product-1/2
    benchmark P(Bin(|W|, 1/2) >= s), and the three path events whose
    conjunction reroutes full-line reach through S'.  A probe, not a
    proof: only finitely many increasing events are examined.
    """
    if n % 2 or n < 4:
        raise DomainError("domination probe needs even n >= 4")
    if not 0 < delta < 0.1:
        raise DomainError("delta must lie in (0, 1/10)")
    window = planar_window_for_xi(n)
    verts = tuple(sorted(window))
    col0 = tuple(v for v in verts if v[0] == 0 and -n <= v[1] <= n)
    target_ys = sorted(y for (x, y) in verts if x == 5 * n and -n <= y <= n)
    W = len(target_ys)
    if thresholds is None:
        thresholds = sorted({1, max(1, W // 4), max(1, W // 2)})
    quarter = max(1, (delta / 4) * n)
    seed_density = min(1.0, delta * n / max(1, len(col0)))  # |S| >= delta * n
    counts = {s: 0 for s in thresholds}
    comp = {"s_prime_to_column": 0, "down_diagonal": 0, "up_diagonal": 0, "all_three": 0}
    for t in range(trials):
        S = sample_seed_set(col0, seed_density, RngStream(master_seed, 2 * t))
        cfg = sample_oriented("planar", verts, gamma, RngStream(master_seed, 2 * t + 1))
        xi = xi_column_reach(cfg, S, n)
        for s in thresholds:
            counts[s] += len(xi) >= s
        S_prime = [v for v in S if -n + quarter <= v[1] <= n - quarter]
        reach_sp = oriented_reach(cfg, S_prime) if S_prime else set()
        ok1 = any(v[0] == 5 * n for v in reach_sp)
        low_band = [v for v in col0 if v[1] <= -n + quarter]
        reach_low = oriented_reach(cfg, low_band) if low_band else set()
        ok2 = any(v[0] == 5 * n and v[1] >= n for v in reach_low)
        high_band = [v for v in col0 if v[1] >= n - quarter]
        reach_high = oriented_reach(cfg, high_band) if high_band else set()
        ok3 = any(v[0] == 5 * n and v[1] <= -n for v in reach_high)
        comp["s_prime_to_column"] += ok1
        comp["down_diagonal"] += ok2
        comp["up_diagonal"] += ok3
        comp["all_three"] += ok1 and ok2 and ok3
    events = []
    for s in thresholds:
        lo, hi = wilson_interval(counts[s], trials)
        bench = binomial_tail_geq(W, 0.5, s)
        events.append(
            {
                "threshold": s,
                "frequency": counts[s] / trials,
                "wilson95": [lo, hi],
                "product_half_benchmark": bench,
                "dominates": lo >= bench,
            }
        )
    comps = {}
    for name, c in comp.items():
        lo, hi = wilson_interval(c, trials)
        comps[name] = {"frequency": c / trials, "wilson95": [lo, hi]}
    return {
        "kind": "domination",
        "gamma": gamma,
        "delta": delta,
        "n": n,
        "trials": trials,
        "target_column_size": W,
        "increasing_events": events,
        "path_events": comps,
        "note": "statistical probe of finitely many increasing events, not a proof",
    }
