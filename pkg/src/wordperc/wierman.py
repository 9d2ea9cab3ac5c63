"""Executable spanning-forest coupling.

Two configurations (omega, omega_tilde) are grown together so that each
is a Bernoulli(p) product sample, while every vertex 1-connected to the
source set S in omega is word-connected to a source in omega_tilde, with
the connecting forest branch as an explicit certificate.

Exploration: repeatedly take the minimum (in rank order) unexplored
vertex y' that neighbors an explored 1-vertex, attach it under its
minimum explored 1-neighbor y at forest depth d+1, and draw the pair of
colors from the three-way table (w = word of y's tree, read at d+1):

    (1, w[d+1])   with prob p
    (0, 0)        with prob 1-2p if w[d+1] = 0, else 1-p
    (0, 1)        with prob p    if w[d+1] = 0

Sources are handled by the same table at index 0 (so omega_tilde starts
reading the word on the source itself).  The alternative convention that
reads only from index 1 leaves the source's omega_tilde color an
independent Bernoulli(p) draw; it is available via start_index=1.
Undiscovered vertices are filled i.i.d. at the end, in rank order.
Every random decision consumes the stream's next uniform, so identical
inputs reproduce identical pairs bit for bit.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .config import Configuration, Provenance
from .errors import DomainError
from .geometry import Region, neighbor_ranks
from .rng import RngStream
from .search import one_connected_set
from .words import Word, WordGenerator


@dataclass(frozen=True)
class ForestNode:
    parent: tuple | None
    root: tuple
    depth: int


class CoupledPair:
    """Result of one coupling run; array-backed, views built on demand."""

    def __init__(self, region, omega, omega_tilde, parent, root_idx, depth,
                 explored, sources, words, start_index, provenance):
        self.region = region
        self.omega = omega
        self.omega_tilde = omega_tilde
        self._parent = parent          # rank -> parent rank, -1 root, -2 none
        self._root_idx = root_idx      # rank -> source index, -1 none
        self._depth = depth            # rank -> forest depth, -1 none
        self._explored = explored      # bool per rank
        self.sources = sources         # tuple of points
        self.words = words             # tuple aligned with sources
        self.start_index = start_index
        self.provenance = provenance

    def explored_set(self):
        return {self.region.unrank(int(r)) for r in np.nonzero(self._explored)[0]}

    def forest(self) -> dict:
        out = {}
        for r in np.nonzero(self._explored)[0]:
            r = int(r)
            par = self._parent[r]
            out[self.region.unrank(r)] = ForestNode(
                None if par < 0 else self.region.unrank(int(par)),
                self.sources[self._root_idx[r]],
                int(self._depth[r]),
            )
        return out

    def branch(self, v) -> list:
        """Forest path from v's root source down to v."""
        r = self.region.rank(v)
        if not self._explored[r]:
            raise DomainError(f"{v} was not explored")
        path = []
        while r >= 0:
            path.append(self.region.unrank(int(r)))
            r = self._parent[r]
        return path[::-1]


def _letter(word, i: int) -> int:
    if isinstance(word, Word):
        if i >= word.length:
            raise DomainError("coupling word too short; use a generator")
        return word[i]
    if isinstance(word, WordGenerator):
        return word.bit(i)
    raise DomainError("words must be Word or WordGenerator instances")


def wierman_couple(
    region: Region,
    S,
    words,
    p: float,
    rng: RngStream,
    start_index: int = 0,
) -> CoupledPair:
    """Grow the coupled pair on `region` from sources S with their words."""
    if not 0.0 <= p <= 0.5:
        raise DomainError(
            "coupling table needs p <= 1/2; flip colors to fold p into range"
        )
    if start_index not in (0, 1):
        raise DomainError("start_index must be 0 or 1")
    sources = [tuple(v) for v in S]
    if len(set(sources)) != len(sources):
        raise DomainError("duplicate source vertices")
    if isinstance(words, (Word, WordGenerator)):
        words = [words] * len(sources)
    words = list(words)
    if len(words) != len(sources):
        raise DomainError("need one word per source")
    vol = region.volume
    nbr = neighbor_ranks(region.intervals)
    omega = np.full(vol, -1, dtype=np.int8)
    tilde = np.full(vol, -1, dtype=np.int8)
    parent = np.full(vol, -2, dtype=np.int64)
    root_idx = np.full(vol, -1, dtype=np.int64)
    depth = np.full(vol, -1, dtype=np.int64)
    explored = np.zeros(vol, dtype=bool)

    draw = [0]

    def uniform():
        u = rng.uniform(draw[0])
        draw[0] += 1
        return u

    def table_draw(letter: int):
        u = uniform()
        if u < p:
            return 1, letter
        if letter == 0 and u < 2 * p:
            return 0, 1
        return 0, 0

    heap: list[int] = []  # candidate frontier ranks (lazy deletion)
    in_heap = np.zeros(vol, dtype=bool)

    def open_frontier_around(r: int):
        for u in nbr[r]:
            if u >= 0 and not explored[u] and not in_heap[u]:
                in_heap[u] = True
                heapq.heappush(heap, int(u))

    for i, v in enumerate(sources):
        if not region.contains(v):
            raise DomainError(f"source {v} outside the region")
        r = region.rank(v)
        if start_index == 0:
            w, wt = table_draw(_letter(words[i], 0))
        else:
            w = 1 if uniform() < p else 0
            wt = 1 if uniform() < p else 0
        omega[r], tilde[r] = w, wt
        parent[r], root_idx[r], depth[r] = -1, i, 0
        explored[r] = True
    for i, v in enumerate(sources):
        r = region.rank(v)
        if omega[r] == 1:
            open_frontier_around(r)

    while heap:
        yp = heapq.heappop(heap)
        in_heap[yp] = False
        if explored[yp]:
            continue
        # minimum explored 1-neighbor adopts the new vertex
        y = -1
        for u in nbr[yp]:
            if u >= 0 and explored[u] and omega[u] == 1:
                y = int(u)
                break
        if y < 0:
            continue  # stale candidate; its 1-neighbor claim expired (cannot happen)
        d = int(depth[y])
        letter = _letter(words[int(root_idx[y])], d + 1)
        w, wt = table_draw(letter)
        omega[yp], tilde[yp] = w, wt
        parent[yp], root_idx[yp], depth[yp] = y, root_idx[y], d + 1
        explored[yp] = True
        if w == 1:
            open_frontier_around(yp)

    # fill undiscovered vertices i.i.d., two uniforms each, rank order
    for r in np.nonzero(~explored)[0]:
        omega[r] = 1 if uniform() < p else 0
        tilde[r] = 1 if uniform() < p else 0

    prov = Provenance(p, rng.master_seed, rng.stream_id)
    return CoupledPair(
        region,
        Configuration.from_bools(region, omega == 1, prov),
        Configuration.from_bools(region, tilde == 1, prov),
        parent,
        root_idx,
        depth,
        explored,
        tuple(sources),
        tuple(words),
        start_index,
        prov,
    )


def verify_coupling(pair: CoupledPair):
    """Recompute the 1-cluster of S independently and replay every branch.

    Returns (ok, info); info locates the first failure.
    """
    region = pair.region
    omega_bits = pair.omega.bools()
    tilde_bits = pair.omega_tilde.bools()
    cluster = one_connected_set(pair.omega, pair.sources)
    forest_ones = {
        region.unrank(int(r))
        for r in np.nonzero(pair._explored & (omega_bits))[0]
    }
    if cluster != forest_ones:
        missing = cluster ^ forest_ones
        return False, f"forest 1-vertices disagree with the 1-cluster at {sorted(missing)[:3]}"
    for r in np.nonzero(pair._explored)[0]:
        r = int(r)
        par = pair._parent[r]
        if par == -1:
            if pair._depth[r] != 0:
                return False, f"root at {region.unrank(r)} has nonzero depth"
            continue
        if pair._depth[r] != pair._depth[par] + 1:
            return False, f"depth mismatch at {region.unrank(r)}"
        if not omega_bits[par]:
            return False, f"parent of {region.unrank(r)} is not a 1-vertex"
    lo = pair.start_index
    for y in cluster:
        branch = pair.branch(y)
        word = pair.words[pair._root_idx[region.rank(branch[0])]]
        for i, v in enumerate(branch):
            if i < lo:
                continue
            if int(tilde_bits[region.rank(v)]) != _letter(word, i):
                return False, f"branch to {y} misreads the word at offset {i}"
    return True, None


def coupling_implication_holds(pair: CoupledPair) -> bool:
    """The headline property: 1-connected in omega implies word-connected
    in omega_tilde along the recorded branch."""
    ok, _ = verify_coupling(pair)
    return ok
