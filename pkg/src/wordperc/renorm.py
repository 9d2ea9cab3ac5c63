"""Seeds, good events, the boundary-to-boundary event, and the
micro-to-macro exploration.

A seed for a macro vertex u is a subset S of its face F^u with one word
offset per vertex; it is a delta-seed when |S| >= delta * |F^u| and every
offset is at most C * u1 with C = (2k+1)^d.  The good event at u asks
that, for every out-neighbor v, the set of face points of F^v reachable
from the seed by reading the word inside F^u u B^u (offsets within
C * v1) has size at least 64000 * delta * |F^v|.  The existential over
sub-seeds is decided by this canonical maximal set: a qualifying
sub-seed exists iff the canonical set is large enough.

Two offset budgets appear in the source material: membership inside one
box is bounded by C * v1, while the reported minimal arrival during an
ambient run is bounded by C * (n + v1).  Both are implemented at their
call sites (``t_membership`` / ``t_report``); they are not reconciled.

The micro-to-macro exploration propagates arrival sets face to face via
single-box searches, which is exactly the inductive step the good event
certifies; each box is examined at most once (auditable), so every
verdict consumes fresh randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import Configuration
from .errors import CapacityError, DomainError
from .geometry import (
    Region,
    block_count_constant,
    inner_boundary,
    lambda_box,
    macro_box,
    macro_face,
    macro_out_neighbors,
    slab_window,
)
from .oriented import explore, slab_windows, snap_left_column
from .words import has_period_two
from .search import (
    SourceSet,
    exact_word_reach,
    region_mask,
    relaxed_word_reach,
)

Point = tuple[int, ...]


@dataclass(frozen=True)
class RenormParams:
    """Desk-scale renormalization parameters; C is kept exactly (2k+1)^d."""

    d: int
    p: float
    k: int
    delta: float
    h: int

    def __post_init__(self):
        if self.d < 3:
            raise DomainError("renormalization needs d >= 3")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError("p must lie in [0, 1]")
        if self.k < 2 or self.k % 2:
            raise DomainError("k must be even and >= 2")
        if not 0 < self.delta * 64000 < 1:
            raise DomainError("delta must lie in (0, 1/64000)")
        if self.h < 2:
            raise DomainError("h must be at least 2")

    @property
    def C(self) -> int:
        return block_count_constant(self.k, self.d)

    def face_size(self) -> int:
        return (2 * self.k) ** (self.d - 1)


@dataclass(frozen=True)
class SeedSet:
    """A seed (S, t) on the face of macro vertex u."""

    u: tuple[int, int, int]
    entries: tuple[tuple[Point, int], ...]  # (vertex, offset), sorted

    @classmethod
    def from_dict(cls, u, mapping) -> "SeedSet":
        return cls(tuple(u), tuple(sorted((tuple(v), int(t)) for v, t in mapping.items())))

    @classmethod
    def full_face(cls, u, params: RenormParams, offset: int = 0) -> "SeedSet":
        face = macro_face(u, params.k, params.d)
        return cls(tuple(u), tuple((pt, offset) for pt in face.iter_points()))

    def size(self) -> int:
        return len(self.entries)

    def vertices(self):
        return [v for v, _ in self.entries]


def is_delta_seed(seed: SeedSet, delta: float, params: RenormParams) -> bool:
    """Density and offset bounds of a seed candidate."""
    face = macro_face(seed.u, params.k, params.d)
    for v, _ in seed.entries:
        if not face.contains(v):
            raise DomainError(f"seed vertex {v} outside the face of {seed.u}")
    if seed.size() < delta * face.volume:
        return False
    budget = params.C * seed.u[0]
    return all(t <= budget for _, t in seed.entries)


def box_domain(u, params: RenormParams, region: Region) -> np.ndarray:
    """Mask of F^u u B^u inside a configuration region."""
    face = macro_face(u, params.k, params.d)
    bx = macro_box(u, params.k, params.d)
    for part in (face, bx):
        if not part.issubset(region):
            raise DomainError(f"{part.kind} of {u} not inside the configuration")
    return region_mask(region, [face, bx])


def seed_sets_from(
    cfg: Configuration,
    seed: SeedSet,
    xi,
    params: RenormParams,
    mode: str = "exact",
    t_membership: int | None = None,
    t_report: int | None = None,
    node_budget: int | None = None,
) -> dict:
    """Canonical propagated seeds: for every out-neighbor v of u, the face
    points of F^v reached from the seed inside F^u u B^u, with minimal
    arrival offsets.

    Membership bound defaults to C * v1; t_report, when given (ambient
    runs), widens only the reported minimum's search range.
    """
    u = seed.u
    outs = macro_out_neighbors(u, params.h)
    if not outs:
        return {}
    v1 = u[0] + 2
    bound = params.C * v1 if t_membership is None else t_membership
    max_index = bound if t_report is None else max(bound, t_report)
    mask = box_domain(u, params, cfg.region)
    sources = SourceSet.uniform(seed.vertices(), xi, [t for _, t in seed.entries])
    if mode not in ("exact", "relaxed"):
        raise DomainError(f"unknown search mode {mode!r}")
    if mode == "relaxed" or has_period_two(xi, max_index):
        # for period-<=2 words on the bipartite lattice, loop erasure makes
        # walk and self-avoiding reachability agree on membership and minima
        res = relaxed_word_reach(cfg, sources, max_index, within=mask, collect_arrivals=False)
    else:
        faces = region_mask(
            cfg.region, [macro_face(v, params.k, params.d) for v in outs]
        )
        res = exact_word_reach(
            cfg,
            sources,
            max_index,
            within=mask,
            node_budget=node_budget,
            prune_targets=(faces, "min"),
        )
    out = {}
    for v in outs:
        face = macro_face(v, params.k, params.d)
        got = {}
        for y, t in res.min_arrival.items():
            if t <= bound and face.contains(y):
                got[y] = t
        out[v] = got
    return out


def good_event(
    cfg: Configuration,
    seed: SeedSet,
    xi,
    params: RenormParams,
    mode: str = "exact",
    node_budget: int | None = None,
) -> bool:
    """Whether the seed propagates 64000*delta-dense seeds to every
    out-neighbor face while reading the word inside F^u u B^u."""
    if not is_delta_seed(seed, params.delta, params):
        raise DomainError("good_event needs a delta-seed")
    u = seed.u
    outs = macro_out_neighbors(u, params.h)
    if not outs:
        return True
    threshold = 64000.0 * params.delta * params.face_size()
    need = max(1, math.ceil(threshold - 1e-12))
    bound = params.C * (u[0] + 2)
    mask = box_domain(u, params, cfg.region)
    sources = SourceSet.uniform(seed.vertices(), xi, [t for _, t in seed.entries])
    if mode not in ("exact", "relaxed"):
        raise DomainError(f"unknown search mode {mode!r}")
    if mode == "relaxed" or has_period_two(xi, bound):
        # loop erasure on the bipartite lattice: for period-<=2 words the
        # walk dynamics decide self-avoiding membership exactly
        res = relaxed_word_reach(cfg, sources, bound, within=mask, collect_arrivals=False)
        for v in outs:
            face = macro_face(v, params.k, params.d)
            count = sum(1 for y in res.min_arrival if face.contains(y))
            if count < need:
                return False
        return True
    face_masks = [
        region_mask(cfg.region, [macro_face(v, params.k, params.d)]) for v in outs
    ]
    all_faces = np.zeros(cfg.region.volume, dtype=bool)
    for fm in face_masks:
        all_faces |= fm
    res = exact_word_reach(
        cfg,
        sources,
        bound,
        within=mask,
        early_stop=[(fm, need) for fm in face_masks],
        node_budget=node_budget,
        prune_targets=(all_faces, "membership"),
    )
    reached = res.vertices()
    for v, fm in zip(outs, face_masks):
        face = macro_face(v, params.k, params.d)
        if sum(1 for y in reached if face.contains(y)) < need:
            return False
    return True


def lambda_boundary(n: int, params: RenormParams) -> set[Point]:
    """Inner boundary of the slab box at scale n, within the slab."""
    lam = lambda_box(n, params.h, params.k, params.d)
    amb = slab_window(params.h, params.k, params.d, params.k * n + 2)
    return inner_boundary(lam, amb)


def event_Emn(
    cfg: Configuration,
    m: int,
    n: int,
    xi,
    params: RenormParams,
    mode: str = "relaxed",
    t_bound: int | None = None,
):
    """The boundary-to-boundary propagation event at scales m -> n.

    True iff a subset T of the inner boundary of the scale-n box, of
    density 8 * delta, is word-reached from the scale-(m+1) boundary with
    offsets at most C * n; decided by taking T = the full reachable
    subset.  n = m is the whole probability space by definition.
    Returns (occurred, T).
    """
    if not 1 <= m <= n:
        raise DomainError("event needs n >= m >= 1")
    if n == m:
        return True, None
    lam_n = lambda_box(n, params.h, params.k, params.d)
    if not lam_n.issubset(cfg.region):
        raise DomainError("configuration window too small for the scale-n box")
    sources_pts = sorted(lambda_boundary(m + 1, params))
    targets = lambda_boundary(n, params)
    bound = params.C * n if t_bound is None else t_bound
    if bound > 1 << 20:
        raise CapacityError("offset bound beyond the search guard")
    sources = SourceSet.uniform(sources_pts, xi)
    if mode not in ("exact", "relaxed"):
        raise DomainError(f"unknown search mode {mode!r}")
    if mode == "relaxed" or has_period_two(xi, bound):
        res = relaxed_word_reach(cfg, sources, bound, collect_arrivals=False)
    else:
        tgt = np.zeros(cfg.region.volume, dtype=bool)
        for y in targets:
            tgt[cfg.region.rank(y)] = True
        res = exact_word_reach(cfg, sources, bound, prune_targets=(tgt, "membership"))
    T = {y for y in res.min_arrival if y in targets}
    return len(T) >= 8 * params.delta * len(targets), T


def micro_window(n: int, params: RenormParams) -> Region:
    """Region covering every box and face touched by an exploration run."""
    k = params.k
    ivs = [
        (k * n - 1, (2 * n + 1) * k),
        (-2 * k * n - k - 1, 2 * k * n + k),
        (0, params.h * k),
    ]
    ivs += [(-k, k)] * (params.d - 3)
    return Region(tuple(ivs), "exploration-window", (n, k, params.h))


def micro_left_column(n: int, params: RenormParams) -> Region:
    """The micro seed column at x = k*n (one slab-thick plane)."""
    k = params.k
    ivs = [(k * n - 1, k * n), (-k * n - 1, k * n), (0, params.h * k)]
    ivs += [(-k, k)] * (params.d - 3)
    return Region(tuple(ivs), "micro-left", (n, k, params.h))


@dataclass
class ExplorationReport:
    n: int
    T_macro: tuple
    U0: tuple
    U_inf: tuple
    V_inf: tuple
    trace: tuple
    queried: tuple
    right_hits: int
    right_size: int
    T_prime: dict
    T_prime_threshold: float
    audit_no_requeries: bool
    audit_box_overlaps: tuple

    @property
    def T_prime_size(self) -> int:
        return len(self.T_prime)


def macro_exploration(
    cfg: Configuration,
    T: dict,
    xi,
    params: RenormParams,
    n: int,
    mode: str = "relaxed",
    node_budget: int | None = None,
) -> ExplorationReport:
    """Run the seeded macro exploration over the window at scale n.

    T maps micro seed-column vertices to word offsets (at most C * n).
    Face-to-face propagation happens through one box at a time; the
    verdict for a macro vertex is the good event on its accumulated
    arrival seed, evaluated on the configuration restricted to its own
    box and face.
    """
    win = slab_windows(n, params.h)
    k = params.k
    C = params.C
    cL = snap_left_column(n)
    budget = C * n
    T = {tuple(v): int(t) for v, t in T.items()}
    for v, t in T.items():
        if t > budget:
            raise DomainError(f"offset of {v} exceeds C*n")
    face_area = params.face_size()
    # macro seed column: faces holding a delta-dense share of T
    T_macro = []
    seeds0 = {}
    for u in win.L:
        face = macro_face(u, k, params.d)
        mine = {v: t for v, t in T.items() if face.contains(v)}
        if len(mine) >= params.delta * face_area:
            T_macro.append(u)
            seeds0[u] = mine
    arrivals: dict = {u: dict(s) for u, s in seeds0.items()}
    queried: list = []

    def verdict(u) -> bool:
        queried.append(u)
        seed = SeedSet.from_dict(u, arrivals.get(u, {}))
        if not seed.entries or not is_delta_seed(seed, params.delta, params):
            return False
        ok = good_event(cfg, seed, xi, params, mode=mode, node_budget=node_budget)
        if ok:
            grown = seed_sets_from(
                cfg, seed, xi, params, mode=mode,
                t_report=C * (n + u[0] + 2), node_budget=node_budget,
            )
            for w, got in grown.items():
                slot = arrivals.setdefault(w, {})
                for y, t in got.items():
                    if y not in slot or t < slot[y]:
                        slot[y] = t
        return ok

    U0 = tuple(sorted(u for u in T_macro if verdict(u)))
    state = explore(U0, win.B_set, verdict)
    # the right-column report and the forwarded target set
    Rset = set(win.R)
    right_hits = len(state.U & Rset)
    out_of_R = set()
    for u in state.U & Rset:
        out_of_R.update(macro_out_neighbors(u, params.h))
    out_of_R -= state.U
    T_prime: dict = {}
    for w in sorted(out_of_R):
        for y, t in arrivals.get(w, {}).items():
            if y not in T_prime or t < T_prime[y]:
                T_prime[y] = t
    boundary_2n = lambda_boundary(2 * n, params)
    threshold = 8 * params.delta * len(boundary_2n)
    # audits: no box examined twice; queried boxes overlap only in faces
    no_requeries = len(queried) == len(set(queried))
    overlaps = []
    qs = sorted(set(queried))
    for i, a in enumerate(qs):
        box_a = macro_box(a, k, params.d)
        face_a = macro_face(a, k, params.d)
        for b in qs[i + 1 :]:
            box_b = macro_box(b, k, params.d)
            face_b = macro_face(b, k, params.d)
            if box_a.intersect(box_b) is not None:
                overlaps.append((a, b, "box-box"))
            if face_a.intersect(face_b) is not None:
                overlaps.append((a, b, "face-face"))
    return ExplorationReport(
        n=n,
        T_macro=tuple(sorted(T_macro)),
        U0=U0,
        U_inf=tuple(sorted(state.U)),
        V_inf=tuple(sorted(state.V)),
        trace=state.trace,
        queried=tuple(queried),
        right_hits=right_hits,
        right_size=len(win.R),
        T_prime=T_prime,
        T_prime_threshold=threshold,
        audit_no_requeries=no_requeries,
        audit_box_overlaps=tuple(overlaps),
    )
