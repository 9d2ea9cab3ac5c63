import numpy as np
import pytest

from wordperc.config import Configuration, sample
from wordperc.errors import DomainError
from wordperc.geometry import lambda_box, macro_box, macro_face, macro_out_neighbors
from wordperc.oracles import saw_reach_bruteforce
from wordperc.renorm import (
    RenormParams,
    SeedSet,
    event_Emn,
    good_event,
    is_delta_seed,
    lambda_boundary,
    macro_exploration,
    micro_left_column,
    micro_window,
    seed_sets_from,
)
from wordperc.rng import RngStream
from wordperc.search import SourceSet, distance_map, region_mask
from wordperc.words import AlternatingWord, ConstantWord, Word

PAR = RenormParams(d=3, p=0.5, k=2, delta=1e-6, h=4)
U = (0, 0, 2)


def region_for(u, params, pad=1):
    """Window convering F^u u B^u and the out-neighbor faces."""
    k, d = params.k, params.d
    from wordperc.geometry import Region

    ivs = []
    for axis in range(d):
        su = (list(u) + [0] * (d - 3))[axis]
        ivs.append((k * su - 2 * k - 2, k * su + 2 * k + 2))
    return Region(tuple(ivs))


def all_ones(region):
    return Configuration.from_bools(region, np.ones(region.volume, dtype=bool))


def all_zeros(region):
    return Configuration.from_bools(region, np.zeros(region.volume, dtype=bool))


def test_params_validation():
    with pytest.raises(DomainError):
        RenormParams(3, 0.5, 3, 1e-6, 4)  # odd k
    with pytest.raises(DomainError):
        RenormParams(3, 0.5, 2, 1.0 / 64000, 4)  # delta too large
    assert PAR.C == 125
    assert PAR.face_size() == 16


def test_is_delta_seed_boundaries():
    import math

    face = macro_face(U, PAR.k, PAR.d)
    delta = 0.25
    need = math.ceil(delta * face.volume)
    pts = list(face.iter_points())
    seed = SeedSet.from_dict(U, {p: 0 for p in pts[:need]})
    assert is_delta_seed(seed, delta, PAR)
    seed_small = SeedSet.from_dict(U, {p: 0 for p in pts[: need - 1]})
    assert not is_delta_seed(seed_small, delta, PAR)
    # one offset beyond C * u1 spoils the seed
    budget = PAR.C * U[0]
    seed_bad = SeedSet.from_dict(U, {**{p: 0 for p in pts[:need]}, pts[need]: budget + 1})
    assert not is_delta_seed(seed_bad, delta, PAR)
    with pytest.raises(DomainError):
        is_delta_seed(SeedSet.from_dict(U, {(99, 99, 99): 0}), delta, PAR)


def test_seed_sets_from_all_ones():
    region = region_for(U, PAR)
    cfg = all_ones(region)
    seed = SeedSet.full_face(U, PAR)
    got = seed_sets_from(cfg, seed, ConstantWord(1), PAR)
    outs = macro_out_neighbors(U, PAR.h)
    assert set(got) == set(outs)
    # arrivals equal graph distance from the seed face (offset 0)
    mask = region_mask(region, [macro_face(U, PAR.k, PAR.d), macro_box(U, PAR.k, PAR.d)])
    dist = distance_map(cfg, seed.vertices(), within=mask)
    for v, entries in got.items():
        face = macro_face(v, PAR.k, PAR.d)
        expect = {y: d for y, d in dist.items() if face.contains(y)}
        assert entries == expect
        assert entries  # reachable through a solid box


def test_seed_sets_from_empty_seed():
    region = region_for(U, PAR)
    cfg = all_ones(region)
    seed = SeedSet(U, ())
    got = seed_sets_from(cfg, seed, ConstantWord(1), PAR)
    assert all(not v for v in got.values())


def test_seed_sets_exact_matches_bruteforce():
    # tiny bound so the oracle stays cheap
    region = region_for(U, PAR)
    word = Word.from_string("10110101101101011011")
    seed_pts = list(macro_face(U, PAR.k, PAR.d).iter_points())[::5]
    seed = SeedSet.from_dict(U, {p: 0 for p in seed_pts})
    mask = region_mask(region, [macro_face(U, PAR.k, PAR.d), macro_box(U, PAR.k, PAR.d)])
    allowed = {region.unrank(int(r)) for r in np.nonzero(mask)[0]}
    for s in range(3):
        cfg = sample(region, 0.5, RngStream(313, s))
        got = seed_sets_from(cfg, seed, word, PAR, t_membership=7)
        src = SourceSet.uniform(seed.vertices(), word)
        pairs = saw_reach_bruteforce(cfg, src, 7, allowed=allowed)
        best: dict = {}
        for y, t in pairs:
            if y not in best or t < best[y]:
                best[y] = t
        for v, entries in got.items():
            face = macro_face(v, PAR.k, PAR.d)
            expect = {y: t for y, t in best.items() if face.contains(y)}
            assert entries == expect


def test_good_event_degenerate():
    region = region_for(U, PAR)
    seed = SeedSet.full_face(U, PAR)
    assert good_event(all_ones(region), seed, ConstantWord(1), PAR)
    assert not good_event(all_zeros(region), seed, ConstantWord(1), PAR)
    # relaxed agrees on the degenerate cases
    assert good_event(all_ones(region), seed, ConstantWord(1), PAR, mode="relaxed")
    assert not good_event(all_zeros(region), seed, ConstantWord(1), PAR, mode="relaxed")


def test_good_event_needs_delta_seed():
    region = region_for(U, PAR)
    with pytest.raises(DomainError):
        good_event(all_ones(region), SeedSet(U, ()), ConstantWord(1), PAR)


def test_good_event_monotone_in_seed():
    # enlarging the seed (same offsets) never turns true into false
    region = region_for(U, PAR)
    word = AlternatingWord()
    face_pts = list(macro_face(U, PAR.k, PAR.d).iter_points())
    flips = 0
    for s in range(40):
        cfg = sample(region, 0.5, RngStream(414, s))
        small = SeedSet.from_dict(U, {p: 0 for p in face_pts[::3]})
        big = SeedSet.from_dict(U, {p: 0 for p in face_pts})
        if good_event(cfg, small, word, PAR) and not good_event(cfg, big, word, PAR):
            flips += 1
    assert flips == 0


def test_lambda_boundary_counts():
    par = RenormParams(d=3, p=0.5, k=2, delta=1e-6, h=2)
    bd = lambda_boundary(1, par)
    lam = lambda_box(1, par.h, par.k, par.d)
    # side walls only; top and bottom faces are slab boundary, not inner
    inner = {p for p in lam.iter_points() if abs(p[0]) < 2 and abs(p[1]) < 2}
    assert bd == set(lam.iter_points()) - inner


def test_event_Emn_trivial_and_degenerate():
    par = RenormParams(d=3, p=0.5, k=2, delta=1e-6, h=2)
    region = micro_window(2, par)
    # n = m: whole probability space
    ok, _ = event_Emn(all_ones(region), 2, 2, ConstantWord(1), par)
    assert ok
    # big window containing the boxes
    from wordperc.geometry import Region, slab_window

    win = slab_window(par.h, par.k, par.d, half_width=2 * par.k * 2 + 2)
    ok, T = event_Emn(all_ones(win), 1, 2, ConstantWord(1), par)
    assert ok and len(T) == len(lambda_boundary(2, par))
    ok0, T0 = event_Emn(all_zeros(win), 1, 2, ConstantWord(1), par)
    assert not ok0 and not T0


def test_event_Emn_bound_monotone():
    par = RenormParams(d=3, p=0.5, k=2, delta=1e-6, h=2)
    from wordperc.geometry import slab_window

    win = slab_window(par.h, par.k, par.d, half_width=2 * par.k * 2 + 2)
    word = AlternatingWord()
    for s in range(5):
        cfg = sample(win, 0.5, RngStream(515, s))
        _, T_small = event_Emn(cfg, 1, 2, word, par, t_bound=6)
        _, T_big = event_Emn(cfg, 1, 2, word, par, t_bound=24)
        assert set(T_small) <= set(T_big)


def test_macro_exploration_all_ones():
    par = RenormParams(d=3, p=0.5, k=2, delta=1e-6, h=4)
    n = 5
    win = micro_window(n, par)
    cfg = all_ones(win)
    col = micro_left_column(n, par)
    T = {p: 0 for p in col.iter_points()}
    rep = macro_exploration(cfg, T, ConstantWord(1), par, n)
    assert rep.audit_no_requeries
    assert rep.audit_box_overlaps == ()
    assert rep.T_macro  # dense T seeds the whole left column
    from wordperc.oriented import forward_cone, slab_windows

    wins = slab_windows(n, par.h)
    cone = forward_cone(rep.U0, wins.B_set)
    assert set(rep.U_inf) == set(rep.U0) | cone
    assert rep.right_hits == rep.right_size
    assert rep.T_prime_size > 0


def test_macro_exploration_empty_T():
    par = RenormParams(d=3, p=0.5, k=2, delta=1e-6, h=4)
    n = 5
    win = micro_window(n, par)
    cfg = all_ones(win)
    rep = macro_exploration(cfg, {}, ConstantWord(1), par, n)
    assert rep.T_macro == ()
    assert rep.U_inf == ()
    assert rep.T_prime == {}
