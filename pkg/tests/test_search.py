import pytest

from wordperc.config import Configuration, enumerate_configs, flip_colors, sample
from wordperc.errors import CapacityError, DomainError
from wordperc.geometry import Region, single_cell
from wordperc.oracles import connected_bruteforce, saw_reach_bruteforce
from wordperc.rng import RngStream
from wordperc.search import (
    SourceSet,
    exact_word_reach,
    one_connected_set,
    region_mask,
    relaxed_word_reach,
    sees_all_words,
    verify_witness,
)
from wordperc.words import ConstantWord, Word, enumerate_words

R33 = Region(((-2, 1), (-2, 1)))  # 3x3 around the origin
ORIGIN_CELL = single_cell((0, 0))


def test_one_connected_degenerate():
    ones = sample(R33, 1.0, RngStream(0, 0))
    zeros = sample(R33, 0.0, RngStream(0, 0))
    S = [(0, 0)]
    assert one_connected_set(ones, S) == set(R33.iter_points())
    assert one_connected_set(zeros, S) == set()


def test_one_connected_vs_bruteforce_exhaustive():
    S = [(-1, -1), (0, 0)]
    for cfg in enumerate_configs(R33):
        assert one_connected_set(cfg, S) == connected_bruteforce(cfg, S)


def test_exact_reach_2x2_example():
    # rank order (0,0),(1,0),(0,1),(1,1); bits 1,0,0,1
    r = Region(((-1, 1), (-1, 1)))
    cfg = Configuration.from_bits(r, [1, 0, 0, 1])
    res = exact_word_reach(cfg, SourceSet.single((0, 0), Word.from_string("10")), 1)
    assert res.contains_pair((1, 0), 1)
    assert res.contains_pair((0, 1), 1)
    assert not res.contains_pair((1, 1), 1)


def test_all_ones_constant_word_reach():
    cfg = sample(R33, 1.0, RngStream(1, 0))
    res = exact_word_reach(cfg, SourceSet.single((0, 0), ConstantWord(1)), 4)
    # every vertex within L1 distance <= 4 reached at its distance
    for pt in R33.iter_points():
        d = abs(pt[0]) + abs(pt[1])
        assert res.contains_pair(pt, d)


def test_exact_matches_bruteforce_sampled_words():
    words = [Word.from_string(s) for s in ("1", "10", "101", "1100", "01101")]
    for seed in range(6):
        cfg = sample(R33, 0.5, RngStream(33, seed))
        for w in words:
            src = SourceSet.uniform(list(R33.iter_points()), w)
            got = exact_word_reach(cfg, src, len(w) - 1)
            assert got.pairs() == saw_reach_bruteforce(cfg, src, len(w) - 1)


def test_relaxed_contains_exact_and_monotone_horizon():
    w = Word.from_string("1011")
    for seed in range(4):
        cfg = sample(R33, 0.5, RngStream(44, seed))
        src = SourceSet.single((0, 0), w)
        exact = exact_word_reach(cfg, src, 3)
        relaxed = relaxed_word_reach(cfg, src, 3)
        assert exact.issubset(relaxed)
        # smaller horizon never reaches more
        inner = region_mask(R33, [Region(((-2, 0), (-2, 0)))])
        exact_small = exact_word_reach(cfg, src, 3, within=inner)
        assert exact_small.issubset(exact)


def test_relaxed_equals_exact_for_constant_word():
    for seed in range(5):
        cfg = sample(R33, 0.6, RngStream(55, seed))
        src = SourceSet.uniform([(0, 0), (-1, -1)], ConstantWord(1))
        exact = exact_word_reach(cfg, src, 8)
        relaxed = relaxed_word_reach(cfg, src, 8)
        assert exact.vertices() == relaxed.vertices()
        assert exact.min_arrival == relaxed.min_arrival
        cluster = one_connected_set(cfg, [(0, 0), (-1, -1)])
        assert exact.vertices() == cluster


def test_color_symmetry_under_flip():
    w = Word.from_string("101")
    for cfg in list(enumerate_configs(Region(((0, 3), (0, 3)))))[::37]:
        src = SourceSet.single((1, 1), w)
        a = exact_word_reach(cfg, src, 2).pairs()
        b = exact_word_reach(
            flip_colors(cfg), SourceSet.single((1, 1), w.complement()), 2
        ).pairs()
        assert a == b


def test_witness_validity():
    for seed in range(5):
        cfg = sample(R33, 0.5, RngStream(66, seed))
        w = Word.from_string("1011")
        res = exact_word_reach(cfg, SourceSet.single((0, 0), w), 3, want_witness=True)
        for v, path in res.witnesses.items():
            assert path[-1] == v
            assert verify_witness(cfg, path, w, 0)


def test_capacity_guards():
    cfg = sample(R33, 0.5, RngStream(0, 0))
    with pytest.raises(CapacityError):
        exact_word_reach(cfg, SourceSet.single((0, 0), ConstantWord(1)), (1 << 20) + 1)
    with pytest.raises(DomainError):
        exact_word_reach(cfg, SourceSet.single((9, 9), ConstantWord(1)), 3)


def test_sees_all_words_trivial_cases():
    ones = sample(R33, 1.0, RngStream(2, 0))
    ok, failing = sees_all_words(ones, ORIGIN_CELL, 2)
    assert not ok and failing is not None and 0 in failing.to_tuple()


def test_sees_all_words_L1_semantics():
    # a single-vertex from-set can never see both length-1 words
    r2 = Region(((-1, 1), (-1, 1)))
    cfg = Configuration.from_bits(r2, [1, 0, 0, 1])
    ok, failing = sees_all_words(cfg, single_cell((0, 0)), 1)
    assert not ok and failing.to_tuple() == (0,)
    # a from-set holding both colors sees both words
    ok, _ = sees_all_words(cfg, Region(((-1, 1), (-1, 0))), 1)
    assert ok


def test_sees_all_words_exhaustive_small():
    # from = origin cell inside 3x3, L = 2: oracle by enumeration
    horizon = R33
    for idx, cfg in enumerate(enumerate_configs(R33)):
        if idx % 29:
            continue
        expected = True
        for w in enumerate_words(2):
            src = SourceSet.single((0, 0), w)
            if not saw_reach_bruteforce(cfg, src, 1):
                expected = False
                break
        got, _ = sees_all_words(cfg, ORIGIN_CELL, 2, horizon)
        assert got == expected
        got_rel, _ = sees_all_words(cfg, ORIGIN_CELL, 2, horizon, mode="relaxed")
        # at L=2 a relaxed path of two distinct vertices is self-avoiding
        assert got_rel == expected


def test_relaxed_modes_agree_on_vertices():
    cfg = sample(R33, 0.5, RngStream(4, 1))
    src = SourceSet.single((0, 0), Word.from_string("10110"))
    full = relaxed_word_reach(cfg, src, 4, collect_arrivals=True)
    lean = relaxed_word_reach(cfg, src, 4, collect_arrivals=False)
    assert full.min_arrival == lean.min_arrival
    assert full.index_hits == lean.index_hits
