import numpy as np
import pytest

from wordperc.config import Configuration
from wordperc.errors import DomainError
from wordperc.geometry import Region, box
from wordperc.rng import RngStream
from wordperc.search import SourceSet, exact_word_reach, verify_witness
from wordperc.wierman import CoupledPair, verify_coupling, wierman_couple
from wordperc.words import AlternatingWord, ConstantWord, ProductWord

R33 = Region(((-2, 1), (-2, 1)))


def test_p_above_half_rejected():
    with pytest.raises(DomainError):
        wierman_couple(R33, [(0, 0)], ConstantWord(1), 0.6, RngStream(1, 0))


def test_all_ones_word_makes_configs_agree_on_explored():
    for seed in range(20):
        pair = wierman_couple(R33, [(0, 0)], ConstantWord(1), 0.4, RngStream(10, seed))
        om, ti = pair.omega.bools(), pair.omega_tilde.bools()
        for r in np.nonzero(pair._explored)[0]:
            assert om[r] == ti[r]


def test_coupling_verifies_fresh():
    words = [AlternatingWord(), ProductWord(0.5, seed=3)]
    for seed in range(50):
        pair = wierman_couple(
            R33, [(-1, -1), (1, 1)], words, 0.45, RngStream(20, seed)
        )
        ok, info = verify_coupling(pair)
        assert ok, info


def test_coupling_verifies_fresh_3d():
    for seed in range(25):
        pair = wierman_couple(
            box(1, 3), [(0, 0, 0)], ProductWord(0.4, seed=1), 0.3, RngStream(21, seed)
        )
        ok, info = verify_coupling(pair)
        assert ok, info


def test_implication_gives_exact_word_connection():
    # independent cross-check: reached cluster members are word-reachable
    # per the search module as well
    word = AlternatingWord()
    for seed in range(10):
        pair = wierman_couple(R33, [(0, 0)], word, 0.5, RngStream(22, seed))
        from wordperc.search import one_connected_set

        cluster = one_connected_set(pair.omega, [(0, 0)])
        if not cluster:
            continue
        res = exact_word_reach(
            pair.omega_tilde, SourceSet.single((0, 0), word), R33.volume - 1
        )
        assert cluster <= res.vertices()


def test_branch_is_valid_witness():
    word = ProductWord(0.5, seed=9)
    for seed in range(10):
        pair = wierman_couple(R33, [(0, 0)], word, 0.45, RngStream(23, seed))
        from wordperc.search import one_connected_set

        for y in one_connected_set(pair.omega, [(0, 0)]):
            assert verify_witness(pair.omega_tilde, pair.branch(y), word, 0)


def test_mutation_detected_tilde():
    pair = None
    for seed in range(100):
        pair = wierman_couple(R33, [(0, 0)], AlternatingWord(), 0.5, RngStream(30, seed))
        from wordperc.search import one_connected_set

        cluster = one_connected_set(pair.omega, [(0, 0)])
        if len(cluster) >= 2:
            break
    assert len(cluster) >= 2
    y = max(cluster)
    branch = pair.branch(y)
    r = pair.region.rank(branch[-1])
    bits = pair.omega_tilde.bools().copy()
    bits[r] = ~bits[r]
    mutated = CoupledPair(
        pair.region,
        pair.omega,
        Configuration.from_bools(pair.region, bits),
        pair._parent,
        pair._root_idx,
        pair._depth,
        pair._explored,
        pair.sources,
        pair.words,
        pair.start_index,
        pair.provenance,
    )
    ok, _ = verify_coupling(mutated)
    assert not ok


def test_mutation_detected_omega_cluster_growth():
    pair = None
    for seed in range(200):
        pair = wierman_couple(R33, [(0, 0)], AlternatingWord(), 0.4, RngStream(31, seed))
        om = pair.omega.bools()
        boundary_zero = [
            int(r)
            for r in np.nonzero(pair._explored & ~om)[0]
        ]
        if boundary_zero:
            break
    assert boundary_zero
    bits = pair.omega.bools().copy()
    bits[boundary_zero[0]] = True  # extend the 1-cluster beyond the forest
    mutated = CoupledPair(
        pair.region,
        Configuration.from_bools(pair.region, bits),
        pair.omega_tilde,
        pair._parent,
        pair._root_idx,
        pair._depth,
        pair._explored,
        pair.sources,
        pair.words,
        pair.start_index,
        pair.provenance,
    )
    ok, _ = verify_coupling(mutated)
    # growing the cluster may happen to keep forest coverage only if the
    # flipped site fails word-reading; either way the certificate must fail
    assert not ok


def test_marginal_bands_small():
    n = 4000
    p = 0.4
    counts_om = np.zeros(R33.volume)
    counts_ti = np.zeros(R33.volume)
    for seed in range(n):
        pair = wierman_couple(
            R33, [(0, 0)], AlternatingWord(), p, RngStream(555, seed)
        )
        counts_om += pair.omega.bools()
        counts_ti += pair.omega_tilde.bools()
    sigma = (p * (1 - p) / n) ** 0.5
    assert (np.abs(counts_om / n - p) < 4.5 * sigma).all()
    assert (np.abs(counts_ti / n - p) < 4.5 * sigma).all()


def test_determinism():
    a = wierman_couple(R33, [(0, 0)], AlternatingWord(), 0.5, RngStream(7, 3))
    b = wierman_couple(R33, [(0, 0)], AlternatingWord(), 0.5, RngStream(7, 3))
    assert a.omega.words == b.omega.words
    assert a.omega_tilde.words == b.omega_tilde.words
    assert (a._parent == b._parent).all()


def test_start_index_one_convention():
    # root's tilde color is a free draw; branches read from index 1
    for seed in range(30):
        pair = wierman_couple(
            R33, [(0, 0)], ConstantWord(0), 0.5, RngStream(40, seed), start_index=1
        )
        ok, info = verify_coupling(pair)
        assert ok, info


def test_trees_vertex_disjoint():
    for seed in range(30):
        pair = wierman_couple(
            R33, [(-1, -1), (1, 1)], AlternatingWord(), 0.5, RngStream(41, seed)
        )
        forest = pair.forest()
        for v, node in forest.items():
            if node.parent is not None:
                assert forest[node.parent].root == node.root
