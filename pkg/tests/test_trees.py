"""Tree structure, evaluation semantics, exact metrics, and leaf statistics."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtlab.errors import DimensionMismatch, InvalidValue, UnreachedLeaf
from dtlab.functions import (
    Distribution,
    constant_measure,
    dictator,
    direct_product,
    parity,
    product_power,
    uniform,
)
from dtlab.instances import (
    random_distribution,
    random_function,
    random_measure,
    random_tree,
)
from dtlab.trees import (
    DecisionTree,
    Leaf,
    Query,
    RandomizedTree,
    agreement,
    conditional_blocks_at_leaf,
    correlation,
    cube_points,
    derandomize,
    error,
    evaluate,
    expected_depth,
    leaf_distribution,
    leaf_stats,
    leaves,
    path_length,
    randomized_tree_from_json,
    randomized_tree_to_json,
    threshold_error,
    tree_from_json,
    tree_to_json,
)

import random


def _xor_tree():
    # queries x0 then x1, leaf labels the exact parity
    def leaf(v):
        return Leaf((v,))
    return DecisionTree(2, 1, Query(0,
        Query(1, leaf(1), leaf(-1)),
        Query(1, leaf(-1), leaf(1))))


def test_evaluate_follows_set_bit_to_pos_child():
    t = DecisionTree(1, 1, Query(0, Leaf((-1,)), Leaf((1,))))
    assert evaluate(t, 0b1) == (1,)
    assert evaluate(t, 0b0) == (-1,)


def test_xor_tree_computes_parity():
    t = _xor_tree()
    f = parity(2)
    for x in range(4):
        assert evaluate(t, x) == (f.value(x),)
        assert path_length(t, x) == 2


def test_repeated_query_on_a_path_is_rejected():
    with pytest.raises(InvalidValue):
        DecisionTree(2, 1, Query(0, Query(0, Leaf((1,)), Leaf((1,))), Leaf((1,))))


def test_label_width_must_match_k():
    with pytest.raises(InvalidValue):
        DecisionTree(1, 2, Leaf((1,)))


def test_out_of_range_variable_rejected():
    with pytest.raises(InvalidValue):
        DecisionTree(1, 1, Query(3, Leaf((1,)), Leaf((1,))))


def test_leaves_are_preorder_negative_child_first():
    t = _xor_tree()
    refs = leaves(t)
    assert [r.leaf_id for r in refs] == [0, 1, 2, 3]
    # first leaf: both bits clear
    assert refs[0].fixed_mask == 0b11 and refs[0].fixed_vals == 0b00
    assert refs[3].fixed_mask == 0b11 and refs[3].fixed_vals == 0b11
    assert all(r.depth == 2 for r in refs)


def test_cube_points_enumerates_the_subcube():
    pts = list(cube_points(3, 0b101, 0b100))
    assert sorted(pts) == [0b100, 0b110]


def test_expected_depth_and_error_match_brute_force():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randint(1, 3)
        t = random_tree(rng, n, 1)
        f = random_function(rng, n)
        mu = random_distribution(rng, n)
        depth = sum(mu.weight(x) * path_length(t, x) for x in range(1 << n))
        err = sum(mu.weight(x) for x in range(1 << n)
                  if evaluate(t, x)[0] != f.value(x))
        assert expected_depth(t, mu) == depth
        assert error(t, f, mu) == err
        assert correlation(t, f, mu) == 1 - 2 * err
        assert agreement(t, f, mu) == 1 - err


def test_threshold_error_counts_block_mistakes():
    n, k = 1, 3
    t = DecisionTree(n, k, Query(0, Leaf((-1, 1, 1)), Leaf((1, 1, -1))))
    mu = product_power(uniform(1), k)
    vf = direct_product(dictator(1, 0), 3)
    for thr in range(k + 1):
        truth = sum(mu.weight(x) for x in range(1 << (n * k))
                    if sum(a != b for a, b in zip(evaluate(t, x), vf.value(x))) > thr)
        assert threshold_error(t, vf, mu, thr) == truth


def test_mixture_metrics_average_components():
    t1 = DecisionTree(2, 1, Leaf((1,)))
    t2 = _xor_tree()
    rt = RandomizedTree(((Fraction(1, 3), t1), (Fraction(2, 3), t2)))
    mu = uniform(2)
    f = parity(2)
    assert expected_depth(rt, mu) == Fraction(2, 3) * 2
    assert error(rt, f, mu) == Fraction(1, 3) * error(t1, f, mu)


def test_mixture_weights_must_sum_to_one():
    t = DecisionTree(1, 1, Leaf((1,)))
    with pytest.raises(InvalidValue):
        RandomizedTree(((Fraction(1, 2), t),))


def test_leaf_distribution_sums_to_one():
    rng = random.Random(3)
    for _ in range(10):
        t = random_tree(rng, 2, 2)
        mu = product_power(random_distribution(rng, 2), 2)
        dist = leaf_distribution(t, mu)
        assert sum(dist.values()) == 1
        assert all(w >= 0 for w in dist.values())


def test_leaf_stats_identities():
    rng = random.Random(11)
    for _ in range(15):
        n, k = rng.randint(1, 2), rng.randint(1, 3)
        t = random_tree(rng, n, k)
        f = random_function(rng, n)
        h = random_measure(rng, n)
        mu = random_distribution(rng, n)
        stats = leaf_stats(t, f, h, mu)
        reach = sum(s.reach for s in stats)
        assert reach == 1
        for s in stats:
            if s.reach == 0:
                assert s.dens is None and s.adv is None
                continue
            for i in range(k):
                assert 0 <= s.dens[i] <= 1
                assert 0 <= s.adv[i] <= s.dens[i]
                assert s.p[i] == (s.dens[i] - s.adv[i]) / 2
                assert 0 <= s.q[i] <= 1
            assert s.dens_total == sum(s.dens)
            assert s.adv_total == sum(s.adv)


def test_leaf_stats_on_exact_parity_tree():
    t = _xor_tree()
    f = parity(2)
    h = constant_measure(2, Fraction(1, 2))
    mu = uniform(2)
    for s in leaf_stats(t, f, h, mu):
        assert s.reach == Fraction(1, 4)
        assert s.dens == (Fraction(1, 2),)
        # the leaf label equals f on the whole cell, so adv == dens
        assert s.adv == (Fraction(1, 2),)
        assert s.q == (Fraction(0),)


def test_conditional_blocks_factorize():
    rng = random.Random(5)
    for _ in range(10):
        n, k = rng.randint(1, 2), rng.randint(1, 2)
        t = random_tree(rng, n, k)
        mu = random_distribution(rng, n, allow_zeros=False)
        prod = product_power(mu, k)
        dist = leaf_distribution(t, prod)
        for ref in leaves(t):
            if dist.get(ref.leaf_id, Fraction(0)) == 0:
                continue
            factors = conditional_blocks_at_leaf(t, mu, ref.leaf_id)
            cell = [p for p in cube_points(t.total_vars, ref.fixed_mask, ref.fixed_vals)]
            mass = sum(prod.weight(p) for p in cell)
            for p in cell:
                joint = prod.weight(p) / mass
                split = Fraction(1)
                for i in range(k):
                    split *= factors[i].weight((p >> (i * n)) & ((1 << n) - 1))
                assert joint == split


def test_conditional_blocks_raise_on_unreached_leaf():
    t = DecisionTree(1, 1, Query(0, Leaf((1,)), Leaf((-1,))))
    mu = Distribution(1, (Fraction(1), Fraction(0)))
    with pytest.raises(UnreachedLeaf):
        conditional_blocks_at_leaf(t, mu, 1)


def test_derandomize_returns_a_good_component():
    t1 = DecisionTree(2, 1, Leaf((1,)))
    t2 = _xor_tree()
    rt = RandomizedTree(((Fraction(1, 2), t1), (Fraction(1, 2), t2)))
    mu, f = uniform(2), parity(2)
    picked = derandomize(rt, f, mu)
    assert error(picked, f, mu) <= 2 * error(rt, f, mu)
    assert expected_depth(picked, mu) <= 2 * expected_depth(rt, mu)


@given(st.integers(0, 10**6))
@settings(deadline=None, max_examples=30)
def test_tree_json_round_trip(seed):
    rng = random.Random(seed)
    n, k = rng.randint(1, 3), rng.randint(1, 2)
    t = random_tree(rng, n, k)
    assert tree_from_json(tree_to_json(t)) == t


def test_randomized_tree_json_round_trip():
    t1 = DecisionTree(2, 1, Leaf((1,)))
    t2 = _xor_tree()
    rt = RandomizedTree(((Fraction(1, 4), t1), (Fraction(3, 4), t2)))
    assert randomized_tree_from_json(randomized_tree_to_json(rt)) == rt


def test_metric_dimension_checks():
    t = _xor_tree()
    with pytest.raises(DimensionMismatch):
        expected_depth(t, uniform(3))
    with pytest.raises(DimensionMismatch):
        error(t, parity(3), uniform(2))
