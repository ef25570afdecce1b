"""Sign fixing, block embedding, product trees, and parity constructions."""

import random
from fractions import Fraction

import pytest

from dtlab.errors import DimensionMismatch, GuardExceeded, InvalidValue
from dtlab.functions import (
    Distribution,
    constant_measure,
    dictator,
    direct_product,
    parity,
    product_power,
    uniform,
    xor_power,
)
from dtlab.instances import (
    random_distribution,
    random_function,
    random_measure,
    random_scalar_tree,
    random_tree,
)
from dtlab.transforms import (
    _rebuild_with_labels,
    embed_block_reduction,
    full_parity_product_tree,
    full_parity_tree,
    parity_mixture,
    product_tree,
    sign_fix_leaves,
)
from dtlab.trees import (
    DecisionTree,
    Leaf,
    agreement,
    correlation,
    error,
    evaluate,
    expected_depth,
    leaf_stats,
    leaves,
    path_length,
)

F = Fraction


def _weighted_corr(tree, f, h, mu, k):
    # sum over blocks of E[f(block) * label_block * H(block)] on the product
    prod = product_power(mu, k)
    total = F(0)
    for x in prod.support():
        lab = evaluate(tree, x)
        for i in range(k):
            b = (x >> (i * tree.n)) & ((1 << tree.n) - 1)
            total += prod.weight(x) * f.value(b) * lab[i] * h.value(b)
    return total


def test_sign_fix_is_idempotent_and_never_hurts():
    rng = random.Random(42)
    for _ in range(15):
        n, k = rng.randint(1, 2), rng.randint(1, 3)
        t = random_tree(rng, n, k)
        f = random_function(rng, n)
        h = random_measure(rng, n)
        mu = random_distribution(rng, n)
        fixed = sign_fix_leaves(t, f, h, mu)
        assert sign_fix_leaves(fixed, f, h, mu) == fixed
        assert _weighted_corr(fixed, f, h, mu, k) >= _weighted_corr(t, f, h, mu, k)


def test_sign_fix_flips_an_anti_correlated_label():
    t = DecisionTree(1, 1, Leaf((-1,)))
    f = dictator(1, 0)
    # balanced signed mass: already a fixpoint, nothing flips
    fixed = sign_fix_leaves(t, f, constant_measure(1, F(1)), uniform(1))
    assert fixed == DecisionTree(1, 1, Leaf((-1,)))
    skew = Distribution(1, (F(1, 4), F(3, 4)))
    fixed2 = sign_fix_leaves(t, f, constant_measure(1, F(1)), skew)
    assert fixed2 == DecisionTree(1, 1, Leaf((1,)))


def test_embedding_depth_identity():
    rng = random.Random(17)
    for _ in range(10):
        n, k = rng.randint(1, 2), rng.randint(1, 3)
        t = random_tree(rng, n, k)
        mu = random_distribution(rng, n)
        rt = embed_block_reduction(t, mu)
        assert sum(w for w, _ in rt.components) == 1
        prod = product_power(mu, k)
        assert k * expected_depth(rt, mu) == expected_depth(t, prod)


def test_embedding_of_single_block_is_identity():
    rng = random.Random(23)
    t = random_tree(rng, 3, 1)
    mu = random_distribution(rng, 3)
    rt = embed_block_reduction(t, mu)
    assert rt.components == ((F(1), t),)


def test_embedding_guard():
    t = full_parity_product_tree(4, 4)  # 16 variables
    with pytest.raises(GuardExceeded):
        embed_block_reduction(t, uniform(4))


def test_monte_carlo_embedding_samples_exact_components():
    rng = random.Random(5)
    t = random_tree(rng, 2, 2)
    mu = random_distribution(rng, 2)
    exact = {comp for _, comp in embed_block_reduction(t, mu).components}
    mc = embed_block_reduction(t, mu, mode="monte-carlo", seed=3, samples=64)
    assert sum(w for w, _ in mc.components) == 1
    assert {comp for _, comp in mc.components} <= exact
    again = embed_block_reduction(t, mu, mode="monte-carlo", seed=3, samples=64)
    assert mc == again
    other = embed_block_reduction(t, mu, mode="monte-carlo", seed=4, samples=64)
    assert sum(w for w, _ in other.components) == 1


def test_unknown_embedding_mode_rejected():
    t = DecisionTree(1, 1, Leaf((1,)))
    with pytest.raises(InvalidValue):
        embed_block_reduction(t, uniform(1), mode="guess")


def test_product_tree_keeps_structure_and_beats_xor_success():
    rng = random.Random(31)
    for _ in range(15):
        n, k = rng.choice(((1, 2), (2, 2), (1, 3)))
        f = random_function(rng, n)
        mu = random_distribution(rng, n)
        t_xor = random_scalar_tree(rng, n * k)
        built = product_tree(t_xor, f, mu, k)
        assert built.n == n and built.k == k
        prod = product_power(mu, k)
        for x in prod.support():
            assert path_length(built, x) == path_length(t_xor, x)
        succ = agreement(built, direct_product(f, k), prod)
        xor_corr = correlation(t_xor, xor_power(f, k), prod)
        assert succ >= xor_corr


def test_product_tree_labels_are_locally_optimal():
    rng = random.Random(59)
    n, k = 2, 2
    f = random_function(rng, n)
    mu = random_distribution(rng, n, allow_zeros=False)
    t_xor = random_scalar_tree(rng, n * k)
    built = product_tree(t_xor, f, mu, k)
    prod = product_power(mu, k)
    target = direct_product(f, k)
    base = agreement(built, target, prod)
    labels = [ref.label for ref in leaves(built)]
    for li, lab in enumerate(labels):
        for blk in range(k):
            flipped = list(labels)
            flipped[li] = tuple(-v if i == blk else v for i, v in enumerate(lab))
            other = _rebuild_with_labels(built, flipped, n, k)
            assert agreement(other, target, prod) <= base


def test_full_parity_tree_is_exact():
    for m in (1, 2, 3):
        t = full_parity_tree(m)
        f = parity(m)
        for x in range(1 << m):
            assert evaluate(t, x) == (f.value(x),)
            assert path_length(t, x) == m


def test_full_parity_product_tree_is_exact():
    t = full_parity_product_tree(2, 2)
    g = direct_product(parity(2), 2)
    for x in range(16):
        assert evaluate(t, x) == g.value(x)
        assert path_length(t, x) == 4


def test_parity_mixture_exact_depth_and_error():
    n, k, gamma = 2, 2, F(1, 4)
    rt = parity_mixture(n, k, gamma)
    prod = product_power(uniform(n), k)
    g = direct_product(parity(n), k)
    assert expected_depth(rt, prod) == gamma * k * n
    assert error(rt, g, prod) == (1 - gamma) * (1 - F(1, 2 ** k))


def test_parity_mixture_gamma_one_is_deterministic():
    rt = parity_mixture(2, 2, 1)
    assert len(rt.components) == 1
    assert rt.components[0][0] == 1


def test_parity_mixture_rejects_bad_gamma():
    with pytest.raises(InvalidValue):
        parity_mixture(2, 2, 0)
    with pytest.raises(InvalidValue):
        parity_mixture(2, 2, F(3, 2))


def test_product_tree_block_width_validation():
    t = full_parity_tree(3)
    with pytest.raises(DimensionMismatch):
        product_tree(t, parity(2), uniform(2), 2)  # 3 vars is not 2*2
