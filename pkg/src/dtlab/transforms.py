"""Structure-level tree transforms between single-block and k-block views.

Points over n*k variables are read as k blocks of n bits each; block i
occupies bits i*n .. i*n+n-1.  Every transform here preserves exact rational
semantics: no sampling unless explicitly asked for (monte-carlo embedding).
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .errors import DimensionMismatch, GuardExceeded, InvalidValue
from .functions import BooleanFunction, Distribution, Measure
from .trees import DecisionTree, Leaf, Query, RandomizedTree, cube_points, leaves

_ZERO = Fraction(0)
_ONE = Fraction(1)

# Exact embedding enumerates mu-support^(k-1) fillers per block choice.
MAX_EMBED_VARS = 14


def _rebuild_with_labels(tree: DecisionTree, labels: list[tuple[int, ...]],
                         n: int, k: int) -> DecisionTree:
    """Same query structure, new leaf labels in preorder (neg before pos)."""
    counter = [0]

    def walk(node):
        if isinstance(node, Leaf):
            label = labels[counter[0]]
            counter[0] += 1
            return Leaf(label)
        return Query(node.var, walk(node.neg), walk(node.pos))

    return DecisionTree(n, k, walk(tree.root))


def _block_matches(ref, i: int, n: int, x: int) -> bool:
    """Does block value x agree with the leaf cube's block-i restrictions?"""
    for j in range(n):
        g = i * n + j
        if (ref.fixed_mask >> g) & 1 and ((ref.fixed_vals >> g) & 1) != ((x >> j) & 1):
            return False
    return True


def sign_fix_leaves(tree: DecisionTree, f: BooleanFunction, h: Measure,
                    mu: Distribution) -> DecisionTree:
    """Flip leaf labels per block wherever the signed conditional correlation
    of the label with f, weighted by h, is negative under the k-fold product
    of mu.

    Absolute advantage statistics are unchanged, every per-block signed
    advantage of the result is nonnegative, and labels whose signed
    correlation is zero are kept, so already-fixed trees are fixpoints.
    """
    n, k = f.n, tree.k
    if tree.n != n or h.n != n or mu.n != n:
        raise DimensionMismatch("sign_fix_leaves expects single-block f, h, mu")
    mask_n = (1 << n) - 1
    new_labels: list[tuple[int, ...]] = []
    for ref in leaves(tree):
        signed = [_ZERO] * k
        for point in cube_points(tree.total_vars, ref.fixed_mask, ref.fixed_vals):
            w = _ONE
            blocks = []
            for i in range(k):
                b = (point >> (i * n)) & mask_n
                blocks.append(b)
                w *= mu.weights[b]
                if w == 0:
                    break
            if w == 0:
                continue
            for i, b in enumerate(blocks):
                signed[i] += w * f.table[b] * h.values[b]
        new_labels.append(tuple(
            -lab if lab * s < 0 else lab for lab, s in zip(ref.label, signed)))
    return _rebuild_with_labels(tree, new_labels, n, k)


def _induced_tree(node, filler: int, i: int, n: int):
    """Collapse a k-block node to block i, answering other blocks from filler."""
    if isinstance(node, Leaf):
        return Leaf((node.label[i],))
    block, j = divmod(node.var, n)
    if block == i:
        return Query(j, _induced_tree(node.neg, filler, i, n),
                     _induced_tree(node.pos, filler, i, n))
    child = node.pos if (filler >> node.var) & 1 else node.neg
    return _induced_tree(child, filler, i, n)


def embed_block_reduction(tree: DecisionTree, mu: Distribution,
                          mode: str = "exact", *, seed: int = 0,
                          samples: int = 256) -> RandomizedTree:
    """The single-block randomized tree that embeds its input into a uniformly
    random block and fills the remaining blocks from mu.

    Exact mode enumerates every (block, filler) pair with positive weight and
    merges identical induced trees; its expected depth under mu is exactly
    1/k of the source tree's under the k-fold product, and on sign-fixed
    source trees its h-weighted correlation with f is exactly 1/k of the
    expected total leaf advantage.  Monte-carlo mode samples the same mixture
    (samples components of weight 1/samples) and is for scale only; equality
    claims are asserted against exact mode alone.
    """
    n, k = tree.n, tree.k
    if mu.n != n:
        raise DimensionMismatch("mu must live on a single block")

    components: dict[DecisionTree, Fraction] = {}

    def admit(i: int, filler: int, weight: Fraction) -> None:
        small = DecisionTree(n, 1, _induced_tree(tree.root, filler, i, n))
        components[small] = components.get(small, _ZERO) + weight

    if mode == "exact":
        if tree.total_vars > MAX_EMBED_VARS:
            raise GuardExceeded(
                f"{tree.total_vars} variables exceeds the embedding guard {MAX_EMBED_VARS}")
        share = Fraction(1, k)
        support = mu.support()
        for i in range(k):
            others = [j for j in range(k) if j != i]
            for combo in itertools.product(support, repeat=k - 1):
                w = share
                filler = 0
                for j, b in zip(others, combo):
                    w *= mu.weights[b]
                    filler |= b << (j * n)
                admit(i, filler, w)
    elif mode == "monte-carlo":
        if samples < 1:
            raise InvalidValue("samples must be positive")
        rng = random.Random(seed)
        support = mu.support()

        def draw_block() -> int:
            u = Fraction(rng.random())
            acc = _ZERO
            for b in support:
                acc += mu.weights[b]
                if u < acc:
                    return b
            return support[-1]

        w = Fraction(1, samples)
        for _ in range(samples):
            i = rng.randrange(k)
            filler = 0
            for j in range(k):
                if j != i:
                    filler |= draw_block() << (j * n)
            admit(i, filler, w)
    else:
        raise InvalidValue(f"unknown embedding mode {mode!r}")
    return RandomizedTree(tuple((w, t) for t, w in components.items()))


def product_tree(t_xor: DecisionTree, f: BooleanFunction, mu: Distribution,
                 k: int) -> DecisionTree:
    """Vector-label the leaves of a scalar k-block tree by per-block signs.

    The query structure is kept; each leaf's label entry i becomes the sign
    (ties resolved to +1) of the conditional mean of f on block i given the
    leaf's cube, under the k-fold product of mu.  Leaves unreachable under
    that product get the all-ones label.
    """
    if t_xor.k != 1:
        raise InvalidValue("product_tree expects scalar leaves")
    n = f.n
    if t_xor.n != n * k or mu.n != n:
        raise DimensionMismatch("tree must span k blocks of f's variables")
    new_labels: list[tuple[int, ...]] = []
    for ref in leaves(t_xor):
        label = []
        for i in range(k):
            mass = _ZERO
            signed = _ZERO
            for x in range(1 << n):
                if mu.weights[x] == 0 or not _block_matches(ref, i, n, x):
                    continue
                mass += mu.weights[x]
                signed += mu.weights[x] * f.table[x]
            if mass == 0:
                label = [1] * k
                break
            label.append(1 if signed >= 0 else -1)
        new_labels.append(tuple(label))
    return _rebuild_with_labels(t_xor, new_labels, n, k)


# ---------------------------------------------------------------------------
# parity constructions


def full_parity_tree(m: int) -> DecisionTree:
    """Query all m variables in order; each leaf holds the product of its path."""

    def build(j: int, acc: int):
        if j == m:
            return Leaf((acc,))
        return Query(j, build(j + 1, -acc), build(j + 1, acc))

    return DecisionTree(m, 1, build(0, 1))


def full_parity_product_tree(n: int, k: int) -> DecisionTree:
    """Query all k*n variables; leaf labels are the k per-block parities."""

    def build(var: int, accs: tuple[int, ...]):
        if var == n * k:
            return Leaf(accs)
        b = var // n
        flipped = accs[:b] + (-accs[b],) + accs[b + 1:]
        return Query(var, build(var + 1, flipped), build(var + 1, accs))

    return DecisionTree(n, k, build(0, (1,) * k))


def parity_mixture(n: int, k: int, gamma) -> RandomizedTree:
    """With probability gamma query everything and answer every block parity
    exactly; otherwise answer the all-ones vector without looking."""
    gamma = Fraction(gamma)
    if not 0 < gamma <= 1:
        raise InvalidValue(f"gamma must lie in (0,1], got {gamma}")
    full = full_parity_product_tree(n, k)
    if gamma == 1:
        return RandomizedTree(((_ONE, full),))
    lazy = DecisionTree(n, k, Leaf((1,) * k))
    return RandomizedTree(((gamma, full), (_ONE - gamma, lazy)))
