"""Decision trees over block-structured inputs, with exact leaf statistics.

A DecisionTree(n, k) queries variables in [0, n*k) and outputs a +-1 label of
width k at each leaf; block i owns variables [i*n, (i+1)*n).  Scalar trees are
the k=1 case.  A RandomizedTree is a finite rational mixture of deterministic
trees; every metric extends to mixtures by linearity.

Leaf identifiers are preorder positions (negative child first), which makes
them stable across serialization round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, InvalidValue, UnreachedLeaf
from .exactexp import fraction_from_str, fraction_to_str
from .functions import (
    BooleanFunction,
    Distribution,
    Measure,
    VectorFunction,
    point_value,
)

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Leaf:
    label: tuple[int, ...]


@dataclass(frozen=True)
class Query:
    var: int
    neg: "Leaf | Query"
    pos: "Leaf | Query"


def _validate(node, total_vars: int, k: int, used: int) -> None:
    if isinstance(node, Leaf):
        if len(node.label) != k:
            raise InvalidValue(f"leaf label width {len(node.label)} != k={k}")
        if any(v not in (-1, 1) for v in node.label):
            raise InvalidValue("leaf labels must be +-1")
        return
    if not isinstance(node, Query):
        raise InvalidValue(f"not a tree node: {node!r}")
    if not 0 <= node.var < total_vars:
        raise InvalidValue(f"query variable {node.var} out of range [0,{total_vars})")
    bit = 1 << node.var
    if used & bit:
        raise InvalidValue(f"variable {node.var} queried twice on one path")
    _validate(node.neg, total_vars, k, used | bit)
    _validate(node.pos, total_vars, k, used | bit)


@dataclass(frozen=True)
class DecisionTree:
    n: int
    k: int
    root: "Leaf | Query"

    def __post_init__(self):
        if self.n < 0 or self.k < 1:
            raise InvalidValue(f"bad shape n={self.n}, k={self.k}")
        _validate(self.root, self.n * self.k, self.k, 0)

    @property
    def total_vars(self) -> int:
        return self.n * self.k


@dataclass(frozen=True)
class RandomizedTree:
    components: tuple[tuple[Fraction, DecisionTree], ...]

    def __post_init__(self):
        if not self.components:
            raise InvalidValue("a randomized tree needs at least one component")
        if any(w <= 0 for w, _ in self.components):
            raise InvalidValue("component weights must be positive")
        if sum(w for w, _ in self.components) != 1:
            raise InvalidValue("component weights must sum to exactly 1")
        n, k = self.components[0][1].n, self.components[0][1].k
        for _, t in self.components:
            if (t.n, t.k) != (n, k):
                raise DimensionMismatch("mixture components disagree on (n, k)")

    @property
    def n(self) -> int:
        return self.components[0][1].n

    @property
    def k(self) -> int:
        return self.components[0][1].k


# ---------------------------------------------------------------------------
# evaluation and leaf enumeration


def evaluate(tree: DecisionTree, point: int) -> tuple[int, ...]:
    node = tree.root
    while isinstance(node, Query):
        node = node.pos if (point >> node.var) & 1 else node.neg
    return node.label


def path_length(tree: DecisionTree, point: int) -> int:
    node, length = tree.root, 0
    while isinstance(node, Query):
        node = node.pos if (point >> node.var) & 1 else node.neg
        length += 1
    return length


@dataclass(frozen=True)
class LeafRef:
    """One leaf plus the subcube of inputs that reach it."""

    leaf_id: int
    label: tuple[int, ...]
    fixed_mask: int
    fixed_vals: int

    @property
    def depth(self) -> int:
        return bin(self.fixed_mask).count("1")


def leaves(tree: DecisionTree) -> list[LeafRef]:
    out: list[LeafRef] = []

    def walk(node, mask: int, vals: int) -> None:
        if isinstance(node, Leaf):
            out.append(LeafRef(len(out), node.label, mask, vals))
            return
        bit = 1 << node.var
        walk(node.neg, mask | bit, vals)
        walk(node.pos, mask | bit, vals | bit)

    walk(tree.root, 0, 0)
    return out


def cube_points(total_vars: int, fixed_mask: int, fixed_vals: int):
    """All packed points of the subcube, free variables enumerated low-to-high."""
    free = [j for j in range(total_vars) if not (fixed_mask >> j) & 1]
    for assign in range(1 << len(free)):
        p = fixed_vals
        for idx, j in enumerate(free):
            if (assign >> idx) & 1:
                p |= 1 << j
        yield p


# ---------------------------------------------------------------------------
# exact metrics (all accept deterministic trees or mixtures)


def _mix(metric, rt, *args):
    return sum((w * metric(t, *args) for w, t in rt.components), _ZERO)


def expected_depth(tree, mu: Distribution) -> Fraction:
    if isinstance(tree, RandomizedTree):
        return _mix(expected_depth, tree, mu)
    if mu.n != tree.total_vars:
        raise DimensionMismatch(f"distribution on {mu.n} vars vs tree on {tree.total_vars}")
    return sum(
        (mu.weights[x] * path_length(tree, x) for x in mu.support()), _ZERO)


def _target_value(target, point):
    if isinstance(target, BooleanFunction):
        return (target.table[point],)
    return target.table[point]


def _check_target(tree, target) -> None:
    if isinstance(target, BooleanFunction):
        if tree.k != 1 or target.n != tree.total_vars:
            raise DimensionMismatch("scalar target needs a k=1 tree on matching variables")
    elif isinstance(target, VectorFunction):
        if (target.n, target.k) != (tree.n, tree.k):
            raise DimensionMismatch("vector target shape mismatch")
    else:
        raise InvalidValue(f"not a function: {target!r}")


def error(tree, target, mu: Distribution) -> Fraction:
    """Probability that the full output tuple differs from the target."""
    if isinstance(tree, RandomizedTree):
        return _mix(error, tree, target, mu)
    _check_target(tree, target)
    if mu.n != tree.total_vars:
        raise DimensionMismatch("distribution size mismatch")
    return sum(
        (mu.weights[x] for x in mu.support()
         if evaluate(tree, x) != _target_value(target, x)), _ZERO)


def correlation(tree, f: BooleanFunction, mu: Distribution) -> Fraction:
    """E_mu[f * T] for scalar trees."""
    if isinstance(tree, RandomizedTree):
        return _mix(correlation, tree, f, mu)
    _check_target(tree, f)
    return sum(
        (mu.weights[x] * f.table[x] * evaluate(tree, x)[0] for x in mu.support()),
        _ZERO)


def threshold_error(tree, target, mu: Distribution, t: int) -> Fraction:
    """Probability that more than t output coordinates differ from the target."""
    if isinstance(tree, RandomizedTree):
        return _mix(threshold_error, tree, target, mu, t)
    _check_target(tree, target)
    if not 0 <= t <= tree.k:
        raise InvalidValue(f"threshold {t} outside [0, {tree.k}]")
    total = _ZERO
    for x in mu.support():
        got = evaluate(tree, x)
        want = _target_value(target, x)
        wrong = sum(1 for a, b in zip(got, want) if a != b)
        if wrong > t:
            total += mu.weights[x]
    return total


def agreement(tree, target, mu: Distribution) -> Fraction:
    """Probability that every output coordinate matches the target."""
    return 1 - error(tree, target, mu)


def leaf_distribution(tree: DecisionTree, mu: Distribution) -> dict[int, Fraction]:
    """Reach probability of every leaf (zero-mass leaves included)."""
    if mu.n != tree.total_vars:
        raise DimensionMismatch("distribution size mismatch")
    out: dict[int, Fraction] = {}
    for ref in leaves(tree):
        out[ref.leaf_id] = sum(
            (mu.weights[p] for p in cube_points(tree.total_vars, ref.fixed_mask, ref.fixed_vals)),
            _ZERO)
    return out


# ---------------------------------------------------------------------------
# per-leaf hardcore statistics


@dataclass(frozen=True)
class LeafStats:
    """Exact conditional statistics of one leaf against (f, H, mu^k).

    Zero-mass leaves keep reach = 0 and None for every conditional field
    rather than being dropped.
    """

    leaf_id: int
    depth: int
    label: tuple[int, ...]
    reach: Fraction
    dens: tuple[Fraction, ...] | None
    adv: tuple[Fraction, ...] | None
    p: tuple[Fraction, ...] | None
    q: tuple[Fraction, ...] | None

    @property
    def dens_total(self) -> Fraction | None:
        return None if self.dens is None else sum(self.dens, _ZERO)

    @property
    def adv_total(self) -> Fraction | None:
        return None if self.adv is None else sum(self.adv, _ZERO)


def leaf_stats(tree: DecisionTree, f: BooleanFunction, h: Measure,
               mu: Distribution) -> list[LeafStats]:
    """Per-leaf, per-block density, advantage, p = (dens-adv)/2, and mistake rate q.

    mu and h live on a single block (n variables); inputs are drawn from the
    k-fold product of mu.  dens is the conditional mass of h on a block, adv
    the absolute conditional correlation of the leaf's label with f on that
    block, and q the conditional probability the label is wrong there.
    """
    n, k = tree.n, tree.k
    if f.n != n or h.n != n or mu.n != n:
        raise DimensionMismatch("leaf_stats expects single-block f, h, mu")
    mask_n = (1 << n) - 1
    out: list[LeafStats] = []
    for ref in leaves(tree):
        mass = _ZERO
        sum_h = [_ZERO] * k
        sum_fyh = [_ZERO] * k
        sum_wrong = [_ZERO] * k
        for point in cube_points(tree.total_vars, ref.fixed_mask, ref.fixed_vals):
            w = Fraction(1)
            blocks = []
            for i in range(k):
                b = (point >> (i * n)) & mask_n
                blocks.append(b)
                w *= mu.weights[b]
                if w == 0:
                    break
            if w == 0:
                continue
            mass += w
            for i, b in enumerate(blocks):
                hv = h.values[b]
                if hv != 0:
                    sum_h[i] += w * hv
                    sum_fyh[i] += w * f.table[b] * ref.label[i] * hv
                if ref.label[i] != f.table[b]:
                    sum_wrong[i] += w
        if mass == 0:
            out.append(LeafStats(ref.leaf_id, ref.depth, ref.label, _ZERO,
                                 None, None, None, None))
            continue
        dens = tuple(s / mass for s in sum_h)
        adv = tuple(abs(s) / mass for s in sum_fyh)
        p = tuple((d - a) / 2 for d, a in zip(dens, adv))
        q = tuple(s / mass for s in sum_wrong)
        out.append(LeafStats(ref.leaf_id, ref.depth, ref.label, mass, dens, adv, p, q))
    return out


def conditional_blocks_at_leaf(tree: DecisionTree, mu: Distribution,
                               leaf_id: int) -> tuple[Distribution, ...]:
    """Per-block conditional input laws at a leaf, under the product of mu.

    Because the source is a product distribution and reaching a leaf fixes a
    subcube, the conditional law factors across blocks; this returns the k
    factors.  Requesting them at a zero-mass leaf raises UnreachedLeaf.
    """
    n, k = tree.n, tree.k
    if mu.n != n:
        raise DimensionMismatch("conditional_blocks_at_leaf expects single-block mu")
    refs = leaves(tree)
    if not 0 <= leaf_id < len(refs):
        raise InvalidValue(f"no leaf {leaf_id}")
    ref = refs[leaf_id]
    factors = []
    for i in range(k):
        marg = []
        for x in range(1 << n):
            ok = True
            for j in range(n):
                gbit = 1 << (i * n + j)
                if ref.fixed_mask & gbit and ((ref.fixed_vals >> (i * n + j)) & 1) != ((x >> j) & 1):
                    ok = False
                    break
            marg.append(mu.weights[x] if ok else _ZERO)
        total = sum(marg, _ZERO)
        if total == 0:
            raise UnreachedLeaf(f"leaf {leaf_id} has zero reach probability")
        factors.append(Distribution(n, tuple(m / total for m in marg)))
    return tuple(factors)


# ---------------------------------------------------------------------------
# mixtures


def derandomize(rt: RandomizedTree, target, mu: Distribution) -> DecisionTree:
    """First component whose error is at most twice the mixture's and whose
    expected depth is at most twice the mixture's.  Averaging guarantees one
    exists."""
    eps = error(rt, target, mu)
    d = expected_depth(rt, mu)
    for _, t in rt.components:
        if error(t, target, mu) <= 2 * eps and expected_depth(t, mu) <= 2 * d:
            return t
    raise InvalidValue("unreachable: no component within twice the averages")


# ---------------------------------------------------------------------------
# serialization


def _node_to_json(node):
    if isinstance(node, Leaf):
        return {"leaf": list(node.label)}
    return {"q": node.var, "neg": _node_to_json(node.neg), "pos": _node_to_json(node.pos)}


def _node_from_json(obj):
    if "leaf" in obj:
        return Leaf(tuple(int(v) for v in obj["leaf"]))
    return Query(int(obj["q"]), _node_from_json(obj["neg"]), _node_from_json(obj["pos"]))


def tree_to_json(tree: DecisionTree) -> dict:
    return {"n": tree.n, "k": tree.k, "root": _node_to_json(tree.root)}


def tree_from_json(obj: dict) -> DecisionTree:
    return DecisionTree(int(obj["n"]), int(obj["k"]), _node_from_json(obj["root"]))


def randomized_tree_to_json(rt: RandomizedTree) -> list:
    return [{"w": fraction_to_str(w), "tree": tree_to_json(t)} for w, t in rt.components]


def randomized_tree_from_json(items) -> RandomizedTree:
    comps = tuple((fraction_from_str(c["w"]), tree_from_json(c["tree"])) for c in items)
    return RandomizedTree(comps)
