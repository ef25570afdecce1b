"""Instance-level certification of the leaf-statistics inequalities.

Every verifier returns a BoundReport whose slack (rhs - lhs) must be
nonnegative; a negative slack is a hard failure, never measurement noise,
because each side is computed exactly.  All rational quantities are exact;
whenever e^x enters, the comparison is decided through certified interval
enclosures and refuses to pass on an overlap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .errors import DimensionMismatch, InvalidValue
from .exactexp import DEFAULT_PRECISION_BITS, ExpSum, value_json
from .functions import (
    BooleanFunction,
    Distribution,
    Measure,
    constant_function,
    density,
    direct_product,
    parity,
    product_power,
    uniform,
    xor_power,
)
from .hardcore import HardcoreCertificate
from .synth import opt_depth, pareto_frontier
from .trees import (
    DecisionTree,
    RandomizedTree,
    agreement,
    conditional_blocks_at_leaf,
    correlation,
    cube_points,
    error,
    evaluate,
    expected_depth,
    leaf_stats,
    leaves,
    threshold_error,
)
from .transforms import embed_block_reduction, parity_mixture, product_tree

_ZERO = Fraction(0)
_ONE = Fraction(1)

PHI_IDS = ("exp-neg-z4", "exp-pos-z", "square-dev", "tail-low", "tail-high")


@dataclass(frozen=True)
class BoundReport:
    """One checked inequality: holds iff slack = rhs - lhs is nonnegative.

    hypothesis_ok distinguishes instances outside a statement's hypotheses
    (where holds says nothing) from genuine bound violations.  related keeps
    side values worth reporting without widening the lhs/rhs contract.
    """

    context: str
    lhs: ExpSum
    rhs: ExpSum
    slack: ExpSum
    holds: bool
    hypothesis_ok: bool = True
    related: tuple[tuple[str, object], ...] = ()


def _report(context: str, lhs, rhs, *, hypothesis_ok: bool = True,
            related=(), precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
    lhs = ExpSum.of(lhs)
    rhs = ExpSum.of(rhs)
    slack = rhs - lhs
    return BoundReport(context, lhs, rhs, slack,
                       slack.sign(precision_bits) >= 0, hypothesis_ok,
                       tuple(related))


def _equality_report(context: str, lhs: Fraction, rhs: Fraction,
                     related=()) -> BoundReport:
    l, r = ExpSum.of(lhs), ExpSum.of(rhs)
    return BoundReport(context, l, r, r - l, lhs == rhs, True, tuple(related))


def bound_report_to_json(report: BoundReport,
                         prec_bits: int = DEFAULT_PRECISION_BITS) -> dict:
    def val(v):
        if isinstance(v, bool) or not isinstance(v, (ExpSum, Fraction, int)):
            return v
        return value_json(ExpSum.of(v), prec_bits)

    return {
        "context": report.context,
        "lhs": val(report.lhs),
        "rhs": val(report.rhs),
        "slack": val(report.slack),
        "holds": report.holds,
        "hypothesis_ok": report.hypothesis_ok,
        "related": {k: val(v) for k, v in report.related},
    }


def bound_report_csv_row(report: BoundReport,
                         prec_bits: int = DEFAULT_PRECISION_BITS) -> tuple:
    def flat(v):
        j = value_json(v, prec_bits)
        return j if isinstance(j, str) else f"[{j[0]},{j[1]}]"

    return (report.context, flat(report.lhs), flat(report.rhs),
            flat(report.slack), str(report.holds).lower())


# ---------------------------------------------------------------------------
# Bernoulli sums and closed-form tail bounds


@dataclass(frozen=True)
class BerSumDist:
    """Distribution of a sum of independent Bernoulli(p_i) variables."""

    p: tuple[Fraction, ...]
    pmf: tuple[Fraction, ...]


def ber_sum(p) -> BerSumDist:
    probs = tuple(Fraction(v) for v in p)
    if any(not 0 <= v <= 1 for v in probs):
        raise InvalidValue("Bernoulli parameters must lie in [0,1]")
    pmf = [_ONE]
    for v in probs:
        nxt = [_ZERO] * (len(pmf) + 1)
        for z, w in enumerate(pmf):
            nxt[z] += w * (1 - v)
            nxt[z + 1] += w * v
        pmf = nxt
    return BerSumDist(probs, tuple(pmf))


def binomial(k: int, delta) -> BerSumDist:
    return ber_sum((Fraction(delta),) * k)


def ber_sum_cdf(dist: BerSumDist, t) -> Fraction:
    """Pr[z <= t]; t may be any rational."""
    t = Fraction(t)
    if t < 0:
        return _ZERO
    return sum(dist.pmf[: min(len(dist.pmf), floor(t) + 1)], _ZERO)


def chernoff_lower(mu_sum, t) -> ExpSum:
    """Closed-form bound exp(-(mu-t)^2/(2 mu)) on the lower tail Pr[z <= t].

    Reported as the vacuous 1 when t exceeds the mean (or the mean is 0).
    """
    mu_sum, t = Fraction(mu_sum), Fraction(t)
    if mu_sum < 0 or t < 0:
        raise InvalidValue("chernoff_lower needs nonnegative mean and threshold")
    if t > mu_sum or mu_sum == 0:
        return ExpSum.of(1)
    return ExpSum.exp(-((mu_sum - t) ** 2) / (2 * mu_sum))


def chernoff_upper2x(mu_sum) -> ExpSum:
    """Closed-form bound exp(-mu/3) on the upper tail Pr[z >= 2 mu]."""
    mu_sum = Fraction(mu_sum)
    if mu_sum < 0:
        raise InvalidValue("chernoff_upper2x needs a nonnegative mean")
    return ExpSum.exp(-mu_sum / 3)


def g_func(t, z) -> ExpSum:
    """min(1, e^{t - z/4}), decided exactly: the min picks 1 iff t >= z/4."""
    t, z = Fraction(t), Fraction(z)
    e = t - z / 4
    return ExpSum.of(1) if e >= 0 else ExpSum.exp(e)


def lipschitz_check(t, z, delta, form: str = "plain", *,
                    precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
    """g_t(z - delta) <= g_t(z) + delta/4 (plain) or + delta/t (scaled).

    The scaled form is only claimed for z >= 5t with t > 0; asking for it
    outside that range is an error, not a failed bound.
    """
    t, z, delta = Fraction(t), Fraction(z), Fraction(delta)
    if t < 0 or z < 0 or delta < 0:
        raise InvalidValue("lipschitz_check needs nonnegative t, z, delta")
    if form == "plain":
        step = delta / 4
    elif form == "scaled":
        if t == 0 or z < 5 * t:
            raise InvalidValue(
                f"scaled form needs z >= 5t with t > 0, got t={t}, z={z}")
        step = delta / t
    else:
        raise InvalidValue(f"unknown form {form!r}")
    return _report(f"lipschitz-{form}", g_func(t, z - delta),
                   g_func(t, z) + step, precision_bits=precision_bits)


# ---------------------------------------------------------------------------
# leaf-statistics inequalities


def _reachable_density_stats(tree: DecisionTree, h: Measure,
                             mu: Distribution) -> list[tuple[Fraction, Fraction]]:
    """(reach, total density) for every leaf with positive mass."""
    stats = leaf_stats(tree, constant_function(h.n, 1), h, mu)
    return [(s.reach, s.dens_total) for s in stats if s.reach > 0]


def verify_density_conservation(tree: DecisionTree, h: Measure,
                                mu: Distribution) -> BoundReport:
    """Reach-weighted total leaf density equals delta*k exactly."""
    if h.n != mu.n or tree.n != mu.n:
        raise DimensionMismatch("verify_density_conservation expects single-block h, mu")
    total = sum((reach * dens for reach, dens
                 in _reachable_density_stats(tree, h, mu)), _ZERO)
    return _equality_report("density-conservation", total,
                            density(h, mu) * tree.k)


def verify_resilience(tree: DecisionTree, h: Measure, mu: Distribution,
                      phi_id: str, *,
                      precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
    """Leaf-averaged Phi of the total density against its binomial ceiling.

    For convex Phi the leaf average is dominated by the Binomial(k, delta)
    average with delta the density of h under mu; the two tail variants check
    the derived closed-form bounds instead.
    """
    if h.n != mu.n or tree.n != mu.n:
        raise DimensionMismatch("verify_resilience expects single-block h, mu")
    k = tree.k
    delta = density(h, mu)
    pairs = _reachable_density_stats(tree, h, mu)
    bino = binomial(k, delta)

    if phi_id == "exp-neg-z4":
        lhs = sum((ExpSum.exp(-dens / 4, reach) for reach, dens in pairs),
                  ExpSum.of(0))
        rhs = sum((ExpSum.exp(Fraction(-z, 4), w) for z, w in enumerate(bino.pmf)),
                  ExpSum.of(0))
    elif phi_id == "exp-pos-z":
        lhs = sum((ExpSum.exp(dens, reach) for reach, dens in pairs),
                  ExpSum.of(0))
        rhs = sum((ExpSum.exp(Fraction(z), w) for z, w in enumerate(bino.pmf)),
                  ExpSum.of(0))
    elif phi_id == "square-dev":
        mean = delta * k
        lhs = sum((reach * (dens - mean) ** 2 for reach, dens in pairs), _ZERO)
        rhs = k * delta * (1 - delta)
    elif phi_id == "tail-low":
        lhs = sum((reach for reach, dens in pairs if dens <= delta * k / 2), _ZERO)
        rhs = ExpSum.exp(-delta * k / 8)
    elif phi_id == "tail-high":
        lhs = sum((reach for reach, dens in pairs if dens >= 2 * delta * k), _ZERO)
        rhs = ExpSum.exp(-delta * k / 3)
    else:
        raise InvalidValue(f"unknown phi_id {phi_id!r}; know {PHI_IDS}")
    return _report(f"resilience-{phi_id}", lhs, rhs,
                   related=(("delta", delta), ("k", k)),
                   precision_bits=precision_bits)


def verify_accuracy_bound(tree: DecisionTree, f: BooleanFunction, h: Measure,
                          mu: Distribution, t: int, *,
                          precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
    """Probability of at most t wrong blocks against the leaf Bernoulli-sum form.

    The lhs is recomputed by direct point enumeration, never from the leaf
    statistics the rhs uses.  Also emits the coarser exponential form
    E_leaf[g_t(dens - adv)] and certifies it dominates the Bernoulli-sum rhs.
    """
    k = tree.k
    if not 0 <= t <= k:
        raise InvalidValue(f"threshold must lie in [0,{k}], got {t}")
    target = direct_product(f, k)
    mu_k = product_power(mu, k)
    lhs = 1 - threshold_error(tree, target, mu_k, t)

    stats = [s for s in leaf_stats(tree, f, h, mu) if s.reach > 0]
    rhs = sum((s.reach * ber_sum_cdf(ber_sum(s.p), t) for s in stats), _ZERO)
    g_form = sum(
        (g_func(t, s.dens_total - s.adv_total).scale(s.reach) for s in stats),
        ExpSum.of(0))
    g_dominates = (g_form - rhs).sign(precision_bits) >= 0
    return _report("accuracy-from-stats", lhs, rhs,
                   related=(("g_form", g_form), ("g_form_dominates", g_dominates)),
                   precision_bits=precision_bits)


def verify_error_no_advantage(tree: DecisionTree, h: Measure, mu: Distribution,
                              *, precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
    """Leaf-averaged g at threshold delta*k/10, advantage ignored, against
    the closed form e^{-0.121 delta k}."""
    if h.n != mu.n or tree.n != mu.n:
        raise DimensionMismatch("verify_error_no_advantage expects single-block h, mu")
    k = tree.k
    delta = density(h, mu)
    t = delta * k / 10
    lhs = sum((g_func(t, dens).scale(reach)
               for reach, dens in _reachable_density_stats(tree, h, mu)),
              ExpSum.of(0))
    rhs = ExpSum.exp(-Fraction(121, 1000) * delta * k)
    return _report("error-no-advantage", lhs, rhs,
                   related=(("delta", delta), ("k", k)),
                   precision_bits=precision_bits)


def verify_bounds_from_hardcore(tree: DecisionTree, cert: HardcoreCertificate,
                                *, precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
    """End of the pipeline: a certified hardcore measure caps the probability
    that a depth-k*d tree gets all but a tenth-of-delta*k fraction of blocks
    right, at e^{-delta*k/10} + 10*gamma.

    delta here is the certified measure's density (half the solver's target).
    Trees over budget are reported with hypothesis_ok False, not as failures.
    """
    f, mu, h = cert.f, cert.mu, cert.measure
    if tree.n != f.n:
        raise DimensionMismatch("tree blocks must match the certificate's function")
    k = tree.k
    delta = density(h, mu)
    mu_k = product_power(mu, k)
    hypothesis_ok = expected_depth(tree, mu_k) <= k * cert.depth_budget

    t = delta * k / 10
    lhs = 1 - threshold_error(tree, direct_product(f, k), mu_k, floor(t))
    rhs = ExpSum.exp(-t) + 10 * cert.gamma
    return _report("bounds-from-hardcore", lhs, rhs,
                   hypothesis_ok=hypothesis_ok,
                   related=(("delta", delta), ("k", k),
                            ("gamma_vacuous", cert.gamma >= Fraction(1, 10))),
                   precision_bits=precision_bits)


# ---------------------------------------------------------------------------
# structural laws


def verify_leaf_product(tree: DecisionTree, mu: Distribution) -> BoundReport:
    """Conditional input law at each reachable leaf factors across blocks.

    lhs is the total absolute deviation between the conditional joint and the
    product of its per-block marginals; the law holds iff it is exactly 0.
    """
    n, k = tree.n, tree.k
    if mu.n != n:
        raise DimensionMismatch("verify_leaf_product expects single-block mu")
    mu_k = product_power(mu, k)
    mask_n = (1 << n) - 1
    deviation = _ZERO
    for ref in leaves(tree):
        reach = sum((mu_k.weights[p] for p in
                     cube_points(tree.total_vars, ref.fixed_mask, ref.fixed_vals)),
                    _ZERO)
        if reach == 0:
            continue
        factors = conditional_blocks_at_leaf(tree, mu, ref.leaf_id)
        for p in cube_points(tree.total_vars, ref.fixed_mask, ref.fixed_vals):
            joint = mu_k.weights[p] / reach
            prod = _ONE
            for i in range(k):
                prod *= factors[i].weights[(p >> (i * n)) & mask_n]
            deviation += abs(joint - prod)
    return BoundReport("leaf-product-law", ExpSum.of(deviation), ExpSum.of(0),
                       ExpSum.of(-deviation), deviation == 0)


def verify_embedding(tree: DecisionTree, f: BooleanFunction, h: Measure,
                     mu: Distribution) -> list[BoundReport]:
    """Exact identities of the block embedding on a sign-fixed source tree:
    k times the small tree's expected depth equals the large tree's, and k
    times its h-weighted correlation with f equals the expected total leaf
    advantage."""
    k = tree.k
    mu_k = product_power(mu, k)
    small = embed_block_reduction(tree, mu)

    depth_lhs = k * expected_depth(small, mu)
    depth_rhs = expected_depth(tree, mu_k)

    corr = sum(
        (w * sum((mu.weights[x] * f.table[x] * h.values[x] * evaluate(c, x)[0]
                  for x in mu.support()), _ZERO)
         for w, c in small.components), _ZERO)
    stats = leaf_stats(tree, f, h, mu)
    adv = sum((s.reach * s.adv_total for s in stats if s.reach > 0), _ZERO)
    return [
        _equality_report("embedding-depth-identity", depth_lhs, depth_rhs),
        _equality_report("embedding-advantage-identity", k * corr, adv),
    ]


def verify_product_tree(t_xor: DecisionTree, f: BooleanFunction,
                        mu: Distribution, k: int) -> BoundReport:
    """Vector success probability of the relabeled tree dominates the scalar
    correlation with the XOR of the blocks."""
    mu_k = product_power(mu, k)
    t_prod = product_tree(t_xor, f, mu, k)
    lhs = correlation(t_xor, xor_power(f, k), mu_k)
    rhs = agreement(t_prod, direct_product(f, k), mu_k)
    return _report("product-tree-success", lhs, rhs)


def verify_parity_leaf_error(tree: DecisionTree) -> BoundReport:
    """Every leaf that leaves a block's parity undetermined errs on that block
    with conditional probability exactly 1/2 under the uniform distribution.

    lhs is the largest absolute deviation from 1/2 over all such (leaf, block)
    pairs; the claim holds iff it is exactly 0.
    """
    n, k = tree.n, tree.k
    par = parity(n)
    mask_n = (1 << n) - 1
    worst = _ZERO
    checked = 0
    for ref in leaves(tree):
        block_fixed = [0] * k
        for j in range(tree.total_vars):
            if (ref.fixed_mask >> j) & 1:
                block_fixed[j // n] += 1
        cube = list(cube_points(tree.total_vars, ref.fixed_mask, ref.fixed_vals))
        for i in range(k):
            if block_fixed[i] >= n:
                continue
            wrong = sum(1 for p in cube
                        if ref.label[i] != par.table[(p >> (i * n)) & mask_n])
            worst = max(worst, abs(Fraction(wrong, len(cube)) - Fraction(1, 2)))
            checked += 1
    return BoundReport("parity-shallow-leaf-error", ExpSum.of(worst),
                       ExpSum.of(0), ExpSum.of(-worst), worst == 0,
                       related=(("pairs_checked", checked),))


def parity_counterexample(n: int, k: int, gamma) -> tuple[RandomizedTree, BoundReport]:
    """The mixture that queries everything with probability gamma: expected
    depth exactly gamma*k*n and vector error exactly (1-gamma)(1-2^-k) on the
    uniform product, with the shallow-leaf half-error law checked on every
    component."""
    gamma = Fraction(gamma)
    rt = parity_mixture(n, k, gamma)
    mu_k = product_power(uniform(n), k)
    target = direct_product(parity(n), k)

    depth = expected_depth(rt, mu_k)
    err = error(rt, target, mu_k)
    depth_target = gamma * k * n
    err_target = (1 - gamma) * (1 - Fraction(1, 2 ** k))
    shallow_ok = all(verify_parity_leaf_error(t).holds for _, t in rt.components)

    report = BoundReport(
        "parity-mixture-claim", ExpSum.of(err), ExpSum.of(err_target),
        ExpSum.of(err_target - err),
        err == err_target and depth == depth_target and shallow_ok,
        related=(("expected_depth", depth), ("depth_target", depth_target),
                 ("shallow_leaf_law", shallow_ok)))
    return rt, report


def xor_vs_product_gap(f: BooleanFunction, mu: Distribution, k: int, eps, *,
                       precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
    """Halving the error budget, the XOR of k blocks is at least as deep as
    the k-block direct product; also records that the XOR task is free at
    error 1/2."""
    eps = Fraction(eps)
    mu_k = product_power(mu, k)
    fx = pareto_frontier(xor_power(f, k), mu_k)
    fp = pareto_frontier(direct_product(f, k), mu_k)
    lhs = opt_depth(fp, eps)
    rhs = opt_depth(fx, eps / 2)
    if lhs is None or rhs is None:
        raise InvalidValue("error-frontier targets are always feasible")
    return _report("xor-vs-product-depth", lhs, rhs,
                   related=(("xor_depth_at_half", opt_depth(fx, Fraction(1, 2))),),
                   precision_bits=precision_bits)


def constant_chain_reports(*, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[BoundReport]:
    """Standalone numeric facts the closed forms lean on: e^{-1/4} <= 779/1000
    and the residual rate 9/10 - e^{-1/4} >= 121/1000."""
    quarter = ExpSum.exp(Fraction(-1, 4))
    return [
        _report("exp-quarter-upper", quarter, Fraction(779, 1000),
                precision_bits=precision_bits),
        _report("exp-rate-constant", Fraction(121, 1000),
                Fraction(9, 10) - quarter, precision_bits=precision_bits),
    ]
