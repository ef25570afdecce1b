"""Registered verification scenarios and deterministic run reports.

A scenario is a pure function from (params, precision) to a list of checks,
each carrying a BoundReport.  Reports contain no timing or environment data:
identical config must serialize to byte-identical JSON.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .bounds import (
    BoundReport,
    bound_report_to_json,
    chernoff_lower,
    constant_chain_reports,
    lipschitz_check,
    parity_counterexample,
    verify_accuracy_bound,
    verify_density_conservation,
    verify_embedding,
    verify_leaf_product,
    verify_product_tree,
    verify_resilience,
    xor_vs_product_gap,
    PHI_IDS,
)
from .errors import InvalidValue
from .exactexp import DEFAULT_PRECISION_BITS, ExpSum, fraction_to_str
from .functions import (
    BooleanFunction,
    dictator,
    direct_product,
    no_error_reduction_function,
    parity,
    product_power,
    uniform,
)
from .hardcore import (
    HardcoreCertificate,
    certificate_to_json,
    committee_metrics,
    committee_to_json,
    hardcore_solve,
    verify_certificate,
)
from .instances import (
    leaf_product_instances,
    random_distribution,
    sign_fixed_instances,
    standard_verification_instances,
    xor_tree_instances,
)
from .synth import enumerate_all_trees, frontier_to_json, opt_depth, pareto_frontier
from .trees import error as tree_error, expected_depth

_ZERO = Fraction(0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    report: BoundReport

    @property
    def ok(self) -> bool:
        return self.report.holds


@dataclass(frozen=True)
class ScenarioResult:
    scenario: str
    params: dict
    checks: tuple[CheckResult, ...]
    artifacts: dict


def _flag_report(context: str, ok: bool, related=()) -> BoundReport:
    """Boolean fact wrapped as 'indicator equals 1' so reports stay uniform."""
    ind = ExpSum.of(1 if ok else 0)
    one = ExpSum.of(1)
    return BoundReport(context, ind, one, one - ind, ok, True, tuple(related))


def _equal(context: str, lhs: Fraction, rhs: Fraction, related=()) -> BoundReport:
    l, r = ExpSum.of(lhs), ExpSum.of(rhs)
    return BoundReport(context, l, r, r - l, lhs == rhs, True, tuple(related))


# ---------------------------------------------------------------------------
# parameter plumbing


def _params(raw: dict, defaults: dict) -> dict:
    unknown = set(raw) - set(defaults)
    if unknown:
        raise InvalidValue(f"unknown parameters {sorted(unknown)}; "
                           f"accepted: {sorted(defaults)}")
    merged = dict(defaults)
    merged.update(raw)
    return merged


def _as_fraction(value) -> Fraction:
    if isinstance(value, str):
        if "/" in value:
            num, den = value.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(value))
    return Fraction(value)


def _as_int(value, lo: int, hi: int, what: str) -> int:
    v = int(value)
    if not lo <= v <= hi:
        raise InvalidValue(f"{what} must lie in [{lo},{hi}], got {v}")
    return v


# ---------------------------------------------------------------------------
# scenarios


def _scn_parity_claim(params: dict, prec: int):
    n = _as_int(params["n"], 1, 8, "n")
    eps = _as_fraction(params["eps"])
    if not 0 <= eps <= Fraction(1, 2):
        raise InvalidValue("eps must lie in [0,1/2]")
    frontier = pareto_frontier(parity(n), uniform(n))
    depth = opt_depth(frontier, eps)
    target = n * (1 - 2 * eps)
    checks = [CheckResult(
        f"depth-at-eps-{fraction_to_str(eps)}",
        _equal("parity-depth", depth, target,
               related=(("n", n), ("eps", eps))))]
    return checks, {"frontier": frontier_to_json(frontier)}


def _scn_no_boosting(params: dict, prec: int):
    n = _as_int(params["n"], 2, 8, "n")
    f = no_error_reduction_function(n)
    frontier = pareto_frontier(f, uniform(n))
    quarter = opt_depth(frontier, Fraction(1, 4))
    eighth = opt_depth(frontier, Fraction(1, 8))
    floor_target = Fraction(n - 1, 4)
    checks = [
        CheckResult("depth-at-quarter-is-zero",
                    _equal("no-boosting-free-quarter", quarter, _ZERO,
                           related=(("n", n),))),
        CheckResult("depth-at-eighth-floor",
                    BoundReport("no-boosting-eighth-floor",
                                ExpSum.of(floor_target), ExpSum.of(eighth),
                                ExpSum.of(eighth - floor_target),
                                eighth >= floor_target,
                                related=(("n", n),))),
    ]
    return checks, {"frontier": frontier_to_json(frontier)}


def _brute_frontier(trees, f, mu):
    pts = sorted(set((expected_depth(t, mu), tree_error(t, f, mu)) for t in trees))
    best = []
    cur = None
    for d, e in pts:
        if cur is None or e < cur:
            best.append((d, e))
            cur = e
    return best


def _scn_frontier_oracle(params: dict, prec: int):
    seed = int(params["seed"])
    per_function = _as_int(params["distributions"], 1, 20, "distributions")
    rng = random.Random(seed)
    trees = enumerate_all_trees(2, 1)
    checks = []
    for idx, labels in enumerate(itertools.product((1, -1), repeat=4)):
        f = BooleanFunction(2, labels)
        mismatches = 0
        for _ in range(per_function):
            mu = random_distribution(rng, 2)
            dp = [(p.depth, p.value) for p in pareto_frontier(f, mu).points]
            if dp != _brute_frontier(trees, f, mu):
                mismatches += 1
        checks.append(CheckResult(
            f"table-{idx:02d}",
            _flag_report("frontier-matches-enumeration", mismatches == 0,
                         related=(("distributions", per_function),))))
    return checks, {}


def _scn_density_conservation(params: dict, prec: int):
    seed = int(params["seed"])
    count = _as_int(params["count"], 1, 1000, "count")
    checks = []
    for i, (tree, _f, h, mu) in enumerate(
            standard_verification_instances(seed, count)):
        checks.append(CheckResult(
            f"instance-{i:03d}", verify_density_conservation(tree, h, mu)))
    return checks, {}


def _scn_resilience(params: dict, prec: int):
    seed = int(params["seed"])
    count = _as_int(params["count"], 1, 1000, "count")
    checks = []
    for i, (tree, _f, h, mu) in enumerate(
            standard_verification_instances(seed, count)):
        for phi in PHI_IDS:
            checks.append(CheckResult(
                f"instance-{i:03d}-{phi}",
                verify_resilience(tree, h, mu, phi, precision_bits=prec)))
    return checks, {}


def _scn_accuracy_bound(params: dict, prec: int):
    seed = int(params["seed"])
    count = _as_int(params["count"], 1, 1000, "count")
    checks = []
    for i, (tree, f, h, mu) in enumerate(
            standard_verification_instances(seed, count)):
        for t in range(tree.k + 1):
            checks.append(CheckResult(
                f"instance-{i:03d}-t{t}",
                verify_accuracy_bound(tree, f, h, mu, t, precision_bits=prec)))
    return checks, {}


def _scn_leaf_product(params: dict, prec: int):
    seed = int(params["seed"])
    count = _as_int(params["count"], 1, 500, "count")
    checks = []
    for i, (tree, mu) in enumerate(leaf_product_instances(seed, count)):
        checks.append(CheckResult(
            f"instance-{i:03d}", verify_leaf_product(tree, mu)))
    return checks, {}


def _scn_embedding(params: dict, prec: int):
    seed = int(params["seed"])
    count = _as_int(params["count"], 1, 500, "count")
    checks = []
    for i, (tree, f, h, mu) in enumerate(sign_fixed_instances(seed, count)):
        for rep in verify_embedding(tree, f, h, mu):
            checks.append(CheckResult(f"instance-{i:03d}-{rep.context}", rep))
    return checks, {}


def _scn_hardcore_pipeline(params: dict, prec: int):
    seed = int(params["seed"])
    gamma = _as_fraction(params["gamma"])
    checks = []
    artifacts = {}
    for n in (2, 3):
        f, mu = parity(n), uniform(n)
        for delta in (Fraction(1, 4), Fraction(1, 8)):
            for budget in (Fraction(0), Fraction(n)):
                tag = f"parity{n}-delta-{fraction_to_str(delta)}-d-{fraction_to_str(budget)}"
                result = hardcore_solve(f, mu, delta, gamma, budget, seed=seed)
                if isinstance(result, HardcoreCertificate):
                    recheck = verify_certificate(result)
                    checks.append(CheckResult(
                        f"{tag}-certificate",
                        _flag_report("certificate-recheck", recheck["ok"],
                                     related=tuple(
                                         (k, v) for k, v in recheck.items()
                                         if k != "ok"))))
                    artifacts[tag] = certificate_to_json(result)
                else:
                    err, cost = committee_metrics(result, f, mu)
                    checks.append(CheckResult(
                        f"{tag}-committee-error",
                        BoundReport("committee-error", ExpSum.of(err),
                                    ExpSum.of(delta), ExpSum.of(delta - err),
                                    err <= delta,
                                    related=(("r", result.r),))))
                    checks.append(CheckResult(
                        f"{tag}-committee-cost",
                        BoundReport("committee-cost", ExpSum.of(cost),
                                    ExpSum.of(result.r * budget),
                                    ExpSum.of(result.r * budget - cost),
                                    cost <= result.r * budget,
                                    related=(("r", result.r),))))
                    artifacts[tag] = committee_to_json(result)
    return checks, artifacts


def _scn_product_tree(params: dict, prec: int):
    seed = int(params["seed"])
    count = _as_int(params["count"], 1, 1000, "count")
    checks = []
    for i, (tree, f, mu, k) in enumerate(xor_tree_instances(seed, count)):
        checks.append(CheckResult(
            f"instance-{i:03d}", verify_product_tree(tree, f, mu, k)))
    eps = _as_fraction(params["eps"])
    for f, k, tag in ((dictator(1, 0), 2, "single-bit-k2"),
                      (parity(2), 2, "parity2-k2")):
        checks.append(CheckResult(
            f"xor-vs-product-{tag}",
            xor_vs_product_gap(f, uniform(f.n), k, eps, precision_bits=prec)))
    return checks, {}


def _scn_parity_direct_product(params: dict, prec: int):
    n = _as_int(params["n"], 1, 4, "n")
    k = _as_int(params["k"], 1, 4, "k")
    gamma = _as_fraction(params["gamma"])
    rt, report = parity_counterexample(n, k, gamma)
    frontier = pareto_frontier(direct_product(parity(n), k),
                               product_power(uniform(n), k))
    depth_at = opt_depth(frontier, 1 - gamma)
    cap = gamma * k * n
    checks = [
        CheckResult("mixture-achieves-claim", report),
        CheckResult("frontier-confirms-upper-bound",
                    BoundReport("direct-product-depth-upper",
                                ExpSum.of(depth_at), ExpSum.of(cap),
                                ExpSum.of(cap - depth_at), depth_at <= cap,
                                related=(("n", n), ("k", k), ("gamma", gamma)))),
    ]
    return checks, {"frontier": frontier_to_json(frontier)}


def _scn_closed_forms(params: dict, prec: int):
    checks = []
    plain = scaled = 0
    plain_bad = scaled_bad = 0
    for i in range(10):
        for j in range(10):
            for m in range(10):
                t, z, d = Fraction(i, 4), Fraction(j), Fraction(m, 2)
                plain += 1
                if not lipschitz_check(t, z, d, "plain",
                                       precision_bits=prec).holds:
                    plain_bad += 1
                if t > 0 and z >= 5 * t:
                    scaled += 1
                    if not lipschitz_check(t, z, d, "scaled",
                                           precision_bits=prec).holds:
                        scaled_bad += 1
    checks.append(CheckResult(
        "lipschitz-plain-grid",
        _flag_report("lipschitz-plain-grid", plain_bad == 0,
                     related=(("cases", plain), ("failures", plain_bad)))))
    checks.append(CheckResult(
        "lipschitz-scaled-grid",
        _flag_report("lipschitz-scaled-grid", scaled_bad == 0,
                     related=(("cases", scaled), ("failures", scaled_bad)))))
    checks.append(CheckResult(
        "chernoff-hand-value",
        _flag_report("chernoff-lower-8-4-is-exp-minus-1",
                     chernoff_lower(8, 4) == ExpSum.exp(-1))))
    for rep in constant_chain_reports(precision_bits=prec):
        checks.append(CheckResult(rep.context, rep))
    return checks, {}


SCENARIOS = {
    "parity-claim": (
        _scn_parity_claim, {"n": 4, "eps": "1/4"},
        "Expected-depth optimum of parity at a given error budget."),
    "no-boosting": (
        _scn_no_boosting, {"n": 4},
        "Free at error 1/4 yet depth >= (n-1)/4 at error 1/8."),
    "frontier-oracle": (
        _scn_frontier_oracle, {"seed": 202, "distributions": 5},
        "DP frontier equals brute-force enumeration on every n=2 function."),
    "density-conservation": (
        _scn_density_conservation, {"seed": 404, "count": 100},
        "Reach-weighted total leaf density equals delta*k exactly."),
    "resilience": (
        _scn_resilience, {"seed": 404, "count": 100},
        "Leaf density dominated by its binomial ceiling, five Phi variants."),
    "accuracy-bound": (
        _scn_accuracy_bound, {"seed": 606, "count": 100},
        "Blockwise accuracy against the Bernoulli-sum leaf form, all t."),
    "leaf-product": (
        _scn_leaf_product, {"seed": 707, "count": 50},
        "Conditional law at each leaf factors across blocks."),
    "embedding-identities": (
        _scn_embedding, {"seed": 808, "count": 50},
        "Depth/k and advantage identities of the block embedding."),
    "hardcore-pipeline": (
        _scn_hardcore_pipeline, {"seed": 0, "gamma": "1/2"},
        "Solver emits re-checkable certificates or boosted committees."),
    "product-tree": (
        _scn_product_tree, {"seed": 1010, "count": 100, "eps": "1/4"},
        "XOR correlation never beats product-tree success; frontier gap."),
    "parity-direct-product": (
        _scn_parity_direct_product, {"n": 2, "k": 2, "gamma": "1/4"},
        "Query-all mixture achieves its exact depth/error trade."),
    "closed-forms": (
        _scn_closed_forms, {},
        "Lipschitz grid, Chernoff hand values, and constant chain."),
}


def list_scenarios() -> list[dict]:
    return [
        {"name": name, "defaults": dict(defaults), "description": desc}
        for name, (fn, defaults, desc) in sorted(SCENARIOS.items())
    ]


def run_scenario(name: str, params: dict | None = None, *,
                 precision_bits: int = DEFAULT_PRECISION_BITS) -> ScenarioResult:
    if name not in SCENARIOS:
        raise InvalidValue(f"unknown scenario {name!r}; "
                           f"known: {sorted(SCENARIOS)}")
    fn, defaults, _desc = SCENARIOS[name]
    merged = _params(dict(params or {}), defaults)
    checks, artifacts = fn(merged, precision_bits)
    return ScenarioResult(name, merged, tuple(checks), artifacts)


# ---------------------------------------------------------------------------
# run reports


def default_config() -> dict:
    """Full suite, default parameters: the determinism reference config."""
    return {
        "precision_bits": DEFAULT_PRECISION_BITS,
        "scenarios": [{"name": name, "params": dict(defaults)}
                      for name, (fn, defaults, desc) in sorted(SCENARIOS.items())],
    }


def _check_to_json(check: CheckResult, prec: int) -> dict:
    payload = bound_report_to_json(check.report, prec)
    payload["name"] = check.name
    return payload


def scenario_result_to_json(result: ScenarioResult, prec: int) -> dict:
    params = {
        key: fraction_to_str(v) if isinstance(v, Fraction) else v
        for key, v in sorted(result.params.items())
    }
    return {
        "scenario": result.scenario,
        "params": params,
        "checks": [_check_to_json(c, prec) for c in result.checks],
        "artifacts": result.artifacts,
    }


def run_config(config: dict, *, jobs: int = 1,
               precision_bits: int | None = None):
    """Run every scenario in the config; returns (report dict, timings).

    The report is deterministic for a fixed config; wall-clock timings are
    returned separately so they never reach the serialized output.
    """
    if not isinstance(config, dict):
        raise InvalidValue("config must be a JSON object")
    unknown = set(config) - {"scenarios", "precision_bits"}
    if unknown:
        raise InvalidValue(f"unknown config keys {sorted(unknown)}")
    prec = precision_bits if precision_bits is not None else int(
        config.get("precision_bits", DEFAULT_PRECISION_BITS))
    if prec < 8:
        raise InvalidValue("precision_bits must be at least 8")
    entries = config.get("scenarios", [])
    if not isinstance(entries, list):
        raise InvalidValue("config 'scenarios' must be a list")
    jobs = max(1, int(jobs))

    def one(entry):
        if not isinstance(entry, dict) or "name" not in entry:
            raise InvalidValue(f"scenario entry needs a 'name': {entry!r}")
        extra = set(entry) - {"name", "params"}
        if extra:
            raise InvalidValue(f"unknown scenario entry keys {sorted(extra)}")
        t0 = time.monotonic()
        result = run_scenario(entry["name"], entry.get("params"),
                              precision_bits=prec)
        return result, time.monotonic() - t0

    if jobs == 1 or len(entries) <= 1:
        outcomes = [one(e) for e in entries]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(one, entries))

    results = [r for r, _ in outcomes]
    order = sorted(range(len(results)),
                   key=lambda i: (results[i].scenario,
                                  str(sorted(results[i].params.items()))))
    results = [results[i] for i in order]
    timings = [(outcomes[i][0].scenario, outcomes[i][1]) for i in order]

    total = sum(len(r.checks) for r in results)
    failed = sum(1 for r in results for c in r.checks if not c.ok)
    report = {
        "config": {
            "precision_bits": prec,
            "scenarios": [{"name": r.scenario,
                           "params": scenario_result_to_json(r, prec)["params"]}
                          for r in results],
        },
        "scenarios": [scenario_result_to_json(r, prec) for r in results],
        "summary": {"checks": total, "failed": failed,
                    "passed": total - failed, "ok": failed == 0},
    }
    return report, timings


def report_to_bytes(report: dict) -> bytes:
    """Canonical serialization: the byte-determinism contract lives here."""
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode("utf-8")
