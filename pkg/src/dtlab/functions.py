"""Boolean functions, input distributions, and [0,1] measures on the hypercube.

Domain points live in {-1,+1}^n and are packed into integers: bit j of the
code is 1 exactly when x_j = +1.  Statements written over {0,1} translate by
0 -> +1 and 1 -> -1 (so a {0,1} bit b becomes (-1)**b), for inputs and outputs
alike; parity is then the plain product of the +-1 inputs.  All weights are
exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, GuardExceeded, InvalidValue
from .exactexp import fraction_from_str, fraction_to_str

# Hard cap on variables for any op that materializes a 2**m table.
MAX_TABLE_VARS = 24

_ZERO = Fraction(0)
_ONE = Fraction(1)


def point_value(point: int, j: int) -> int:
    """The +-1 value of variable j in a packed point."""
    return 1 if (point >> j) & 1 else -1


def block_point(point: int, block: int, n: int) -> int:
    """Extract block `block` (n variables wide) of a packed kn-variable point."""
    return (point >> (block * n)) & ((1 << n) - 1)


def _check_var_count(n: int, what: str) -> None:
    if n < 0:
        raise InvalidValue(f"{what}: variable count must be nonnegative, got {n}")
    if n > MAX_TABLE_VARS:
        raise GuardExceeded(f"{what}: {n} variables exceeds the table guard {MAX_TABLE_VARS}")


@dataclass(frozen=True)
class BooleanFunction:
    """Dense truth table over {-1,+1}^n, outputs in {-1,+1}."""

    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        _check_var_count(self.n, "BooleanFunction")
        if len(self.table) != 1 << self.n:
            raise DimensionMismatch(
                f"table length {len(self.table)} != 2**{self.n}")
        if any(v not in (-1, 1) for v in self.table):
            raise InvalidValue("function outputs must be +-1")

    def value(self, point: int) -> int:
        return self.table[point]


@dataclass(frozen=True)
class VectorFunction:
    """k-tuple of +-1 outputs over {-1,+1}^(n*k); block i owns variables [i*n, (i+1)*n)."""

    n: int
    k: int
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 1:
            raise InvalidValue(f"k must be >= 1, got {self.k}")
        _check_var_count(self.n * self.k, "VectorFunction")
        if len(self.table) != 1 << (self.n * self.k):
            raise DimensionMismatch(
                f"table length {len(self.table)} != 2**{self.n * self.k}")
        for row in self.table:
            if len(row) != self.k or any(v not in (-1, 1) for v in row):
                raise InvalidValue("vector outputs must be +-1 tuples of width k")

    def value(self, point: int) -> tuple[int, ...]:
        return self.table[point]


@dataclass(frozen=True)
class Distribution:
    """Probability weights over packed points of {-1,+1}^n; sums to exactly 1."""

    n: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        _check_var_count(self.n, "Distribution")
        if len(self.weights) != 1 << self.n:
            raise DimensionMismatch(
                f"weight count {len(self.weights)} != 2**{self.n}")
        if any(w < 0 for w in self.weights):
            raise InvalidValue("distribution weights must be nonnegative")
        if sum(self.weights) != 1:
            raise InvalidValue("distribution weights must sum to exactly 1")

    def weight(self, point: int) -> Fraction:
        return self.weights[point]

    def support(self) -> list[int]:
        return [x for x, w in enumerate(self.weights) if w > 0]


@dataclass(frozen=True)
class Measure:
    """Pointwise values in [0,1] over {-1,+1}^n (a fractional subset)."""

    n: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        _check_var_count(self.n, "Measure")
        if len(self.values) != 1 << self.n:
            raise DimensionMismatch(
                f"value count {len(self.values)} != 2**{self.n}")
        if any(v < 0 or v > 1 for v in self.values):
            raise InvalidValue("measure values must lie in [0,1]")

    def value(self, point: int) -> Fraction:
        return self.values[point]


# ---------------------------------------------------------------------------
# constructors


def parity(n: int) -> BooleanFunction:
    """Product of all +-1 inputs."""
    if n < 1:
        raise InvalidValue(f"parity needs n >= 1, got {n}")
    _check_var_count(n, "parity")
    table = []
    for x in range(1 << n):
        ones = bin(x).count("1")
        table.append(1 if (n - ones) % 2 == 0 else -1)
    return BooleanFunction(n, tuple(table))


def dictator(n: int, j: int) -> BooleanFunction:
    if not 0 <= j < n:
        raise InvalidValue(f"dictator index {j} out of range for n={n}")
    _check_var_count(n, "dictator")
    return BooleanFunction(n, tuple(point_value(x, j) for x in range(1 << n)))


def no_error_reduction_function(n: int) -> BooleanFunction:
    """The boosting counterexample: +1 when x_0 = +1, else the parity of the rest.

    The majority output +1 carries mass 3/4 under the uniform distribution, so
    a constant guess already achieves error 1/4 at depth 0, yet pushing the
    error to 1/8 forces expected depth at least (n-1)/4.
    """
    if n < 1:
        raise InvalidValue(f"need n >= 1, got {n}")
    _check_var_count(n, "no_error_reduction_function")
    table = []
    for x in range(1 << n):
        if x & 1:
            table.append(1)
        else:
            rest = x >> 1
            ones = bin(rest).count("1")
            table.append(1 if (n - 1 - ones) % 2 == 0 else -1)
    return BooleanFunction(n, tuple(table))


def constant_function(n: int, value: int) -> BooleanFunction:
    if value not in (-1, 1):
        raise InvalidValue("constant value must be +-1")
    _check_var_count(n, "constant_function")
    return BooleanFunction(n, tuple([value] * (1 << n)))


def direct_product(f: BooleanFunction, k: int) -> VectorFunction:
    """k independent copies; output i is f on block i."""
    if k < 1:
        raise InvalidValue(f"k must be >= 1, got {k}")
    _check_var_count(f.n * k, "direct_product")
    mask = (1 << f.n) - 1
    table = tuple(
        tuple(f.table[(point >> (i * f.n)) & mask] for i in range(k))
        for point in range(1 << (f.n * k))
    )
    return VectorFunction(f.n, k, table)


def xor_power(f: BooleanFunction, k: int) -> BooleanFunction:
    """Product of f over k blocks (the +-1 form of the k-fold XOR)."""
    if k < 1:
        raise InvalidValue(f"k must be >= 1, got {k}")
    _check_var_count(f.n * k, "xor_power")
    mask = (1 << f.n) - 1
    table = []
    for point in range(1 << (f.n * k)):
        v = 1
        for i in range(k):
            v *= f.table[(point >> (i * f.n)) & mask]
        table.append(v)
    return BooleanFunction(f.n * k, tuple(table))


def uniform(n: int) -> Distribution:
    _check_var_count(n, "uniform")
    w = Fraction(1, 1 << n)
    return Distribution(n, tuple([w] * (1 << n)))


def product_power(mu: Distribution, k: int) -> Distribution:
    """k-fold product distribution over block-structured points."""
    if k < 1:
        raise InvalidValue(f"k must be >= 1, got {k}")
    _check_var_count(mu.n * k, "product_power")
    mask = (1 << mu.n) - 1
    weights = []
    for point in range(1 << (mu.n * k)):
        w = _ONE
        for i in range(k):
            w *= mu.weights[(point >> (i * mu.n)) & mask]
        weights.append(w)
    return Distribution(mu.n * k, tuple(weights))


def density(h: Measure, mu: Distribution) -> Fraction:
    """E_mu[H], the mass of the fractional set."""
    if h.n != mu.n:
        raise DimensionMismatch(f"measure on {h.n} vars vs distribution on {mu.n}")
    return sum((mu.weights[x] * h.values[x] for x in range(1 << h.n)), _ZERO)


def constant_measure(n: int, value: Fraction) -> Measure:
    value = Fraction(value)
    return Measure(n, tuple([value] * (1 << n)))


# ---------------------------------------------------------------------------
# serialization

def _hex_width(n: int) -> int:
    return max(1, ((1 << n) + 3) // 4)


def function_to_json(f: BooleanFunction) -> dict:
    mask = 0
    for x, v in enumerate(f.table):
        if v == 1:
            mask |= 1 << x
    return {"n": f.n, "table_hex": format(mask, f"0{_hex_width(f.n)}x")}


def function_from_json(obj: dict) -> BooleanFunction:
    n = int(obj["n"])
    mask = int(obj["table_hex"], 16)
    table = tuple(1 if (mask >> x) & 1 else -1 for x in range(1 << n))
    return BooleanFunction(n, table)


def vector_function_to_json(f: VectorFunction) -> dict:
    masks = []
    for i in range(f.k):
        m = 0
        for x, row in enumerate(f.table):
            if row[i] == 1:
                m |= 1 << x
        masks.append(format(m, f"0{_hex_width(f.n * f.k)}x"))
    return {"n": f.n, "k": f.k, "tables_hex": masks}


def vector_function_from_json(obj: dict) -> VectorFunction:
    n, k = int(obj["n"]), int(obj["k"])
    masks = [int(s, 16) for s in obj["tables_hex"]]
    table = tuple(
        tuple(1 if (masks[i] >> x) & 1 else -1 for i in range(k))
        for x in range(1 << (n * k))
    )
    return VectorFunction(n, k, table)


def weights_to_json(values) -> list[str]:
    return [fraction_to_str(v) for v in values]


def distribution_to_json(mu: Distribution) -> list[str]:
    return weights_to_json(mu.weights)


def distribution_from_json(items) -> Distribution:
    weights = tuple(fraction_from_str(s) for s in items)
    n = len(weights).bit_length() - 1
    return Distribution(n, weights)


def measure_to_json(h: Measure) -> list[str]:
    return weights_to_json(h.values)


def measure_from_json(items) -> Measure:
    values = tuple(fraction_from_str(s) for s in items)
    n = len(values).bit_length() - 1
    return Measure(n, values)
