"""Pseudo-boolean fitness landscapes over fixed-length bitstrings.

A solution is an ordered sequence of n bits; locus 1 is the leftmost /
most significant position. Solutions are handled as plain sequences
(tuples or 0/1 numpy arrays) and are also addressable by their integer
index ``sum(bits[i] << (n-1-i))``.

The module provides the built-in fitness families (``binval``,
``linear``, ``perturbed_onemax``, ``table``, ``random_injective``), an
exact injectivity check, and a brute-force local-maxima oracle. All
fitness values for the built-in families are chosen to be exactly
representable in binary floating point, so equality tests need no
tolerance. Operations that enumerate all 2^n solutions refuse lengths
above ``ENUMERATION_CAP`` instead of thrashing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CapacityError, DimensionError, DomainError, TheoremScopeError

# Enumeration-based operations (injectivity, local maxima, drift) do 2^n
# work; 2^16 tables are still instant, anything larger is refused.
ENUMERATION_CAP = 16

SPEC_KINDS = ("binval", "linear", "perturbed_onemax", "table", "random_injective")


# ---------------------------------------------------------------------------
# bitstring helpers
# ---------------------------------------------------------------------------

def bits_to_index(bits) -> int:
    """Integer index of a bit sequence, most significant locus first."""
    idx = 0
    for b in bits:
        b = int(b)
        if b not in (0, 1):
            raise DomainError(f"bits must be 0 or 1, got {b!r}")
        idx = (idx << 1) | b
    return idx


def index_to_bits(index: int, n: int) -> tuple[int, ...]:
    """Bit tuple of length n for an integer index (inverse of bits_to_index)."""
    if not 0 <= index < (1 << n):
        raise DomainError(f"index {index} out of range for n={n}")
    return tuple((index >> (n - 1 - i)) & 1 for i in range(n))


def bits_to_string(bits) -> str:
    return "".join(str(int(b)) for b in bits)


def string_to_bits(s: str) -> tuple[int, ...]:
    if not s or any(c not in "01" for c in s):
        raise DomainError(f"not a bitstring: {s!r}")
    return tuple(int(c) for c in s)


_BIT_MATRIX_CACHE: dict[int, np.ndarray] = {}


def all_bit_matrix(n: int) -> np.ndarray:
    """(2^n, n) uint8 matrix whose row i is index_to_bits(i, n). Read-only."""
    mat = _BIT_MATRIX_CACHE.get(n)
    if mat is None:
        idx = np.arange(1 << n, dtype=np.int64)
        shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
        mat = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
        mat.setflags(write=False)
        _BIT_MATRIX_CACHE[n] = mat
    return mat


# ---------------------------------------------------------------------------
# fitness specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitnessSpec:
    """A deterministic fitness function over {0,1}^n.

    Use the factory functions (:func:`binval`, :func:`linear`,
    :func:`perturbed_onemax`, :func:`table_spec`,
    :func:`random_injective`) rather than the constructor; they validate
    the kind-specific fields.
    """

    kind: str
    n: int
    weights: tuple[float, ...] | None = None
    epsilon: float | None = None
    table: tuple[float, ...] | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in SPEC_KINDS:
            raise DomainError(f"unknown fitness kind {self.kind!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"solution length must be a positive integer, got {self.n!r}")

    @property
    def num_solutions(self) -> int:
        return 1 << self.n


def binval(n: int, cap: int = ENUMERATION_CAP) -> FitnessSpec:
    """g(y) = sum_i y_i 2^(n-i): the binary value of the bitstring."""
    _check_cap(n, cap)
    return FitnessSpec(kind="binval", n=n)


def linear(weights, cap: int = ENUMERATION_CAP) -> FitnessSpec:
    """g(y) = sum_i w_i y_i with one weight per locus.

    Injective iff all subset sums of the weights are distinct
    (e.g. superincreasing weights); use :func:`is_injective` to verify.
    """
    w = tuple(float(x) for x in weights)
    _check_cap(len(w), cap)
    return FitnessSpec(kind="linear", n=len(w), weights=w)


def perturbed_onemax(n: int, epsilon: float, cap: int = ENUMERATION_CAP) -> FitnessSpec:
    """g(y) = onemax(y) + epsilon * binval(y), with 0 < epsilon < 2^(1-n).

    The perturbation breaks onemax's ties; epsilon at or below 2^-n
    additionally keeps the onemax levels ordered.
    """
    _check_cap(n, cap)
    eps = float(epsilon)
    if not 0.0 < eps < 2.0 ** (1 - n):
        raise DomainError(
            f"epsilon must lie in (0, 2^(1-n)) = (0, {2.0 ** (1 - n)}), got {eps}"
        )
    return FitnessSpec(kind="perturbed_onemax", n=n, epsilon=eps)


def table_spec(values, n: int | None = None, cap: int = ENUMERATION_CAP) -> FitnessSpec:
    """Explicit fitness table.

    ``values`` is either a mapping from bitstring (most significant locus
    first) to fitness, covering all 2^n solutions, or a sequence of 2^n
    values ordered by solution index. Table specs may be non-injective;
    theorem-dependent operations will refuse them unless
    :func:`is_injective` holds.
    """
    if isinstance(values, dict):
        keys = list(values)
        if n is None:
            if not keys:
                raise DomainError("empty fitness table")
            n = len(keys[0])
        if sorted(keys) != [bits_to_string(index_to_bits(i, n)) for i in range(1 << n)]:
            raise DomainError(f"table must cover all 2^{n} bitstrings exactly once")
        tab = tuple(float(values[bits_to_string(index_to_bits(i, n))]) for i in range(1 << n))
    else:
        tab = tuple(float(v) for v in values)
        if n is None:
            n = max((len(tab)).bit_length() - 1, 0)
        if len(tab) != (1 << n):
            raise DomainError(f"table needs 2^{n} = {1 << n} values, got {len(tab)}")
    _check_cap(n, cap)
    return FitnessSpec(kind="table", n=n, table=tab)


def random_injective(n: int, seed: int, cap: int = ENUMERATION_CAP) -> FitnessSpec:
    """A seeded pseudo-random permutation of {0, 1, ..., 2^n - 1}.

    Injective by construction; rugged, typically with several local maxima.
    """
    _check_cap(n, cap)
    return FitnessSpec(kind="random_injective", n=n, seed=int(seed))


def _check_cap(n: int, cap: int) -> None:
    if n < 1:
        raise DomainError(f"solution length must be >= 1, got {n}")
    if n > cap:
        raise CapacityError(f"n={n} exceeds the enumeration cap {cap}")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

_VALUES_CACHE: dict[FitnessSpec, np.ndarray] = {}


def fitness_values(spec: FitnessSpec) -> np.ndarray:
    """All 2^n fitness values, indexed by solution index. Cached, read-only."""
    vals = _VALUES_CACHE.get(spec)
    if vals is not None:
        return vals
    if spec.n > ENUMERATION_CAP:
        raise CapacityError(f"n={spec.n} exceeds the enumeration cap {ENUMERATION_CAP}")
    size = spec.num_solutions
    if spec.kind == "binval":
        vals = np.arange(size, dtype=np.float64)
    elif spec.kind == "linear":
        bits = all_bit_matrix(spec.n).astype(np.float64)
        vals = bits @ np.asarray(spec.weights, dtype=np.float64)
    elif spec.kind == "perturbed_onemax":
        ones = all_bit_matrix(spec.n).sum(axis=1).astype(np.float64)
        vals = ones + spec.epsilon * np.arange(size, dtype=np.float64)
    elif spec.kind == "table":
        vals = np.asarray(spec.table, dtype=np.float64)
    elif spec.kind == "random_injective":
        rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
        vals = rng.permutation(size).astype(np.float64)
    else:  # pragma: no cover - guarded in __post_init__
        raise DomainError(f"unknown fitness kind {spec.kind!r}")
    vals.setflags(write=False)
    _VALUES_CACHE[spec] = vals
    return vals


def _as_bits(spec: FitnessSpec, y) -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1 or arr.shape[0] != spec.n:
        raise DimensionError(f"solution length {arr.shape} does not match spec n={spec.n}")
    if not np.isin(arr, (0, 1)).all():
        raise DomainError("solution bits must be 0 or 1")
    return arr.astype(np.int64)


def evaluate(spec: FitnessSpec, y) -> float:
    """Fitness of solution y under spec. Pure and deterministic."""
    bits = _as_bits(spec, y)
    idx = int(bits @ (1 << np.arange(spec.n - 1, -1, -1, dtype=np.int64)))
    if spec.n <= ENUMERATION_CAP:
        # shared cached table keeps tie comparisons bit-identical everywhere
        return float(fitness_values(spec)[idx])
    # table-free paths for specs built above the cap
    if spec.kind == "binval":
        return float(idx)
    if spec.kind == "linear":
        return float(np.asarray(spec.weights, dtype=np.float64) @ bits)
    if spec.kind == "perturbed_onemax":
        return float(bits.sum() + spec.epsilon * idx)
    raise CapacityError(f"{spec.kind} evaluation needs the 2^n table; n={spec.n} exceeds the cap")


def is_injective(spec: FitnessSpec) -> bool:
    """True iff all 2^n fitness values are pairwise distinct (exact compare)."""
    vals = fitness_values(spec)
    return int(np.unique(vals).size) == vals.size


def require_injective(spec: FitnessSpec, operation: str) -> None:
    """Guard for theorem-dependent operations; raises TheoremScopeError."""
    if not is_injective(spec):
        raise TheoremScopeError(
            f"{operation} requires an injective fitness (all 2^n values pairwise "
            "distinct); this spec has duplicate values, so the request is outside "
            "theorem scope"
        )


# ---------------------------------------------------------------------------
# local maxima
# ---------------------------------------------------------------------------

class MaxStatus(Enum):
    NOT_MAX = "not_max"
    LOCAL_MAX = "local_max"
    STRICT_LOCAL_MAX = "strict_local_max"


@dataclass(frozen=True)
class LocalMaxReport:
    """All local maxima of a spec, with per-maximum strictness flags."""

    maxima: tuple[tuple[int, ...], ...]
    strict_flags: tuple[bool, ...]

    def __contains__(self, y) -> bool:
        return tuple(int(b) for b in y) in self.maxima


def _neighbor_value_matrix(spec: FitnessSpec) -> np.ndarray:
    """(2^n, n) matrix: column m holds the fitness of each index with locus m flipped."""
    vals = fitness_values(spec)
    idx = np.arange(spec.num_solutions, dtype=np.int64)
    cols = [vals[idx ^ (1 << (spec.n - 1 - m))] for m in range(spec.n)]
    return np.stack(cols, axis=1)


def enumerate_local_maxima(spec: FitnessSpec) -> LocalMaxReport:
    """Exhaustive scan: y is a local maximum iff g(y) >= g(z) for all n
    Hamming-1 neighbors z; strict iff every inequality is strict."""
    vals = fitness_values(spec)
    nb = _neighbor_value_matrix(spec)
    ge = (vals[:, None] >= nb).all(axis=1)
    gt = (vals[:, None] > nb).all(axis=1)
    maxima = tuple(index_to_bits(int(i), spec.n) for i in np.flatnonzero(ge))
    strict = tuple(bool(gt[int(i)]) for i in np.flatnonzero(ge))
    return LocalMaxReport(maxima=maxima, strict_flags=strict)


def is_local_maximum(spec: FitnessSpec, y) -> MaxStatus:
    """Classify one solution against its n Hamming-1 neighbors."""
    bits = _as_bits(spec, y)
    gy = evaluate(spec, bits)
    ge = gt = True
    for m in range(spec.n):
        z = bits.copy()
        z[m] ^= 1
        gz = evaluate(spec, z)
        ge &= gy >= gz
        gt &= gy > gz
    if not ge:
        return MaxStatus.NOT_MAX
    return MaxStatus.STRICT_LOCAL_MAX if gt else MaxStatus.LOCAL_MAX


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def spec_to_json_dict(spec: FitnessSpec) -> dict:
    """JSON object form: {"kind", "n"} plus the kind-specific field.

    Table keys are bitstrings written most significant locus first.
    """
    out: dict = {"kind": spec.kind, "n": spec.n}
    if spec.kind == "linear":
        out["weights"] = list(spec.weights)
    elif spec.kind == "perturbed_onemax":
        out["epsilon"] = spec.epsilon
    elif spec.kind == "table":
        out["table"] = {
            bits_to_string(index_to_bits(i, spec.n)): spec.table[i]
            for i in range(spec.num_solutions)
        }
    elif spec.kind == "random_injective":
        out["seed"] = spec.seed
    return out


def spec_from_json_dict(obj: dict) -> FitnessSpec:
    """Inverse of spec_to_json_dict; validates kind-specific fields."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DomainError("fitness spec JSON must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "binval":
        return binval(int(obj["n"]))
    if kind == "linear":
        return linear(obj["weights"])
    if kind == "perturbed_onemax":
        return perturbed_onemax(int(obj["n"]), obj["epsilon"])
    if kind == "table":
        return table_spec(obj["table"], n=int(obj["n"]) if "n" in obj else None)
    if kind == "random_injective":
        return random_injective(int(obj["n"]), int(obj["seed"]))
    raise DomainError(f"unknown fitness kind {kind!r}")
