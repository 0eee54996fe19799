"""Exact distributions of the pairwise tournament and the expected-update field.

Everything here is closed-form enumeration over all 2^n solutions, no
sampling. For a probability vector p, the per-solution quantities are

* ``sampling_probs``  -- Pr(y|p), the independent-locus product,
* ``winner_probs``    -- Pr(y wins a two-sample tournament | p),
* ``loser_probs``     -- Pr(y loses | p),

and the drift ``f(p)`` is the expected winner-minus-loser update per unit
learning step, computed by two routes: ``drift`` (single pass over
fitness-sorted prefix sums, O(2^n * n)) and ``drift_naive`` (through the
winner/loser distributions). Ties in fitness are handled throughout via
the first-sample-wins rule.

All functions accept a single vector p of shape (n,) or a batch of shape
(..., n) and vectorize over the leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .landscape import (
    FitnessSpec,
    all_bit_matrix,
    bits_to_index,
    fitness_values,
    index_to_bits,
    require_injective,
)


# ---------------------------------------------------------------------------
# per-spec fitness-order cache
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SpecTables:
    bits_f: np.ndarray       # (2^n, n) float
    group_of: np.ndarray     # (2^n,) id of each index's fitness-tie group, ascending
    order: np.ndarray        # (2^n,) indices sorted by fitness (stable)
    group_starts: np.ndarray  # (G,) start offsets of groups within `order`


_TABLES_CACHE: dict[FitnessSpec, _SpecTables] = {}


def _tables(spec: FitnessSpec) -> _SpecTables:
    t = _TABLES_CACHE.get(spec)
    if t is None:
        vals = fitness_values(spec)
        uniq, group_of = np.unique(vals, return_inverse=True)
        order = np.argsort(vals, kind="stable")
        group_starts = np.searchsorted(vals[order], uniq, side="left")
        t = _SpecTables(
            bits_f=all_bit_matrix(spec.n).astype(np.float64),
            group_of=group_of.astype(np.int64),
            order=order.astype(np.int64),
            group_starts=group_starts.astype(np.int64),
        )
        _TABLES_CACHE[spec] = t
    return t


def _as_pv(p, n: int) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim < 1 or arr.shape[-1] != n:
        raise DimensionError(f"probability vector shape {arr.shape} does not match n={n}")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("probability vector entries must lie in [0, 1]")
    return arr


# ---------------------------------------------------------------------------
# sampling distribution
# ---------------------------------------------------------------------------

def sampling_probs(p, n: int) -> np.ndarray:
    """Pr(y|p) for every solution index, shape (..., 2^n).

    Built by tensoring per-locus (1-p_i, p_i) pairs, so deterministic
    configurations give exact 0/1 probabilities.
    """
    arr = _as_pv(p, n)
    probs = np.ones(arr.shape[:-1] + (1,), dtype=np.float64)
    for i in range(n):
        pi = arr[..., i : i + 1]
        pair = np.stack([1.0 - pi, pi], axis=-1)  # (..., 1, 2)
        probs = (probs[..., :, None] * pair).reshape(arr.shape[:-1] + (-1,))
    return probs


def sampling_prob(p, y) -> float:
    """Pr(y|p) = prod_i p_i^y_i (1-p_i)^(1-y_i)."""
    yb = np.atleast_1d(np.asarray(y))
    arr = _as_pv(p, int(yb.shape[0]))
    if arr.ndim != 1:
        raise DimensionError("sampling_prob expects a single probability vector")
    factors = np.where(yb.astype(bool), arr, 1.0 - arr)
    return float(np.prod(factors))


def sampling_prob_partial(p, z, locus: int) -> float:
    """d Pr(z|p) / d p_locus at the point p (locus is 0-based, leftmost = 0).

    At a deterministic p this reduces to the corner cases: +-1 when z
    matches p off-locus (sign from z_locus), 0 otherwise.
    """
    zb = np.atleast_1d(np.asarray(z))
    arr = _as_pv(p, int(zb.shape[0]))
    if arr.ndim != 1:
        raise DimensionError("sampling_prob_partial expects a single probability vector")
    if not 0 <= locus < arr.shape[-1]:
        raise DomainError(f"locus {locus} out of range for n={arr.shape[-1]}")
    factors = np.where(zb.astype(bool), arr, 1.0 - arr)
    rest = np.prod(np.delete(factors, locus))
    return float(rest if zb[locus] else -rest)


# ---------------------------------------------------------------------------
# tournament distributions and drift
# ---------------------------------------------------------------------------

def _prefix_sums(spec: FitnessSpec, probs: np.ndarray):
    """Per-index sums of Pr(z|p) over z strictly below / tied with / strictly
    above each index's fitness. Shapes match probs."""
    t = _tables(spec)
    sorted_probs = probs[..., t.order]
    group_sums = np.add.reduceat(sorted_probs, t.group_starts, axis=-1)
    cum = np.cumsum(group_sums, axis=-1)
    total = cum[..., -1:]
    s_le = np.take(cum, t.group_of, axis=-1)
    s_eq = np.take(group_sums, t.group_of, axis=-1)
    s_lt = s_le - s_eq
    s_gt = total - s_le
    return s_lt, s_eq, s_gt


def winner_probs(p, spec: FitnessSpec) -> np.ndarray:
    """Pr(y wins | p) for all y: Pr(y|p) * (sum_{g<g(y)} + sum_{g<=g(y)}) Pr(z|p)."""
    probs = sampling_probs(p, spec.n)
    s_lt, s_eq, _ = _prefix_sums(spec, probs)
    return probs * (2.0 * s_lt + s_eq)


def loser_probs(p, spec: FitnessSpec) -> np.ndarray:
    """Pr(y loses | p) for all y: Pr(y|p) * (sum_{g>g(y)} + sum_{g>=g(y)}) Pr(z|p)."""
    probs = sampling_probs(p, spec.n)
    _, s_eq, s_gt = _prefix_sums(spec, probs)
    return probs * (2.0 * s_gt + s_eq)


def winner_prob(p, spec: FitnessSpec, y) -> float:
    return float(winner_probs(p, spec)[..., bits_to_index(y)])


def loser_prob(p, spec: FitnessSpec, y) -> float:
    return float(loser_probs(p, spec)[..., bits_to_index(y)])


def drift(p, spec: FitnessSpec) -> np.ndarray:
    """Expected update direction f(p) = E[winner - loser | p], shape (..., n).

    f_i(p) = 2 sum_y y_i Pr(y|p) [sum_{g(z)<g(y)} Pr(z|p) - sum_{g(z)>g(y)} Pr(z|p)],
    evaluated through fitness-sorted prefix sums in O(2^n * n). Exactly zero
    at every deterministic configuration.
    """
    t = _tables(spec)
    probs = sampling_probs(p, spec.n)
    s_lt, _, s_gt = _prefix_sums(spec, probs)
    return 2.0 * ((probs * (s_lt - s_gt)) @ t.bits_f)


def drift_naive(p, spec: FitnessSpec) -> np.ndarray:
    """f(p) via the winner/loser distributions: sum_y y (Pr_win(y) - Pr_lose(y)).

    Algebraically identical to :func:`drift`; kept as a second route for
    cross-checking.
    """
    t = _tables(spec)
    return (winner_probs(p, spec) - loser_probs(p, spec)) @ t.bits_f


# ---------------------------------------------------------------------------
# Jacobians at corners and in the interior
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CornerJacobian:
    """Analytic Jacobian of the drift field at a deterministic configuration.

    The matrix is diagonal; entry (m, m) is -2 when flipping locus m
    lowers fitness and +2 when it raises fitness. The eigenvalues are the
    diagonal.
    """

    corner: tuple[int, ...]
    matrix: np.ndarray
    eigenvalues: np.ndarray


def jacobian_analytic(corner, spec: FitnessSpec) -> CornerJacobian:
    """Exact Jacobian of f at a corner of [0,1]^n (injective specs only)."""
    bits = np.asarray(corner)
    if bits.ndim != 1 or bits.shape[0] != spec.n:
        raise DimensionError(f"corner shape {bits.shape} does not match n={spec.n}")
    if not np.isin(bits, (0, 1)).all():
        raise DomainError("corner must be a deterministic configuration (bits in {0,1})")
    require_injective(spec, "jacobian_analytic")
    vals = fitness_values(spec)
    idx = bits_to_index(bits)
    diag = np.empty(spec.n, dtype=np.float64)
    for m in range(spec.n):
        neighbor = idx ^ (1 << (spec.n - 1 - m))
        diag[m] = 2.0 if vals[neighbor] > vals[idx] else -2.0
    return CornerJacobian(
        corner=tuple(int(b) for b in bits),
        matrix=np.diag(diag),
        eigenvalues=diag.copy(),
    )


def jacobian_numeric(p, spec: FitnessSpec, h: float) -> np.ndarray:
    """Central-difference Jacobian of f at p: column m is
    (f(p + h e_m) - f(p - h e_m)) / (2h)."""
    arr = _as_pv(p, spec.n)
    if arr.ndim != 1:
        raise DimensionError("jacobian_numeric expects a single probability vector")
    if not h > 0.0:
        raise DomainError(f"finite-difference step must be positive, got {h}")
    if np.any(arr - h < 0.0) or np.any(arr + h > 1.0):
        raise DomainError("p +- h e_m leaves [0,1]^n; pull the point inward or shrink h")
    eye = np.eye(spec.n)
    points = np.concatenate([arr + h * eye, arr - h * eye], axis=0)  # (2n, n)
    f = drift(points, spec)
    return (f[: spec.n] - f[spec.n :]).T / (2.0 * h)


def corner_indices(n: int):
    """Iterate all 2^n corners as bit tuples."""
    for i in range(1 << n):
        yield index_to_bits(i, n)
