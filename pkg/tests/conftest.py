"""Shared fixtures: the built-in spec suite and brute-force oracles.

The oracles here deliberately avoid the package's prefix-sum machinery:
they enumerate ordered sample pairs directly and apply the
first-sample-wins tie rule, so they validate the closed forms
independently.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from cgadyn import landscape as ls


TWO_MAX_TABLE = ls.table_spec({"00": 3.0, "01": 1.0, "10": 2.0, "11": 4.0})


def superincreasing_weights(n: int) -> tuple[float, ...]:
    # dyadic, exactly representable, subset sums all distinct
    return tuple(0.75 * 2.0 ** (n - i) for i in range(1, n + 1))


def injective_suite(n: int) -> list[ls.FitnessSpec]:
    """One spec of every built-in injective family at length n."""
    specs = [
        ls.binval(n),
        ls.linear(superincreasing_weights(n)),
        ls.perturbed_onemax(n, 2.0 ** -n),
        ls.random_injective(n, seed=100 + n),
    ]
    if n == 2:
        specs.append(TWO_MAX_TABLE)
    return specs


# ---------------------------------------------------------------------------
# independent oracles (ordered-pair enumeration)
# ---------------------------------------------------------------------------

def product_prob(p, bits) -> float:
    out = 1.0
    for pi, b in zip(p, bits):
        out *= pi if b else 1.0 - pi
    return out


def pair_oracle(spec: ls.FitnessSpec, p):
    """Winner/loser distributions and expected update by exhausting all
    ordered sample pairs (a, b); ties go to a."""
    n = spec.n
    sols = list(itertools.product((0, 1), repeat=n))
    win = np.zeros(1 << n)
    lose = np.zeros(1 << n)
    f = np.zeros(n)
    for a in sols:
        pa = product_prob(p, a)
        ga = ls.evaluate(spec, a)
        for b in sols:
            pb = product_prob(p, b)
            gb = ls.evaluate(spec, b)
            w, l = (a, b) if ga >= gb else (b, a)
            prob = pa * pb
            win[ls.bits_to_index(w)] += prob
            lose[ls.bits_to_index(l)] += prob
            f += prob * (np.asarray(w, dtype=float) - np.asarray(l, dtype=float))
    return win, lose, f


def binval_drift_closed_form(p) -> np.ndarray:
    """For the binary-value fitness the expected update factors per locus:
    f_i = 2 p_i (1-p_i) * prod_{j<i} (p_j^2 + (1-p_j)^2)."""
    p = np.asarray(p, dtype=float)
    out = np.empty_like(p)
    gate = 1.0
    for i in range(p.shape[0]):
        out[i] = 2.0 * p[i] * (1.0 - p[i]) * gate
        gate *= p[i] ** 2 + (1.0 - p[i]) ** 2
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
