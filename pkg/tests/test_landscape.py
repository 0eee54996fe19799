import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cgadyn import landscape as ls
from cgadyn.errors import CapacityError, DimensionError, DomainError

from conftest import TWO_MAX_TABLE, injective_suite, superincreasing_weights


def test_binval_evaluate():
    spec = ls.binval(2)
    assert ls.evaluate(spec, (1, 1)) == 3
    assert ls.evaluate(spec, (0, 0)) == 0
    assert ls.evaluate(spec, (1, 0)) == 2


def test_table_lookup():
    assert ls.evaluate(TWO_MAX_TABLE, (1, 0)) == 2.0


def test_evaluate_length_mismatch():
    with pytest.raises(DimensionError):
        ls.evaluate(ls.binval(2), (1, 1, 1))


def test_evaluate_rejects_non_bits():
    with pytest.raises(DomainError):
        ls.evaluate(ls.binval(2), (0, 2))


def test_evaluate_is_pure():
    spec = ls.random_injective(5, seed=3)
    y = (1, 0, 1, 1, 0)
    assert ls.evaluate(spec, y) == ls.evaluate(spec, y)


def test_is_injective_binval():
    assert ls.is_injective(ls.binval(3))


def test_is_injective_duplicate_table():
    assert not ls.is_injective(ls.table_spec([1.0, 1.0], n=1))


def test_perturbed_onemax_values_and_injectivity():
    spec = ls.perturbed_onemax(2, 0.25)
    values = [ls.evaluate(spec, ls.index_to_bits(i, 2)) for i in range(4)]
    assert values == [0.0, 1.25, 1.5, 2.75]
    assert ls.is_injective(spec)


def test_perturbed_onemax_epsilon_bounds():
    with pytest.raises(DomainError):
        ls.perturbed_onemax(3, 0.0)
    with pytest.raises(DomainError):
        ls.perturbed_onemax(3, 0.25)  # 2^(1-3) = 0.25 is excluded
    ls.perturbed_onemax(3, 0.2)


def test_linear_matches_binval_for_power_weights():
    n = 4
    spec = ls.linear(tuple(float(1 << (n - i)) for i in range(1, n + 1)))
    assert np.array_equal(ls.fitness_values(spec), ls.fitness_values(ls.binval(n)))


def test_enumeration_cap():
    with pytest.raises(CapacityError):
        ls.binval(17)
    # opting in above the default cap still evaluates pointwise
    big = ls.binval(20, cap=20)
    assert ls.evaluate(big, (1,) + (0,) * 19) == 2.0 ** 19
    with pytest.raises(CapacityError):
        ls.fitness_values(big)


def test_local_maxima_binval():
    report = ls.enumerate_local_maxima(ls.binval(2))
    assert report.maxima == ((1, 1),)
    assert report.strict_flags == (True,)


def test_local_maxima_two_max_table():
    report = ls.enumerate_local_maxima(TWO_MAX_TABLE)
    assert report.maxima == ((0, 0), (1, 1))
    assert report.strict_flags == (True, True)


def test_local_maxima_tied_table():
    report = ls.enumerate_local_maxima(ls.table_spec([1.0, 1.0], n=1))
    assert report.maxima == ((0,), (1,))
    assert report.strict_flags == (False, False)


def test_is_local_maximum_examples():
    spec = ls.binval(2)
    assert ls.is_local_maximum(spec, (1, 1)) is ls.MaxStatus.STRICT_LOCAL_MAX
    assert ls.is_local_maximum(spec, (1, 0)) is ls.MaxStatus.NOT_MAX
    assert ls.is_local_maximum(TWO_MAX_TABLE, (0, 0)) is ls.MaxStatus.STRICT_LOCAL_MAX


def test_point_query_consistent_with_enumeration(rng):
    for n in (1, 2, 3, 4):
        vals = rng.permutation(1 << n).astype(float)
        vals[rng.integers(0, 1 << n)] = vals[0]  # allow the occasional tie
        spec = ls.table_spec(vals, n=n)
        report = ls.enumerate_local_maxima(spec)
        for i in range(1 << n):
            bits = ls.index_to_bits(i, n)
            status = ls.is_local_maximum(spec, bits)
            assert (status is not ls.MaxStatus.NOT_MAX) == (bits in report.maxima)


def test_injective_specs_have_a_strict_maximum():
    for n in (2, 3, 4):
        for spec in injective_suite(n):
            report = ls.enumerate_local_maxima(spec)
            assert len(report.maxima) >= 1
            assert all(report.strict_flags)


def test_random_injective_many_seeds():
    for n in range(2, 9):
        for seed in range(100):
            assert ls.is_injective(ls.random_injective(n, seed=seed))


def test_random_injective_deterministic():
    a = ls.fitness_values(ls.random_injective(6, seed=9))
    b = ls.fitness_values(ls.random_injective(6, seed=9))
    assert np.array_equal(a, b)
    c = ls.fitness_values(ls.random_injective(6, seed=10))
    assert not np.array_equal(a, c)


def test_bits_index_roundtrip():
    for n in (1, 3, 5):
        for i in range(1 << n):
            assert ls.bits_to_index(ls.index_to_bits(i, n)) == i
    assert ls.bits_to_index((1, 0)) == 2  # locus 1 is most significant
    assert ls.string_to_bits("10") == (1, 0)
    assert ls.bits_to_string((1, 0)) == "10"


# --- serialization -------------------------------------------------------

@st.composite
def spec_strategy(draw):
    n = draw(st.integers(1, 5))
    kind = draw(st.sampled_from(["binval", "linear", "perturbed_onemax",
                                 "table", "random_injective"]))
    if kind == "binval":
        return ls.binval(n)
    if kind == "linear":
        return ls.linear(superincreasing_weights(n))
    if kind == "perturbed_onemax":
        return ls.perturbed_onemax(n, 2.0 ** -n)
    if kind == "table":
        values = draw(st.permutations(list(range(1 << n))))
        return ls.table_spec([float(v) for v in values], n=n)
    return ls.random_injective(n, seed=draw(st.integers(0, 1000)))


@settings(max_examples=60, deadline=None)
@given(spec_strategy())
def test_spec_json_roundtrip(spec):
    blob = json.dumps(ls.spec_to_json_dict(spec))
    restored = ls.spec_from_json_dict(json.loads(blob))
    assert restored == spec
    assert np.array_equal(ls.fitness_values(restored), ls.fitness_values(spec))


def test_table_json_keys_are_msb_first():
    obj = ls.spec_to_json_dict(TWO_MAX_TABLE)
    assert obj["table"]["10"] == 2.0
    assert ls.spec_from_json_dict(obj) == TWO_MAX_TABLE


def test_spec_from_json_rejects_garbage():
    with pytest.raises(DomainError):
        ls.spec_from_json_dict({"n": 3})
    with pytest.raises(DomainError):
        ls.spec_from_json_dict({"kind": "mystery", "n": 3})
