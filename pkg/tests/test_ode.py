import numpy as np
import pytest

from cgadyn import cga as C
from cgadyn import drift_field as dr
from cgadyn import landscape as ls
from cgadyn import ode as od
from cgadyn.errors import DomainError, HorizonError, TheoremScopeError

from conftest import TWO_MAX_TABLE, injective_suite


SIGMOID_2 = 1.0 / (1.0 + np.exp(-2.0))  # exact flow value at t=1 for n=1 binval


# --- integration -------------------------------------------------------------

def test_logistic_value_at_t1():
    traj = od.integrate(ls.binval(1), [0.5], h=1e-3, T=1.0)
    assert traj.states[-1][0] == pytest.approx(SIGMOID_2, abs=1e-6)
    assert traj.times[-1] == 1.0


def test_integrator_is_fourth_order():
    exact = SIGMOID_2
    errs = []
    for h in (0.05, 0.025):
        traj = od.integrate(ls.binval(1), [0.5], h=h, T=1.0)
        errs.append(abs(traj.states[-1][0] - exact))
    ratio = errs[0] / errs[1]
    assert 8.0 <= ratio <= 32.0  # halving h cuts the error ~2^4


def test_corner_start_is_constant():
    traj = od.integrate(ls.binval(2), [1.0, 0.0], h=0.1, T=2.0)
    assert np.array_equal(traj.states, np.tile([1.0, 0.0], (traj.times.shape[0], 1)))


def test_zero_horizon():
    traj = od.integrate(ls.binval(2), [0.5, 0.5], h=0.1, T=0.0)
    assert traj.times.shape == (1,)
    assert np.array_equal(traj.states[0], [0.5, 0.5])


def test_partial_final_step_lands_on_T():
    traj = od.integrate(ls.binval(1), [0.5], h=0.1, T=0.35)
    np.testing.assert_allclose(traj.times, [0.0, 0.1, 0.2, 0.3, 0.35])


def test_containment_and_no_clamps_from_center():
    for spec in injective_suite(3):
        traj = od.integrate(spec, np.full(3, 0.5), h=1e-2, T=10.0)
        assert traj.clamp_count == 0
        assert np.all(traj.states >= 0.0) and np.all(traj.states <= 1.0)


def test_integrate_input_guards():
    with pytest.raises(DomainError):
        od.integrate(ls.binval(1), [1.5], h=0.1, T=1.0)
    with pytest.raises(DomainError):
        od.integrate(ls.binval(1), [0.5], h=0.0, T=1.0)
    with pytest.raises(DomainError):
        od.integrate(ls.binval(1), [0.5], h=0.1, T=-1.0)


# --- limits ------------------------------------------------------------------

def test_find_limit_binval_center():
    res = od.find_limit(ls.binval(2), [0.5, 0.5])
    assert res.converged
    assert np.max(np.abs(res.state - [1.0, 1.0])) < 1e-6
    assert res.nearest_corner == (1, 1)
    assert np.max(np.abs(dr.drift(res.state, ls.binval(2)))) < 1e-8


def test_find_limit_two_max_table_center():
    res = od.find_limit(TWO_MAX_TABLE, [0.5, 0.5])
    assert res.converged
    assert res.nearest_corner in {(0, 0), (1, 1)}
    assert res.corner_distance < 1e-6


def test_find_limit_stationary_start_stays():
    # the all-zeros corner of binval is a fixed point (an unstable one);
    # starting exactly there the flow never moves
    res = od.find_limit(ls.binval(2), [0.0, 0.0])
    assert res.converged
    assert res.t_stop == 0.0
    assert np.array_equal(res.state, [0.0, 0.0])
    assert res.nearest_corner == (0, 0)


def test_find_limit_many_matches_singles():
    # batch and single integration agree up to BLAS rounding differences
    spec = ls.random_injective(3, seed=4)
    rng = np.random.default_rng(0)
    starts = 0.05 + 0.9 * rng.random((8, 3))
    batch = od.find_limit_many(spec, starts, T_max=100.0)
    assert batch.converged.all()
    for i in range(8):
        single = od.find_limit(spec, starts[i], T_max=100.0)
        np.testing.assert_allclose(single.state, batch.states[i], atol=1e-12)
        assert single.nearest_corner == tuple(batch.nearest_corners[i])
        assert abs(single.t_stop - batch.t_stop[i]) <= 0.011


def test_unstable_corner_escape():
    # nudged 1e-3 inward from the repelling all-zeros corner of binval,
    # the flow moves away by 10x the nudge within t <= 5
    spec = ls.binval(2)
    x0 = np.array([1e-3, 1e-3])
    traj = od.integrate(spec, x0, h=1e-2, T=5.0)
    d0 = np.linalg.norm(x0)
    d = np.linalg.norm(traj.states, axis=1)
    assert d.max() >= 10.0 * d0


# --- stability classification -------------------------------------------------

def test_classify_binval3_corners():
    spec = ls.binval(3)
    top = od.classify_corner(spec, (1, 1, 1))
    assert top.verdict is od.Stability.ASYMPTOTICALLY_STABLE
    assert top.eigenvalues == (-2.0, -2.0, -2.0)
    assert top.local_max
    near = od.classify_corner(spec, (1, 1, 0))
    assert near.verdict is od.Stability.UNSTABLE
    assert 2.0 in near.eigenvalues
    assert not near.local_max


def test_classify_two_max_table():
    verdict = od.classify_corner(TWO_MAX_TABLE, (0, 0))
    assert verdict.verdict is od.Stability.ASYMPTOTICALLY_STABLE
    assert verdict.local_max


def test_classify_refuses_non_injective():
    with pytest.raises(TheoremScopeError):
        od.classify_corner(ls.table_spec([1.0, 1.0], n=1), (0,))


def test_stable_iff_negative_eigenvalues():
    for n in (2, 3):
        for spec in injective_suite(n):
            for i in range(1 << n):
                v = od.classify_corner(spec, ls.index_to_bits(i, n))
                stable = v.verdict is od.Stability.ASYMPTOTICALLY_STABLE
                assert stable == all(e < 0 for e in v.eigenvalues)


# --- diagnostics ---------------------------------------------------------------

def test_lyapunov_rate():
    assert od.lyapunov_rate(ls.binval(2), [1.0, 1.0]) == 0.0
    assert od.lyapunov_rate(ls.binval(1), [0.5]) == pytest.approx(0.25, abs=1e-15)
    rng = np.random.default_rng(5)
    spec = ls.random_injective(4, seed=6)
    for _ in range(50):
        assert od.lyapunov_rate(spec, rng.random(4)) >= 0.0


def test_lyapunov_increments_nonnegative():
    rng = np.random.default_rng(17)
    for spec in injective_suite(3):
        for x0 in (np.full(3, 0.5), rng.random(3)):
            traj = od.integrate(spec, x0, h=1e-2, T=8.0)
            assert od.lyapunov_increments(traj, spec).min() >= -1e-9


# --- trajectory distance --------------------------------------------------------

def _flat(n):
    return ls.table_spec([1.0] * (1 << n), n=n)


def test_sup_distance_identical_is_zero():
    traj = od.integrate(ls.binval(2), [0.5, 0.5], h=0.05, T=2.0)
    assert od.sup_distance(traj, traj, 2.0) == 0.0


def test_sup_distance_constant_gap():
    # a constant-fitness table makes the field vanish, so both flows sit still
    a = od.integrate(_flat(1), [0.5], h=0.1, T=3.0)
    b = od.integrate(_flat(1), [1.0], h=0.1, T=3.0)
    assert od.sup_distance(a, b, 3.0) == pytest.approx(0.5, abs=1e-15)


def test_sup_distance_step_vs_flow_manual():
    spec = ls.binval(1)
    traj = C.run(spec, 2, seed=9, max_iters=6)
    ip = C.interpolate(traj)
    ode = od.integrate(spec, [0.5], h=0.05, T=1.0)
    got = od.sup_distance(ip, ode, 1.0)
    ts = np.unique(np.concatenate([np.arange(5) * 0.25, ode.times, [1.0]]))
    want = max(abs(ip.evaluate_at(t)[0] - ode.values_at([t])[0][0]) for t in ts)
    assert got == pytest.approx(want, abs=1e-15)
    assert got <= 1.0  # trajectories live in [0,1]


def test_sup_distance_bounded_by_sqrt_n():
    spec = ls.binval(3)
    traj = C.run(spec, 4, seed=2, max_iters=int(np.ceil(2.0 / (1 / 8))))
    ode = od.integrate(spec, np.full(3, 0.5), h=0.01, T=2.0)
    assert od.sup_distance(C.interpolate(traj), ode, 2.0) <= np.sqrt(3)


def test_sup_distance_horizon_mismatch():
    a = od.integrate(ls.binval(1), [0.5], h=0.1, T=1.0)
    b = od.integrate(ls.binval(1), [0.5], h=0.1, T=3.0)
    with pytest.raises(HorizonError):
        od.sup_distance(a, b, 2.0)
    with pytest.raises(HorizonError):
        od.sup_distance(b, a, 2.0)


def test_sup_distance_nonterminated_stochastic_horizon():
    spec = ls.binval(2)
    traj = C.run(spec, 8, seed=9, max_iters=3)  # defined on [0, 4 * 1/16) only
    assert not traj.terminated
    ode = od.integrate(spec, [0.5, 0.5], h=0.1, T=2.0)
    assert od.sup_distance(C.interpolate(traj), ode, 0.2) >= 0.0
    with pytest.raises(HorizonError):
        od.sup_distance(C.interpolate(traj), ode, 0.5)
