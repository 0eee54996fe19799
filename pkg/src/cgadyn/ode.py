"""Deterministic flow dX/dt = f(X) of the expected update, and its fixed points.

The vector field f is the exact drift from :mod:`cgadyn.drift`; it is a
polynomial in X, so a classical fixed-step 4th-order Runge-Kutta scheme
is accurate and keeps runs byte-reproducible. States are clamped to
[0,1]^n after each step; the exact flow stays inside the box, so clamps
only absorb O(h^5) overshoot and their count is reported.

Corner fixed points are classified by the sign pattern of the analytic
Jacobian's eigenvalues: all negative means asymptotically stable, any
positive means unstable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError, DomainError, HorizonError
from .cga import InterpolatedProcess
from .drift_field import drift, jacobian_analytic
from .landscape import FitnessSpec, MaxStatus, is_local_maximum, spec_to_json_dict


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

@dataclass
class OdeTrajectory:
    times: np.ndarray    # (M+1,)
    states: np.ndarray   # (M+1, n), all inside [0,1]^n
    step: float
    initial: np.ndarray
    clamp_count: int
    spec: FitnessSpec

    @property
    def n(self) -> int:
        return int(self.states.shape[1])

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def values_at(self, ts) -> np.ndarray:
        """Linear interpolation between grid points, shape (len(ts), n)."""
        ts = np.asarray(ts, dtype=np.float64)
        if np.any(ts < -1e-12) or np.any(ts > self.horizon + 1e-9):
            raise HorizonError(f"time outside [0, {self.horizon}]")
        ts = np.clip(ts, 0.0, self.horizon)
        cols = [np.interp(ts, self.times, self.states[:, i]) for i in range(self.n)]
        return np.stack(cols, axis=-1)


def _rk4_step(x: np.ndarray, h: float, field) -> np.ndarray:
    k1 = field(x)
    k2 = field(x + 0.5 * h * k1)
    k3 = field(x + 0.5 * h * k2)
    k4 = field(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _validate_x0(spec: FitnessSpec, x0) -> np.ndarray:
    arr = np.asarray(x0, dtype=np.float64)
    if arr.shape[-1] != spec.n:
        raise DimensionError(f"initial state shape {arr.shape} does not match n={spec.n}")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("initial state must lie in [0,1]^n")
    return arr


def integrate(spec: FitnessSpec, x0, h: float = 1e-2, T: float = 10.0) -> OdeTrajectory:
    """Integrate the flow from x0 over [0, T] with fixed step h.

    The grid is 0, h, 2h, ...; a shorter final step lands exactly on T
    when T is not a multiple of h. T = 0 yields the single initial state.
    """
    x = _validate_x0(spec, x0)
    if x.ndim != 1:
        raise DimensionError("integrate expects a single initial state")
    if not h > 0.0:
        raise DomainError(f"step size must be positive, got {h}")
    if T < 0.0:
        raise DomainError(f"horizon must be nonnegative, got {T}")

    field = lambda s: drift(s, spec)
    full = int(np.floor(T / h + 1e-12))
    times = np.arange(full + 1, dtype=np.float64) * h
    remainder = T - times[-1]
    if remainder > 1e-12 * max(1.0, T):
        times = np.append(times, T)
    states = np.empty((times.shape[0], spec.n), dtype=np.float64)
    states[0] = x
    clamps = 0
    for i in range(1, times.shape[0]):
        nxt = _rk4_step(states[i - 1], float(times[i] - times[i - 1]), field)
        clipped = np.clip(nxt, 0.0, 1.0)
        clamps += int(np.count_nonzero(clipped != nxt))
        states[i] = clipped
    return OdeTrajectory(times=times, states=states, step=float(h), initial=x.copy(),
                         clamp_count=clamps, spec=spec)


# ---------------------------------------------------------------------------
# limits of the flow
# ---------------------------------------------------------------------------

@dataclass
class LimitResult:
    """Where the flow ended: final state, whether the stall criterion
    ||f||_inf < tol was met, the stop time, and the nearest corner
    (reported, never applied to the state)."""

    state: np.ndarray
    converged: bool
    t_stop: float
    nearest_corner: tuple[int, ...]
    corner_distance: float


@dataclass
class BatchLimitResult:
    states: np.ndarray           # (B, n)
    converged: np.ndarray        # (B,) bool
    t_stop: np.ndarray           # (B,)
    nearest_corners: np.ndarray  # (B, n) int
    corner_distances: np.ndarray  # (B,)


def find_limit_many(
    spec: FitnessSpec,
    x0s,
    *,
    tol: float = 1e-8,
    T_max: float = 200.0,
    h: float = 1e-2,
) -> BatchLimitResult:
    """Integrate a batch of starts until the drift stalls below tol (per row)."""
    X = _validate_x0(spec, x0s)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DimensionError("find_limit_many expects (B, n) initial states")
    if not h > 0.0 or not tol > 0.0 or T_max < 0.0:
        raise DomainError("need h > 0, tol > 0, T_max >= 0")
    X = X.copy()
    B = X.shape[0]
    converged = np.zeros(B, dtype=bool)
    t_stop = np.full(B, T_max, dtype=np.float64)

    field = lambda s: drift(s, spec)

    def mark_stalled(t_now: float) -> None:
        active = np.flatnonzero(~converged)
        if active.size == 0:
            return
        f = drift(X[active], spec)
        stalled = np.max(np.abs(f), axis=-1) < tol
        converged[active[stalled]] = True
        t_stop[active[stalled]] = t_now

    full = int(np.floor(T_max / h + 1e-12))
    remainder = T_max - full * h
    has_tail = remainder > 1e-12 * max(1.0, T_max)

    mark_stalled(0.0)
    for i in range(full + (1 if has_tail else 0)):
        if converged.all():
            break
        h_step = h if i < full else remainder
        t_now = (i + 1) * h if i < full else T_max
        active = ~converged
        X[active] = np.clip(_rk4_step(X[active], h_step, field), 0.0, 1.0)
        mark_stalled(t_now)

    corners = np.where(X >= 0.5, 1, 0).astype(np.int64)
    dists = np.linalg.norm(X - corners, axis=-1)
    return BatchLimitResult(states=X, converged=converged, t_stop=t_stop,
                            nearest_corners=corners, corner_distances=dists)


def find_limit(
    spec: FitnessSpec,
    x0,
    *,
    tol: float = 1e-8,
    T_max: float = 200.0,
    h: float = 1e-2,
) -> LimitResult:
    """Single-start convenience wrapper around :func:`find_limit_many`."""
    batch = find_limit_many(spec, np.atleast_2d(np.asarray(x0, dtype=np.float64)),
                            tol=tol, T_max=T_max, h=h)
    return LimitResult(
        state=batch.states[0],
        converged=bool(batch.converged[0]),
        t_stop=float(batch.t_stop[0]),
        nearest_corner=tuple(int(b) for b in batch.nearest_corners[0]),
        corner_distance=float(batch.corner_distances[0]),
    )


# ---------------------------------------------------------------------------
# stability of corner fixed points
# ---------------------------------------------------------------------------

class Stability(Enum):
    ASYMPTOTICALLY_STABLE = "asymptotically_stable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class StabilityVerdict:
    corner: tuple[int, ...]
    verdict: Stability
    eigenvalues: tuple[float, ...]
    local_max: bool


def classify_corner(spec: FitnessSpec, corner) -> StabilityVerdict:
    """Stability of a corner fixed point by the sign of its eigenvalues.

    Requires an injective spec (jacobian_analytic refuses otherwise).
    """
    jac = jacobian_analytic(corner, spec)
    eigs = tuple(float(e) for e in jac.eigenvalues)
    verdict = Stability.ASYMPTOTICALLY_STABLE if all(e < 0 for e in eigs) else Stability.UNSTABLE
    status = is_local_maximum(spec, jac.corner)
    return StabilityVerdict(
        corner=jac.corner,
        verdict=verdict,
        eigenvalues=eigs,
        local_max=status is not MaxStatus.NOT_MAX,
    )


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def lyapunov_rate(spec: FitnessSpec, p) -> float:
    """||f(p)||^2, the instantaneous growth rate of the flow's potential."""
    f = drift(p, spec)
    return float(np.dot(f, f))


def lyapunov_increments(traj: OdeTrajectory, spec: FitnessSpec) -> np.ndarray:
    """Per-step line integral f(X_k) . (X_{k+1} - X_k) along a trajectory.

    Nonnegative up to integrator error, since dX/dt = f makes the
    integrand ||f||^2 dt.
    """
    f = drift(traj.states[:-1], spec)
    dx = np.diff(traj.states, axis=0)
    return np.sum(f * dx, axis=-1)


def sup_distance(a, b: OdeTrajectory, T: float) -> float:
    """sup over [0, T] of the Euclidean distance between two trajectories.

    ``a`` is an InterpolatedProcess or OdeTrajectory, ``b`` an
    OdeTrajectory. The supremum is taken over the union of both time
    grids (exact for step functions up to the deterministic grid's
    resolution).
    """
    if T < 0.0:
        raise DomainError(f"horizon must be nonnegative, got {T}")
    if b.horizon < T - 1e-9:
        raise HorizonError(f"second trajectory ends at {b.horizon} < T={T}")
    ts_b = b.times[b.times <= T + 1e-12]

    if isinstance(a, InterpolatedProcess):
        traj = a.trajectory
        if not traj.terminated and (traj.iterations + 1) * traj.alpha <= T:
            raise HorizonError(
                f"first trajectory ends at {(traj.iterations + 1) * traj.alpha} <= T={T}"
            )
        last_jump = min(int(np.floor(T / traj.alpha + 1e-12)), traj.iterations)
        ts_a = np.arange(last_jump + 1, dtype=np.float64) * traj.alpha
        ts = np.unique(np.concatenate([ts_a, ts_b, [0.0, T]]))
        va = a.evaluate_many(ts)
    elif isinstance(a, OdeTrajectory):
        if a.horizon < T - 1e-9:
            raise HorizonError(f"first trajectory ends at {a.horizon} < T={T}")
        ts = np.unique(np.concatenate([a.times[a.times <= T + 1e-12], ts_b, [0.0, T]]))
        va = a.values_at(ts)
    else:
        raise DomainError(f"unsupported trajectory type {type(a).__name__}")

    vb = b.values_at(ts)
    return float(np.max(np.linalg.norm(va - vb, axis=-1)))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def ode_to_jsonl(traj: OdeTrajectory, fp, extra_header: dict | None = None) -> None:
    """Same record shape as stochastic trajectories, with "t" replacing "k"."""
    header = {
        "format": "ode-trajectory",
        "n": traj.n,
        "h": traj.step,
        "T": traj.horizon,
        "clamp_count": traj.clamp_count,
        "spec": spec_to_json_dict(traj.spec),
    }
    if extra_header:
        header.update(extra_header)
    fp.write(json.dumps(header, sort_keys=True) + "\n")
    for i in range(traj.times.shape[0]):
        fp.write(json.dumps({"t": float(traj.times[i]),
                             "p": [float(x) for x in traj.states[i]]}) + "\n")
