"""Campaign runner: Monte Carlo convergence tallies, learning-step sweeps,
corner classification reports, and reproducible file output.

Every output file carries a provenance header (artifact version, master
seed, hash of the effective configuration) and contains no timestamps,
so re-running with the same configuration reproduces files byte for
byte. Reals are written with 17 significant digits and round-trip
exactly. Per-run seeds are derived as ``(master_seed, N, run_index)``,
so results do not depend on execution order and runs could be
dispatched concurrently without changing any output.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError
from .cga import default_max_iters, interpolate, run
from .drift_field import corner_indices, drift
from .landscape import (
    FitnessSpec,
    bits_to_index,
    bits_to_string,
    enumerate_local_maxima,
    fitness_values,
    is_injective,
    require_injective,
    spec_from_json_dict,
    spec_to_json_dict,
)
from .ode import Stability, classify_corner, integrate, sup_distance


def fmt_real(x) -> str:
    """17-significant-digit decimal form; parses back to the same float."""
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    """Everything a campaign needs; fully determines every output byte."""

    spec: FitnessSpec
    N_values: tuple[int, ...] = (32,)
    runs_per_setting: int = 100
    T_horizon: float = 5.0
    master_seed: int = 0
    output_dir: Path = Path("outputs")
    ode_step: float = 1e-2
    find_limit_tol: float = 1e-8
    max_iters: int | None = None
    record_every: int = 1

    def __post_init__(self):
        self.N_values = tuple(int(N) for N in self.N_values)
        self.output_dir = Path(self.output_dir)
        if self.runs_per_setting < 1:
            raise DomainError(f"runs_per_setting must be >= 1, got {self.runs_per_setting}")
        if any(N < 1 for N in self.N_values) or not self.N_values:
            raise DomainError(f"N_values must be nonempty positive integers, got {self.N_values}")
        if self.T_horizon < 0:
            raise DomainError(f"T_horizon must be nonnegative, got {self.T_horizon}")
        if not self.ode_step > 0:
            raise DomainError(f"ode_step must be positive, got {self.ode_step}")
        if self.record_every < 1:
            raise DomainError(f"record_every must be >= 1, got {self.record_every}")

    def to_json_dict(self) -> dict:
        return {
            "spec": spec_to_json_dict(self.spec),
            "N_values": list(self.N_values),
            "runs_per_setting": self.runs_per_setting,
            "T_horizon": self.T_horizon,
            "master_seed": self.master_seed,
            "output_dir": str(self.output_dir),
            "ode_step": self.ode_step,
            "find_limit_tol": self.find_limit_tol,
            "max_iters": self.max_iters,
            "record_every": self.record_every,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict) or "spec" not in obj:
            raise DomainError("config JSON must be an object with a 'spec' field")
        known = {
            "N_values", "runs_per_setting", "T_horizon", "master_seed",
            "output_dir", "ode_step", "find_limit_tol", "max_iters", "record_every",
        }
        unknown = set(obj) - known - {"spec"}
        if unknown:
            raise DomainError(f"unknown config fields: {sorted(unknown)}")
        kwargs = {k: obj[k] for k in known if k in obj}
        return cls(spec=spec_from_json_dict(obj["spec"]), **kwargs)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def run_seed(master_seed: int, N: int, run_index: int) -> tuple[int, int, int]:
    """Per-run entropy tuple; feeds numpy.random.SeedSequence."""
    return (int(master_seed), int(N), int(run_index))


def provenance(cfg_hash: str, master_seed) -> dict:
    return {
        "artifact_version": __version__,
        "config_hash": cfg_hash,
        "master_seed": master_seed,
    }


def hash_of(obj) -> str:
    """Short sha256 of any JSON-serializable object (canonical form)."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# CSV plumbing
# ---------------------------------------------------------------------------

def write_csv(fp, fieldnames, rows, header: dict | None = None, footer: list[str] | None = None):
    """Comment-prefixed provenance lines, then an RFC-style CSV table."""
    if header:
        for key in sorted(header):
            fp.write(f"# {key}: {header[key]}\n")
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow(row)
    for line in footer or ():
        fp.write(f"# {line}\n")


# ---------------------------------------------------------------------------
# Monte Carlo campaign
# ---------------------------------------------------------------------------

@dataclass
class SettingResult:
    """Aggregates for one N: where runs terminated and how fast."""

    N: int
    alpha: float
    convergence_counts: dict[str, int]
    non_terminated: int
    mean_iterations: float | None
    terminal_corners_are_local_maxima: bool | None
    sup_distance_median: float | None = None
    sup_distance_q90: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "N": self.N,
            "alpha": self.alpha,
            "convergence_counts": dict(sorted(self.convergence_counts.items())),
            "non_terminated": self.non_terminated,
            "mean_iterations": self.mean_iterations,
            "terminal_corners_are_local_maxima": self.terminal_corners_are_local_maxima,
            "sup_distance_median": self.sup_distance_median,
            "sup_distance_q90": self.sup_distance_q90,
        }


@dataclass
class CampaignResult:
    config: ExperimentConfig
    settings: list[SettingResult]
    theorem_scope: str  # "ok" for injective specs, "outside" otherwise

    def to_json_dict(self) -> dict:
        return {
            "provenance": provenance(self.config.config_hash(), self.config.master_seed),
            "config": self.config.to_json_dict(),
            "theorem_scope": self.theorem_scope,
            "settings": [s.to_json_dict() for s in self.settings],
        }


def monte_carlo(cfg: ExperimentConfig) -> CampaignResult:
    """Seeded runs from the center for each N; tally terminal corners.

    Terminal corners are cross-referenced against the brute-force
    local-maxima report. Non-injective specs still run, but the result is
    labeled outside theorem scope and the cross-reference is skipped.
    """
    spec = cfg.spec
    injective = is_injective(spec)
    maxima = set(enumerate_local_maxima(spec).maxima) if injective else None

    settings = []
    for N in cfg.N_values:
        max_iters = cfg.max_iters if cfg.max_iters is not None else default_max_iters(N, spec.n)
        counts: dict[str, int] = {}
        iters = []
        non_term = 0
        all_maxima = True
        for r in range(cfg.runs_per_setting):
            traj = run(spec, N, seed=run_seed(cfg.master_seed, N, r),
                       max_iters=max_iters, record_every=cfg.record_every)
            if traj.terminated:
                corner = tuple(int(c) for c in (traj.counts[-1] // (2 * N)))
                counts[bits_to_string(corner)] = counts.get(bits_to_string(corner), 0) + 1
                iters.append(traj.iterations)
                if injective and corner not in maxima:
                    all_maxima = False
            else:
                non_term += 1
        settings.append(SettingResult(
            N=N,
            alpha=1.0 / (2 * N),
            convergence_counts=counts,
            non_terminated=non_term,
            mean_iterations=float(np.mean(iters)) if iters else None,
            terminal_corners_are_local_maxima=all_maxima if injective else None,
        ))
    return CampaignResult(config=cfg, settings=settings,
                          theorem_scope="ok" if injective else "outside")


# ---------------------------------------------------------------------------
# learning-step sweep
# ---------------------------------------------------------------------------

@dataclass
class AlphaSweepRow:
    N: int
    alpha: float
    median_sup_distance: float
    q90_sup_distance: float
    runs: int

    def to_json_dict(self) -> dict:
        return {"N": self.N, "alpha": self.alpha,
                "median_sup_distance": self.median_sup_distance,
                "q90_sup_distance": self.q90_sup_distance, "runs": self.runs}


def alpha_sweep(cfg: ExperimentConfig) -> list[AlphaSweepRow]:
    """For each N, measure how far seeded runs stray from the deterministic
    flow started at the same center, as sup distance over [0, T_horizon]."""
    if len(cfg.N_values) < 2:
        raise DomainError("alpha_sweep needs at least two N values")
    if not cfg.T_horizon > 0:
        raise DomainError("alpha_sweep needs a positive T_horizon")
    spec = cfg.spec
    T = cfg.T_horizon
    reference = integrate(spec, np.full(spec.n, 0.5), h=cfg.ode_step, T=T)

    rows = []
    for N in cfg.N_values:
        alpha = 1.0 / (2 * N)
        horizon_iters = int(np.ceil(T / alpha - 1e-12))
        dists = []
        for r in range(cfg.runs_per_setting):
            traj = run(spec, N, seed=run_seed(cfg.master_seed, N, r),
                       max_iters=horizon_iters)
            dists.append(sup_distance(interpolate(traj), reference, T))
        dists = np.asarray(dists)
        rows.append(AlphaSweepRow(
            N=N,
            alpha=alpha,
            median_sup_distance=float(np.median(dists)),
            q90_sup_distance=float(np.quantile(dists, 0.9)),
            runs=cfg.runs_per_setting,
        ))
    return rows


# ---------------------------------------------------------------------------
# corner classification report
# ---------------------------------------------------------------------------

@dataclass
class ClassificationRow:
    corner: str
    fitness: float
    local_max: bool
    verdict: str
    eigenvalues: tuple[float, ...]
    agreement: bool


@dataclass
class ClassificationReport:
    spec: FitnessSpec
    rows: list[ClassificationRow]

    @property
    def agreement_count(self) -> int:
        return sum(r.agreement for r in self.rows)

    @property
    def all_agree(self) -> bool:
        return self.agreement_count == len(self.rows)

    def write_csv(self, fp, header: dict | None = None) -> None:
        rows = [
            (r.corner, fmt_real(r.fitness), r.local_max, r.verdict,
             ";".join(fmt_real(e) for e in r.eigenvalues), r.agreement)
            for r in self.rows
        ]
        summary = f"agreement: {self.agreement_count}/{len(self.rows)}" + (
            " (100%)" if self.all_agree else " (MISMATCH)"
        )
        write_csv(fp, ["corner", "fitness", "local_max", "verdict", "eigenvalues", "agreement"],
                  rows, header=header, footer=[summary])


def classify_all(spec: FitnessSpec) -> ClassificationReport:
    """One row per corner: fitness, local-max flag, stability verdict, and
    whether the two agree (stable iff local maximum). Injective specs only."""
    require_injective(spec, "classify_all")
    vals = fitness_values(spec)
    maxima = set(enumerate_local_maxima(spec).maxima)
    rows = []
    for corner in corner_indices(spec.n):
        verdict = classify_corner(spec, corner)
        is_max = corner in maxima
        stable = verdict.verdict is Stability.ASYMPTOTICALLY_STABLE
        rows.append(ClassificationRow(
            corner=bits_to_string(corner),
            fitness=float(vals[bits_to_index(corner)]),
            local_max=is_max,
            verdict=verdict.verdict.value,
            eigenvalues=verdict.eigenvalues,
            agreement=stable == is_max,
        ))
    return ClassificationReport(spec=spec, rows=rows)


# ---------------------------------------------------------------------------
# drift grid export
# ---------------------------------------------------------------------------

def drift_grid_rows(spec: FitnessSpec, resolution: int, max_rows: int = 1_000_000):
    """Cartesian grid over [0,1]^n with `resolution` points per axis;
    yields (p_1..p_n, f_1..f_n) rows."""
    if resolution < 2:
        raise DomainError(f"grid resolution must be >= 2, got {resolution}")
    total = resolution ** spec.n
    if total > max_rows:
        raise DomainError(
            f"grid of {total} points exceeds the {max_rows} row limit; lower the resolution"
        )
    axis = np.linspace(0.0, 1.0, resolution)
    grids = np.meshgrid(*([axis] * spec.n), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=-1)
    f = drift(points, spec)
    for i in range(points.shape[0]):
        yield tuple(points[i]) + tuple(f[i])
