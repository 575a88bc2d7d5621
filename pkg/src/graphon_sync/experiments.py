"""Monte Carlo sweep engine, convergence study, and CSV persistence.

A phase-diagram sweep runs `trials` independent Erdos-Renyi trials per
(n, p, beta) grid cell.  Every trial seed is a pure function of the master
seed and the grid indices, and aggregation is by index, so the output is
identical for any worker count.  Per-trial wall time is recorded but is not
part of the deterministic output (and is not written to CSV).
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .dynamics import PhaseField, discretize_initial, kuramoto, prepare_ads_rhs, prepare_cds_rhs, prepare_sds_rhs, sakaguchi
from .graphon import Graphon, constant_graphon, discretize, erdos_renyi, is_connected, sample_network
from .integrator import DivergenceError, IntegratorConfig, Trajectory, integrate
from .observables import linf_distance, sync_verdict
from .seeding import ETA_STREAM_TAG, counter_uniforms, derive_trial_seed

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "GridCell",
    "ConvergenceRow",
    "initial_profile",
    "run_trial",
    "run_phase_diagram",
    "run_convergence_study",
    "emit_csv",
    "TRIAL_HEADER",
    "GRID_HEADER",
    "CONVERGENCE_HEADER",
]

TRIAL_HEADER = (
    "n,p,beta,trial,seed,connected,phase_sync,freq_sync,"
    "final_r,final_diameter,final_freq_spread"
)
GRID_HEADER = "n,p,beta,freq_sync_fraction,phase_sync_fraction,trials"
CONVERGENCE_HEADER = "n,median_linf,q25,q75,ads_linf"


def initial_profile(
    name: str, params: Mapping | None = None, seed: int = 0
) -> Callable[[np.ndarray], np.ndarray]:
    """Initial-condition preset by name.

    linear                eta(x) = scale * x + offset          (defaults 1, 0)
    cosine                eta(x) = amplitude * cos(2 pi x)     (default 1.0;
                          amplitudes at Bessel zeros make the initial order
                          parameter vanish and are excluded by default)
    uniform-random-smooth random low-order Fourier series with coefficients
                          drawn from the seed's counter stream: an offset
                          uniform on (-pi, pi) plus, for k = 1..order
                          (default 3), cos/sin coefficients uniform on
                          (-1/k, 1/k).
    """
    params = dict(params or {})
    if name == "linear":
        scale = float(params.pop("scale", 1.0))
        offset = float(params.pop("offset", 0.0))
        profile = lambda x: scale * np.asarray(x, dtype=float) + offset
    elif name == "cosine":
        amplitude = float(params.pop("amplitude", 1.0))
        profile = lambda x: amplitude * np.cos(2.0 * np.pi * np.asarray(x, dtype=float))
    elif name == "uniform-random-smooth":
        order = int(params.pop("order", 3))
        u = counter_uniforms(seed, ETA_STREAM_TAG, 2 * order + 1)
        offset = (2.0 * u[0] - 1.0) * np.pi
        ks = np.arange(1, order + 1, dtype=float)
        cos_coef = (2.0 * u[1 : order + 1] - 1.0) / ks
        sin_coef = (2.0 * u[order + 1 :] - 1.0) / ks

        def profile(x):
            phase = 2.0 * np.pi * np.asarray(x, dtype=float)[..., None] * ks
            return offset + (np.cos(phase) @ cos_coef) + (np.sin(phase) @ sin_coef)

    else:
        raise ValueError(f"unknown initial-condition preset '{name}'")
    if params:
        raise ValueError(f"unused parameters for preset '{name}': {sorted(params)}")
    return profile


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of a phase-diagram sweep.

    The JSON config files accepted by the CLI mirror these field names.
    """

    n_grid: tuple[int, ...]
    p_grid: tuple[float, ...]
    beta_grid: tuple[float, ...] = (0.0,)
    trials: int = 50
    master_seed: int = 0
    eta: str = "linear"
    eta_params: Mapping = field(default_factory=dict)
    step: float = 0.01
    horizon: float = 200.0
    phase_tol: float = 1e-2
    freq_tol: float = 1e-3
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "p_grid", tuple(float(p) for p in self.p_grid))
        object.__setattr__(self, "beta_grid", tuple(float(b) for b in self.beta_grid))
        object.__setattr__(self, "eta_params", dict(self.eta_params))
        if not (self.n_grid and self.p_grid and self.beta_grid):
            raise ValueError("all grids must be nonempty")
        if any(n < 1 for n in self.n_grid):
            raise ValueError("grid sizes must be >= 1")
        if any(not 0.0 < p <= 1.0 for p in self.p_grid):
            raise ValueError("edge probabilities must lie in (0,1]")
        if self.trials < 1:
            raise ValueError("need at least one trial per cell")
        if self.threads < 1:
            raise ValueError("need at least one worker")
        IntegratorConfig(step=self.step, horizon=self.horizon)  # validate pair

    @classmethod
    def from_mapping(cls, data: Mapping) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    def to_mapping(self) -> dict:
        return {
            "n_grid": list(self.n_grid),
            "p_grid": list(self.p_grid),
            "beta_grid": list(self.beta_grid),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "eta": self.eta,
            "eta_params": dict(self.eta_params),
            "step": self.step,
            "horizon": self.horizon,
            "phase_tol": self.phase_tol,
            "freq_tol": self.freq_tol,
            "threads": self.threads,
        }


@dataclass(frozen=True)
class TrialRecord:
    """Outcome row of one sampled-system trial."""

    n: int
    p: float
    beta: float
    trial: int
    seed: int
    connected: bool
    phase_sync: bool
    freq_sync: bool
    final_r: float
    final_diameter: float
    final_freq_spread: float
    wall_time: float = 0.0


@dataclass(frozen=True)
class GridCell:
    """Aggregated sync fractions for one (n, p, beta) cell."""

    n: int
    p: float
    beta: float
    freq_sync_fraction: float
    phase_sync_fraction: float
    trials: int


@dataclass(frozen=True)
class ConvergenceRow:
    """Sup-norm errors against the continuum reference for one network size."""

    n: int
    median_linf: float
    q25: float
    q75: float
    ads_linf: float


def _coupling_for(beta: float):
    return kuramoto() if beta == 0.0 else sakaguchi(beta)


def run_trial(
    n: int, p: float, beta: float, seed: int, cfg: ExperimentConfig
) -> TrialRecord:
    """One sampled-system trial: sample G(n, p), integrate, classify.

    Integrator divergence is recorded as a failed (non-synchronized) trial
    with NaN observables rather than raised.
    """
    start = time.perf_counter()
    profile = initial_profile(cfg.eta, cfg.eta_params, seed=seed)
    initial = discretize_initial(profile, n)
    net = erdos_renyi(n, p, seed)
    connected = is_connected(net)
    icfg = IntegratorConfig(
        step=cfg.step, horizon=cfg.horizon, store_stride=max(1, round(cfg.horizon / cfg.step))
    )
    rhs = prepare_sds_rhs(net, _coupling_for(beta))
    try:
        traj = integrate(rhs, initial, icfg)
        verdict = sync_verdict(traj, cfg.phase_tol, cfg.freq_tol)
        phase_sync, freq_sync = verdict.phase_sync, verdict.freq_sync
        final_r, final_diameter = verdict.final_r, verdict.final_diameter
        final_freq_spread = verdict.final_freq_spread
    except DivergenceError:
        phase_sync = freq_sync = False
        final_r = final_diameter = final_freq_spread = math.nan
    return TrialRecord(
        n=n,
        p=p,
        beta=beta,
        trial=-1,  # caller fills the grid position
        seed=seed,
        connected=connected,
        phase_sync=phase_sync,
        freq_sync=freq_sync,
        final_r=final_r,
        final_diameter=final_diameter,
        final_freq_spread=final_freq_spread,
        wall_time=time.perf_counter() - start,
    )


def _pool_trial(args) -> TrialRecord:
    n, p, beta, trial, seed, cfg = args
    return replace(run_trial(n, p, beta, seed, cfg), trial=trial)


def run_phase_diagram(
    cfg: ExperimentConfig,
) -> tuple[list[GridCell], list[TrialRecord]]:
    """Run the full sweep; returns per-cell fractions and all trial records.

    Deterministic for a given config regardless of `threads`: seeds derive
    from grid indices and results are merged in task order.
    """
    tasks = []
    for ni, n in enumerate(cfg.n_grid):
        for pi, p in enumerate(cfg.p_grid):
            for bi, beta in enumerate(cfg.beta_grid):
                for t in range(cfg.trials):
                    seed = derive_trial_seed(cfg.master_seed, ni, pi, bi, t)
                    tasks.append((n, p, beta, t, seed, cfg))
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            records = list(pool.map(_pool_trial, tasks, chunksize=4))
    else:
        records = [_pool_trial(task) for task in tasks]

    cells = []
    per_cell = cfg.trials
    for c in range(len(records) // per_cell):
        chunk = records[c * per_cell : (c + 1) * per_cell]
        cells.append(
            GridCell(
                n=chunk[0].n,
                p=chunk[0].p,
                beta=chunk[0].beta,
                freq_sync_fraction=sum(r.freq_sync for r in chunk) / per_cell,
                phase_sync_fraction=sum(r.phase_sync for r in chunk) / per_cell,
                trials=per_cell,
            )
        )
    return cells, records


def _ends_only(step: float, horizon: float) -> IntegratorConfig:
    return IntegratorConfig(
        step=step, horizon=horizon, store_stride=max(1, round(horizon / step))
    )


def run_convergence_study(
    n_list: Sequence[int],
    m_ref: int,
    *,
    trials: int = 20,
    alpha: float = 1.0,
    beta: float = 0.0,
    eta: str = "linear",
    eta_params: Mapping | None = None,
    horizon: float = 1.0,
    step: float = 1e-3,
    master_seed: int = 0,
    graphon: Graphon | None = None,
) -> list[ConvergenceRow]:
    """Sup-norm errors of sampled and averaged systems against the continuum.

    Integrates the continuum system once on the reference mesh m_ref (which
    must be a common multiple of every n), then for each n the deterministic
    averaged system plus `trials` sampled networks, all from the same initial
    profile, and compares interpolants at the final time.
    """
    g = graphon if graphon is not None else constant_graphon(1.0)
    for n in n_list:
        if m_ref % n != 0:
            raise ValueError(f"reference mesh {m_ref} is not a multiple of n={n}")
    coupling = _coupling_for(beta)
    profile = initial_profile(eta, eta_params, seed=master_seed)
    icfg = _ends_only(step, horizon)

    reference = integrate(
        prepare_cds_rhs(g, coupling, m_ref), discretize_initial(profile, m_ref), icfg
    ).final_state

    rows = []
    for ni, n in enumerate(sorted(n_list)):
        initial = discretize_initial(profile, n)
        cells = discretize(g, n)
        ads_final = integrate(prepare_ads_rhs(cells, coupling), initial, icfg).final_state
        ads_err = linf_distance(ads_final, reference)
        errors = []
        for t in range(trials):
            seed = derive_trial_seed(master_seed, ni, 0, 0, t)
            net = sample_network(cells, alpha, seed)
            final = integrate(prepare_sds_rhs(net, coupling), initial, icfg).final_state
            errors.append(linf_distance(final, reference))
        rows.append(
            ConvergenceRow(
                n=n,
                median_linf=float(np.median(errors)),
                q25=float(np.percentile(errors, 25)),
                q75=float(np.percentile(errors, 75)),
                ads_linf=ads_err,
            )
        )
    return rows


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def emit_csv(rows, path, kind: str | None = None) -> None:
    """Write trial records, grid cells, or convergence rows to CSV.

    The row type is inferred from the first element (or from `kind`:
    'trial', 'grid', or 'convergence' for empty lists; default 'trial').
    Floats carry 9 significant digits and booleans print as 0/1.  Trial rows
    are sorted by (n, p, beta, trial).
    """
    rows = list(rows)
    if rows:
        kind = {
            TrialRecord: "trial",
            GridCell: "grid",
            ConvergenceRow: "convergence",
        }[type(rows[0])]
    elif kind is None:
        kind = "trial"

    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    with fh:
        writer = csv.writer(fh)
        if kind == "trial":
            writer.writerow(TRIAL_HEADER.split(","))
            for r in sorted(rows, key=lambda r: (r.n, r.p, r.beta, r.trial)):
                writer.writerow(
                    [
                        r.n,
                        _fmt(r.p),
                        _fmt(r.beta),
                        r.trial,
                        r.seed,
                        _fmt(r.connected),
                        _fmt(r.phase_sync),
                        _fmt(r.freq_sync),
                        _fmt(r.final_r),
                        _fmt(r.final_diameter),
                        _fmt(r.final_freq_spread),
                    ]
                )
        elif kind == "grid":
            writer.writerow(GRID_HEADER.split(","))
            for r in sorted(rows, key=lambda r: (r.n, r.p, r.beta)):
                writer.writerow(
                    [
                        r.n,
                        _fmt(r.p),
                        _fmt(r.beta),
                        _fmt(r.freq_sync_fraction),
                        _fmt(r.phase_sync_fraction),
                        r.trials,
                    ]
                )
        elif kind == "convergence":
            writer.writerow(CONVERGENCE_HEADER.split(","))
            for r in sorted(rows, key=lambda r: r.n):
                writer.writerow(
                    [r.n, _fmt(r.median_linf), _fmt(r.q25), _fmt(r.q75), _fmt(r.ads_linf)]
                )
        else:
            raise ValueError(f"unknown CSV kind '{kind}'")
