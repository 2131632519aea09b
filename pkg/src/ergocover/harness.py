"""Closed-loop runs: ergodic control, point sampling, model adaptation, retargeting.

Timeline of one run (control step ``dt``, sampling period ``T_s = k dt``)::

    every dt   : all robots take one controller step
    every T_s  : each robot measures the field at its new position,
                 the estimator ingests the batch and adapts over T_s,
                 the target density is rebuilt and pushed (adaptive mode),
                 metrics are logged

Random numbers come from three independent streams derived from the root
seed (robot placement, tie-break headings, sensor noise) so that drawing
from one never shifts another.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig, resolve
from .control import ControllerState, RobotState, set_target, step
from .domain import Grid
from .errors import ConfigError, DivergenceError, NormalizationError
from .estimator import (
    EstimatorState,
    RbfBasis,
    adapt_interval,
    density_from_estimate,
    ingest_local,
    lyapunov_value,
)
from .spectral import ModeSet, density_coeffs, grid_basis

log = logging.getLogger(__name__)

STREAMS = ("robot-init", "tie-break", "sensor-noise")


def make_streams(seed: int) -> dict[str, np.random.Generator]:
    """Independent generators keyed by purpose, all derived from one seed."""
    return {
        name: np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        for i, name in enumerate(STREAMS)
    }


def normalized_rmse(phi_hat_grid, truth_grid) -> float:
    phi_hat = np.asarray(phi_hat_grid, dtype=float)
    truth = np.asarray(truth_grid, dtype=float)
    if phi_hat.shape != truth.shape:
        raise ValueError(f"grid shapes differ: {phi_hat.shape} vs {truth.shape}")
    span = float(np.max(truth) - np.min(truth))
    if span <= 0:
        raise NormalizationError("truth field is constant; RMSE normalization undefined")
    return float(np.sqrt(np.mean((phi_hat - truth) ** 2)) / span)


@dataclass
class RunRecord:
    config: ScenarioConfig
    seed: int
    initial_positions: np.ndarray
    initial_rmse: float
    step_times: np.ndarray
    positions: np.ndarray  # (steps, N, 2), world frame
    controls: np.ndarray  # (steps, N, 2)
    sampled: np.ndarray  # (steps,) bool
    sample_times: np.ndarray
    measurements: np.ndarray  # (samples, N)
    rmse: np.ndarray
    ergodic: np.ndarray
    lyapunov: np.ndarray | None
    lyapunov_kind: str | None  # "exact" | "projected"
    target_mass: np.ndarray  # integral of each published target density
    target_coeffs: np.ndarray  # (samples, M)
    weights: np.ndarray
    phi_hat_grid: np.ndarray
    truth_grid: np.ndarray
    metric_grid: Grid = field(repr=False)
    aborted: str | None = None

    @property
    def n_robots(self) -> int:
        return self.initial_positions.shape[0]

    @property
    def final_rmse(self) -> float:
        return float(self.rmse[-1]) if self.rmse.size else self.initial_rmse


class _Estimators:
    """One shared estimator, or one per robot with their weights averaged."""

    def __init__(self, m, n_robots, alpha, beta, per_robot):
        count = n_robots if per_robot else 1
        self.states = [EstimatorState.zeros(m, alpha, beta) for _ in range(count)]
        self.per_robot = per_robot

    def ingest(self, K, y, dt_s):
        if self.per_robot:
            for i, st in enumerate(self.states):
                ingest_local(st, K[i : i + 1], y[i : i + 1], dt_s)
        else:
            ingest_local(self.states[0], K, y, dt_s)

    def adapt(self, interval, min_substeps):
        for st in self.states:
            adapt_interval(st, interval, min_substeps)

    @property
    def weights(self) -> np.ndarray:
        if len(self.states) == 1:
            return self.states[0].weights
        return np.mean([st.weights for st in self.states], axis=0)


def run(config: ScenarioConfig, truth=None, estimator_enabled: bool = True) -> RunRecord:
    """Simulate one scenario.

    ``truth`` overrides the configured ground-truth field; passing an
    :class:`~ergocover.estimator.RbfSpanField` built on the same lattice makes
    the logged Lyapunov value exact rather than a projection.
    ``estimator_enabled=False`` skips sensing and estimation entirely and is
    only meaningful for the uniform baseline.
    """
    cfg = resolve(config)
    adaptive = cfg.controller.mode == "adaptive"
    if not estimator_enabled and adaptive:
        raise ConfigError("controller.mode: adaptive runs need the estimator")
    domain = cfg.build_domain()
    field_ = cfg.build_field() if truth is None else truth
    streams = make_streams(cfg.run.seed)

    modes = ModeSet.build(cfg.controller.k_max, domain)
    rbf = RbfBasis(domain, cfg.estimator.lattice, cfg.estimator.sigma_rbf)
    metric_grid = Grid(domain, cfg.run.metric_resolution)
    density_grid = Grid(domain, cfg.run.density_resolution)
    K_metric = rbf.values_local(metric_grid.local_centers)
    K_density = rbf.values_local(density_grid.local_centers)
    F_density = grid_basis(modes, density_grid)

    n = cfg.robots.count
    L = domain.lengths
    start = streams["robot-init"].uniform(0.0, 1.0, size=(n, 2)) * L
    robots = [RobotState(i, start[i].copy()) for i in range(n)]
    ctrl = ControllerState(
        modes, domain, n, cfg.robots.u_max, cfg.controller.dt, cfg.controller.eps_b, cfg.controller.boundary
    )

    est = _Estimators(rbf.size, n, cfg.estimator.alpha, cfg.estimator.beta, cfg.estimator.fusion == "per-robot")

    exact_weights = getattr(field_, "true_weights", None)
    if exact_weights is not None and np.shape(exact_weights) == (rbf.size,):
        lyap_kind = "exact"
        project = None
    else:
        lyap_kind = "projected"
        project = np.linalg.pinv(K_metric)

    def truth_grid(t):
        return field_.evaluate(metric_grid.centers, t)

    def true_weights(t):
        return np.asarray(exact_weights) if project is None else project @ truth_grid(t)

    truth0 = truth_grid(0.0)
    initial_rmse = normalized_rmse(K_metric @ est.weights, truth0)

    n_steps, every = cfg.n_steps, cfg.sample_every
    dt_s = cfg.sample_period
    noise = cfg.field.noise_std
    positions = np.zeros((n_steps, n, 2))
    controls = np.zeros((n_steps, n, 2))
    sampled = np.zeros(n_steps, dtype=bool)
    log_t, log_y, log_rmse, log_erg, log_v, log_mass, log_mu = [], [], [], [], [], [], []
    aborted = None
    done = 0

    for s in range(1, n_steps + 1):
        step(robots, ctrl, streams["tie-break"])
        positions[s - 1] = [domain.to_world(r.position) for r in robots]
        controls[s - 1] = [r.control for r in robots]
        done = s
        if s % every:
            continue
        sampled[s - 1] = True
        t = ctrl.t
        local = np.array([r.position for r in robots])
        if estimator_enabled:
            y = field_.evaluate(domain.to_world(local), t)
            if noise > 0:
                y = y + streams["sensor-noise"].normal(0.0, noise, size=n)
            try:
                est.ingest(rbf.values_local(local), y, dt_s)
                est.adapt(dt_s, every)
            except DivergenceError as exc:
                aborted = str(exc)
                log.warning("run aborted at t=%.3f: %s", t, exc)
                break
        else:
            y = np.full(n, np.nan)
        if adaptive:
            rho = density_from_estimate(K_density @ est.weights, density_grid, cfg.estimator.floor)
            mu = density_coeffs(modes, density_grid, rho, basis_matrix=F_density)
            set_target(ctrl, mu)
            mass = density_grid.integrate(rho)
        else:
            mass = 1.0
        truth_t = truth_grid(t)
        log_t.append(t)
        log_y.append(y)
        log_rmse.append(normalized_rmse(K_metric @ est.weights, truth_t))
        log_erg.append(ctrl.metric())
        log_v.append(lyapunov_value(est.states, true_weights(t)))
        log_mass.append(mass)
        log_mu.append(ctrl.mu.copy())

    t_end = ctrl.t
    return RunRecord(
        config=cfg,
        seed=cfg.run.seed,
        initial_positions=domain.to_world(start),
        initial_rmse=initial_rmse,
        step_times=np.arange(1, done + 1) * cfg.controller.dt,
        positions=positions[:done],
        controls=controls[:done],
        sampled=sampled[:done],
        sample_times=np.array(log_t),
        measurements=np.array(log_y).reshape(-1, n),
        rmse=np.array(log_rmse),
        ergodic=np.array(log_erg),
        lyapunov=np.array(log_v),
        lyapunov_kind=lyap_kind,
        target_mass=np.array(log_mass),
        target_coeffs=np.array(log_mu).reshape(-1, len(modes)),
        weights=est.weights.copy(),
        phi_hat_grid=K_metric @ est.weights,
        truth_grid=truth_grid(t_end) if n_steps else truth0,
        metric_grid=metric_grid,
        aborted=aborted,
    )


_COMPARABLE = {"controller.mode", "field.gamma", "run.output_dir"}


@dataclass
class Comparison:
    a: RunRecord
    b: RunRecord
    delta: np.ndarray  # rmse_a - rmse_b per sample step
    final_ratio: float  # final rmse_a / final rmse_b
    final_quarter_fraction: float  # share of final-quarter steps with rmse_a <= rmse_b


def _differences(cfg_a: ScenarioConfig, cfg_b: ScenarioConfig) -> set[str]:
    out = set()
    for sec in dataclasses.fields(cfg_a):
        sa, sb = getattr(cfg_a, sec.name), getattr(cfg_b, sec.name)
        for f in dataclasses.fields(sa):
            if getattr(sa, f.name) != getattr(sb, f.name):
                out.add(f"{sec.name}.{f.name}")
    return out


def final_quarter_fraction(rmse_a, rmse_b) -> float:
    rmse_a, rmse_b = np.asarray(rmse_a), np.asarray(rmse_b)
    n = rmse_a.size
    if n == 0:
        return float("nan")
    start = (3 * n) // 4
    return float(np.mean(rmse_a[start:] <= rmse_b[start:]))


def compare(config_a: ScenarioConfig, config_b: ScenarioConfig) -> Comparison:
    """Run two scenarios that differ only in controller mode or s-curve shape."""
    cfg_a, cfg_b = resolve(config_a), resolve(config_b)
    extra = _differences(cfg_a, cfg_b) - _COMPARABLE
    if extra:
        raise ConfigError(f"configs are not comparable; they differ in {', '.join(sorted(extra))}")
    ra, rb = run(cfg_a), run(cfg_b)
    m = min(ra.rmse.size, rb.rmse.size)
    delta = ra.rmse[:m] - rb.rmse[:m]
    ratio = ra.final_rmse / rb.final_rmse if rb.final_rmse > 0 else float("nan")
    return Comparison(ra, rb, delta, float(ratio), final_quarter_fraction(ra.rmse[:m], rb.rmse[:m]))


def baseline_of(config: ScenarioConfig) -> ScenarioConfig:
    return config.replace("controller.mode", "uniform-baseline")


__all__ = [
    "Comparison",
    "RunRecord",
    "baseline_of",
    "compare",
    "final_quarter_fraction",
    "make_streams",
    "normalized_rmse",
    "run",
]
