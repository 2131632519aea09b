"""Closed-form spectral multiscale coverage feedback for single integrators.

Each robot moves at full speed against the steering direction

    B_i = sum_k Lambda_k S_k grad f_k(x_i),   S_k = N t (c_k - mu_k),

and the trajectory sum is advanced with the post-step positions.  Robot
positions are kept in the domain's local frame (offsets from
``domain.lower``).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import Domain
from .errors import NormalizationError, ShapeError
from .spectral import ModeSet, accumulate_local, ergodic_metric, uniform_coeffs

EPS_B = 1e-9
BOUNDARY_MODES = ("reflect", "clip")


@dataclass
class RobotState:
    robot_id: int
    position: np.ndarray  # local frame
    control: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def world_position(self, domain: Domain) -> np.ndarray:
        return domain.to_world(self.position)


@dataclass
class ControllerState:
    modes: ModeSet
    domain: Domain
    n_robots: int
    u_max: float = 1.0
    dt: float = 0.1
    eps_b: float = EPS_B
    boundary: str = "reflect"
    accum: np.ndarray = None
    mu: np.ndarray = None
    steps: int = 0

    def __post_init__(self):
        if self.u_max <= 0 or self.dt <= 0:
            raise ValueError("u_max and dt must be positive")
        if self.boundary not in BOUNDARY_MODES:
            raise ValueError(f"boundary must be one of {BOUNDARY_MODES}")
        if self.accum is None:
            self.accum = np.zeros(len(self.modes))
        if self.mu is None:
            self.mu = uniform_coeffs(self.modes)

    @property
    def t(self) -> float:
        return self.steps * self.dt

    def coverage_coeffs(self) -> np.ndarray:
        """Time-averaged coverage coefficients ``c_k``; undefined at t = 0."""
        return self.accum / (self.n_robots * self.t)

    def metric(self) -> float:
        if self.steps == 0:
            return float("nan")
        return ergodic_metric(self.modes, self.coverage_coeffs(), self.mu)


def residuals(state: ControllerState, n_robots: int | None = None) -> np.ndarray:
    n = state.n_robots if n_robots is None else n_robots
    return state.accum - n * state.t * state.mu


def steering_vector(state: ControllerState, robot: RobotState, S=None) -> np.ndarray:
    if S is None:
        S = residuals(state)
    grads = state.modes.grads_local(robot.position)  # (M, 2)
    terms = (state.modes.lam * S)[:, None] * grads
    # cumsum fixes a sequential summation order, unlike BLAS dot
    return np.cumsum(terms, axis=0)[-1]


def control_law(B, u_max: float, rng, eps_b: float = EPS_B) -> np.ndarray:
    """Saturated law ``-u_max B / |B|``; a random heading when ``|B| <= eps_b``."""
    B = np.asarray(B, dtype=float)
    norm = float(np.hypot(B[0], B[1]))
    if norm > eps_b:
        return -u_max * B / norm
    theta = rng.uniform(0.0, 2.0 * np.pi)
    return u_max * np.array([np.cos(theta), np.sin(theta)])


def confine(p, lengths, mode: str = "reflect") -> np.ndarray:
    """Map a local position back into ``[0, L]``.

    Clipping parks a robot exactly on the wall, where every basis gradient has
    zero normal component, so it can never leave; mirroring keeps it inside by
    the overshoot distance instead.
    """
    if mode == "clip":
        return np.clip(p, 0.0, lengths)
    r = np.remainder(p, 2.0 * lengths)
    inside = (p >= 0.0) & (p <= lengths)
    return np.where(inside, p, lengths - np.abs(lengths - r))


def step(robots: list[RobotState], state: ControllerState, rng):
    """Advance every robot by one Euler step and commit the coverage sum.

    All controls are computed from the same pre-step residuals.
    """
    S = residuals(state)
    L = state.domain.lengths
    for robot in robots:
        B = steering_vector(state, robot, S)
        u = control_law(B, state.u_max, rng, state.eps_b)
        robot.control = u
        robot.position = confine(robot.position + u * state.dt, L, state.boundary)
    pos = np.array([r.position for r in robots])
    state.accum = accumulate_local(state.accum, pos, state.dt, state.modes)
    state.steps += 1
    return robots, state


def set_target(state: ControllerState, mu, tol: float = 1e-6) -> ControllerState:
    """Swap in new target coefficients; the trajectory sum is kept as is."""
    mu = np.array(mu, dtype=float)
    if mu.shape != (len(state.modes),):
        raise ShapeError(f"target has shape {mu.shape}, expected ({len(state.modes)},)")
    # the constant mode of any probability density is 1 / h_0
    if abs(mu[0] * state.modes.h[0] - 1.0) > tol:
        raise NormalizationError(f"target constant-mode coefficient {mu[0]:.9g} is not normalized")
    state.mu = mu
    return state
