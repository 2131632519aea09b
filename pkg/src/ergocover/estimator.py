"""Online Gaussian-RBF model of the sensed field and the target density it induces.

The model is ``phi_hat(x) = K(x) . a_hat``.  Measurements feed two
exponentially discounted sums,

    Gamma = sum_j w_j dt_s K(x_j) K(x_j)^T,   lam = sum_j w_j dt_s K(x_j) y_j,

with ``w_j = exp(-beta (t - tau_j))``, and the weights follow the gradient
flow ``d a_hat / dt = -alpha (Gamma a_hat - lam)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import Domain, Grid
from .errors import DataError, DivergenceError
from .spectral import ModeSet, density_coeffs

DIVERGENCE_LIMIT = 1e6
MAX_SUBSTEPS = 10_000


@dataclass(frozen=True, eq=False)
class RbfBasis:
    """Gaussian bumps on a uniform ``g x g`` lattice spanning the domain, corners included."""

    domain: Domain
    lattice: int = 9
    sigma: float | None = None
    centers: np.ndarray = field(init=False, repr=False)  # local frame

    def __post_init__(self):
        if self.lattice < 1:
            raise ValueError("lattice must have at least one point per axis")
        L = self.domain.lengths
        if self.lattice == 1:
            axes = [np.array([L[0] / 2]), np.array([L[1] / 2])]
        else:
            axes = [np.linspace(0.0, L[0], self.lattice), np.linspace(0.0, L[1], self.lattice)]
        X, Y = np.meshgrid(*axes)
        object.__setattr__(self, "centers", np.column_stack([X.ravel(), Y.ravel()]))
        if self.sigma is None:
            spacing = float(np.min(L)) / max(self.lattice - 1, 1)
            object.__setattr__(self, "sigma", 1.25 * spacing)
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    def values_local(self, p) -> np.ndarray:
        """K at local points; (P, 2) -> (P, m), (2,) -> (m,)."""
        p = np.asarray(p, dtype=float)
        d2 = np.sum((p[..., None, :] - self.centers) ** 2, axis=-1)
        return np.exp(-d2 / (2.0 * self.sigma**2))


def rbf_eval(basis: RbfBasis, x) -> np.ndarray:
    x = basis.domain.check(x)
    return basis.values_local(basis.domain.to_local(x))


@dataclass
class EstimatorState:
    weights: np.ndarray
    gamma: np.ndarray
    lam: np.ndarray
    alpha: float = 1.0
    beta: float = 0.0
    n_samples: int = 0

    @classmethod
    def zeros(cls, m: int, alpha: float = 1.0, beta: float = 0.0) -> "EstimatorState":
        if alpha <= 0 or beta < 0:
            raise ValueError("alpha must be positive and beta non-negative")
        return cls(np.zeros(m), np.zeros((m, m)), np.zeros(m), float(alpha), float(beta))


def ingest_samples(state: EstimatorState, basis: RbfBasis, points, values, dt_s: float) -> EstimatorState:
    """Discount the sums by one sampling period, then add a batch of samples.

    ``points`` are world coordinates, one row per measurement.
    """
    pts = basis.domain.check(np.atleast_2d(points))
    return ingest_local(state, basis.values_local(basis.domain.to_local(pts)), values, dt_s)


def ingest_local(state: EstimatorState, K, values, dt_s: float) -> EstimatorState:
    if dt_s <= 0:
        raise ValueError("sampling period must be positive")
    K = np.atleast_2d(K)
    y = np.atleast_1d(np.asarray(values, dtype=float))
    if y.shape[0] != K.shape[0]:
        raise ValueError("one value per sample point expected")
    if not np.all(np.isfinite(y)):
        raise DataError(f"non-finite measurement in batch: {y.tolist()}")
    decay = np.exp(-state.beta * dt_s)
    state.gamma = decay * state.gamma + dt_s * (K.T @ K)
    state.lam = decay * state.lam + dt_s * (K.T @ y)
    state.n_samples += y.shape[0]
    return state


def adapt_step(state: EstimatorState, dt: float) -> EstimatorState:
    """One explicit Euler step of the weight adaptation."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    state.weights = state.weights - state.alpha * dt * (state.gamma @ state.weights - state.lam)
    norm = float(np.linalg.norm(state.weights))
    if not np.isfinite(norm) or norm > DIVERGENCE_LIMIT:
        raise DivergenceError(
            f"weight norm {norm:.3g} exceeded {DIVERGENCE_LIMIT:g}; reduce alpha*dt "
            "(stability needs alpha*dt*max eig(Gamma) < 2)"
        )
    return state


def adapt_interval(
    state: EstimatorState,
    interval: float,
    min_substeps: int = 1,
    margin: float = 1.0,
    max_substeps: int = MAX_SUBSTEPS,
) -> int:
    """Integrate the adaptation over ``interval`` seconds with Euler sub-steps.

    The sub-step count is raised until ``alpha * h * max eig(Gamma) <= margin``
    so the error energy never increases, but never beyond ``max_substeps``;
    a gain too large for that budget ends in :class:`DivergenceError`.
    Returns the number of sub-steps taken.
    """
    top = float(np.linalg.eigvalsh(state.gamma)[-1]) if state.gamma.size else 0.0
    need = np.ceil(state.alpha * interval * max(top, 0.0) / margin)
    n = max(int(min_substeps), int(min(need, max_substeps)))
    h = interval / n
    for _ in range(n):
        adapt_step(state, h)
    return n


def estimate_field(state: EstimatorState, basis: RbfBasis, x) -> float:
    return float(rbf_eval(basis, x) @ state.weights)


def density_from_estimate(phi_hat, grid: Grid, floor: float = 1e-3) -> np.ndarray:
    """Clamp negatives, add a small floor and normalize to unit mass."""
    pos = np.maximum(np.asarray(phi_hat, dtype=float), 0.0)
    rho = pos + (floor * float(np.mean(pos)) + 1e-12)
    return rho / grid.integrate(rho)


def build_target_density(
    state: EstimatorState,
    basis: RbfBasis,
    grid: Grid,
    modes: ModeSet,
    floor: float = 1e-3,
    rbf_matrix=None,
    fourier_matrix=None,
):
    """Per-cell target density and its mode coefficients.

    An estimate that is nowhere positive gives the uniform density.
    """
    K = basis.values_local(grid.local_centers) if rbf_matrix is None else rbf_matrix
    rho = density_from_estimate(K @ state.weights, grid, floor)
    return rho, density_coeffs(modes, grid, rho, basis_matrix=fourier_matrix)


def lyapunov_value(states, true_weights) -> float:
    """Half the squared parameter error, summed over one or more estimators."""
    if isinstance(states, EstimatorState):
        states = [states]
    a = np.asarray(true_weights, dtype=float)
    return float(sum(0.5 * np.sum((s.weights - a) ** 2) for s in states))


@dataclass(frozen=True, eq=False)
class RbfSpanField:
    """A field lying exactly in the span of an RBF basis, for convergence checks."""

    basis: RbfBasis
    true_weights: np.ndarray

    @property
    def domain(self) -> Domain:
        return self.basis.domain

    def evaluate(self, points, t: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self.basis.values_local(self.domain.to_local(pts)) @ self.true_weights
