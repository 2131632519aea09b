"""Search region, quadrature grids and simulated ground-truth fields.

Coordinates passed to the public functions are world coordinates.  Internally
most of the package works in the *local* frame, i.e. offsets from
``domain.lower``, so that nothing downstream depends on where the rectangle
sits in the plane.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigError, DomainViolationError

STATIC = "static-gaussian-mixture"
MOVING = "moving-gaussian-mixture"
VARIANTS = (STATIC, MOVING)


@dataclass(frozen=True)
class Domain:
    """Axis-aligned rectangle ``[lower, upper]`` in metres."""

    lower: tuple[float, float] = (0.0, 0.0)
    upper: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != 2 or len(hi) != 2:
            raise ConfigError("domain bounds must be 2-vectors")
        if not all(np.isfinite(lo + hi)):
            raise ConfigError("domain bounds must be finite")
        if not (hi[0] > lo[0] and hi[1] > lo[1]):
            raise ConfigError(f"domain upper {hi} must exceed lower {lo} component-wise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([self.upper[0] - self.lower[0], self.upper[1] - self.lower[1]])

    @property
    def area(self) -> float:
        L = self.lengths
        return float(L[0] * L[1])

    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        span = tol * np.maximum(1.0, np.abs(hi - lo))
        return bool(np.all(x >= lo - span) and np.all(x <= hi + span))

    def check(self, x) -> np.ndarray:
        """Return ``x`` as an array, raising if it falls outside the region."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != 2:
            raise DomainViolationError(f"expected 2-vector(s), got shape {x.shape}")
        if not np.all(np.isfinite(x)) or not self.contains(x):
            raise DomainViolationError(f"point {x.tolist()} outside domain {self.lower}..{self.upper}")
        return x

    def to_local(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) - np.asarray(self.lower)

    def to_world(self, p) -> np.ndarray:
        return np.asarray(p, dtype=float) + np.asarray(self.lower)


@dataclass(frozen=True)
class Grid:
    """Midpoint-rule quadrature grid of ``n1 x n2`` equal cells.

    Cells are flattened row-major with the x index running fastest, so
    ``values.reshape(n2, n1)`` gives rows of constant y.
    """

    domain: Domain
    resolution: tuple[int, int] = (128, 128)

    def __post_init__(self):
        n1, n2 = (int(n) for n in self.resolution)
        if n1 < 1 or n2 < 1:
            raise ConfigError(f"grid resolution must be positive, got {self.resolution}")
        object.__setattr__(self, "resolution", (n1, n2))

    @property
    def n_cells(self) -> int:
        return self.resolution[0] * self.resolution[1]

    @property
    def cell_size(self) -> np.ndarray:
        return self.domain.lengths / np.array(self.resolution, dtype=float)

    @property
    def cell_area(self) -> float:
        h = self.cell_size
        return float(h[0] * h[1])

    @cached_property
    def local_centers(self) -> np.ndarray:
        n1, n2 = self.resolution
        h = self.cell_size
        xs = (np.arange(n1) + 0.5) * h[0]
        ys = (np.arange(n2) + 0.5) * h[1]
        X, Y = np.meshgrid(xs, ys)
        return np.column_stack([X.ravel(), Y.ravel()])

    @cached_property
    def centers(self) -> np.ndarray:
        return self.domain.to_world(self.local_centers)

    def integrate(self, values) -> float:
        values = np.asarray(values, dtype=float).ravel()
        if values.size != self.n_cells:
            raise ValueError(f"expected {self.n_cells} cell values, got {values.size}")
        return float(np.sum(values) * self.cell_area)

    def as_image(self, values) -> np.ndarray:
        n1, n2 = self.resolution
        return np.asarray(values).reshape(n2, n1)


def scurve_progress(s_sim, gamma: float):
    """Symmetric s-curve ``s^g / (s^g + (1 - s)^g)`` on normalized time.

    Used as the fraction of its straight path a moving mean has covered.
    """
    if not (0.0 < gamma < 1.0):
        raise ConfigError(f"gamma must lie in (0,1), got {gamma}")
    s = np.asarray(s_sim, dtype=float)
    if np.any(s < 0.0) or np.any(s > 1.0):
        raise ValueError("normalized time must lie in [0, 1]")
    a = s**gamma
    b = (1.0 - s) ** gamma
    out = a / (a + b)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GroundTruthField:
    """Sum of isotropic Gaussian bumps, optionally with means sliding in time.

    For the moving variant, component ``j`` travels from ``start_means[j]`` to
    ``end_means[j]`` along a straight line over ``[0, t_sim]`` with progress
    given by :func:`scurve_progress`.
    """

    domain: Domain
    amplitudes: tuple
    sigmas: tuple
    means: tuple = ()
    variant: str = STATIC
    end_means: tuple = ()
    t_sim: float = 0.0
    gamma: float = 0.2

    _means: np.ndarray = field(init=False, repr=False, compare=False)
    _ends: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown field variant {self.variant!r}")
        amps = np.asarray(self.amplitudes, dtype=float).ravel()
        sig = np.asarray(self.sigmas, dtype=float).ravel()
        means = np.asarray(self.means, dtype=float).reshape(-1, 2)
        if not (amps.size == sig.size == means.shape[0]) or amps.size == 0:
            raise ConfigError("amplitudes, sigmas and means must have the same nonzero length")
        if np.any(amps <= 0) or np.any(sig <= 0):
            raise ConfigError("amplitudes and sigmas must be positive")
        if self.variant == MOVING:
            ends = np.asarray(self.end_means, dtype=float).reshape(-1, 2)
            if ends.shape != means.shape:
                raise ConfigError("end_means must match means in shape")
            if not self.t_sim > 0:
                raise ConfigError("moving field needs t_sim > 0")
            scurve_progress(0.5, self.gamma)
        else:
            ends = means
        object.__setattr__(self, "_means", means)
        object.__setattr__(self, "_ends", ends)

    def means_at(self, t: float) -> np.ndarray:
        if self.variant == STATIC:
            return self._means
        s = min(max(t / self.t_sim, 0.0), 1.0)
        v = scurve_progress(s, self.gamma)
        return self._means + v * (self._ends - self._means)

    def evaluate(self, points, t: float = 0.0) -> np.ndarray:
        """Vectorized field values at world points of shape (P, 2); no domain check."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        m = self.means_at(t)
        amps = np.asarray(self.amplitudes, dtype=float)
        sig = np.asarray(self.sigmas, dtype=float)
        d2 = np.sum((pts[:, None, :] - m[None, :, :]) ** 2, axis=-1)
        return np.exp(-d2 / (2.0 * sig**2)) @ amps


def eval_truth(field: GroundTruthField, x, t: float = 0.0) -> float:
    x = field.domain.check(x)
    if field.variant == MOVING and not (0.0 <= t <= field.t_sim + 1e-9):
        raise ValueError(f"t={t} outside [0, {field.t_sim}]")
    return float(field.evaluate(x[None, :], t)[0])


def sample_with_sensor(field: GroundTruthField, x, t: float, noise_std: float = 0.0, rng=None) -> float:
    """Point measurement of the field, with optional additive Gaussian noise.

    No random draw is made when ``noise_std`` is zero.
    """
    value = eval_truth(field, x, t)
    if noise_std > 0.0:
        value += float(rng.normal(0.0, noise_std))
    return value
