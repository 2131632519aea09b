"""Neumann cosine basis on a rectangle and the Sobolev-weighted ergodic metric.

Mode ``k = (k1, k2)`` is

    f_k(x) = cos(k1 pi x1 / L1) cos(k2 pi x2 / L2) / h_k

with ``x`` measured from the lower corner and ``h_k`` chosen so that
``||f_k||_2 = 1`` over the rectangle.  Mode weights are
``Lambda_k = (1 + |k|^2)^(-3/2)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Domain, Grid
from .errors import NormalizationError, ShapeError

SOBOLEV_EXPONENT = 1.5  # (n + 1) / 2 for n = 2


def _sinpi(z):
    # sin(pi z) with exact zeros at integer z
    r = np.remainder(z, 2.0)
    out = np.sin(np.pi * r)
    return np.where((r == 0.0) | (r == 1.0), 0.0, out)


def _cospi(z):
    # cos(pi z) with exact zeros at half-integer z
    r = np.remainder(z, 2.0)
    out = np.cos(np.pi * r)
    return np.where((r == 0.5) | (r == 1.5), 0.0, out)


@dataclass(frozen=True, eq=False)
class ModeSet:
    k_max: int
    k: np.ndarray  # (M, 2) integer multi-indices, k1 slow, k2 fast
    h: np.ndarray  # (M,)
    lam: np.ndarray  # (M,)
    lengths: np.ndarray  # (2,)

    @classmethod
    def build(cls, k_max: int, domain: Domain) -> "ModeSet":
        if k_max < 0:
            raise ValueError("k_max must be non-negative")
        r = np.arange(k_max + 1)
        K1, K2 = np.meshgrid(r, r, indexing="ij")
        k = np.column_stack([K1.ravel(), K2.ravel()])
        L = domain.lengths
        # int_0^L cos^2(k pi x / L) dx is L for k = 0 and L / 2 otherwise
        per_axis = np.where(k == 0, L[None, :], L[None, :] / 2.0)
        h = np.sqrt(np.prod(per_axis, axis=1))
        lam = (1.0 + np.sum(k.astype(float) ** 2, axis=1)) ** (-SOBOLEV_EXPONENT)
        for arr in (k, h, lam):
            arr.setflags(write=False)
        return cls(int(k_max), k, h, lam, L.copy())

    def __len__(self) -> int:
        return self.k.shape[0]

    def index(self, k1: int, k2: int) -> int:
        return k1 * (self.k_max + 1) + k2

    def values_local(self, p) -> np.ndarray:
        """f_k at local points; (P, 2) -> (P, M), (2,) -> (M,)."""
        p = np.asarray(p, dtype=float)
        u = p[..., None, :] / self.lengths  # (..., 1, 2)
        z = self.k * u  # (..., M, 2)
        return _cospi(z[..., 0]) * _cospi(z[..., 1]) / self.h

    def grads_local(self, p) -> np.ndarray:
        """Gradients of f_k at local points; (2,) -> (M, 2), (P, 2) -> (P, M, 2)."""
        p = np.asarray(p, dtype=float)
        u = p[..., None, :] / self.lengths
        z = self.k * u
        c1, c2 = _cospi(z[..., 0]), _cospi(z[..., 1])
        s1, s2 = _sinpi(z[..., 0]), _sinpi(z[..., 1])
        w = np.pi * self.k / self.lengths  # (M, 2)
        g1 = -w[:, 0] * s1 * c2 / self.h
        g2 = -w[:, 1] * c1 * s2 / self.h
        return np.stack([g1, g2], axis=-1)


def basis_eval(modes: ModeSet, domain: Domain, x) -> np.ndarray:
    x = domain.check(x)
    return modes.values_local(domain.to_local(x))


def basis_grad(modes: ModeSet, domain: Domain, x) -> np.ndarray:
    x = domain.check(x)
    return modes.grads_local(domain.to_local(x))


def grid_basis(modes: ModeSet, grid: Grid) -> np.ndarray:
    """Matrix of f_k at every cell center, shape (cells, M)."""
    return modes.values_local(grid.local_centers)


def density_coeffs(modes: ModeSet, grid: Grid, density, basis_matrix=None, tol: float = 1e-6) -> np.ndarray:
    """Project a per-cell density onto the modes with midpoint quadrature."""
    rho = np.asarray(density, dtype=float).ravel()
    if rho.size != grid.n_cells:
        raise ShapeError(f"density has {rho.size} values, grid has {grid.n_cells} cells")
    if np.any(rho < 0) or not np.all(np.isfinite(rho)):
        raise NormalizationError("density must be finite and non-negative")
    mass = grid.integrate(rho)
    if abs(mass - 1.0) > tol:
        raise NormalizationError(f"density integrates to {mass:.9g}, expected 1")
    F = grid_basis(modes, grid) if basis_matrix is None else basis_matrix
    return (rho @ F) * grid.cell_area


def trajectory_coeffs_update(accum, positions, dt: float, modes: ModeSet, domain: Domain) -> np.ndarray:
    """Add ``dt * sum_i f_k(x_i)`` to the running trajectory sum.

    The accumulator holds ``N t c_k``; divide by ``N t`` to get the
    time-averaged coverage coefficients.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    pts = domain.check(np.atleast_2d(positions))
    return accumulate_local(accum, domain.to_local(pts), dt, modes)


def accumulate_local(accum, local_positions, dt: float, modes: ModeSet) -> np.ndarray:
    vals = modes.values_local(np.atleast_2d(local_positions))
    return np.asarray(accum, dtype=float) + dt * vals.sum(axis=0)


def ergodic_metric(modes: ModeSet, c, mu) -> float:
    """Sum over modes of ``Lambda_k (c_k - mu_k)^2``."""
    c = np.asarray(c, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if c.shape != (len(modes),) or mu.shape != (len(modes),):
        raise ShapeError(f"coefficient shapes {c.shape}, {mu.shape} do not match {len(modes)} modes")
    s = c - mu
    return float(np.sum(modes.lam * s * s))


def uniform_coeffs(modes: ModeSet) -> np.ndarray:
    """Exact coefficients of the uniform density ``1 / area``."""
    mu = np.zeros(len(modes))
    mu[0] = 1.0 / modes.h[0]
    return mu
