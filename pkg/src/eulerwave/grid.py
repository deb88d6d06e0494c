"""Periodic 3D grid and Euclidean stencil operators.

Fields are plain numpy arrays over the flat 3-torus [0, 2*pi)^3:
scalars have shape (n, n, n) indexed (i, j, k) and vectors have shape
(3, n, n, n) with the Cartesian component as the leading axis.  All
derivative operators are periodic central differences of the grid's
configured order (2 or 4), written as paired differences so that a
constant field differentiates to exactly 0.0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, UsageError

TWO_PI = 2.0 * math.pi


def make_levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1.0
    return eps


#: fully antisymmetric symbol with eps[0,1,2] = +1
LEVI_CIVITA = make_levi_civita()


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with the same cell count along each axis."""

    n: int
    order: int = 4
    length: float = field(default=TWO_PI)

    def __post_init__(self):
        if self.n < 8 or self.n % 2 != 0:
            raise ConfigurationError(f"grid n must be even and >= 8, got {self.n}")
        if self.order not in (2, 4):
            raise ConfigurationError(f"stencil order must be 2 or 4, got {self.order}")
        if not math.isclose(self.length, TWO_PI, rel_tol=1e-15):
            raise ConfigurationError("domain edge length is fixed to 2*pi")

    @property
    def h(self) -> float:
        return self.length / self.n

    def axis_coordinates(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = self.axis_coordinates()
        return np.meshgrid(x, x, x, indexing="ij")


def partial_derivative(grid: Grid, f: np.ndarray, axis: int) -> np.ndarray:
    """Periodic central difference along axis 1, 2 or 3 (x^1, x^2, x^3)."""
    if axis not in (1, 2, 3):
        raise UsageError(f"axis must be 1, 2 or 3, got {axis}")
    ax = axis - 1 + (f.ndim - 3)  # works for (n,n,n) and (3,n,n,n)
    h = grid.h
    fp1 = np.roll(f, -1, axis=ax)
    fm1 = np.roll(f, 1, axis=ax)
    if grid.order == 2:
        return (fp1 - fm1) / (2.0 * h)
    fp2 = np.roll(f, -2, axis=ax)
    fm2 = np.roll(f, 2, axis=ax)
    return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h)


def gradient(grid: Grid, f: np.ndarray) -> np.ndarray:
    return np.stack([partial_derivative(grid, f, a) for a in (1, 2, 3)])


def flat_div(grid: Grid, v: np.ndarray) -> np.ndarray:
    return sum(partial_derivative(grid, v[a], a + 1) for a in range(3))


def flat_curl(grid: Grid, v: np.ndarray) -> np.ndarray:
    d = [[partial_derivative(grid, v[b], a + 1) for b in range(3)] for a in range(3)]
    return np.stack([d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]])


def laplacian(grid: Grid, f: np.ndarray) -> np.ndarray:
    return sum(
        partial_derivative(grid, partial_derivative(grid, f, a), a) for a in (1, 2, 3)
    )


def advect(grid: Grid, v: np.ndarray, f: np.ndarray) -> np.ndarray:
    """v^a d_a f for a scalar field f."""
    return sum(v[a] * partial_derivative(grid, f, a + 1) for a in range(3))


def time_derivative(values, dt: float):
    """4th-order centered first time derivative at the middle of 5 slices."""
    if len(values) != 5:
        raise UsageError("time_derivative expects exactly 5 slices")
    f_m2, f_m1, _, f_p1, f_p2 = values
    return (8.0 * (f_p1 - f_m1) - (f_p2 - f_m2)) / (12.0 * dt)


def second_time_derivative(values, dt: float):
    """4th-order centered second time derivative at the middle of 5 slices."""
    if len(values) != 5:
        raise UsageError("second_time_derivative expects exactly 5 slices")
    f_m2, f_m1, f0, f_p1, f_p2 = values
    return (16.0 * (f_p1 + f_m1) - (f_p2 + f_m2) - 30.0 * f0) / (12.0 * dt * dt)


def sup_norm(f: np.ndarray) -> float:
    return float(np.max(np.abs(f)))


def l2_norm(f: np.ndarray) -> float:
    """Root mean square over all stored values (grid-measure normalized)."""
    return float(np.sqrt(np.mean(np.square(f))))
