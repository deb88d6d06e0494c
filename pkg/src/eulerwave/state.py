"""Fluid state on a slice and the derived vorticity/entropy-gradient fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as gr
from .eos import EosModel, EosPoint, evaluate
from .errors import DomainError, UsageError
from .grid import Grid


@dataclass
class FluidState:
    """One time slice: log-density, velocity and entropy on a shared grid."""

    grid: Grid
    eos: EosModel
    rho_log: np.ndarray   # (n, n, n)
    v: np.ndarray         # (3, n, n, n)
    s: np.ndarray         # (n, n, n)

    def __post_init__(self):
        n = self.grid.n
        if self.rho_log.shape != (n, n, n) or self.s.shape != (n, n, n):
            raise UsageError("scalar fields must have shape (n, n, n)")
        if self.v.shape != (3, n, n, n):
            raise UsageError("velocity must have shape (3, n, n, n)")
        for f in (self.rho_log, self.v, self.s):
            if not np.all(np.isfinite(f)):
                raise DomainError("state fields must be finite")

    def eos_point(self) -> EosPoint:
        """EOS quantities evaluated cellwise (arrays of grid shape)."""
        return evaluate(self.eos, self.rho_log, self.s)

    def copy(self) -> "FluidState":
        return FluidState(self.grid, self.eos, self.rho_log.copy(),
                          self.v.copy(), self.s.copy())


def constant_state(grid: Grid, eos: EosModel, rho_log: float = 0.0,
                   v=(0.0, 0.0, 0.0), s: float = 0.0) -> FluidState:
    n = grid.n
    shape = (n, n, n)
    return FluidState(
        grid, eos,
        rho_log=np.full(shape, float(rho_log)),
        v=np.stack([np.full(shape, float(vi)) for vi in v]),
        s=np.full(shape, float(s)),
    )


@dataclass
class DerivedState:
    """Specific vorticity, entropy gradient and the modified combinations.

    ``curl_mod`` and ``div_mod`` are the first-derivative combinations of
    ``omega`` and ``grad_ent`` whose transport equations carry no second
    derivatives of velocity or density on the right-hand side.
    """

    omega: np.ndarray      # (3, n, n, n)
    grad_ent: np.ndarray   # (3, n, n, n)
    curl_mod: np.ndarray   # (3, n, n, n)
    div_mod: np.ndarray    # (n, n, n)


def compute_derived(state: FluidState) -> DerivedState:
    g = state.grid
    rho = state.rho_log
    exp_m1 = np.exp(-rho)
    point = state.eos_point()

    omega = exp_m1 * gr.flat_curl(g, state.v)
    grad_ent = gr.gradient(g, state.s)

    div_v = gr.flat_div(g, state.v)
    coeff = np.exp(-3.0 * rho) / np.square(point.c) \
        * point.p_s / state.eos.background_density
    curl_omega = gr.flat_curl(g, omega)
    adv_v = np.stack([gr.advect(g, grad_ent, state.v[i]) for i in range(3)])
    curl_mod = exp_m1 * curl_omega + coeff * (adv_v - div_v * grad_ent)

    exp_m2 = np.exp(-2.0 * rho)
    div_mod = exp_m2 * (gr.flat_div(g, grad_ent)
                        - gr.advect(g, grad_ent, rho))
    return DerivedState(omega=omega, grad_ent=grad_ent,
                        curl_mod=curl_mod, div_mod=div_mod)
