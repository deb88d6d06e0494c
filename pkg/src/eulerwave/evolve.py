"""First-order evolution used to manufacture verification solutions.

The first-order system, with B = d_t + v.grad the material derivative:

    B rho = -div v
    B v^i = -c^2 d_i rho - exp(-rho) (p_s / background_density) d_i s
    B s   = 0

Classical RK4 in time, the grid's central stencils in space.  A stack of
uniformly spaced slices supports 4th-order time differencing at its middle
slice; that is how every B-factor in the residual checks is produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as gr
from .errors import BlowupError, UsageError
from .grid import Grid
from .state import FluidState, compute_derived


def euler_rhs(state: FluidState):
    """Time derivatives (d_t rho, d_t v, d_t s) of the first-order system."""
    g = state.grid
    point = state.eos_point()
    c2 = np.square(point.c)
    ps_term = np.exp(-state.rho_log) * point.p_s / state.eos.background_density

    d_rho = -gr.advect(g, state.v, state.rho_log) - gr.flat_div(g, state.v)
    grad_rho = gr.gradient(g, state.rho_log)
    grad_s = gr.gradient(g, state.s)
    d_v = np.stack([
        -gr.advect(g, state.v, state.v[i]) - c2 * grad_rho[i] - ps_term * grad_s[i]
        for i in range(3)
    ])
    d_s = -gr.advect(g, state.v, state.s)
    return d_rho, d_v, d_s


def cfl_limit(state: FluidState) -> float:
    """Advisory step bound 0.25 h / max(|v| + c)."""
    speed = np.sqrt(np.sum(np.square(state.v), axis=0)) + state.eos_point().c
    return 0.25 * state.grid.h / float(np.max(speed))


def dissipation_filter(grid: Grid, f: np.ndarray, strength: float) -> np.ndarray:
    """8th-order periodic damping, f - strength * (h d)^8 f / 256 per axis.

    Removes only near-grid-scale content (gain 1 - strength at the Nyquist
    mode, 1 - O((kh)^8) for resolved modes).  Off by default everywhere; the
    identity checks run undamped.
    """
    weights = np.array([1.0, -8.0, 28.0, -56.0, 70.0, -56.0, 28.0, -8.0, 1.0])
    out = f.copy()
    for ax in range(f.ndim - 3, f.ndim):
        acc = np.zeros_like(f)
        for shift, w in zip(range(-4, 5), weights):
            acc += w * np.roll(f, shift, axis=ax)
        out -= (strength / 256.0) * acc
    return out


def rk4_step(state: FluidState, dt: float, damping: float = 0.0) -> FluidState:
    def shifted(k, w):
        return FluidState(state.grid, state.eos,
                          state.rho_log + w * k[0],
                          state.v + w * k[1],
                          state.s + w * k[2])

    k1 = euler_rhs(state)
    k2 = euler_rhs(shifted(k1, 0.5 * dt))
    k3 = euler_rhs(shifted(k2, 0.5 * dt))
    k4 = euler_rhs(shifted(k3, dt))
    rho = state.rho_log + (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    v = state.v + (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    s = state.s + (dt / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    if damping > 0.0:
        rho = dissipation_filter(state.grid, rho, damping)
        v = dissipation_filter(state.grid, v, damping)
        s = dissipation_filter(state.grid, s, damping)
    if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(v))
            and np.all(np.isfinite(s))):
        raise BlowupError("non-finite state after RK4 step")
    return FluidState(state.grid, state.eos, rho, v, s)


@dataclass
class SliceStack:
    """Odd number (>= 5) of consecutive slices at uniform spacing dt."""

    slices: list
    dt: float
    t_middle: float = 0.0

    def __post_init__(self):
        m = len(self.slices)
        if m < 5 or m % 2 == 0:
            raise UsageError("stack needs an odd number of slices, >= 5")
        if self.dt <= 0.0:
            raise UsageError("stack dt must be positive")
        g0, e0 = self.slices[0].grid, self.slices[0].eos
        if any(sl.grid is not g0 and sl.grid != g0 for sl in self.slices) or \
           any(sl.eos is not e0 for sl in self.slices):
            raise UsageError("all slices must share one grid and eos")

    @property
    def middle_index(self) -> int:
        return len(self.slices) // 2

    @property
    def middle(self) -> FluidState:
        return self.slices[self.middle_index]

    def window(self, values):
        """The centered 5 entries of a per-slice sequence."""
        if len(values) != len(self.slices):
            raise UsageError("need one value per slice")
        m = self.middle_index
        return [values[m - 2 + j] for j in range(5)]


def build_slice_stack(initial: FluidState, t_center: float, dt: float,
                      n_slices: int = 5) -> SliceStack:
    """Evolve from t=0 and record n_slices consecutive slices around t_center.

    The first recorded slice sits at t_center - (n_slices//2) * dt, reached
    by whole RK4 steps from t = 0; t_center must therefore be a multiple of
    dt at least (n_slices//2) * dt (checked to roundoff).
    """
    half = n_slices // 2
    if t_center < half * dt * (1.0 - 1e-9):
        raise UsageError("t_center must be at least (n_slices//2) * dt")
    steps_to_first = (t_center - half * dt) / dt
    k0 = round(steps_to_first)
    if abs(steps_to_first - k0) > 1e-8:
        raise UsageError("t_center must be an integer multiple of dt")

    state = initial
    for _ in range(k0):
        state = rk4_step(state, dt)
    slices = [state]
    for _ in range(n_slices - 1):
        state = rk4_step(state, dt)
        slices.append(state)
    return SliceStack(slices=slices, dt=dt, t_middle=t_center)


def material_derivative(stack: SliceStack, values) -> np.ndarray:
    """B f at the middle slice, for per-slice fields f (scalar-shaped arrays).

    Time part by the centered 5-point stencil, advection by the middle
    slice's velocity.
    """
    win = stack.window(values)
    mid = stack.middle
    return gr.time_derivative(win, stack.dt) + gr.advect(mid.grid, mid.v, win[2])


def material_derivative2(stack: SliceStack, values) -> np.ndarray:
    """B(B f) at the middle slice.

    Expanded with the product rule,

        BBf = d_t^2 f + d_t(v.grad f) + v.grad(d_t f) + v.grad(v.grad f),

    so that every time stencil is the centered 5-point one; two literal
    stencil applications would need a 9-slice stack for the same accuracy.
    """
    win = stack.window(values)
    mid = stack.middle
    g = mid.grid
    sl = stack.window(stack.slices)

    dtt = gr.second_time_derivative(win, stack.dt)
    adv_per_slice = [gr.advect(g, sl[j].v, win[j]) for j in range(5)]
    dt_adv = gr.time_derivative(adv_per_slice, stack.dt)
    dt_f = gr.time_derivative(win, stack.dt)
    adv_dt = gr.advect(g, mid.v, dt_f)
    adv_adv = gr.advect(g, mid.v, adv_per_slice[2])
    return dtt + dt_adv + adv_dt + adv_adv


@dataclass
class InitialDataSet:
    """Fundamental data plus the derived fields the wave-transport system needs."""

    rho_log: np.ndarray
    v: np.ndarray
    s: np.ndarray
    dt_rho: np.ndarray
    dt_v: np.ndarray
    omega: np.ndarray
    grad_ent: np.ndarray


def complete_initial_data(state: FluidState) -> InitialDataSet:
    """Extend (rho, v, s) at t=0 with time derivatives and derived fields."""
    d_rho, d_v, _ = euler_rhs(state)
    derived = compute_derived(state)
    return InitialDataSet(rho_log=state.rho_log, v=state.v, s=state.s,
                          dt_rho=d_rho, dt_v=d_v,
                          omega=derived.omega, grad_ent=derived.grad_ent)


def smooth_default_fixture(grid: Grid, eos, a: float = 0.05, b: float = 0.05,
                           d: float = 0.05) -> FluidState:
    """Smooth pre-shock data with nonzero vorticity and entropy gradient."""
    x1, x2, x3 = grid.meshgrid()
    rho = a * np.sin(x1) * np.cos(x2)
    v = np.stack([b * np.sin(x2), b * np.sin(x3), b * np.sin(x1)])
    s = d * np.cos(x1)
    return FluidState(grid, eos, rho, v, s)


def irrotational_isentropic_fixture(grid: Grid, eos, a: float = 0.05,
                                    s0: float = 0.0) -> FluidState:
    """v = grad(a sin x1 + a cos x2), s constant, small density wave."""
    x1, x2, _ = grid.meshgrid()
    rho = a * np.cos(x1)
    v = np.stack([a * np.cos(x1), -a * np.sin(x2), np.zeros_like(x1)])
    s = np.full_like(x1, s0)
    return FluidState(grid, eos, rho, v, s)


def make_fixture(name: str, grid: Grid, eos) -> FluidState:
    from .shock1d import default_plane_wave_state  # local import, no cycle at module load

    if name == "smooth-default":
        return smooth_default_fixture(grid, eos)
    if name == "constant":
        from .state import constant_state
        return constant_state(grid, eos, rho_log=0.1, v=(0.2, -0.1, 0.15), s=0.3)
    if name == "plane-wave":
        return default_plane_wave_state(grid, eos)
    raise UsageError(f"unknown fixture {name!r}")
