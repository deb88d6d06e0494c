"""Acoustical metric algebra and the covariant wave operator.

The Lorentzian metric governing sound propagation, in Cartesian components
(indices 0..3, index 0 = time):

    g_00 = -1 + |v|^2/c^2      g_0a = -v^a/c^2      g_ab = delta_ab/c^2
    (g^-1)^00 = -1             (g^-1)^0a = -v^a     (g^-1)^ab = c^2 delta_ab - v^a v^b

so that g^-1 = -B (x) B + c^2 sum_a d_a (x) d_a with B = (1, v), det g = -c^-6,
and B is g-orthogonal to the constant-time slices with g(B, B) = -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as gr
from .errors import DomainError, UsageError
from .evolve import SliceStack, material_derivative, material_derivative2


@dataclass
class MetricPoint:
    g: np.ndarray       # (4, 4)
    g_inv: np.ndarray   # (4, 4)
    c: float
    v: np.ndarray       # (3,)


def metric_at(c, v) -> MetricPoint:
    """Assemble g and g^-1 componentwise at one point.

    ``c`` is the sound speed, or anything with a ``.c`` attribute (an EOS
    evaluation point).
    """
    c = float(getattr(c, "c", c))
    if not np.isfinite(c) or c <= 0.0:
        raise DomainError("metric needs sound speed c > 0")
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise UsageError("velocity at a point must be a 3-vector")

    inv_c2 = 1.0 / (c * c)
    g = np.empty((4, 4))
    g[0, 0] = -1.0 + inv_c2 * float(v @ v)
    g[0, 1:] = -inv_c2 * v
    g[1:, 0] = -inv_c2 * v
    g[1:, 1:] = inv_c2 * np.eye(3)

    g_inv = np.empty((4, 4))
    g_inv[0, 0] = -1.0
    g_inv[0, 1:] = -v
    g_inv[1:, 0] = -v
    g_inv[1:, 1:] = c * c * np.eye(3) - np.outer(v, v)
    return MetricPoint(g=g, g_inv=g_inv, c=float(c), v=v)


def transport_vector(point: MetricPoint) -> np.ndarray:
    """B = (1, v^1, v^2, v^3), the material derivative as a spacetime vector."""
    return np.concatenate(([1.0], point.v))


def check_transport_vector(point: MetricPoint) -> dict:
    """Residuals of g(B,B) = -1 and g(B, d_i) = 0, i = 1..3."""
    b = transport_vector(point)
    bb = float(b @ point.g @ b)
    orth = point.g[1:, :] @ b
    return {
        "bb_residual": abs(bb + 1.0),
        "orthogonality_residual": float(np.max(np.abs(orth))),
        "future_directed": b[0] > 0.0,
    }


def metric_invariant_residuals(point: MetricPoint) -> dict:
    """Inverse, determinant and transport-vector residuals at one point."""
    inv_res = float(np.max(np.abs(point.g_inv @ point.g - np.eye(4))))
    det_res = abs(float(np.linalg.det(point.g)) + point.c ** -6)
    rep = check_transport_vector(point)
    return {
        "inverse_residual": inv_res,
        "det_residual": det_res,
        "bb_residual": rep["bb_residual"],
        "orthogonality_residual": rep["orthogonality_residual"],
    }


def qg_field(c: np.ndarray, b_f: np.ndarray, grad_f: np.ndarray,
             b_g: np.ndarray, grad_g: np.ndarray) -> np.ndarray:
    """(g^-1)^{ab} d_a f d_b g as fields, via g^-1 = -B(x)B + c^2 sum d_a(x)d_a."""
    spatial = sum(grad_f[a] * grad_g[a] for a in range(3))
    return -b_f * b_g + np.square(c) * spatial


def box_g(stack: SliceStack, phi_slices) -> np.ndarray:
    """Covariant wave operator on a scalar field, at the middle slice.

    Expanded Cartesian form:

        box phi = -BB phi + c^2 lap phi
                  + 2 c^-1 c_rho (B rho) (B phi) - (div v) (B phi)
                  - c^-1 c_rho Qg(d rho, d phi)
                  - c c_s S^a d_a phi + 3 c^-1 c_s (B s) (B phi)

    with Qg the g^-1 contraction of the two gradients.  Needs >= 5 slices.
    """
    mid = stack.middle
    g = mid.grid
    point = mid.eos_point()
    c = point.c

    phi_mid = stack.window(phi_slices)[2]
    b_phi = material_derivative(stack, phi_slices)
    bb_phi = material_derivative2(stack, phi_slices)
    b_rho = material_derivative(stack, [sl.rho_log for sl in stack.slices])
    b_s = material_derivative(stack, [sl.s for sl in stack.slices])

    grad_phi = gr.gradient(g, phi_mid)
    grad_rho = gr.gradient(g, mid.rho_log)
    grad_s = gr.gradient(g, mid.s)
    div_v = gr.flat_div(g, mid.v)

    qg_rho_phi = qg_field(c, b_rho, grad_rho, b_phi, grad_phi)
    lap_phi = gr.laplacian(g, phi_mid)

    return (-bb_phi
            + np.square(c) * lap_phi
            + 2.0 * (point.c_rho / c) * b_rho * b_phi
            - div_v * b_phi
            - (point.c_rho / c) * qg_rho_phi
            - c * point.c_s * sum(grad_s[a] * grad_phi[a] for a in range(3))
            + 3.0 * (point.c_s / c) * b_s * b_phi)


def box_g_divergence_form(stack: SliceStack, phi_slices) -> np.ndarray:
    """Independent discretization of box phi straight from its definition,

        box phi = |det g|^{-1/2} d_alpha( |det g|^{1/2} (g^-1)^{alpha beta} d_beta phi ),

    using sqrt|det g| = c^-3.  The flux time component is -c^-3 B phi per
    slice, so the time derivative stencil needs B phi away from the middle:
    a 9-slice stack keeps every stencil centered.
    """
    if len(stack.slices) < 9:
        raise UsageError("divergence-form wave operator needs >= 9 slices")
    m = stack.middle_index
    g = stack.middle.grid

    def flux(j: int):
        sl = stack.slices[j]
        sub = SliceStack(stack.slices[j - 2:j + 3], stack.dt)
        b_phi = material_derivative(sub, phi_slices[j - 2:j + 3])
        c = sl.eos_point().c
        c3 = c ** -3
        grad_phi = gr.gradient(g, phi_slices[j])
        j0 = -c3 * b_phi
        jspace = [-c3 * sl.v[a] * b_phi + grad_phi[a] / c for a in range(3)]
        return j0, jspace

    j0s, jspaces = [], []
    for j in range(m - 2, m + 3):
        j0, jspace = flux(j)
        j0s.append(j0)
        jspaces.append(jspace)

    dt_j0 = gr.time_derivative(j0s, stack.dt)
    div_space = sum(gr.partial_derivative(g, jspaces[2][a], a + 1) for a in range(3))
    c_mid = stack.middle.eos_point().c
    return np.power(c_mid, 3) * (dt_j0 + div_space)
