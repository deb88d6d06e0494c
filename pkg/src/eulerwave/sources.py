"""Source terms and residuals of the wave-transport-divergence-curl system.

The system treats the state array V = (rho, v, s, omega, grad_ent) with the
modified combinations curl_mod and div_mod, and consists of nine equation
groups:

    wave_v              box_g v^i   = -c^2 exp(2 rho) curl_mod^i + Qv^i + Lv^i
    wave_rho            box_g rho   = -exp(rho) (p_s/bg) div_mod + Qrho + Lrho
    transport_omega     B omega^i   = Lomega^i
    transport_s         B s         = 0
    transport_grad_ent  B S^i       = LS^i
    div_omega           div omega   = -omega . grad rho
    transport_curl_mod  B curl_mod^i = (three explicit derivative-quadratic
                                        lines) + Qc^i + Lc^i
    transport_div_mod   B div_mod   = 2 exp(-2rho){div v div S - dv:dS^T}
                                      + exp(-rho) curl(omega) . S + Qd
    curl_grad_ent       curl S      = 0

Every multiline right-hand side is assembled from one named function per
displayed line so a transcription slip is localizable by the per-line unit
tests.  Residuals are LHS - RHS with both sides on the same stencils, so
discrete cancellations (curl of a gradient, div of a curl) survive exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import grid as gr
from .errors import UsageError
from .evolve import SliceStack, material_derivative
from .metric import box_g, qg_field
from .state import DerivedState, FluidState, compute_derived


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """eps_{iab} A^a B^b componentwise."""
    return np.cross(a, b, axis=0)


@dataclass
class BFactors:
    """Material derivatives of the fields entering the right-hand sides."""

    b_rho: np.ndarray
    b_v: np.ndarray         # (3, ...)
    b_s: np.ndarray
    b_grad_ent: np.ndarray  # (3, ...)


def b_factors_from_stack(stack: SliceStack) -> BFactors:
    """B-factors by time differencing the stack (used by all residual checks;
    substituting the transport equations here would make them circular)."""
    rho = [sl.rho_log for sl in stack.slices]
    s = [sl.s for sl in stack.slices]
    grad_s = [gr.gradient(sl.grid, sl.s) for sl in stack.slices]
    return BFactors(
        b_rho=material_derivative(stack, rho),
        b_v=np.stack([material_derivative(stack, [sl.v[i] for sl in stack.slices])
                      for i in range(3)]),
        b_s=material_derivative(stack, s),
        b_grad_ent=np.stack([material_derivative(stack, [gs[i] for gs in grad_s])
                             for i in range(3)]),
    )


def b_factors_algebraic(state: FluidState, derived: DerivedState) -> BFactors:
    """B-factors via the first-order system itself (static, no stack).

    Only for structural probes where the right-hand side must be a function
    of (V, dV); residual verification uses :func:`b_factors_from_stack`.
    """
    g = state.grid
    point = state.eos_point()
    grad_rho = gr.gradient(g, state.rho_log)
    grad_s = gr.gradient(g, state.s)
    ps = np.exp(-state.rho_log) * point.p_s / state.eos.background_density
    b_v = np.stack([-np.square(point.c) * grad_rho[i] - ps * grad_s[i]
                    for i in range(3)])
    adv_sv = np.stack([gr.advect(g, derived.grad_ent, state.v[i])
                       for i in range(3)])
    b_grad_ent = -adv_sv + np.exp(state.rho_log) * _cross(derived.omega,
                                                          derived.grad_ent)
    return BFactors(
        b_rho=-gr.flat_div(g, state.v),
        b_v=b_v,
        b_s=np.zeros_like(state.s),
        b_grad_ent=b_grad_ent,
    )


@dataclass
class _Fields:
    """Shared geometric/thermodynamic factors for the source-term lines."""

    grid: object
    rho: np.ndarray
    v: np.ndarray
    S: np.ndarray            # entropy gradient
    omega: np.ndarray
    c: np.ndarray
    c_rho: np.ndarray
    c_s: np.ndarray
    ps: np.ndarray           # p_;s / background_density
    psr: np.ndarray          # p_;s;rho / background_density
    pss: np.ndarray          # p_;s;s / background_density
    dv: np.ndarray           # dv[a, i] = d_a v^i
    div_v: np.ndarray
    grad_rho: np.ndarray
    adv_S_v: np.ndarray      # S^a d_a v^i
    S_grad_rho: np.ndarray   # S^a d_a rho


def _fields(state: FluidState, derived: DerivedState) -> _Fields:
    g = state.grid
    point = state.eos_point()
    bg = state.eos.background_density
    dv = np.stack([gr.gradient(g, state.v[i]) for i in range(3)], axis=1)
    grad_rho = gr.gradient(g, state.rho_log)
    S = derived.grad_ent
    return _Fields(
        grid=g, rho=state.rho_log, v=state.v, S=S, omega=derived.omega,
        c=point.c, c_rho=point.c_rho, c_s=point.c_s,
        ps=point.p_s / bg, psr=point.p_s_rho / bg, pss=point.p_s_s / bg,
        dv=dv,
        div_v=np.einsum("aa...->...", dv),
        grad_rho=grad_rho,
        adv_S_v=np.einsum("a...,ai...->i...", S, dv),
        S_grad_rho=np.einsum("a...,a...->...", S, grad_rho),
    )


# --- the eight displayed lines of the curl_mod null form ---------------------

def _qc_prefactor(f: _Fields) -> np.ndarray:
    return np.exp(-3.0 * f.rho) / np.square(f.c) * f.ps


def qc_line_1(f: _Fields, bf: BFactors) -> np.ndarray:
    brace = np.einsum("ab...,ba...->...", f.dv, f.dv) - np.square(f.div_v)
    return _qc_prefactor(f) * f.S * brace


def qc_line_2(f: _Fields, bf: BFactors) -> np.ndarray:
    brace = np.einsum("...,b...,bi...->i...", f.div_v, f.S, f.dv) \
        - np.einsum("b...,bi...->i...", f.adv_S_v, f.dv)
    return _qc_prefactor(f) * brace


def qc_line_3(f: _Fields, bf: BFactors) -> np.ndarray:
    brace = f.S_grad_rho * bf.b_v - bf.b_rho * f.adv_S_v
    return 2.0 * _qc_prefactor(f) * brace


def qc_line_4(f: _Fields, bf: BFactors) -> np.ndarray:
    brace = f.S_grad_rho * bf.b_v - bf.b_rho * f.adv_S_v
    return 2.0 * _qc_prefactor(f) * (f.c_rho / f.c) * brace


def qc_line_5(f: _Fields, bf: BFactors) -> np.ndarray:
    brace = bf.b_rho * f.adv_S_v - f.S_grad_rho * bf.b_v
    return np.exp(-3.0 * f.rho) / np.square(f.c) * f.psr * brace


def qc_line_6(f: _Fields, bf: BFactors) -> np.ndarray:
    brace = np.einsum("a...,a...->...", bf.b_v, f.grad_rho) - f.div_v * bf.b_rho
    return np.exp(-3.0 * f.rho) / np.square(f.c) * f.psr * f.S * brace


def qc_line_7(f: _Fields, bf: BFactors) -> np.ndarray:
    brace = f.div_v * bf.b_rho - np.einsum("a...,a...->...", bf.b_v, f.grad_rho)
    return 2.0 * _qc_prefactor(f) * f.S * brace


def qc_line_8(f: _Fields, bf: BFactors) -> np.ndarray:
    brace = f.div_v * bf.b_rho - np.einsum("a...,a...->...", bf.b_v, f.grad_rho)
    return 2.0 * _qc_prefactor(f) * (f.c_rho / f.c) * f.S * brace


QC_LINES: tuple[Callable, ...] = (qc_line_1, qc_line_2, qc_line_3, qc_line_4,
                                  qc_line_5, qc_line_6, qc_line_7, qc_line_8)


# --- the three explicit lines of the curl_mod transport equation -------------

def bc_line_1(f: _Fields, dOmega: np.ndarray, bf: BFactors) -> np.ndarray:
    """-2 eps_{iab} exp(-rho)(d_a v^j) d_b omega^j
       + exp(-rho)(curl omega)^a d_a v^i."""
    exp_m1 = np.exp(-f.rho)
    lc = gr.LEVI_CIVITA
    first = -2.0 * exp_m1 * np.einsum("iab,aj...,bj...->i...", lc, f.dv, dOmega)
    curl_omega = np.einsum("ajk,jk...->a...", lc, dOmega)
    second = exp_m1 * np.einsum("a...,ai...->i...", curl_omega, f.dv)
    return first + second


def bc_line_2(f: _Fields, div_S: np.ndarray, bf: BFactors) -> np.ndarray:
    """exp(-3rho) c^-2 (p_s/bg) {(B S^a) d_a v^i - (B v^i) div S}."""
    brace = np.einsum("a...,ai...->i...", bf.b_grad_ent, f.dv) - bf.b_v * div_S
    return _qc_prefactor(f) * brace


def bc_line_3(f: _Fields, dS: np.ndarray, bf: BFactors) -> np.ndarray:
    """exp(-3rho) c^-2 (p_s/bg) {(B v^a) d_a S^i - (div v) B S^i}."""
    brace = np.einsum("a...,ai...->i...", bf.b_v, dS) - f.div_v * bf.b_grad_ent
    return _qc_prefactor(f) * brace


# --- assembled source terms ---------------------------------------------------

@dataclass
class SourceTerms:
    q_v: np.ndarray
    q_rho: np.ndarray
    q_curl_mod: np.ndarray
    q_div_mod: np.ndarray
    l_v: np.ndarray
    l_rho: np.ndarray
    l_omega: np.ndarray
    l_grad_ent: np.ndarray
    l_div_omega: np.ndarray
    l_curl_mod: np.ndarray


def source_terms(state: FluidState, derived: DerivedState,
                 bf) -> SourceTerms:
    """All ten source-term fields.  ``bf`` is a BFactors bundle or a
    SliceStack whose middle slice must be ``state``."""
    if isinstance(bf, SliceStack):
        if bf.middle is not state:
            raise UsageError("stack middle slice must be the given state")
        bf = b_factors_from_stack(bf)
    f = _fields(state, derived)
    g = f.grid
    exp_m1 = np.exp(-f.rho)
    exp_m3 = np.exp(-3.0 * f.rho)

    grad_v = [f.dv[:, i] for i in range(3)]
    q_v = np.stack([
        -(1.0 + f.c_rho / f.c)
        * qg_field(f.c, bf.b_rho, f.grad_rho, bf.b_v[i], grad_v[i])
        for i in range(3)
    ])

    q_rho = (-3.0 * (f.c_rho / f.c)
             * qg_field(f.c, bf.b_rho, f.grad_rho, bf.b_rho, f.grad_rho)
             + np.square(f.div_v)
             - np.einsum("ab...,ba...->...", f.dv, f.dv))

    q_curl_mod = sum(line(f, bf) for line in QC_LINES)

    q_div_mod = 2.0 * np.exp(-2.0 * f.rho) * (
        np.einsum("b...,b...->...", f.adv_S_v, f.grad_rho)
        - f.div_v * f.S_grad_rho)

    l_v = (2.0 * np.exp(f.rho) * _cross(bf.b_v, f.omega)
           - f.ps * _cross(f.omega, f.S)
           - 0.5 * exp_m1 * f.psr * f.adv_S_v
           - 2.0 * exp_m1 * (f.c_rho / f.c) * f.ps * bf.b_rho * f.S
           + exp_m1 * f.psr * bf.b_rho * f.S)

    l_rho = (-2.5 * exp_m1 * f.psr * f.S_grad_rho
             - exp_m1 * f.pss * np.einsum("a...,a...->...", f.S, f.S))

    l_omega = (np.einsum("a...,ai...->i...", f.omega, f.dv)
               - np.exp(-2.0 * f.rho) / np.square(f.c) * f.ps
               * _cross(bf.b_v, f.S))

    l_grad_ent = -f.adv_S_v + np.exp(f.rho) * _cross(f.omega, f.S)

    l_div_omega = -gr.advect(g, f.omega, f.rho)

    s_dot_s = np.einsum("a...,a...->...", f.S, f.S)
    s_dot_bv = np.einsum("a...,a...->...", f.S, bf.b_v)
    l_curl_mod = (2.0 * exp_m3 * (f.c_s / np.power(f.c, 3)) * f.ps
                  * (bf.b_v * s_dot_s - s_dot_bv * f.S)
                  - exp_m3 / np.square(f.c) * f.pss
                  * (bf.b_v * s_dot_s - s_dot_bv * f.S))

    return SourceTerms(q_v=q_v, q_rho=q_rho, q_curl_mod=q_curl_mod,
                       q_div_mod=q_div_mod, l_v=l_v, l_rho=l_rho,
                       l_omega=l_omega, l_grad_ent=l_grad_ent,
                       l_div_omega=l_div_omega, l_curl_mod=l_curl_mod)


# --- per-equation right-hand sides -------------------------------------------

def wave_rhs(state: FluidState, derived: DerivedState, bf: BFactors,
             terms: SourceTerms | None = None):
    if terms is None:
        terms = source_terms(state, derived, bf)
    point = state.eos_point()
    rhs_v = (-np.square(point.c) * np.exp(2.0 * state.rho_log) * derived.curl_mod
             + terms.q_v + terms.l_v)
    rhs_rho = (-np.exp(state.rho_log)
               * point.p_s / state.eos.background_density * derived.div_mod
               + terms.q_rho + terms.l_rho)
    return rhs_v, rhs_rho


def curl_mod_rhs(state: FluidState, derived: DerivedState,
                 bf: BFactors) -> np.ndarray:
    f = _fields(state, derived)
    g = f.grid
    dOmega = np.stack([gr.gradient(g, derived.omega[i]) for i in range(3)], axis=1)
    dS = np.stack([gr.gradient(g, f.S[i]) for i in range(3)], axis=1)
    div_S = np.einsum("aa...->...", dS)
    terms = source_terms(state, derived, bf)
    return (bc_line_1(f, dOmega, bf) + bc_line_2(f, div_S, bf)
            + bc_line_3(f, dS, bf) + terms.q_curl_mod + terms.l_curl_mod)


def div_mod_rhs(state: FluidState, derived: DerivedState,
                bf: BFactors) -> np.ndarray:
    f = _fields(state, derived)
    g = f.grid
    dS = np.stack([gr.gradient(g, f.S[i]) for i in range(3)], axis=1)
    div_S = np.einsum("aa...->...", dS)
    curl_omega = gr.flat_curl(g, derived.omega)
    terms = source_terms(state, derived, bf)
    return (2.0 * np.exp(-2.0 * f.rho)
            * (f.div_v * div_S - np.einsum("ab...,ba...->...", f.dv, dS))
            + np.exp(-f.rho) * np.einsum("a...,a...->...", curl_omega, f.S)
            + terms.q_div_mod)


# --- residuals ----------------------------------------------------------------

def wave_residuals(stack: SliceStack) -> dict:
    mid = stack.middle
    derived = compute_derived(mid)
    bf = b_factors_from_stack(stack)
    rhs_v, rhs_rho = wave_rhs(mid, derived, bf)
    res_v = np.stack([
        box_g(stack, [sl.v[i] for sl in stack.slices]) - rhs_v[i]
        for i in range(3)
    ])
    res_rho = box_g(stack, [sl.rho_log for sl in stack.slices]) - rhs_rho
    return {"wave_v": res_v, "wave_rho": res_rho}


def transport_residuals(stack: SliceStack) -> dict:
    mid = stack.middle
    g = mid.grid
    derived = compute_derived(mid)
    bf = b_factors_from_stack(stack)
    terms = source_terms(mid, derived, bf)

    omega_slices = [np.exp(-sl.rho_log) * gr.flat_curl(g, sl.v)
                    for sl in stack.slices]
    grad_s_slices = [gr.gradient(g, sl.s) for sl in stack.slices]

    res_omega = np.stack([
        material_derivative(stack, [om[i] for om in omega_slices])
        - terms.l_omega[i] for i in range(3)
    ])
    res_s = material_derivative(stack, [sl.s for sl in stack.slices])
    res_grad_ent = np.stack([
        material_derivative(stack, [gs[i] for gs in grad_s_slices])
        - terms.l_grad_ent[i] for i in range(3)
    ])
    return {"transport_omega": res_omega, "transport_s": res_s,
            "transport_grad_ent": res_grad_ent}


def divcurl_residuals(stack: SliceStack) -> dict:
    mid = stack.middle
    g = mid.grid
    derived = compute_derived(mid)
    bf = b_factors_from_stack(stack)
    terms = source_terms(mid, derived, bf)

    per_slice = [compute_derived(sl) for sl in stack.slices]
    res_div_omega = gr.flat_div(g, derived.omega) - terms.l_div_omega
    res_curl_mod = np.stack([
        material_derivative(stack, [d.curl_mod[i] for d in per_slice])
        for i in range(3)
    ]) - curl_mod_rhs(mid, derived, bf)
    res_div_mod = material_derivative(stack, [d.div_mod for d in per_slice]) \
        - div_mod_rhs(mid, derived, bf)
    res_curl_grad_ent = gr.flat_curl(g, derived.grad_ent)
    return {"div_omega": res_div_omega, "transport_curl_mod": res_curl_mod,
            "transport_div_mod": res_div_mod,
            "curl_grad_ent": res_curl_grad_ent}


EQUATION_IDS = (
    "wave_v", "wave_rho", "transport_omega", "transport_s",
    "transport_grad_ent", "div_omega", "transport_curl_mod",
    "transport_div_mod", "curl_grad_ent",
)


def all_residuals(stack: SliceStack) -> dict:
    """Residual fields for the nine equation groups, keyed by EQUATION_IDS."""
    out = {}
    out.update(wave_residuals(stack))
    out.update(transport_residuals(stack))
    out.update(divcurl_residuals(stack))
    return out


# --- term catalog ---------------------------------------------------------------

@dataclass
class CatalogTerm:
    term_id: str
    equation: str
    klass: str                 # 'i' | 'ii' | 'iii'
    diff_vars: tuple           # variables whose derivatives the term carries
    scaling_exponent: int      # expected frequency response order in (v, rho)
    evaluator: Callable | None = None


def _eval_l_v_omega_grad_ent(state, derived):
    ps = state.eos_point().p_s / state.eos.background_density
    return -ps * _cross(derived.omega, derived.grad_ent)


def _eval_l_rho_grad_ent_sq(state, derived):
    point = state.eos_point()
    pss = point.p_s_s / state.eos.background_density
    S = derived.grad_ent
    return -np.exp(-state.rho_log) * pss * np.einsum("a...,a...->...", S, S)


def _eval_l_grad_ent_rotation(state, derived):
    return np.exp(state.rho_log) * _cross(derived.omega, derived.grad_ent)


def term_catalog() -> list[CatalogTerm]:
    """Every right-hand-side term of the system, classified.

    Classes: (i) multiplicative in (omega, grad_ent) with no derivative
    factors, vanishing when both are zero; (ii) linear in the derivatives of
    the unknowns; (iii) a standard null form of the acoustical metric (up to
    a smooth factor).
    """
    t = []

    def add(term_id, equation, klass, diff_vars, exponent, evaluator=None):
        t.append(CatalogTerm(term_id, equation, klass, tuple(diff_vars),
                             exponent, evaluator))

    # wave_v
    add("curl_mod_source", "wave_v", "ii", ("omega", "v"), 1)
    add("q_v", "wave_v", "iii", ("rho", "v"), 1)
    add("l_v_bv_omega", "wave_v", "ii", ("v",), 1)
    add("l_v_omega_grad_ent", "wave_v", "i", (), 0, _eval_l_v_omega_grad_ent)
    add("l_v_adv_psr", "wave_v", "ii", ("v",), 1)
    add("l_v_brho_ps", "wave_v", "ii", ("rho",), 1)
    add("l_v_brho_psr", "wave_v", "ii", ("rho",), 1)
    # wave_rho
    add("div_mod_source", "wave_rho", "ii", ("grad_ent",), 0)
    add("q_rho_qg", "wave_rho", "iii", ("rho",), 1)
    add("q_rho_divv", "wave_rho", "iii", ("v",), 1)
    add("l_rho_cross", "wave_rho", "ii", ("rho",), 1)
    add("l_rho_grad_ent_sq", "wave_rho", "i", (), 0, _eval_l_rho_grad_ent_sq)
    # transport_omega
    add("l_omega_stretch", "transport_omega", "ii", ("v",), 1)
    add("l_omega_bv", "transport_omega", "ii", ("v",), 1)
    # transport_grad_ent
    add("l_grad_ent_adv", "transport_grad_ent", "ii", ("v",), 1)
    add("l_grad_ent_rotation", "transport_grad_ent", "i", (), 0,
        _eval_l_grad_ent_rotation)
    # div_omega
    add("l_div_omega", "div_omega", "ii", ("rho",), 1)
    # transport_curl_mod
    add("bc_line_1", "transport_curl_mod", "iii", ("v", "omega"), 1)
    add("bc_line_2", "transport_curl_mod", "iii", ("v", "grad_ent"), 1)
    add("bc_line_3", "transport_curl_mod", "iii", ("v", "grad_ent"), 1)
    for j in range(1, 9):
        add(f"qc_line_{j}", "transport_curl_mod", "iii", ("v", "rho"), 1)
    add("l_c_cs_bv", "transport_curl_mod", "ii", ("v",), 1)
    add("l_c_cs_proj", "transport_curl_mod", "ii", ("v",), 1)
    add("l_c_pss_bv", "transport_curl_mod", "ii", ("v",), 1)
    add("l_c_pss_proj", "transport_curl_mod", "ii", ("v",), 1)
    # transport_div_mod
    add("bd_divv_divS", "transport_div_mod", "iii", ("v", "grad_ent"), 1)
    add("bd_curl_omega", "transport_div_mod", "ii", ("omega",), 0)
    add("q_d", "transport_div_mod", "iii", ("v", "rho"), 1)
    return t


# --- frequency-scaling probe -----------------------------------------------------

PROBE_EQUATIONS = ("transport_curl_mod", "div_omega", "control")


def _probe_rhs(equation: str, state: FluidState,
               derived: DerivedState) -> np.ndarray:
    bf = b_factors_algebraic(state, derived)
    if equation == "transport_curl_mod":
        return curl_mod_rhs(state, derived, bf)
    if equation == "div_omega":
        terms = source_terms(state, derived, bf)
        return terms.l_div_omega
    if equation == "control":
        g = state.grid
        d2 = gr.partial_derivative(g, gr.partial_derivative(g, state.v[0], 1), 1)
        return np.exp(-state.rho_log) * d2
    raise UsageError(f"unknown probe equation {equation!r}")


def frequency_scaling_probe(equation: str, base_state: FluidState,
                            k: int, eps: float = 1e-4,
                            perturb: str = "v") -> float:
    """Measured log2 response ratio of an equation RHS at wavenumbers k, 2k.

    The perturbed variable (v^1 or rho) gets eps*sin(k x^1) added; the
    derived fields omega and grad_ent are held at their base values so the
    measured exponent reflects the derivative order of the perturbed
    variable alone (1 = at most first derivatives appear).
    """
    n = base_state.grid.n
    if not 1 <= k <= n // 8:
        raise UsageError(f"wavenumber k must satisfy 1 <= k <= n/8 = {n // 8}")
    if perturb not in ("v", "rho"):
        raise UsageError("perturb must be 'v' or 'rho'")

    derived = compute_derived(base_state)
    base = _probe_rhs(equation, base_state, derived)
    x1 = base_state.grid.meshgrid()[0]

    responses = []
    for kk in (k, 2 * k):
        delta = eps * np.sin(kk * x1)
        pert = base_state.copy()
        if perturb == "v":
            pert.v[0] += delta
        else:
            pert.rho_log += delta
        responses.append(gr.sup_norm(_probe_rhs(equation, pert, derived) - base))
    if responses[0] == 0.0:
        raise UsageError("probe response vanished; equation insensitive "
                         f"to {perturb!r} perturbations")
    return float(np.log2(responses[1] / responses[0]))
