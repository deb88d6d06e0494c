"""Null frames of the acoustical metric, frame coefficients and null forms.

A null frame {L, uL, e1, e2} satisfies g(L,L) = g(uL,uL) = 0, g(L,uL) = -2,
g(L,e_A) = g(uL,e_A) = 0 and g(e_A,e_B) = delta_AB.  Frames are built from a
Euclidean unit direction n as L = B + c*n, uL = B - c*n, e_A = c*m_A with
{m_1, m_2} completing n to an orthonormal triple; in plane symmetry with
n = (1,0,0) this reduces to the familiar pair d_t + (v^1 +- c) d_1.

Frame ordering for coefficient matrices is A = 1..4 = (e1, e2, uL, L); the
transversal diagonal entries checked by the strong-null criterion are the
(uL,uL) and (L,L) ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericError, UsageError
from .metric import MetricPoint, transport_vector

N_STATE = 11  # (rho, v1, v2, v3, s, omega1..3, grad_ent1..3)


@dataclass
class NullFrame:
    L: np.ndarray
    uL: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    point: MetricPoint

    def vectors(self) -> np.ndarray:
        """Columns in coefficient order (e1, e2, uL, L); shape (4, 4) as [alpha, A]."""
        return np.stack([self.e1, self.e2, self.uL, self.L], axis=1)


def _orthonormal_complement(n_hat: np.ndarray):
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(n_hat)))] = 1.0
    m1 = np.cross(axis, n_hat)
    m1 /= np.linalg.norm(m1)
    m2 = np.cross(n_hat, m1)
    return m1, m2


def build_null_frame(point: MetricPoint, n_hat) -> NullFrame:
    n_hat = np.asarray(n_hat, dtype=float)
    if n_hat.shape != (3,) or abs(np.linalg.norm(n_hat) - 1.0) > 1e-10:
        raise UsageError("n_hat must be a Euclidean unit 3-vector")
    b = transport_vector(point)
    n_vec = np.concatenate(([0.0], point.c * n_hat))
    m1, m2 = _orthonormal_complement(n_hat)
    e1 = np.concatenate(([0.0], point.c * m1))
    e2 = np.concatenate(([0.0], point.c * m2))
    return NullFrame(L=b + n_vec, uL=b - n_vec, e1=e1, e2=e2, point=point)


def frame_residuals(frame: NullFrame) -> dict:
    """Absolute residuals of the five defining relations."""
    g = frame.point.g

    def ip(x, y):
        return float(x @ g @ y)

    res = {
        "LL": abs(ip(frame.L, frame.L)),
        "uLuL": abs(ip(frame.uL, frame.uL)),
        "LuL": abs(ip(frame.L, frame.uL) + 2.0),
        "orth": max(abs(ip(frame.L, frame.e1)), abs(ip(frame.L, frame.e2)),
                    abs(ip(frame.uL, frame.e1)), abs(ip(frame.uL, frame.e2)),
                    abs(ip(frame.e1, frame.e2))),
        "unit": max(abs(ip(frame.e1, frame.e1) - 1.0),
                    abs(ip(frame.e2, frame.e2) - 1.0)),
    }
    res["max"] = max(res.values())
    return res


def frame_coefficients(frame: NullFrame) -> np.ndarray:
    """M[alpha, A] with d_alpha = sum_A M[alpha, A] e_A (A ordered e1,e2,uL,L)."""
    e = frame.vectors()
    cond = np.linalg.cond(e)
    if not np.isfinite(cond) or cond > 1e12:
        raise NumericError(f"degenerate frame, condition number {cond:.3e}")
    return np.linalg.solve(e, np.eye(4)).T


def reconstruction_residual(frame: NullFrame, m: np.ndarray) -> float:
    e = frame.vectors()
    return float(np.max(np.abs(m @ e.T - np.eye(4))))


def null_form_qg(point: MetricPoint, dphi, dpsi) -> float:
    """Qg(d phi, d psi) = (g^-1)^{ab} d_a phi d_b psi."""
    dphi = np.asarray(dphi, dtype=float)
    dpsi = np.asarray(dpsi, dtype=float)
    return float(dphi @ point.g_inv @ dpsi)


def null_form_qab(alpha: int, beta: int, dphi, dpsi) -> float:
    """Antisymmetric null form d_a phi d_b psi - d_a psi d_b phi."""
    return float(dphi[alpha] * dpsi[beta] - dpsi[alpha] * dphi[beta])


def qg_frame_expansion(frame: NullFrame, dphi, dpsi) -> float:
    """Qg evaluated through the frame: -1/2 (L phi uL psi + uL phi L psi) + sum e_A."""
    def d(vec, df):
        return float(np.asarray(df) @ vec)

    return (-0.5 * (d(frame.L, dphi) * d(frame.uL, dpsi)
                    + d(frame.uL, dphi) * d(frame.L, dpsi))
            + d(frame.e1, dphi) * d(frame.e1, dpsi)
            + d(frame.e2, dphi) * d(frame.e2, dpsi))


def decompose_inverse_metric(frame: NullFrame) -> np.ndarray:
    """g^-1 = -1/2 (L (x) uL + uL (x) L) + e1 (x) e1 + e2 (x) e2."""
    return (-0.5 * (np.outer(frame.L, frame.uL) + np.outer(frame.uL, frame.L))
            + np.outer(frame.e1, frame.e1) + np.outer(frame.e2, frame.e2))


@dataclass
class QuadraticTerm:
    """Derivative-quadratic term N = f(V)^{ab}_{TG} d_a V^T d_b V^G.

    ``coeff(V, point)`` returns the (4, 4, 11, 11) tensor, symmetric under
    the simultaneous swap (a,T) <-> (b,G).
    """

    name: str
    coeff: Callable[[np.ndarray, MetricPoint], np.ndarray]


def _pair_delta(theta: int, gamma_: int, sign: int = 1) -> np.ndarray:
    d = np.zeros((N_STATE, N_STATE))
    d[theta, gamma_] += 1.0
    d[gamma_, theta] += float(sign)
    return 0.5 * d if sign == 1 else d


def qg_term(theta: int, gamma_: int) -> QuadraticTerm:
    sym = _pair_delta(theta, gamma_, sign=1)

    def coeff(V, point):
        return np.einsum("ab,tg->abtg", point.g_inv, sym)

    return QuadraticTerm(name=f"qg[{theta},{gamma_}]", coeff=coeff)


def qab_term(alpha: int, beta: int, theta: int, gamma_: int) -> QuadraticTerm:
    if alpha == beta:
        raise UsageError("antisymmetric null form needs alpha != beta")

    def coeff(V, point):
        f = np.zeros((4, 4, N_STATE, N_STATE))
        f[alpha, beta, theta, gamma_] += 0.5
        f[alpha, beta, gamma_, theta] -= 0.5
        f[beta, alpha, gamma_, theta] += 0.5
        f[beta, alpha, theta, gamma_] -= 0.5
        return f

    return QuadraticTerm(name=f"qab[{alpha},{beta};{theta},{gamma_}]", coeff=coeff)


def time_derivative_squared_term(theta: int) -> QuadraticTerm:
    """(d_t V^theta)^2 - a non-null control that must fail the check."""

    def coeff(V, point):
        f = np.zeros((4, 4, N_STATE, N_STATE))
        f[0, 0, theta, theta] = 1.0
        return f

    return QuadraticTerm(name=f"dt_squared[{theta}]", coeff=coeff)


@dataclass
class StrongNullReport:
    diag_uLuL: float
    diag_LL: float
    expansion_residual: float
    passed: bool


def strong_null_check(term: QuadraticTerm, frame: NullFrame, V: np.ndarray,
                      dV: np.ndarray, tol: float = 1e-10) -> StrongNullReport:
    """Direct criterion: the frame-contracted (uL,uL) and (L,L) diagonal
    coefficients must vanish; also verifies the full frame expansion against
    the Cartesian value of the term on the supplied derivative sample dV
    (shape (4, 11), entries d_alpha V^Theta).
    """
    f = term.coeff(V, frame.point)
    m = frame_coefficients(frame)
    diag_ul = float(np.max(np.abs(np.einsum("abtg,a,b->tg", f, m[:, 2], m[:, 2]))))
    diag_l = float(np.max(np.abs(np.einsum("abtg,a,b->tg", f, m[:, 3], m[:, 3]))))

    e = frame.vectors()                     # e[alpha, A]
    frame_dv = np.einsum("aA,at->At", e, dV)  # e_A V^Theta
    cart = float(np.einsum("abtg,at,bg->", f, dV, dV))
    expanded = float(np.einsum("abtg,aA,bB,At,Bg->", f, m, m, frame_dv, frame_dv))
    return StrongNullReport(
        diag_uLuL=diag_ul,
        diag_LL=diag_l,
        expansion_residual=abs(expanded - cart),
        passed=(diag_ul <= tol and diag_l <= tol),
    )


def standard_null_form_terms(theta: int = 0, gamma_: int = 1):
    """Qg plus the six antisymmetric forms, for one (Theta, Gamma) pairing."""
    terms = [qg_term(theta, gamma_)]
    for a in range(4):
        for b in range(a + 1, 4):
            terms.append(qab_term(a, b, theta, gamma_))
    return terms
